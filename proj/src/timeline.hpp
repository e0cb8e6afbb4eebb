#pragma once

#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vgkit {

enum class Role { Patient, Other };

enum class ClassLabel { AD, NonAD };

// Label strings used in every sidecar/report file.
const char* label_name(ClassLabel l);
ClassLabel label_from_string(const std::string& s);

// The five dialogue states. The enumerator order is canonical: it fixes the
// row/column order of transition matrices and the feature vector layout.
enum class VocState {
  PatientSpeech = 0,
  OtherSpeech = 1,
  JointTalk = 2,
  Pause = 3,
  SwitchingPause = 4,
};
inline constexpr int kNumVocStates = 5;
const char* voc_state_name(VocState s);

struct TurnRecord {
  std::string speaker_id;
  Role role = Role::Patient;
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<long> word_count;
};

struct Dialogue {
  std::string dialogue_id;
  std::optional<ClassLabel> label;
  std::vector<TurnRecord> turns;
  std::string audio_path;
};

// Throws ValidationError unless: at least one turn per role, every turn has
// end > start, turns sorted by start, and each speaker_id maps to one role.
void validate_dialogue(const Dialogue& d);

// JSONL ingestion. One turn object per line, lines grouped by dialogue_id:
//   {"dialogue_id": str, "speaker": str, "role": "patient"|"other",
//    "start_s": num, "end_s": num, "words": int?}
// Blank lines and '#' comment lines are skipped. Turns are sorted by start_s
// on return and every dialogue is validated.
std::vector<Dialogue> parse_turn_records(std::istream& in);

// Label sidecar: CSV `dialogue_id,label` with label in {ad, nonad}.
// Unknown dialogue ids are a validation error.
void apply_labels_csv(std::vector<Dialogue>& dialogues, std::istream& in);

std::string dialogues_to_jsonl(std::span<const Dialogue> dialogues);
std::string labels_to_csv(std::span<const Dialogue> dialogues);

struct EventSegment {
  VocState state = VocState::Pause;
  double start_s = 0.0;
  double end_s = 0.0;
  double duration() const { return end_s - start_s; }
};

inline constexpr double kDefaultMinEventSeconds = 0.05;

// Segments [first speech onset, last speech offset] into abutting vocalisation
// events. Instants with two or more active speakers are JointTalk; one active
// speaker maps to PatientSpeech/OtherSpeech by role; silence is a Pause when
// the nearest single speaker before and after the gap is the same speaker_id
// (JointTalk intervals are skipped when searching) and a SwitchingPause
// otherwise. Segments shorter than min_event_s are merged into the preceding
// segment, then consecutive equal states are coalesced. A short first segment
// has no predecessor and is kept.
std::vector<EventSegment> segment_events(const Dialogue& d,
                                         double min_event_s = kDefaultMinEventSeconds);

// Asserts the coverage invariant: abutting segments, no duplicates, positive
// durations. Throws ValidationError on violation.
void validate_segments(std::span<const EventSegment> segments, double tol = 1e-9);

// Per-class turn-taking aggregates over patient turns. Averages are per class
// participant (one patient per dialogue). Word-based fields are computed over
// participants that carry word counts; n_with_words records how many did.
struct ClassTurnStats {
  int n_dialogues = 0;
  int n_with_words = 0;
  double dialogue_duration_s = 0.0;        // summed over the class
  double avg_turn_duration_s = 0.0;        // total patient turn time / participants
  double total_turn_duration_s = 0.0;
  double normalised_total_turn_duration = 0.0;
  double avg_word_count = 0.0;
  double total_word_count = 0.0;
  double avg_words_per_minute = 0.0;
};

struct TurnStatsReport {
  std::optional<ClassTurnStats> ad;
  std::optional<ClassTurnStats> nonad;
};

// Scale constant applied to total-turn/total-dialogue duration ratios in the
// normalised row; documented in the CSV header.
inline constexpr double kNormalisedDurationScale = 10.0;

// Every dialogue must be labeled.
TurnStatsReport descriptive_stats(std::span<const Dialogue> corpus);

std::string turn_stats_csv(const TurnStatsReport& report);

}  // namespace vgkit
