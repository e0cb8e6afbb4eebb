#include "timeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "error.hpp"
#include "util.hpp"

namespace vgkit {

const char* label_name(ClassLabel l) {
  return l == ClassLabel::AD ? "ad" : "nonad";
}

ClassLabel label_from_string(const std::string& s) {
  if (s == "ad") return ClassLabel::AD;
  if (s == "nonad") return ClassLabel::NonAD;
  fail(Status::ValidationError, "unknown class label '" + s + "' (expected ad|nonad)");
}

const char* voc_state_name(VocState s) {
  switch (s) {
    case VocState::PatientSpeech: return "patient_speech";
    case VocState::OtherSpeech: return "other_speech";
    case VocState::JointTalk: return "joint_talk";
    case VocState::Pause: return "pause";
    case VocState::SwitchingPause: return "switching_pause";
  }
  return "?";
}

void validate_dialogue(const Dialogue& d) {
  if (d.turns.empty())
    fail(Status::ValidationError, "dialogue '" + d.dialogue_id + "' has no turns");
  bool has_patient = false, has_other = false;
  std::map<std::string, Role> roles;
  double prev_start = -1.0;
  for (const TurnRecord& t : d.turns) {
    if (!(t.end_s > t.start_s))
      fail(Status::ValidationError,
           "dialogue '" + d.dialogue_id + "': turn by '" + t.speaker_id +
               "' at start_s=" + format_double(t.start_s) + " has end_s <= start_s");
    if (t.start_s < 0)
      fail(Status::ValidationError,
           "dialogue '" + d.dialogue_id + "': turn by '" + t.speaker_id + "' has negative start_s");
    if (t.start_s < prev_start)
      fail(Status::ValidationError, "dialogue '" + d.dialogue_id + "': turns not sorted by start_s");
    prev_start = t.start_s;
    auto [it, inserted] = roles.emplace(t.speaker_id, t.role);
    if (!inserted && it->second != t.role)
      fail(Status::ValidationError,
           "dialogue '" + d.dialogue_id + "': speaker '" + t.speaker_id + "' has inconsistent roles");
    (t.role == Role::Patient ? has_patient : has_other) = true;
  }
  if (!has_patient || !has_other)
    fail(Status::ValidationError,
         "dialogue '" + d.dialogue_id + "' needs at least one patient and one other turn");
}

std::vector<Dialogue> parse_turn_records(std::istream& in) {
  std::vector<Dialogue> out;
  std::set<std::string> closed_ids;
  std::string line;
  int line_no = 0;
  while (next_data_line(in, line, line_no)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(Status::ParseError, "line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    TurnRecord turn;
    std::string dialogue_id;
    try {
      dialogue_id = j.at("dialogue_id").get<std::string>();
      turn.speaker_id = j.at("speaker").get<std::string>();
      std::string role = j.at("role").get<std::string>();
      if (role == "patient") {
        turn.role = Role::Patient;
      } else if (role == "other") {
        turn.role = Role::Other;
      } else {
        fail(Status::ValidationError,
             "line " + std::to_string(line_no) + ": unknown role '" + role + "'");
      }
      turn.start_s = j.at("start_s").get<double>();
      turn.end_s = j.at("end_s").get<double>();
      if (j.contains("words")) {
        long w = j.at("words").get<long>();
        if (w < 0)
          fail(Status::ValidationError, "line " + std::to_string(line_no) + ": negative word count");
        turn.word_count = w;
      }
    } catch (const nlohmann::json::exception& e) {
      fail(Status::ParseError,
           "line " + std::to_string(line_no) + ": missing or mistyped field: " + e.what());
    }
    if (!(turn.end_s > turn.start_s))
      fail(Status::ValidationError,
           "line " + std::to_string(line_no) + ": turn by '" + turn.speaker_id +
               "' in dialogue '" + dialogue_id + "' has end_s <= start_s");

    if (out.empty() || out.back().dialogue_id != dialogue_id) {
      if (closed_ids.count(dialogue_id))
        fail(Status::ValidationError,
             "line " + std::to_string(line_no) + ": dialogue '" + dialogue_id +
                 "' is not contiguous in the stream");
      if (!out.empty()) closed_ids.insert(out.back().dialogue_id);
      Dialogue d;
      d.dialogue_id = dialogue_id;
      out.push_back(std::move(d));
    }
    if (j.contains("audio_path")) out.back().audio_path = j.at("audio_path").get<std::string>();
    out.back().turns.push_back(std::move(turn));
  }
  for (Dialogue& d : out) {
    std::stable_sort(d.turns.begin(), d.turns.end(),
                     [](const TurnRecord& a, const TurnRecord& b) { return a.start_s < b.start_s; });
    validate_dialogue(d);
  }
  return out;
}

void apply_labels_csv(std::vector<Dialogue>& dialogues, std::istream& in) {
  std::map<std::string, Dialogue*> by_id;
  for (Dialogue& d : dialogues) by_id[d.dialogue_id] = &d;
  std::string line;
  int line_no = 0;
  while (next_data_line(in, line, line_no)) {
    auto fields = split_csv(line);
    if (fields.size() == 2 && fields[0] == "dialogue_id" && fields[1] == "label")
      continue;  // header row
    if (fields.size() != 2)
      fail(Status::ParseError, "labels line " + std::to_string(line_no) + ": expected dialogue_id,label");
    auto it = by_id.find(fields[0]);
    if (it == by_id.end())
      fail(Status::ValidationError,
           "labels line " + std::to_string(line_no) + ": unknown dialogue_id '" + fields[0] + "'");
    it->second->label = label_from_string(fields[1]);
  }
}

std::string dialogues_to_jsonl(std::span<const Dialogue> dialogues) {
  std::string out;
  for (const Dialogue& d : dialogues) {
    for (const TurnRecord& t : d.turns) {
      nlohmann::ordered_json j;
      j["dialogue_id"] = d.dialogue_id;
      j["speaker"] = t.speaker_id;
      j["role"] = t.role == Role::Patient ? "patient" : "other";
      j["start_s"] = t.start_s;
      j["end_s"] = t.end_s;
      if (t.word_count) j["words"] = *t.word_count;
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

std::string labels_to_csv(std::span<const Dialogue> dialogues) {
  std::string out = "dialogue_id,label\n";
  for (const Dialogue& d : dialogues) {
    out += d.dialogue_id;
    out += ',';
    out += d.label ? label_name(*d.label) : "";
    out += '\n';
  }
  return out;
}

namespace {

// One elementary interval of the boundary sweep, annotated with who is
// speaking. speaker is meaningful only when n_active == 1.
struct RawInterval {
  double start = 0.0;
  double end = 0.0;
  int n_active = 0;
  std::string speaker;
  Role role = Role::Patient;
};

std::vector<RawInterval> sweep_intervals(const Dialogue& d) {
  std::vector<double> bounds;
  bounds.reserve(d.turns.size() * 2);
  for (const TurnRecord& t : d.turns) {
    bounds.push_back(t.start_s);
    bounds.push_back(t.end_s);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  std::vector<RawInterval> raw;
  for (size_t i = 0; i + 1 < bounds.size(); ++i) {
    RawInterval iv;
    iv.start = bounds[i];
    iv.end = bounds[i + 1];
    // Turns are half-open [start, end): a turn ending exactly at iv.start is
    // not active in the interval.
    std::set<std::string> active;
    for (const TurnRecord& t : d.turns) {
      if (t.start_s <= iv.start && iv.start < t.end_s) {
        if (active.insert(t.speaker_id).second && active.size() == 1) {
          iv.speaker = t.speaker_id;
          iv.role = t.role;
        }
      }
    }
    iv.n_active = static_cast<int>(active.size());
    raw.push_back(std::move(iv));
  }
  return raw;
}

// Nearest single-speaker interval before/after index i, skipping joint talk.
const RawInterval* nearest_single(const std::vector<RawInterval>& raw, size_t i, int step) {
  for (long j = static_cast<long>(i) + step; j >= 0 && j < static_cast<long>(raw.size()); j += step) {
    if (raw[static_cast<size_t>(j)].n_active == 1) return &raw[static_cast<size_t>(j)];
    // n_active == 0 cannot occur here: silence runs are maximal, so the scan
    // only ever crosses speech or joint talk.
  }
  return nullptr;
}

std::vector<EventSegment> coalesce(const std::vector<EventSegment>& in) {
  std::vector<EventSegment> out;
  for (const EventSegment& s : in) {
    if (!out.empty() && out.back().state == s.state) {
      out.back().end_s = s.end_s;
    } else {
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

std::vector<EventSegment> segment_events(const Dialogue& d, double min_event_s) {
  if (d.turns.empty())
    fail(Status::InsufficientData, "dialogue '" + d.dialogue_id + "' has no turns to segment");
  if (!(min_event_s > 0))
    fail(Status::InvalidArgument, "min_event_s must be positive");

  std::vector<RawInterval> raw = sweep_intervals(d);

  // Coalesce consecutive empty intervals into single silence runs so that the
  // neighbour scan below sees maximal gaps.
  std::vector<RawInterval> runs;
  for (const RawInterval& iv : raw) {
    if (!runs.empty() && runs.back().n_active == 0 && iv.n_active == 0) {
      runs.back().end = iv.end;
    } else {
      runs.push_back(iv);
    }
  }

  std::vector<EventSegment> segs;
  segs.reserve(runs.size());
  for (size_t i = 0; i < runs.size(); ++i) {
    const RawInterval& iv = runs[i];
    EventSegment seg;
    seg.start_s = iv.start;
    seg.end_s = iv.end;
    if (iv.n_active >= 2) {
      seg.state = VocState::JointTalk;
    } else if (iv.n_active == 1) {
      seg.state = iv.role == Role::Patient ? VocState::PatientSpeech : VocState::OtherSpeech;
    } else {
      const RawInterval* prev = nearest_single(runs, i, -1);
      const RawInterval* next = nearest_single(runs, i, +1);
      seg.state = (prev && next && prev->speaker == next->speaker) ? VocState::Pause
                                                                   : VocState::SwitchingPause;
    }
    segs.push_back(seg);
  }

  segs = coalesce(segs);

  // Merge short segments into the preceding one, then re-normalise.
  std::vector<EventSegment> merged;
  for (const EventSegment& s : segs) {
    if (!merged.empty() && s.duration() < min_event_s - 1e-12) {
      merged.back().end_s = s.end_s;
    } else {
      merged.push_back(s);
    }
  }
  merged = coalesce(merged);
  return merged;
}

void validate_segments(std::span<const EventSegment> segments, double tol) {
  for (size_t i = 0; i < segments.size(); ++i) {
    if (!(segments[i].end_s > segments[i].start_s))
      fail(Status::ValidationError, "segment " + std::to_string(i) + " has nonpositive duration");
    if (i > 0) {
      if (std::abs(segments[i].start_s - segments[i - 1].end_s) > tol)
        fail(Status::ValidationError, "segments " + std::to_string(i - 1) + " and " +
                                          std::to_string(i) + " do not abut");
      if (segments[i].state == segments[i - 1].state)
        fail(Status::ValidationError, "consecutive segments share state at " + std::to_string(i));
    }
  }
}

namespace {

struct ClassAccumulator {
  int n_dialogues = 0;
  double dialogue_duration = 0.0;
  double turn_duration = 0.0;
  double words = 0.0;
  int n_with_words = 0;
  double wpm_sum = 0.0;
};

}  // namespace

TurnStatsReport descriptive_stats(std::span<const Dialogue> corpus) {
  ClassAccumulator acc[2];
  for (const Dialogue& d : corpus) {
    if (!d.label)
      fail(Status::ValidationError, "dialogue '" + d.dialogue_id + "' is unlabeled");
    ClassAccumulator& a = acc[d.label == ClassLabel::AD ? 0 : 1];
    a.n_dialogues += 1;
    double first = d.turns.front().start_s;
    double last = 0.0;
    double patient_time = 0.0;
    double counted_words = 0.0;
    double counted_time = 0.0;
    for (const TurnRecord& t : d.turns) {
      first = std::min(first, t.start_s);
      last = std::max(last, t.end_s);
      if (t.role != Role::Patient) continue;
      patient_time += t.end_s - t.start_s;
      if (t.word_count) {
        counted_words += static_cast<double>(*t.word_count);
        counted_time += t.end_s - t.start_s;
      }
    }
    a.dialogue_duration += last - first;
    a.turn_duration += patient_time;
    if (counted_time > 0) {
      a.n_with_words += 1;
      a.words += counted_words;
      a.wpm_sum += 60.0 * counted_words / counted_time;
    }
  }

  auto to_stats = [](const ClassAccumulator& a) -> std::optional<ClassTurnStats> {
    if (a.n_dialogues == 0) return std::nullopt;
    ClassTurnStats s;
    s.n_dialogues = a.n_dialogues;
    s.n_with_words = a.n_with_words;
    s.dialogue_duration_s = a.dialogue_duration;
    s.total_turn_duration_s = a.turn_duration;
    s.avg_turn_duration_s = a.turn_duration / a.n_dialogues;
    s.normalised_total_turn_duration =
        a.dialogue_duration > 0 ? kNormalisedDurationScale * a.turn_duration / a.dialogue_duration
                                : 0.0;
    if (a.n_with_words > 0) {
      s.total_word_count = a.words;
      s.avg_word_count = a.words / a.n_with_words;
      s.avg_words_per_minute = a.wpm_sum / a.n_with_words;
    }
    return s;
  };

  TurnStatsReport r;
  r.ad = to_stats(acc[0]);
  r.nonad = to_stats(acc[1]);
  return r;
}

std::string turn_stats_csv(const TurnStatsReport& report) {
  std::ostringstream out;
  out << "# turn-taking statistics over patient turns; averages are per class participant\n";
  out << "# 'Norm. total turn duration' = " << format_double(kNormalisedDurationScale)
      << " * total patient turn time / total dialogue time (scale constant "
      << format_double(kNormalisedDurationScale) << ")\n";
  out << "# word rows cover participants with word counts: nonad n="
      << (report.nonad ? report.nonad->n_with_words : 0)
      << ", ad n=" << (report.ad ? report.ad->n_with_words : 0) << "\n";
  out << "feature,nonad,ad\n";

  auto row = [&](const char* name, auto get, bool word_row = false) {
    out << name << ',';
    if (report.nonad && (!word_row || report.nonad->n_with_words > 0))
      out << format_double(get(*report.nonad));
    out << ',';
    if (report.ad && (!word_row || report.ad->n_with_words > 0))
      out << format_double(get(*report.ad));
    out << '\n';
  };
  row("Dialogue duration", [](const ClassTurnStats& s) { return s.dialogue_duration_s; });
  row("Avg turn duration", [](const ClassTurnStats& s) { return s.avg_turn_duration_s; });
  row("Total turn duration", [](const ClassTurnStats& s) { return s.total_turn_duration_s; });
  row("Norm. total turn duration",
      [](const ClassTurnStats& s) { return s.normalised_total_turn_duration; });
  row("Avg number of words", [](const ClassTurnStats& s) { return s.avg_word_count; }, true);
  row("Total number of words", [](const ClassTurnStats& s) { return s.total_word_count; }, true);
  row("Avg words per minute", [](const ClassTurnStats& s) { return s.avg_words_per_minute; }, true);
  return out.str();
}

}  // namespace vgkit
