#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "audio.hpp"
#include "timeline.hpp"

namespace vgkit {

// Turn-taking generator knobs for one class. Durations are real-space
// mean/sd of a log-normal; gaps are exponential with the given means;
// rates are per-turn syllables-per-minute draws.
struct ClassProfile {
  std::string name;
  double turn_duration_mean_s = 4.0;
  double turn_duration_sd_s = 2.0;
  double pause_mean_s = 0.7;
  double switching_pause_mean_s = 0.5;
  double overlap_prob = 0.05;      // chance a speaker change starts early (joint talk)
  double self_floor_prob = 0.35;   // chance the same speaker retakes the floor
  double rate_mean = 180.0;
  double rate_sd = 25.0;

  void validate() const;
};

struct CorpusSpec {
  int n_ad = 21;
  int n_nonad = 17;
  ClassProfile ad_profile;
  ClassProfile nonad_profile;
  double target_dialogue_s = 300.0;
  std::uint64_t seed = 1;
};

ClassProfile default_ad_profile();
ClassProfile default_nonad_profile();

// Profile JSON: {"ad": {field: value, ...}, "nonad": {...}}; absent fields
// keep the shipped defaults.
void profiles_from_json(const std::string& text, ClassProfile& ad, ClassProfile& nonad);
std::string profiles_to_json(const ClassProfile& ad, const ClassProfile& nonad);

struct GeneratedDialogue {
  Dialogue dialogue;
  std::vector<double> utterance_rates;  // true per-turn patient+other rates, syll/min
};

// Alternating floor process: draw a turn duration, then either a pause (same
// speaker), a switching pause, or an early overlapping start for the next
// speaker. Stops at the first turn ending at or past target_s, with at least
// one turn per role. Fully determined by (profile, target_s, seed).
GeneratedDialogue gen_dialogue(const ClassProfile& profile, ClassLabel label, std::string id,
                               double target_s, std::uint64_t seed);

struct GeneratedCorpus {
  std::vector<Dialogue> dialogues;
  std::vector<std::vector<double>> rates;  // parallel to dialogues
};

// Dialogue i uses seed spec.seed + i (AD block first, then NonAD).
GeneratedCorpus gen_corpus(const CorpusSpec& spec);

// `dialogue_id,utterance_id,rate` rows for the generated per-turn rates.
std::string rates_to_csv(const GeneratedCorpus& corpus);

// Test fixture audio with a known burst count: voiced bursts are a pulse
// train at f0_hz exciting a decaying resonance, unvoiced bursts are white
// noise scaled to the same RMS. Bursts are separated (and flanked) by gap_s
// of silence and shaped with raised-cosine ramps.
AudioBuffer gen_voiced_audio(int n_bursts, double burst_s, double gap_s, double f0_hz,
                             int sample_rate_hz, bool voiced, std::uint64_t seed = 1234);

}  // namespace vgkit
