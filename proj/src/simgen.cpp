#include "simgen.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "error.hpp"
#include "rng.hpp"
#include "util.hpp"

namespace vgkit {

namespace {

// Rough syllable count per English word, used to turn a syllable rate into a
// word count for generated turns.
constexpr double kSyllablesPerWord = 1.15;

constexpr const char* kPatientSpeaker = "patient";
constexpr const char* kOtherSpeaker = "interviewer";

}  // namespace

void ClassProfile::validate() const {
  auto positive = [&](double v, const char* field) {
    if (!(v > 0))
      fail(Status::ValidationError,
           "profile '" + name + "': " + field + " must be positive");
  };
  positive(turn_duration_mean_s, "turn_duration_mean_s");
  positive(turn_duration_sd_s, "turn_duration_sd_s");
  positive(pause_mean_s, "pause_mean_s");
  positive(switching_pause_mean_s, "switching_pause_mean_s");
  positive(rate_mean, "rate_mean");
  if (rate_sd < 0) fail(Status::ValidationError, "profile '" + name + "': rate_sd must be >= 0");
  if (overlap_prob < 0 || overlap_prob > 1)
    fail(Status::ValidationError, "profile '" + name + "': overlap_prob must be in [0,1]");
  if (self_floor_prob < 0 || self_floor_prob > 1)
    fail(Status::ValidationError, "profile '" + name + "': self_floor_prob must be in [0,1]");
}

ClassProfile default_ad_profile() {
  ClassProfile p;
  p.name = "ad";
  p.turn_duration_mean_s = 7.0;
  p.turn_duration_sd_s = 5.0;
  p.pause_mean_s = 1.4;
  p.switching_pause_mean_s = 1.0;
  p.overlap_prob = 0.10;
  p.self_floor_prob = 0.55;
  p.rate_mean = 168.0;
  p.rate_sd = 35.6;
  return p;
}

ClassProfile default_nonad_profile() {
  ClassProfile p;
  p.name = "nonad";
  p.turn_duration_mean_s = 3.5;
  p.turn_duration_sd_s = 2.0;
  p.pause_mean_s = 0.6;
  p.switching_pause_mean_s = 0.45;
  p.overlap_prob = 0.05;
  p.self_floor_prob = 0.35;
  p.rate_mean = 180.8;
  p.rate_sd = 28.4;
  return p;
}

namespace {

void profile_from_json_object(const nlohmann::json& j, ClassProfile& p) {
  auto get = [&](const char* key, double& field) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number())
      fail(Status::ValidationError,
           "profile '" + p.name + "': field '" + key + "' must be a number");
    field = j.at(key).get<double>();
  };
  for (const auto& [key, value] : j.items()) {
    static const char* known[] = {"turn_duration_mean_s", "turn_duration_sd_s",
                                  "pause_mean_s",         "switching_pause_mean_s",
                                  "overlap_prob",         "self_floor_prob",
                                  "rate_mean",            "rate_sd"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known))
      fail(Status::ValidationError, "profile '" + p.name + "': unknown field '" + key + "'");
    (void)value;
  }
  get("turn_duration_mean_s", p.turn_duration_mean_s);
  get("turn_duration_sd_s", p.turn_duration_sd_s);
  get("pause_mean_s", p.pause_mean_s);
  get("switching_pause_mean_s", p.switching_pause_mean_s);
  get("overlap_prob", p.overlap_prob);
  get("self_floor_prob", p.self_floor_prob);
  get("rate_mean", p.rate_mean);
  get("rate_sd", p.rate_sd);
  p.validate();
}

nlohmann::ordered_json profile_to_json_object(const ClassProfile& p) {
  nlohmann::ordered_json j;
  j["turn_duration_mean_s"] = p.turn_duration_mean_s;
  j["turn_duration_sd_s"] = p.turn_duration_sd_s;
  j["pause_mean_s"] = p.pause_mean_s;
  j["switching_pause_mean_s"] = p.switching_pause_mean_s;
  j["overlap_prob"] = p.overlap_prob;
  j["self_floor_prob"] = p.self_floor_prob;
  j["rate_mean"] = p.rate_mean;
  j["rate_sd"] = p.rate_sd;
  return j;
}

}  // namespace

void profiles_from_json(const std::string& text, ClassProfile& ad, ClassProfile& nonad) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Status::ParseError, std::string("bad profile JSON: ") + e.what());
  }
  ad = default_ad_profile();
  nonad = default_nonad_profile();
  if (j.contains("ad")) profile_from_json_object(j.at("ad"), ad);
  if (j.contains("nonad")) profile_from_json_object(j.at("nonad"), nonad);
}

std::string profiles_to_json(const ClassProfile& ad, const ClassProfile& nonad) {
  nlohmann::ordered_json j;
  j["ad"] = profile_to_json_object(ad);
  j["nonad"] = profile_to_json_object(nonad);
  return j.dump(2) + "\n";
}

GeneratedDialogue gen_dialogue(const ClassProfile& profile, ClassLabel label, std::string id,
                               double target_s, std::uint64_t seed) {
  profile.validate();
  if (!(target_s > 0)) fail(Status::ValidationError, "target_s must be positive");

  Rng rng(seed);
  GeneratedDialogue out;
  out.dialogue.dialogue_id = std::move(id);
  out.dialogue.label = label;

  bool patient_turn = true;
  bool seen_patient = false, seen_other = false;
  double t = 0.0;
  double prev_end = 0.0;

  while (true) {
    const double dur = rng.lognormal_mean_sd(profile.turn_duration_mean_s,
                                             profile.turn_duration_sd_s);
    const double rate = std::max(1.0, rng.normal(profile.rate_mean, profile.rate_sd));
    TurnRecord turn;
    turn.speaker_id = patient_turn ? kPatientSpeaker : kOtherSpeaker;
    turn.role = patient_turn ? Role::Patient : Role::Other;
    turn.start_s = t;
    turn.end_s = t + dur;
    turn.word_count = std::lround(rate * dur / 60.0 / kSyllablesPerWord);
    out.dialogue.turns.push_back(turn);
    out.utterance_rates.push_back(rate);
    (patient_turn ? seen_patient : seen_other) = true;
    prev_end = std::max(prev_end, turn.end_s);

    if (turn.end_s >= target_s && seen_patient && seen_other) break;

    bool keep_floor = rng.uniform() < profile.self_floor_prob;
    // Past the target with one voice missing: force a switch so the dialogue
    // always contains both roles.
    if (turn.end_s >= target_s && (!seen_patient || !seen_other)) keep_floor = false;

    if (keep_floor) {
      t = turn.end_s + rng.exponential(profile.pause_mean_s);
    } else {
      if (rng.uniform() < profile.overlap_prob) {
        const double overlap =
            std::min(rng.exponential(profile.switching_pause_mean_s), 0.9 * dur);
        t = turn.end_s - overlap;
      } else {
        t = turn.end_s + rng.exponential(profile.switching_pause_mean_s);
      }
      patient_turn = !patient_turn;
    }
  }

  std::stable_sort(out.dialogue.turns.begin(), out.dialogue.turns.end(),
                   [](const TurnRecord& a, const TurnRecord& b) { return a.start_s < b.start_s; });
  validate_dialogue(out.dialogue);
  return out;
}

GeneratedCorpus gen_corpus(const CorpusSpec& spec) {
  if (spec.n_ad < 1 || spec.n_nonad < 1)
    fail(Status::ValidationError, "n_per_class must be at least 1");
  if (!(spec.target_dialogue_s > 0))
    fail(Status::ValidationError, "target_dialogue_s must be positive");
  spec.ad_profile.validate();
  spec.nonad_profile.validate();

  GeneratedCorpus corpus;
  std::uint64_t index = 0;
  auto emit = [&](const ClassProfile& profile, ClassLabel label, const char* prefix, int count) {
    for (int i = 0; i < count; ++i, ++index) {
      char id[32];
      std::snprintf(id, sizeof(id), "%s_%03d", prefix, i);
      GeneratedDialogue g =
          gen_dialogue(profile, label, id, spec.target_dialogue_s, spec.seed + index);
      corpus.dialogues.push_back(std::move(g.dialogue));
      corpus.rates.push_back(std::move(g.utterance_rates));
    }
  };
  emit(spec.ad_profile, ClassLabel::AD, "ad", spec.n_ad);
  emit(spec.nonad_profile, ClassLabel::NonAD, "nonad", spec.n_nonad);
  return corpus;
}

std::string rates_to_csv(const GeneratedCorpus& corpus) {
  std::string out = "dialogue_id,utterance_id,rate\n";
  for (size_t d = 0; d < corpus.dialogues.size(); ++d) {
    for (size_t u = 0; u < corpus.rates[d].size(); ++u) {
      out += corpus.dialogues[d].dialogue_id;
      out += ",u";
      out += std::to_string(u);
      out += ',';
      out += format_double(corpus.rates[d][u]);
      out += '\n';
    }
  }
  return out;
}

AudioBuffer gen_voiced_audio(int n_bursts, double burst_s, double gap_s, double f0_hz,
                             int sample_rate_hz, bool voiced, std::uint64_t seed) {
  if (n_bursts < 0) fail(Status::ValidationError, "n_bursts must be >= 0");
  if (!(burst_s > 0) || !(gap_s > 0) || sample_rate_hz <= 0)
    fail(Status::ValidationError, "burst_s, gap_s and sample_rate_hz must be positive");
  if (voiced && (f0_hz < 75.0 || f0_hz > 400.0))
    fail(Status::ValidationError, "f0_hz must lie in [75, 400] for voiced bursts");

  const long sr = sample_rate_hz;
  const long burst_len = std::lround(burst_s * sr);
  const long gap_len = std::lround(gap_s * sr);

  // Prototype voiced burst: pulse train at f0 exciting a damped resonance.
  std::vector<double> proto(static_cast<size_t>(burst_len), 0.0);
  const double period = static_cast<double>(sr) / f0_hz;
  const double tau = 0.004 * sr;              // 4 ms decay
  const double f_res = 500.0 / sr;            // resonance, cycles per sample
  const long ring_len = std::lround(6.0 * tau);
  for (double p = 0.0; p < static_cast<double>(burst_len); p += period) {
    const long start = std::lround(p);
    for (long k = 0; k < ring_len && start + k < burst_len; ++k) {
      proto[static_cast<size_t>(start + k)] +=
          std::exp(-static_cast<double>(k) / tau) * std::sin(2.0 * M_PI * f_res * k);
    }
  }
  const long ramp = std::min(std::lround(0.02 * sr), burst_len / 4);
  auto envelope = [&](long k) {
    if (k < ramp) return 0.5 - 0.5 * std::cos(M_PI * k / ramp);
    if (k >= burst_len - ramp) return 0.5 - 0.5 * std::cos(M_PI * (burst_len - 1 - k) / ramp);
    return 1.0;
  };
  double peak = 0.0;
  for (long k = 0; k < burst_len; ++k) {
    proto[static_cast<size_t>(k)] *= envelope(k);
    peak = std::max(peak, std::abs(proto[static_cast<size_t>(k)]));
  }
  if (peak > 0)
    for (double& v : proto) v *= 0.6 / peak;
  double rms = 0.0;
  for (double v : proto) rms += v * v;
  rms = std::sqrt(rms / static_cast<double>(burst_len));

  AudioBuffer audio;
  audio.sample_rate_hz = sample_rate_hz;
  audio.samples.assign(static_cast<size_t>(gap_len) +
                           static_cast<size_t>(n_bursts) *
                               static_cast<size_t>(burst_len + gap_len),
                       0.0);

  Rng rng(seed);
  long pos = gap_len;
  for (int b = 0; b < n_bursts; ++b) {
    if (voiced) {
      for (long k = 0; k < burst_len; ++k)
        audio.samples[static_cast<size_t>(pos + k)] = proto[static_cast<size_t>(k)];
    } else {
      // White noise with the same envelope, scaled to the voiced burst RMS.
      std::vector<double> noise(static_cast<size_t>(burst_len));
      double nrms = 0.0;
      for (long k = 0; k < burst_len; ++k) {
        noise[static_cast<size_t>(k)] = (2.0 * rng.uniform() - 1.0) * envelope(k);
        nrms += noise[static_cast<size_t>(k)] * noise[static_cast<size_t>(k)];
      }
      nrms = std::sqrt(nrms / static_cast<double>(burst_len));
      const double scale = nrms > 0 ? rms / nrms : 0.0;
      for (long k = 0; k < burst_len; ++k)
        audio.samples[static_cast<size_t>(pos + k)] = noise[static_cast<size_t>(k)] * scale;
    }
    pos += burst_len + gap_len;
  }
  return audio;
}

}  // namespace vgkit
