#include "speechrate.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace vgkit {

namespace {

// Largest normalised autocorrelation of the window centred at `centre` over
// lags covering [f0_min, f0_max]. The window spans two periods of the lowest
// candidate pitch so even 75 Hz voicing produces a full-lag overlap.
double voicing_peak(const AudioBuffer& audio, long centre, double f0_min_hz, double f0_max_hz) {
  const long n = static_cast<long>(audio.samples.size());
  const long max_lag = std::lround(audio.sample_rate_hz / f0_min_hz);
  const long min_lag = std::max(1L, std::lround(audio.sample_rate_hz / f0_max_hz));
  const long half = max_lag;  // window = [centre - half, centre + half)
  long lo = std::max(0L, centre - half);
  long hi = std::min(n, centre + half);
  if (hi - lo < 2 * min_lag) return 0.0;

  // Mean removal keeps DC offsets from faking periodicity.
  double mean = 0.0;
  for (long i = lo; i < hi; ++i) mean += audio.samples[static_cast<size_t>(i)];
  mean /= static_cast<double>(hi - lo);

  auto at = [&](long i) { return audio.samples[static_cast<size_t>(i)] - mean; };

  double best = 0.0;
  for (long lag = min_lag; lag <= max_lag; ++lag) {
    if (hi - lo <= lag) break;
    double num = 0.0, e0 = 0.0, e1 = 0.0;
    for (long i = lo; i + lag < hi; ++i) {
      double a = at(i);
      double b = at(i + lag);
      num += a * b;
      e0 += a * a;
      e1 += b * b;
    }
    if (e0 <= 0 || e1 <= 0) continue;
    best = std::max(best, num / std::sqrt(e0 * e1));
  }
  return best;
}

}  // namespace

NucleiResult detect_syllable_nuclei(const AudioBuffer& audio, const IntensityContour& contour,
                                    const NucleiParams& params) {
  if (contour.db.empty()) fail(Status::InsufficientData, "empty intensity contour");
  const std::vector<double>& db = contour.db;
  const size_t n = db.size();

  double threshold = params.silence_threshold_db;
  if (std::isnan(threshold)) {
    // Relative threshold, but never below -90 dBFS: digital silence sits at
    // the -120 dB floor and must not count as speech.
    threshold = std::max(*std::max_element(db.begin(), db.end()) - 25.0, -90.0);
  }

  NucleiResult result;
  long frames_above = 0;
  for (double v : db) frames_above += v > threshold ? 1 : 0;
  result.speaking_time_s = static_cast<double>(frames_above) * contour.hop_s;

  long last_accepted = -1;
  for (size_t i = 0; i < n; ++i) {
    if (db[i] <= threshold) continue;
    bool is_peak = (i == 0 || db[i] >= db[i - 1]) && (i + 1 == n || db[i] > db[i + 1]);
    if (!is_peak) continue;

    if (last_accepted >= 0) {
      double valley = db[i];
      for (size_t j = static_cast<size_t>(last_accepted) + 1; j < i; ++j)
        valley = std::min(valley, db[j]);
      if (db[i] - valley < params.min_dip_db) continue;
    }

    const long centre = std::lround(contour.frame_time(i) * audio.sample_rate_hz);
    double corr = voicing_peak(audio, centre, params.f0_min_hz, params.f0_max_hz);
    if (corr < params.voicing_corr_min) continue;

    result.nucleus_times_s.push_back(contour.frame_time(i));
    last_accepted = static_cast<long>(i);
  }

  if (result.speaking_time_s > 0) {
    result.syllables_per_min =
        60.0 * static_cast<double>(result.nucleus_times_s.size()) / result.speaking_time_s;
  } else {
    result.syllables_per_min = 0.0;
    result.no_speech = true;
  }
  return result;
}

double speech_rate_ratio(long word_count, double actual_duration_s, double reference_wpm) {
  if (word_count < 0) fail(Status::ValidationError, "word count must be nonnegative");
  if (!(actual_duration_s > 0)) fail(Status::ValidationError, "actual duration must be positive");
  if (!(reference_wpm > 0)) fail(Status::InvalidArgument, "reference WPM must be positive");
  double reference_duration_s = 60.0 * static_cast<double>(word_count) / reference_wpm;
  return reference_duration_s / actual_duration_s;
}

RateSummary rate_summary(std::span<const double> rates) {
  if (rates.empty()) fail(Status::InsufficientData, "rate summary over empty list");
  RateSummary s;
  s.n = static_cast<int>(rates.size());
  double sum = 0.0;
  for (double r : rates) sum += r;
  s.mean = sum / s.n;
  double acc = 0.0;
  for (double r : rates) acc += (r - s.mean) * (r - s.mean);
  s.variance = acc / s.n;
  return s;
}

}  // namespace vgkit
