#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "audio.hpp"

namespace vgkit {

struct NucleiParams {
  // NaN means "max(db) - 25" computed from the contour.
  double silence_threshold_db = std::nan("");
  double min_dip_db = 2.0;
  double f0_min_hz = 75.0;
  double f0_max_hz = 400.0;
  double voicing_corr_min = 0.3;
};

struct NucleiResult {
  std::vector<double> nucleus_times_s;
  double speaking_time_s = 0.0;
  double syllables_per_min = 0.0;
  bool no_speech = false;  // speaking_time_s == 0; rate reported as 0
};

// Intensity-peak syllable nuclei with a dip constraint and a voicing gate.
// A local maximum of the contour above the silence threshold is a candidate
// when it rises at least min_dip_db above the lowest contour value since the
// previously accepted nucleus; it is accepted when the audio frame centred on
// it is voiced (normalised autocorrelation peak >= voicing_corr_min at a lag
// inside the f0 range). Speaking time is the total duration of frames above
// the silence threshold.
NucleiResult detect_syllable_nuclei(const AudioBuffer& audio, const IntensityContour& contour,
                                    const NucleiParams& params = {});

inline constexpr double kReferenceWordsPerMinute = 160.0;

// reference_duration / actual_duration, where the reference is the time the
// words would take at reference_wpm. Callers holding externally synthesised
// reference durations divide those by the actual duration directly.
double speech_rate_ratio(long word_count, double actual_duration_s,
                         double reference_wpm = kReferenceWordsPerMinute);

struct RateSummary {
  double mean = 0.0;
  double variance = 0.0;  // population variance (divide by n)
  int n = 0;
};

RateSummary rate_summary(std::span<const double> rates);

}  // namespace vgkit
