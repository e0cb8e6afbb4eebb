#pragma once

#include <string>
#include <vector>

namespace vgkit {

struct AudioBuffer {
  int sample_rate_hz = 0;
  std::vector<double> samples;  // mono, in [-1, 1]

  double duration_s() const {
    return sample_rate_hz > 0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
  }
};

// RIFF/WAVE reader, PCM 16-bit only. Stereo is averaged to mono; samples are
// scaled by 1/32768.
AudioBuffer read_wav(const std::string& path);

// PCM16 mono writer. Samples are clamped to [-1, 1] and quantised; a buffer
// produced by read_wav round-trips bit-exactly.
void write_wav(const std::string& path, const AudioBuffer& audio);
std::string wav_bytes(const AudioBuffer& audio);

struct IntensityContour {
  double frame_s = 0.0;
  double hop_s = 0.0;
  std::vector<double> db;  // dB relative to full scale

  double frame_time(size_t i) const { return static_cast<double>(i) * hop_s; }
};

// Frame energy in dB: 10*log10(mean square + 1e-12), so digital silence sits
// at -120 dB. Frames are centred at i*hop_s and zero-padded at the edges.
IntensityContour intensity_contour(const AudioBuffer& audio, double frame_s = 0.025,
                                   double hop_s = 0.010);

}  // namespace vgkit
