#include "audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "error.hpp"
#include "util.hpp"

namespace vgkit {

namespace {

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void put_u32le(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16le(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  std::string bytes = read_file(path);
  const unsigned char* data = reinterpret_cast<const unsigned char*>(bytes.data());
  size_t n = bytes.size();
  if (n < 12 || std::memcmp(data, "RIFF", 4) != 0 || std::memcmp(data + 8, "WAVE", 4) != 0)
    fail(Status::FormatError, path + ": not a RIFF/WAVE file");

  int channels = 0;
  int sample_rate = 0;
  int bits = 0;
  bool have_fmt = false;
  size_t data_off = 0, data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= n) {
    char id[5] = {0};
    std::memcpy(id, data + pos, 4);
    std::uint32_t len = read_u32le(data + pos + 4);
    size_t body = pos + 8;
    if (body + len > n)
      fail(Status::IoError, path + ": truncated chunk '" + std::string(id) + "'");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) fail(Status::FormatError, path + ": fmt chunk too short");
      int format = read_u16le(data + body);
      channels = read_u16le(data + body + 2);
      sample_rate = static_cast<int>(read_u32le(data + body + 4));
      bits = read_u16le(data + body + 14);
      if (format != 1)
        fail(Status::FormatError,
             path + ": fmt chunk: only PCM supported (format tag " + std::to_string(format) + ")");
      if (bits != 16)
        fail(Status::FormatError,
             path + ": fmt chunk: only 16-bit PCM supported (" + std::to_string(bits) + " bits)");
      if (channels < 1 || channels > 2)
        fail(Status::FormatError, path + ": fmt chunk: expected mono or stereo");
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }
  if (!have_fmt) fail(Status::FormatError, path + ": missing fmt chunk");
  if (data_off == 0) fail(Status::FormatError, path + ": missing data chunk");

  size_t n_frames = data_len / (2 * static_cast<size_t>(channels));
  AudioBuffer out;
  out.sample_rate_hz = sample_rate;
  out.samples.resize(n_frames);
  const unsigned char* p = data + data_off;
  for (size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      std::int16_t v = static_cast<std::int16_t>(read_u16le(p));
      p += 2;
      acc += static_cast<double>(v);
    }
    out.samples[i] = acc / channels / 32768.0;
  }
  return out;
}

std::string wav_bytes(const AudioBuffer& audio) {
  if (audio.sample_rate_hz <= 0) fail(Status::InvalidArgument, "sample rate must be positive");
  std::string s;
  std::uint32_t data_len = static_cast<std::uint32_t>(audio.samples.size() * 2);
  s.reserve(44 + data_len);
  s += "RIFF";
  put_u32le(s, 36 + data_len);
  s += "WAVE";
  s += "fmt ";
  put_u32le(s, 16);
  put_u16le(s, 1);  // PCM
  put_u16le(s, 1);  // mono
  put_u32le(s, static_cast<std::uint32_t>(audio.sample_rate_hz));
  put_u32le(s, static_cast<std::uint32_t>(audio.sample_rate_hz * 2));
  put_u16le(s, 2);
  put_u16le(s, 16);
  s += "data";
  put_u32le(s, data_len);
  for (double v : audio.samples) {
    double clamped = std::clamp(v, -1.0, 1.0);
    int q = static_cast<int>(std::lrint(clamped * 32768.0));
    q = std::clamp(q, -32768, 32767);
    put_u16le(s, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  return s;
}

void write_wav(const std::string& path, const AudioBuffer& audio) {
  write_file(path, wav_bytes(audio));
}

IntensityContour intensity_contour(const AudioBuffer& audio, double frame_s, double hop_s) {
  if (audio.samples.empty()) fail(Status::InsufficientData, "empty audio buffer");
  if (!(frame_s > 0) || !(hop_s > 0) || hop_s > frame_s)
    fail(Status::InvalidArgument, "need 0 < hop_s <= frame_s");
  const long n = static_cast<long>(audio.samples.size());
  const long frame_len = std::max(1L, std::lround(frame_s * audio.sample_rate_hz));
  const long hop_len = std::max(1L, std::lround(hop_s * audio.sample_rate_hz));
  if (n < frame_len)
    fail(Status::InsufficientData, "signal shorter than one analysis frame");

  IntensityContour c;
  c.frame_s = frame_s;
  c.hop_s = hop_s;
  const long n_frames = (n - 1) / hop_len + 1;  // centres at 0, hop, 2*hop, ... <= n-1
  c.db.resize(static_cast<size_t>(n_frames));
  for (long i = 0; i < n_frames; ++i) {
    const long centre = i * hop_len;
    const long lo = centre - frame_len / 2;
    double acc = 0.0;
    for (long k = lo; k < lo + frame_len; ++k) {
      if (k < 0 || k >= n) continue;  // zero padding
      acc += audio.samples[static_cast<size_t>(k)] * audio.samples[static_cast<size_t>(k)];
    }
    double mean_sq = acc / static_cast<double>(frame_len);
    c.db[static_cast<size_t>(i)] = 10.0 * std::log10(mean_sq + 1e-12);
  }
  return c;
}

}  // namespace vgkit
