#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace vgkit {

// mt19937_64 with hand-rolled variate transforms. The standard engine has a
// fully specified output stream, but the std distributions do not; doing the
// transforms here keeps every seeded artifact byte-identical across
// standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  double normal(double mean = 0.0, double sd = 1.0) {
    // Box-Muller, cosine branch only so one draw consumes exactly two words.
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return mean + sd * z;
  }

  // Log-normal parameterised by the mean and sd of the variate itself.
  double lognormal_mean_sd(double mean, double sd) {
    double sigma2 = std::log(1.0 + (sd * sd) / (mean * mean));
    double mu = std::log(mean) - 0.5 * sigma2;
    return std::exp(normal(mu, std::sqrt(sigma2)));
  }

  double exponential(double mean) {
    return -mean * std::log(1.0 - uniform());
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vgkit
