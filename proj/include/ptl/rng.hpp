#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include <Eigen/Core>

namespace ptl {

// Counter-based SplitMix64 stream. The state advances by a fixed odd
// increment and each output is a bijective mix of the state, so a stream is
// fully determined by its starting seed.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return mix(state_ += kGamma); }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

 private:
  std::uint64_t state_;
};

// Child seed for stream `index` under `parent`. Used both for
// trial seeds (parent = master seed) and row streams (parent = trial seed).
constexpr std::uint64_t split_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return SplitMix64::mix(SplitMix64::mix(parent) + (index + 1) * SplitMix64::kGamma);
}

// Standard-normal source on top of a SplitMix64 stream.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double operator()() { return dist_(engine_); }

  template <typename Derived>
  void fill(Eigen::DenseBase<Derived>& out) {
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = dist_(engine_);
  }

  double uniform() { return std::generate_canonical<double, 53>(engine_); }

 private:
  SplitMix64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace ptl
