#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace gaussex {

/// SplitMix64 finalizer; used to decorrelate (seed, replication) pairs.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent standard-normal stream for one replication.
///
/// The stream depends only on (seed, replication), so any partition of the
/// replications across workers reproduces the same draws.
class ReplicationStream {
 public:
  ReplicationStream(std::uint64_t seed, std::uint64_t replication)
      : engine_(mix64(mix64(seed) ^ mix64(replication + 0x632be59bd9b4e019ULL))) {}

  double normal() { return normal_(engine_); }

  void fill_normal(std::span<double> out) {
    for (double& x : out) x = normal_(engine_);
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace gaussex
