#pragma once
#include <cstdint>
#include <random>
#include <string_view>

namespace snq::rng {

/// One SplitMix64 output step applied to x.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of replication r under a master seed.
std::uint64_t derive(std::uint64_t master, std::uint64_t r);
/// Seed of a method-tagged stream within replication r.
std::uint64_t derive2(std::uint64_t master, std::uint64_t r, std::uint64_t tag);

/// FNV-1a 64-bit hash, used to turn method names into stream tags.
std::uint64_t method_tag(std::string_view name);

/// Deterministic stream over std::mt19937_64 with explicitly specified
/// transforms (the standard distributions are implementation-defined).
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }
  /// Uniform on the open interval (0,1).
  double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }
  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }
  /// Standard normal by inversion.
  double normal();

 private:
  std::mt19937_64 eng_;
};

}  // namespace snq::rng
