#include "snqesa/rng.hpp"

#include "snqesa/special.hpp"

namespace snq::rng {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t master, std::uint64_t r) { return splitmix64(splitmix64(master) ^ r); }

std::uint64_t derive2(std::uint64_t master, std::uint64_t r, std::uint64_t tag) {
  return splitmix64(derive(master, r) ^ splitmix64(tag));
}

std::uint64_t method_tag(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double Stream::normal() { return special::norm_quantile(uniform()); }

}  // namespace snq::rng
