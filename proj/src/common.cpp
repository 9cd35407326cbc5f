#include "snqesa/common.hpp"

#include <cmath>

namespace snq {

const char* lattice_name(LatticeMode m) {
  switch (m) {
    case LatticeMode::midp: return "midp";
    case LatticeMode::cornish_fisher: return "cf";
    case LatticeMode::none: return "none";
  }
  return "?";
}

LatticeMode parse_lattice(const std::string& s) {
  if (s == "midp") return LatticeMode::midp;
  if (s == "cf" || s == "cornish_fisher") return LatticeMode::cornish_fisher;
  if (s == "none") return LatticeMode::none;
  throw InputError("unknown lattice mode '" + s + "' (expected midp, cf or none)");
}

void QuantileSpec::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("tau must lie in (0,1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0,1)");
  if (!(ridge_c >= 0.0) || !std::isfinite(ridge_c)) throw InputError("ridge constant must be finite and >= 0");
  if (!(c0 > 0.0)) throw InputError("c0 must be positive");
  if (!(r_floor >= 0.0)) throw InputError("r_floor must be >= 0");
}

}  // namespace snq
