#pragma once
#include <stdexcept>
#include <string>

namespace snq {

/// Bad user input: invalid parameters, malformed data. Maps to CLI exit 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical failure no documented fallback could absorb. CLI exit 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LatticeMode { midp, cornish_fisher, none };

const char* lattice_name(LatticeMode m);
LatticeMode parse_lattice(const std::string& s);

struct QuantileSpec {
  double tau = 0.5;
  double alpha = 0.05;
  double ridge_c = 0.25;
  LatticeMode lattice = LatticeMode::midp;
  double c0 = 2.0;        // r* branch guard on |log(r/w)|
  double r_floor = 1e-4;  // below this |r| the exact lattice tail is used

  void validate() const;
};

}  // namespace snq
