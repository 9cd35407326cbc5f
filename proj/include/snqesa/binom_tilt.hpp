#pragma once
#include <cstddef>

namespace snq {

double h_eval(double u, double tau, std::size_t n);
double h_prime(double u, double tau, std::size_t n);
double h_second(double u, double tau, std::size_t n);

inline constexpr double kInvertGuard = 1e-12;

struct HInverse {
  double u = 0.0;
  bool at_guard = false;  // |x| beyond the range of h on the guarded interval
  int iterations = 0;
};

HInverse invert_h_checked(double x, double tau, std::size_t n);
inline double invert_h(double x, double tau, std::size_t n) { return invert_h_checked(x, tau, n).u; }

/// KL(u‖τ) in the log1p form.
double kl_bernoulli(double u, double tau);
/// log{u(1−τ)/(τ(1−u))}
double logit_diff(double u, double tau);

struct BinomScalars {
  double u_x = 0.0;
  double r = 0.0;
  double q_pm = 0.0;
  double kl = 0.0;
};

BinomScalars binom_scalars(double u_x, double tau, std::size_t n);

}  // namespace snq
