#pragma once
#include <array>
#include <cstddef>

namespace snq {

using Vec2 = std::array<double, 2>;

inline double dot2(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

inline constexpr double kTiltEps = 1e-10;

struct Tilt {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

struct TiltedMoments {
  double K = 0.0;
  double p = 0.0;      // clamped to [ε, 1−ε]
  double p_raw = 0.0;  // before the clamp
  Vec2 mu{};
  double kappa = 0.0;  // p(1−p)
  Vec2 v{};            // (−1, 1−2τ)
  bool clamped = false;
};

Vec2 score_direction(double tau);

TiltedMoments cgf_eval(const Tilt& tilt, double tau);

/// Pseudo-determinant and generalized-inverse quadratic form of J = n·κ·vvᵀ.
struct RankOneInverse {
  double pdet = 0.0;
  double kappa = 0.0;
  Vec2 v{};
  double quadform(const Vec2& g) const;
};

/// Throws NumericalError when κ = 0.
RankOneInverse pdet_pinv(const TiltedMoments& m, std::size_t n);

}  // namespace snq
