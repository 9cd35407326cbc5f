#pragma once
// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64, an AVX2/FMA version; the public entry points dispatch at runtime
// on CPU support. Set SNQESA_FORCE_SCALAR=1 in the environment to pin the
// scalar path (bitwise-reproducible output across machines).

#include <cstddef>
#include <span>

namespace snq::kernels {

enum class Isa { scalar, avx2 };

Isa active_isa();
const char* isa_name(Isa isa);
bool avx2_available();

std::size_t count_less_equal(std::span<const double> x, double t);
double sum(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
/// Σ exp(−½((x_i − center)·inv_bw)²)
double gaussian_kernel_sum(std::span<const double> x, double center, double inv_bw);

namespace scalar {
std::size_t count_less_equal(std::span<const double> x, double t);
double sum(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double gaussian_kernel_sum(std::span<const double> x, double center, double inv_bw);
}  // namespace scalar

// Callable only when avx2_available(); otherwise these forward to scalar.
namespace avx2 {
std::size_t count_less_equal(std::span<const double> x, double t);
double sum(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double gaussian_kernel_sum(std::span<const double> x, double center, double inv_bw);
}  // namespace avx2

}  // namespace snq::kernels
