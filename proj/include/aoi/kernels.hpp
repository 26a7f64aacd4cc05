#pragma once

// Data-parallel inner loops shared by the quadrature and simulation code.
// Each kernel has a scalar reference and an AVX2 variant; the variant is
// picked once at startup from the CPU features (override with AOI_SIMD=scalar
// or AOI_SIMD=avx2). Variants agree to rounding, not bit-for-bit, because the
// vector reductions sum in a different order.

#include <cstddef>
#include <span>
#include <string_view>

namespace aoi::kernels {

enum class Backend { scalar, avx2 };

std::string_view to_string(Backend backend);

/// True when the backend was compiled in and the CPU supports it.
bool available(Backend backend);

/// Backend used by the span wrappers below.
Backend active();

/// Switch the process-wide backend. Throws aoi::ConfigError if unavailable.
void select(Backend backend);

struct PowerSums {
    double sum = 0.0;
    double sum_sq = 0.0;
};

/// Function table for one backend. Pointer arguments follow the span
/// wrappers; lengths may be zero.
struct Table {
    void (*exp)(const double* x, std::size_t n, double* out);
    double (*sum_exp)(const double* x, std::size_t n, double s);
    PowerSums (*power_sums)(const double* x, std::size_t n);
    double (*sawtooth_area)(const double* y, const double* t_prev, std::size_t n);
    void (*lognormal_tilted)(const double* z, std::size_t n, double alpha, double omega,
                             double s, double power, double* out);
};

/// Throws aoi::ConfigError if the backend is unavailable.
const Table& table(Backend backend);

/// out[i] = exp(x[i]).
void exp(std::span<const double> x, std::span<double> out);

/// sum_i exp(s * x[i]); the empirical transform numerator.
double sum_exp(std::span<const double> x, double s);

PowerSums power_sums(std::span<const double> x);

/// sum_i (y[i] * t_prev[i] + y[i]^2 / 2): area under the age sawtooth over
/// delivery cycles with interdeparture y[i] that start at age t_prev[i].
double sawtooth_area(std::span<const double> y, std::span<const double> t_prev);

/// Log-normal integrand in standardized log space. With x = alpha + omega*z
/// and t = e^x:
///   out[i] = exp(s*t + power*x - z^2/2) / sqrt(2*pi)
/// so that integrating over z gives E[U^power e^{sU}].
void lognormal_tilted(std::span<const double> z, double alpha, double omega, double s,
                      double power, std::span<double> out);

namespace scalar {
extern const Table table;
}
#if defined(AOI_HAVE_AVX2)
namespace avx2 {
extern const Table table;
}
#endif

}  // namespace aoi::kernels
