#include <cmath>
#include <numbers>

#include "aoi/kernels.hpp"

namespace aoi::kernels::scalar {
namespace {

void exp_ref(const double* x, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

double sum_exp_ref(const double* x, std::size_t n, double s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::exp(s * x[i]);
    return acc;
}

PowerSums power_sums_ref(const double* x, std::size_t n) {
    PowerSums r;
    for (std::size_t i = 0; i < n; ++i) {
        r.sum += x[i];
        r.sum_sq += x[i] * x[i];
    }
    return r;
}

double sawtooth_area_ref(const double* y, const double* t_prev, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += y[i] * t_prev[i] + 0.5 * y[i] * y[i];
    return acc;
}

void lognormal_tilted_ref(const double* z, std::size_t n, double alpha, double omega, double s,
                          double power, double* out) {
    constexpr double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = alpha + omega * z[i];
        double arg = power * x - 0.5 * z[i] * z[i];
        // s == 0 must not touch e^x, which can overflow far in the tails.
        if (s != 0.0) arg += s * std::exp(x);
        out[i] = std::exp(arg) * inv_sqrt_2pi;
    }
}

}  // namespace

const Table table{exp_ref, sum_exp_ref, power_sums_ref, sawtooth_area_ref, lognormal_tilted_ref};

}  // namespace aoi::kernels::scalar
