#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>

#include "aoi/errors.hpp"
#include "aoi/kernels.hpp"

namespace aoi::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(AOI_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend initial_backend() {
    if (const char* env = std::getenv("AOI_SIMD")) {
        const std::string want(env);
        if (want == "scalar") return Backend::scalar;
        if (want == "avx2" && cpu_has_avx2()) return Backend::avx2;
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
    static std::atomic<Backend> backend{initial_backend()};
    return backend;
}

}  // namespace

std::string_view to_string(Backend backend) {
    switch (backend) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

bool available(Backend backend) {
    if (backend == Backend::scalar) return true;
    static const bool avx2 = cpu_has_avx2();
    return avx2;
}

Backend active() { return current().load(std::memory_order_relaxed); }

void select(Backend backend) {
    if (!available(backend))
        throw ConfigError("kernel backend '" + std::string(to_string(backend)) +
                          "' is not available on this CPU");
    current().store(backend, std::memory_order_relaxed);
}

const Table& table(Backend backend) {
    if (!available(backend))
        throw ConfigError("kernel backend '" + std::string(to_string(backend)) +
                          "' is not available on this CPU");
#if defined(AOI_HAVE_AVX2)
    if (backend == Backend::avx2) return avx2::table;
#endif
    return scalar::table;
}

void exp(std::span<const double> x, std::span<double> out) {
    table(active()).exp(x.data(), std::min(x.size(), out.size()), out.data());
}

double sum_exp(std::span<const double> x, double s) {
    return table(active()).sum_exp(x.data(), x.size(), s);
}

PowerSums power_sums(std::span<const double> x) {
    return table(active()).power_sums(x.data(), x.size());
}

double sawtooth_area(std::span<const double> y, std::span<const double> t_prev) {
    return table(active()).sawtooth_area(y.data(), t_prev.data(), std::min(y.size(), t_prev.size()));
}

void lognormal_tilted(std::span<const double> z, double alpha, double omega, double s,
                      double power, std::span<double> out) {
    table(active()).lognormal_tilted(z.data(), std::min(z.size(), out.size()), alpha, omega, s,
                                     power, out.data());
}

}  // namespace aoi::kernels
