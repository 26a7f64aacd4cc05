#pragma once

#include <functional>
#include <span>

namespace aoi::quad {

/// Stopping rule for adaptive integration: stop once the estimated absolute
/// error is below max(abs, rel * |integral|).
struct Tolerance {
    double abs = 1e-15;
    double rel = 1e-12;
    int max_intervals = 4000;
};

/// Library default; AOI_QUAD_TOL in the environment overrides `rel`.
Tolerance default_tolerance();

/// Fills values[i] = f(nodes[i]); called with 15 nodes at a time.
using BatchIntegrand = std::function<void(std::span<const double> nodes, std::span<double> values)>;
using Integrand = std::function<double(double)>;

struct Result {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

/// Adaptive 15-point Gauss-Kronrod integration of f over [a, b]. Either end may
/// be infinite; infinite ranges are mapped onto finite ones with a rational
/// change of variables. Throws aoi::QuadratureError if the tolerance is not
/// reached within tol.max_intervals or the integrand returns a non-finite value.
Result integrate(const BatchIntegrand& f, double a, double b, Tolerance tol = default_tolerance());
Result integrate(const Integrand& f, double a, double b, Tolerance tol = default_tolerance());

/// Integral over [a, b] split at the given interior points (sorted or not;
/// points outside (a, b) are ignored). Tolerance applies per piece.
Result integrate_pieces(const Integrand& f, double a, double b, std::span<const double> cuts,
                        Tolerance tol = default_tolerance());

}  // namespace aoi::quad
