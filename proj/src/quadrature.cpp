#include "aoi/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "aoi/errors.hpp"

namespace aoi::quad {
namespace {

// Kronrod abscissae; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk15(const BatchIntegrand& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, 15> nodes;
    std::array<double, 15> vals;
    for (int j = 0; j < 7; ++j) {
        nodes[2 * j] = center - half * kXgk[j];
        nodes[2 * j + 1] = center + half * kXgk[j];
    }
    nodes[14] = center;
    f(nodes, vals);

    const double fc = vals[14];
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    double resabs = std::abs(resk);
    for (int j = 0; j < 7; ++j) {
        const double s = vals[2 * j] + vals[2 * j + 1];
        resk += kWgk[j] * s;
        resabs += kWgk[j] * (std::abs(vals[2 * j]) + std::abs(vals[2 * j + 1]));
        if (j % 2 == 1) resg += kWg[j / 2] * s;
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::abs(vals[2 * j] - mean) + std::abs(vals[2 * j + 1] - mean));

    for (double v : vals)
        if (!std::isfinite(v))
            throw QuadratureError("integrand is not finite on [" + std::to_string(a) + ", " +
                                  std::to_string(b) + "]");

    resk *= half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg * half));
    // QUADPACK error scaling, with a roundoff floor.
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {a, b, resk, err};
}

Result adapt(const BatchIntegrand& f, double a, double b, const Tolerance& tol) {
    std::priority_queue<Piece> heap;
    Piece first = gk15(f, a, b);
    double total = first.value;
    double total_err = first.error;
    heap.push(first);
    int count = 1;
    while (total_err > std::max(tol.abs, tol.rel * std::abs(total))) {
        if (count >= tol.max_intervals)
        {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "adaptive quadrature did not reach tolerance (estimated error %.3g, integral %.12g, "
                          "%d intervals)",
                          total_err, total, count);
            throw QuadratureError(msg);
        }
        Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            throw QuadratureError("adaptive quadrature exhausted floating-point resolution");
        Piece left = gk15(f, worst.a, mid);
        Piece right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // Re-sum to shed the drift of the running updates.
    double sum = 0.0;
    double err = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {sum, err, count};
}

}  // namespace

Tolerance default_tolerance() {
    Tolerance tol;
    if (const char* env = std::getenv("AOI_QUAD_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v > 0.0 && std::isfinite(v)) tol.rel = v;
    }
    return tol;
}

Result integrate(const BatchIntegrand& f, double a, double b, Tolerance tol) {
    if (std::isnan(a) || std::isnan(b)) throw DomainError("integration limits must not be NaN");
    if (a == b) return {};
    if (a > b) {
        Result r = integrate(f, b, a, tol);
        r.value = -r.value;
        return r;
    }
    const bool lo_inf = std::isinf(a);
    const bool hi_inf = std::isinf(b);
    if (!lo_inf && !hi_inf) return adapt(f, a, b, tol);

    // Map to u on a finite interval; nodes never hit the endpoints.
    std::array<double, 15> mapped;
    std::array<double, 15> jac;
    if (lo_inf && hi_inf) {
        auto g = [&](std::span<const double> u, std::span<double> out) {
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double d = 1.0 - u[i] * u[i];
                mapped[i] = d > 0.0 ? u[i] / d : 0.0;
                jac[i] = d > 0.0 ? (1.0 + u[i] * u[i]) / (d * d) : 0.0;
            }
            f(std::span<const double>(mapped.data(), u.size()), out);
            for (std::size_t i = 0; i < u.size(); ++i) out[i] = jac[i] == 0.0 ? 0.0 : out[i] * jac[i];
        };
        return adapt(g, -1.0, 1.0, tol);
    }
    const double origin = lo_inf ? b : a;
    const double sign = lo_inf ? -1.0 : 1.0;
    auto g = [&](std::span<const double> u, std::span<double> out) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double d = 1.0 - u[i];
            mapped[i] = d > 0.0 ? origin + sign * u[i] / d : origin;
            jac[i] = d > 0.0 ? 1.0 / (d * d) : 0.0;
        }
        f(std::span<const double>(mapped.data(), u.size()), out);
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = jac[i] == 0.0 ? 0.0 : out[i] * jac[i];
    };
    return adapt(g, 0.0, 1.0, tol);
}

Result integrate(const Integrand& f, double a, double b, Tolerance tol) {
    BatchIntegrand batch = [&f](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
    };
    return integrate(batch, a, b, tol);
}

Result integrate_pieces(const Integrand& f, double a, double b, std::span<const double> cuts,
                        Tolerance tol) {
    std::vector<double> edges{a};
    std::vector<double> inner(cuts.begin(), cuts.end());
    std::sort(inner.begin(), inner.end());
    for (double c : inner)
        if (c > edges.back() && c < b) edges.push_back(c);
    edges.push_back(b);
    Result total;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const Result r = integrate(f, edges[i], edges[i + 1], tol);
        total.value += r.value;
        total.error += r.error;
        total.intervals += r.intervals;
    }
    return total;
}

}  // namespace aoi::quad
