#include "aoi/distributions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <span>

#include <boost/math/special_functions/gamma.hpp>

#include "aoi/errors.hpp"
#include "aoi/kernels.hpp"

namespace aoi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

// expm1(z)/z, 1 at 0.
double phi1(double z) { return z == 0.0 ? 1.0 : std::expm1(z) / z; }

// (expm1(z) - z)/z^2, 1/2 at 0.
double phi2(double z) {
    if (std::abs(z) >= 0.5) return (std::expm1(z) - z) / (z * z);
    double term = 0.5;
    double sum = term;
    for (int k = 1; k < 40; ++k) {
        term *= z / (k + 2);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// integral_0^1 v e^{zv} dv = (e^z (z - 1) + 1)/z^2, 1/2 at 0.
double psi(double z) {
    if (std::abs(z) >= 0.5) return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
    // sum_k z^k / (k! (k + 2))
    double fact = 1.0;
    double sum = 0.5;
    for (int k = 1; k < 40; ++k) {
        fact *= z / k;
        const double term = fact / (k + 2);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// E[U^power e^{sU}] for a log-normal law, integrated over the standardized log.
double lognormal_tilted_moment(const LogNormal& d, double s, double power) {
    quad::BatchIntegrand f = [&](std::span<const double> z, std::span<double> out) {
        kernels::lognormal_tilted(z, d.alpha, d.omega, s, power, out);
    };
    return quad::integrate(f, -kInf, kInf).value;
}

std::string family_name(const ServiceDistribution::Family& f) {
    return std::visit(overloaded{[](const Exponential&) { return std::string("exp"); },
                                 [](const Gamma&) { return std::string("gamma"); },
                                 [](const Deterministic&) { return std::string("det"); },
                                 [](const Uniform&) { return std::string("uniform"); },
                                 [](const LogNormal&) { return std::string("lognormal"); }},
                      f);
}

}  // namespace

ServiceDistribution::ServiceDistribution(Family family) : family_(family) {
    std::visit(overloaded{
                   [](const Exponential& d) {
                       if (!positive(d.rate)) throw ConfigError("exp: rate must be > 0");
                   },
                   [](const Gamma& d) {
                       if (!positive(d.shape)) throw ConfigError("gamma: shape must be > 0");
                       if (!positive(d.rate)) throw ConfigError("gamma: rate must be > 0");
                   },
                   [](const Deterministic& d) {
                       if (!positive(d.value)) throw ConfigError("det: value must be > 0");
                   },
                   [](const Uniform& d) {
                       if (!(std::isfinite(d.a) && d.a >= 0.0))
                           throw ConfigError("uniform: a must be >= 0");
                       if (!(std::isfinite(d.b) && d.b > d.a)) throw ConfigError("uniform: b must be > a");
                   },
                   [](const LogNormal& d) {
                       if (!std::isfinite(d.alpha)) throw ConfigError("lognormal: alpha must be finite");
                       if (!positive(d.omega)) throw ConfigError("lognormal: omega must be > 0");
                   }},
               family_);
}

std::string ServiceDistribution::spec() const {
    const std::string head = family_name(family_) + ":";
    return std::visit(
        overloaded{
            [&](const Exponential& d) { return head + "rate=" + format_exact(d.rate); },
            [&](const Gamma& d) {
                return head + "shape=" + format_exact(d.shape) + ",rate=" + format_exact(d.rate);
            },
            [&](const Deterministic& d) { return head + "value=" + format_exact(d.value); },
            [&](const Uniform& d) { return head + "a=" + format_exact(d.a) + ",b=" + format_exact(d.b); },
            [&](const LogNormal& d) {
                return head + "alpha=" + format_exact(d.alpha) + ",omega=" + format_exact(d.omega);
            }},
        family_);
}

double ServiceDistribution::pdf(double t) const {
    if (t < 0.0) return 0.0;
    return std::visit(
        overloaded{
            [t](const Exponential& d) { return d.rate * std::exp(-d.rate * t); },
            [t](const Gamma& d) {
                if (t == 0.0) return d.shape < 1.0 ? kInf : (d.shape == 1.0 ? d.rate : 0.0);
                return std::exp(d.shape * std::log(d.rate) + (d.shape - 1.0) * std::log(t) - d.rate * t -
                                std::lgamma(d.shape));
            },
            // Point mass: no density.
            [](const Deterministic&) { return 0.0; },
            [t](const Uniform& d) { return (t >= d.a && t <= d.b) ? 1.0 / (d.b - d.a) : 0.0; },
            [t](const LogNormal& d) {
                if (t == 0.0) return 0.0;
                const double z = (std::log(t) - d.alpha) / d.omega;
                return std::exp(-0.5 * z * z) / (t * d.omega * std::sqrt(2.0 * std::numbers::pi));
            }},
        family_);
}

double ServiceDistribution::cdf(double t) const {
    if (t <= 0.0) return 0.0;
    return std::visit(
        overloaded{[t](const Exponential& d) { return -std::expm1(-d.rate * t); },
                   [t](const Gamma& d) { return boost::math::gamma_p(d.shape, d.rate * t); },
                   [t](const Deterministic& d) { return t >= d.value ? 1.0 : 0.0; },
                   [t](const Uniform& d) {
                       if (t <= d.a) return 0.0;
                       if (t >= d.b) return 1.0;
                       return (t - d.a) / (d.b - d.a);
                   },
                   [t](const LogNormal& d) {
                       return 0.5 * std::erfc(-(std::log(t) - d.alpha) / (d.omega * std::numbers::sqrt2));
                   }},
        family_);
}

double ServiceDistribution::survival(double t) const {
    if (t <= 0.0) return 1.0;
    return std::visit(
        overloaded{[t](const Exponential& d) { return std::exp(-d.rate * t); },
                   [t](const Gamma& d) { return boost::math::gamma_q(d.shape, d.rate * t); },
                   [t](const Deterministic& d) { return t >= d.value ? 0.0 : 1.0; },
                   [t](const Uniform& d) {
                       if (t <= d.a) return 1.0;
                       if (t >= d.b) return 0.0;
                       return (d.b - t) / (d.b - d.a);
                   },
                   [t](const LogNormal& d) {
                       return 0.5 * std::erfc((std::log(t) - d.alpha) / (d.omega * std::numbers::sqrt2));
                   }},
        family_);
}

double ServiceDistribution::mean() const {
    return std::visit(overloaded{[](const Exponential& d) { return 1.0 / d.rate; },
                                 [](const Gamma& d) { return d.shape / d.rate; },
                                 [](const Deterministic& d) { return d.value; },
                                 [](const Uniform& d) { return 0.5 * (d.a + d.b); },
                                 [](const LogNormal& d) {
                                     return std::exp(d.alpha + 0.5 * d.omega * d.omega);
                                 }},
                      family_);
}

double ServiceDistribution::second_moment() const {
    return std::visit(
        overloaded{[](const Exponential& d) { return 2.0 / (d.rate * d.rate); },
                   [](const Gamma& d) { return d.shape * (d.shape + 1.0) / (d.rate * d.rate); },
                   [](const Deterministic& d) { return d.value * d.value; },
                   [](const Uniform& d) { return (d.a * d.a + d.a * d.b + d.b * d.b) / 3.0; },
                   [](const LogNormal& d) { return std::exp(2.0 * d.alpha + 2.0 * d.omega * d.omega); }},
        family_);
}

std::vector<double> ServiceDistribution::breakpoints() const {
    return std::visit(overloaded{[](const Deterministic& d) { return std::vector<double>{d.value}; },
                                 [](const Uniform& d) {
                                     return d.a > 0.0 ? std::vector<double>{d.a, d.b}
                                                      : std::vector<double>{d.b};
                                 },
                                 [](const auto&) { return std::vector<double>{}; }},
                      family_);
}

TransformDomain ServiceDistribution::domain() const {
    return std::visit(overloaded{[](const Exponential& d) { return TransformDomain{d.rate}; },
                                 [](const Gamma& d) { return TransformDomain{d.rate}; },
                                 [](const Deterministic&) { return TransformDomain{kInf}; },
                                 [](const Uniform&) { return TransformDomain{kInf}; },
                                 [](const LogNormal&) { return TransformDomain{0.0}; }},
                      family_);
}

void ServiceDistribution::check_domain(double s, std::string_view what) const {
    const TransformDomain dom = domain();
    if (std::isnan(s) || !dom.contains(s))
        throw DomainError(std::string(what) + " of " + spec() + " undefined at s=" + format_exact(s) +
                          " (requires s < " + format_exact(dom.sup) + ")");
}

double ServiceDistribution::transform(double s) const {
    check_domain(s, "transform");
    if (s == 0.0) return 1.0;
    return std::visit(overloaded{[s](const Exponential& d) { return d.rate / (d.rate - s); },
                                 [s](const Gamma& d) {
                                     return std::exp(-d.shape * std::log1p(-s / d.rate));
                                 },
                                 [s](const Deterministic& d) { return std::exp(s * d.value); },
                                 [s](const Uniform& d) {
                                     return std::exp(s * d.a) * phi1(s * (d.b - d.a));
                                 },
                                 [s](const LogNormal& d) { return lognormal_tilted_moment(d, s, 0.0); }},
                      family_);
}

double ServiceDistribution::transform_deriv(double s) const {
    check_domain(s, "transform derivative");
    if (s == 0.0) return mean();
    return std::visit(
        overloaded{[s](const Exponential& d) { return d.rate / ((d.rate - s) * (d.rate - s)); },
                   [s](const Gamma& d) {
                       return d.shape / (d.rate - s) * std::exp(-d.shape * std::log1p(-s / d.rate));
                   },
                   [s](const Deterministic& d) { return d.value * std::exp(s * d.value); },
                   [s](const Uniform& d) {
                       const double w = d.b - d.a;
                       return std::exp(s * d.a) * (d.a * phi1(s * w) + w * psi(s * w));
                   },
                   [s](const LogNormal& d) { return lognormal_tilted_moment(d, s, 1.0); }},
        family_);
}

double ServiceDistribution::transform_increment(double s) const {
    check_domain(s, "transform increment");
    if (s == 0.0) return mean();
    return std::visit(
        overloaded{[s](const Exponential& d) { return 1.0 / (d.rate - s); },
                   [s](const Gamma& d) { return std::expm1(-d.shape * std::log1p(-s / d.rate)) / s; },
                   [s](const Deterministic& d) { return d.value * phi1(s * d.value); },
                   [s](const Uniform& d) {
                       const double w = d.b - d.a;
                       return w * phi2(s * w) + d.a * phi1(s * d.a) * phi1(s * w);
                   },
                   [this, s](const LogNormal&) {
                       return expect([s](double t) { return t * phi1(s * t); });
                   }},
        family_);
}

double ServiceDistribution::expect(const quad::Integrand& g, quad::Tolerance tol) const {
    return std::visit(
        overloaded{
            [&](const Deterministic& d) { return g(d.value); },
            [&](const Uniform& d) {
                return quad::integrate(g, d.a, d.b, tol).value / (d.b - d.a);
            },
            [&](const LogNormal& d) {
                quad::Integrand h = [&](double z) {
                    const double x = d.alpha + d.omega * z;
                    const double dens = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
                    return dens == 0.0 ? 0.0 : g(std::exp(x)) * dens;
                };
                return quad::integrate(h, -kInf, kInf, tol).value;
            },
            [&](const auto&) {
                quad::Integrand h = [&](double t) {
                    const double dens = pdf(t);
                    return dens == 0.0 ? 0.0 : g(t) * dens;
                };
                return quad::integrate(h, 0.0, kInf, tol).value;
            }},
        family_);
}

double ServiceDistribution::transform_by_quadrature(double s, quad::Tolerance tol) const {
    check_domain(s, "transform");
    return expect([s](double t) { return std::exp(s * t); }, tol);
}

double ServiceDistribution::sample(Rng& rng) const {
    return std::visit(
        overloaded{[&](const Exponential& d) { return std::exponential_distribution<double>(d.rate)(rng); },
                   [&](const Gamma& d) {
                       return std::gamma_distribution<double>(d.shape, 1.0 / d.rate)(rng);
                   },
                   [](const Deterministic& d) { return d.value; },
                   [&](const Uniform& d) { return std::uniform_real_distribution<double>(d.a, d.b)(rng); },
                   [&](const LogNormal& d) {
                       return std::lognormal_distribution<double>(d.alpha, d.omega)(rng);
                   }},
        family_);
}

}  // namespace aoi
