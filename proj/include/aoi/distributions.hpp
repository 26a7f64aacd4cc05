#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aoi/quadrature.hpp"
#include "aoi/random.hpp"

namespace aoi {

struct Exponential {
    double rate;
    bool operator==(const Exponential&) const = default;
};
struct Gamma {
    double shape;
    double rate;
    bool operator==(const Gamma&) const = default;
};
struct Deterministic {
    double value;
    bool operator==(const Deterministic&) const = default;
};
struct Uniform {
    double a;
    double b;
    bool operator==(const Uniform&) const = default;
};
struct LogNormal {
    double alpha;  // location of ln U
    double omega;  // scale of ln U
    bool operator==(const LogNormal&) const = default;
};

/// Set of s where E[e^{sU}] is finite, minus the boundary. s = 0 is always
/// admitted since every law normalizes there.
struct TransformDomain {
    double sup = std::numeric_limits<double>::infinity();

    bool contains(double s) const { return s == 0.0 || s < sup; }
};

/// Service-time law U. Immutable once built; parameters are validated by the
/// constructor (aoi::ConfigError on violation).
class ServiceDistribution {
public:
    using Family = std::variant<Exponential, Gamma, Deterministic, Uniform, LogNormal>;

    explicit ServiceDistribution(Family family);

    static ServiceDistribution exponential(double rate) { return ServiceDistribution(Exponential{rate}); }
    static ServiceDistribution gamma(double shape, double rate) {
        return ServiceDistribution(Gamma{shape, rate});
    }
    static ServiceDistribution deterministic(double value) {
        return ServiceDistribution(Deterministic{value});
    }
    static ServiceDistribution uniform(double a, double b) { return ServiceDistribution(Uniform{a, b}); }
    static ServiceDistribution lognormal(double alpha, double omega) {
        return ServiceDistribution(LogNormal{alpha, omega});
    }

    const Family& family() const { return family_; }

    /// Canonical spec string, e.g. "lognormal:alpha=0.75,omega=0.75";
    /// parse_distribution(spec()) == *this.
    std::string spec() const;

    double pdf(double t) const;
    double cdf(double t) const;
    /// 1 - cdf(t), computed without cancellation in the upper tail.
    double survival(double t) const;
    double mean() const;
    double second_moment() const;

    /// Points where the density or CDF is not smooth; quadrature splits there.
    std::vector<double> breakpoints() const;

    TransformDomain domain() const;

    /// E[e^{sU}]. Closed form except for LogNormal (quadrature in log space).
    /// Throws aoi::DomainError outside domain().
    double transform(double s) const;
    /// E[U e^{sU}].
    double transform_deriv(double s) const;
    /// (E[e^{sU}] - 1) / s, continued by E[U] at s = 0. Free of the
    /// cancellation in the naive quotient near 0.
    double transform_increment(double s) const;

    /// E[g(U)] by adaptive quadrature against the density (exact for
    /// Deterministic).
    double expect(const quad::Integrand& g, quad::Tolerance tol = quad::default_tolerance()) const;
    /// E[e^{sU}] through expect(), bypassing any closed form.
    double transform_by_quadrature(double s, quad::Tolerance tol = quad::default_tolerance()) const;

    double sample(Rng& rng) const;

    bool operator==(const ServiceDistribution&) const = default;

private:
    void check_domain(double s, std::string_view what) const;

    Family family_;
};

/// Parse `exp:rate=<f>`, `gamma:shape=<f>,rate=<f>`, `det:value=<f>`,
/// `uniform:a=<f>,b=<f>` or `lognormal:alpha=<f>,omega=<f>`.
/// Throws aoi::ParseError naming the offending token, or aoi::ConfigError for
/// well-formed but out-of-domain parameters.
ServiceDistribution parse_distribution(std::string_view spec);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_exact(double v);

}  // namespace aoi
