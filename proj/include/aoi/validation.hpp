#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "aoi/analytic.hpp"

namespace aoi::validation {

/// Kolmogorov-Smirnov statistic sup |F_n - F| of the samples against cdf.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Same, with F obtained by integrating `pdf` from 0 between consecutive
/// sorted samples (split at `cuts`). For laws whose CDF has no closed form.
double ks_statistic_from_density(std::vector<double> samples, const std::function<double(double)>& pdf,
                                 std::span<const double> cuts = {});

/// Critical value of the one-sample KS statistic at level alpha (Stephens'
/// finite-n form of the asymptotic Kolmogorov quantile); alpha in {0.01, 0.05}.
double ks_critical_value(std::size_t n, double alpha = 0.01);

/// The 12-point grid {exp(1), gamma(2,2), det(1)} x theta {0, 0.5, 1} x
/// lambda {0.5, 2}.
std::vector<SystemConfig> family_grid();
/// The two log-normal(0.75, 0.75) operating points: (lambda 1, theta 0.34)
/// and (lambda 0.2, theta 1).
std::vector<SystemConfig> lognormal_points();

struct Check {
    std::string name;
    double observed;
    double expected;
    double tolerance;
    bool passed;
};

struct Report {
    std::vector<Check> checks;

    bool passed() const;
    const Check* first_failure() const;
};

enum class Level { quick, full };

struct Options {
    Level level = Level::quick;
    /// Multiplies every tolerance; a test hook for forcing failures.
    double tolerance_scale = 1.0;
    std::uint64_t seed = 20240601;
};

Report run(const Options& options);

void print(std::ostream& out, const Report& report);

}  // namespace aoi::validation
