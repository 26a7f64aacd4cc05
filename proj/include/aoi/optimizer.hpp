#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aoi/distributions.hpp"
#include "aoi/simulator.hpp"

namespace aoi {

enum class Objective { aoi, paoi };

std::string to_string(Objective objective);

struct SweepRow {
    double theta;
    double avg_aoi;
    double avg_paoi;
    /// Set when the analytic evaluation failed; the averages are NaN then.
    std::optional<std::string> error = std::nullopt;
    std::optional<double> sim_avg_aoi = std::nullopt;
    std::optional<double> sim_avg_paoi = std::nullopt;
    std::optional<double> sim_se_aoi = std::nullopt;
    std::optional<double> sim_se_paoi = std::nullopt;

    bool ok() const { return !error.has_value(); }
};

/// n >= 2 equally spaced points from 0 to 1 inclusive; the ends are exact.
std::vector<double> uniform_theta_grid(int n);

struct SimulationOptions {
    std::uint64_t deliveries = 100'000;
    std::uint64_t warmup_deliveries = 1'000;
    std::uint64_t seed = 1;
};

/// One row per grid point. Grid values must lie in [0, 1], sorted and
/// distinct (aoi::ConfigError otherwise). A failing row is marked and the
/// sweep continues. With `sim`, every row also carries simulation estimates.
std::vector<SweepRow> sweep_theta(double lambda, const ServiceDistribution& service,
                                  std::span<const double> grid,
                                  const std::optional<SimulationOptions>& sim = std::nullopt);

struct Optimum {
    double theta_star;
    double objective_value;
    Objective objective;
    int grid_points;
    double refine_tolerance;
};

/// Global minimizer of the average AoI or peak AoI over theta in [0, 1]:
/// scan a uniform grid, refine the best interior bracket by golden-section
/// search, then compare with both endpoints. An endpoint wins ties within
/// 1e-9 relative.
Optimum optimize_theta(double lambda, const ServiceDistribution& service, Objective objective,
                       int grid_points = 101, double refine_tolerance = 1e-4);

}  // namespace aoi
