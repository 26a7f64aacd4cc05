#include "aoi/optimizer.hpp"

#include <cmath>
#include <limits>

#include "aoi/analytic.hpp"
#include "aoi/errors.hpp"

namespace aoi {
namespace {

double evaluate(double lambda, const ServiceDistribution& service, Objective objective, double theta) {
    const SystemConfig cfg(lambda, theta, service);
    return objective == Objective::aoi ? average_aoi(cfg) : average_paoi(cfg);
}

}  // namespace

std::string to_string(Objective objective) { return objective == Objective::aoi ? "aoi" : "paoi"; }

std::vector<double> uniform_theta_grid(int n) {
    if (n < 2) throw ConfigError("theta grid needs at least 2 points, got " + std::to_string(n));
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
    grid.back() = 1.0;
    return grid;
}

std::vector<SweepRow> sweep_theta(double lambda, const ServiceDistribution& service,
                                  std::span<const double> grid,
                                  const std::optional<SimulationOptions>& sim) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0 && grid[i] <= 1.0))
            throw ConfigError("theta grid value " + format_exact(grid[i]) + " outside [0, 1]");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw ConfigError("theta grid must be sorted and distinct");
    }
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double theta : grid) {
        SweepRow row{.theta = theta,
                     .avg_aoi = std::numeric_limits<double>::quiet_NaN(),
                     .avg_paoi = std::numeric_limits<double>::quiet_NaN()};
        try {
            const SystemConfig cfg(lambda, theta, service);
            row.avg_aoi = average_aoi(cfg);
            row.avg_paoi = average_paoi(cfg);
            if (sim) {
                SimConfig sc{.system = cfg,
                             .deliveries = sim->deliveries,
                             .warmup_deliveries = sim->warmup_deliveries,
                             .seed = sim->seed};
                const SimSummary s = run(sc).summary;
                row.sim_avg_aoi = s.avg_aoi;
                row.sim_avg_paoi = s.avg_paoi;
                row.sim_se_aoi = s.se_aoi;
                row.sim_se_paoi = s.se_paoi;
            }
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Optimum optimize_theta(double lambda, const ServiceDistribution& service, Objective objective,
                       int grid_points, double refine_tolerance) {
    const std::vector<double> grid = uniform_theta_grid(grid_points);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = evaluate(lambda, service, objective, grid[i]);

    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (values[i] < values[best]) best = i;

    double theta_star = grid[best];
    double value = values[best];
    if (best > 0 && best + 1 < grid.size()) {
        // Golden-section search on the bracket around the best grid point.
        constexpr double inv_phi = 0.6180339887498949;
        double lo = grid[best - 1];
        double hi = grid[best + 1];
        double x1 = hi - inv_phi * (hi - lo);
        double x2 = lo + inv_phi * (hi - lo);
        double f1 = evaluate(lambda, service, objective, x1);
        double f2 = evaluate(lambda, service, objective, x2);
        while (hi - lo > refine_tolerance) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = evaluate(lambda, service, objective, x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = evaluate(lambda, service, objective, x2);
            }
        }
        const double mid = 0.5 * (lo + hi);
        const double fmid = evaluate(lambda, service, objective, mid);
        if (fmid < value) {
            theta_star = mid;
            value = fmid;
        }
    }

    for (double end : {0.0, 1.0}) {
        const double f = end == 0.0 ? values.front() : values.back();
        if (f <= value * (1.0 + 1e-9)) {
            theta_star = end;
            value = f;
        }
    }
    return {theta_star, value, objective, grid_points, refine_tolerance};
}

}  // namespace aoi
