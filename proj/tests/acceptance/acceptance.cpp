// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/errors.hpp"
#include "aoi/optimizer.hpp"
#include "aoi/simulator.hpp"
#include "aoi/validation.hpp"

using namespace aoi;

namespace {

// Tolerances and run sizes.
constexpr double kOptLo = 0.32, kOptHi = 0.36;
constexpr double kOptSeconds = 10.0;
constexpr double kEndpointRel = 1e-3;
constexpr double kSpotRel = 1e-9;
constexpr double kSigmas = 3.0;
constexpr double kAgreementRel = 0.005;
constexpr double kGridSeconds = 300.0;
constexpr double kComponentRel = 1e-10;
constexpr double kGeometricRel = 1e-9;
constexpr double kMomentRel = 1e-6;
constexpr double kKsAlpha = 0.01;
constexpr std::uint64_t kDeliveries = 1'000'000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string label(const SystemConfig& c) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "lambda=%g theta=%g %s", c.lambda, c.theta, c.service.spec().c_str());
    return buf;
}

// Collects the failures of one criterion; the first few are printed.
struct Criterion {
    int id;
    std::string title;
    std::vector<std::string> failures;
    int checks = 0;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok) failures.push_back(what);
    }
    bool passed() const { return failures.empty() && checks > 0; }
};

std::string fmt(const char* f, double a, double b, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

std::vector<SystemConfig> grid14() {
    std::vector<SystemConfig> g = validation::family_grid();
    for (const auto& c : validation::lognormal_points()) g.push_back(c);
    return g;
}

// 20 points inside the region of convergence, clear of s = 0 and s = theta*lambda
// where the closed forms are removable singularities.
std::vector<double> s_points(const SystemConfig& cfg) {
    const double top = 0.9 * mgf_roc(cfg);
    const double a = cfg.preemption_rate();
    std::vector<double> pts;
    for (int i = 0; i < 40 && pts.size() < 20; ++i) {
        const double s = -4.0 + (top + 4.0) * i / 39.0;
        if (std::abs(s) < 0.05 || std::abs(s - a) < 0.05) continue;
        pts.push_back(s);
    }
    return pts;
}

// Runs f; an aoi::Error counts as a failed check instead of aborting the run.
void guarded(Criterion& c, const std::string& what, const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        c.expect(false, what + ": " + e.what());
    }
}

void criterion1(Criterion& c) {
    const auto t0 = Clock::now();
    const Optimum o = optimize_theta(1.0, ServiceDistribution::lognormal(0.75, 0.75), Objective::aoi);
    const double secs = seconds_since(t0);
    c.expect(o.theta_star >= kOptLo && o.theta_star <= kOptHi, fmt("theta*=%.6f", o.theta_star, 0));
    c.expect(secs < kOptSeconds, fmt("runtime %.2f s", secs, 0));
    std::printf("  theta* = %.6f, avg AoI = %.11f, %.2f s\n", o.theta_star, o.objective_value, secs);
}

void criterion2(Criterion& c) {
    const auto t0 = Clock::now();
    const auto u = ServiceDistribution::lognormal(0.75, 0.75);
    const Optimum o = optimize_theta(0.2, u, Objective::aoi);
    const std::vector<double> grid = uniform_theta_grid(101);
    const std::vector<SweepRow> rows = sweep_theta(0.2, u, grid);
    const double secs = seconds_since(t0);
    c.expect(o.theta_star == 1.0, fmt("theta*=%.6f", o.theta_star, 0));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        c.expect(rows[i].ok(), "row failed at theta=" + std::to_string(rows[i].theta));
        if (i > 0) c.expect(rows[i].avg_aoi <= rows[i - 1].avg_aoi, fmt("increase at theta=%.2f", rows[i].theta, 0));
    }
    c.expect(secs < kOptSeconds, fmt("runtime %.2f s", secs, 0));
    std::printf("  theta* = %g, avg AoI %.6f -> %.6f over 101 points, %.2f s\n", o.theta_star, rows.front().avg_aoi,
                rows.back().avg_aoi, secs);
}

void criterion3(Criterion& c) {
    double worst = 0.0;
    for (const auto& u : {ServiceDistribution::exponential(1.0), ServiceDistribution::gamma(2.0, 2.0),
                          ServiceDistribution::deterministic(1.0), ServiceDistribution::lognormal(0.75, 0.75)}) {
        for (double lambda : {0.5, 2.0}) {
            const std::string where = u.spec() + " lambda=" + std::to_string(lambda);
            guarded(c, where, [&] {
                const double d0 = average_aoi_no_preemption(lambda, u);
                const double r0 = rel(average_aoi(SystemConfig(lambda, 1e-4, u)), d0);
                const double d1 = average_aoi(SystemConfig(lambda, 1.0, u));
                const double r1 = rel(average_aoi(SystemConfig(lambda, 1.0 - 1e-4, u)), d1);
                worst = std::max({worst, r0, r1});
                c.expect(r0 <= kEndpointRel, where + fmt(" theta->0 rel %.3g", r0, 0));
                c.expect(r1 <= kEndpointRel, where + fmt(" theta->1 rel %.3g", r1, 0));
            });
        }
    }
    std::printf("  worst relative gap %.3g over 8 cases x 2 ends\n", worst);
}

void criterion4(Criterion& c) {
    struct Spot {
        SystemConfig cfg;
        double want;
    };
    const Spot spots[] = {{SystemConfig(1.0, 1.0, ServiceDistribution::exponential(1.0)), 2.0},
                          {SystemConfig(1.0, 1.0, ServiceDistribution::deterministic(1.0)), std::numbers::e}};
    std::uint64_t seed = 401;
    for (const Spot& s : spots) {
        const double d = average_aoi(s.cfg);
        c.expect(rel(d, s.want) <= kSpotRel, label(s.cfg) + fmt(" analytic %.15g vs %.15g", d, s.want));
        const SimSummary sim =
            run(SimConfig{.system = s.cfg, .deliveries = kDeliveries, .warmup_deliveries = 1000, .seed = seed++})
                .summary;
        c.expect(std::abs(sim.avg_aoi - s.want) <= kSigmas * sim.se_aoi,
                 label(s.cfg) + fmt(" sim %.6f +- %.6f vs %.6f", sim.avg_aoi, sim.se_aoi, s.want));
        std::printf("  %s: analytic %.15g, simulated %.5f (SE %.5f)\n", label(s.cfg).c_str(), d, sim.avg_aoi,
                    sim.se_aoi);
    }
}

void criterion6(Criterion& c) {
    int points = 0;
    double worst_component = 0.0, worst_geo = 0.0;
    for (const auto& cfg : grid14()) {
        guarded(c, label(cfg), [&] {
            const AnalyticModel m(cfg);
            c.expect(m.aoi_mgf(0.0) == 1.0 && m.paoi_mgf(0.0) == 1.0 && m.interdeparture_mgf(0.0) == 1.0 &&
                         m.system_time_mgf(0.0) == 1.0,
                     label(cfg) + " normalization");
            const auto pts = s_points(cfg);
            c.expect(pts.size() == 20, label(cfg) + " fewer than 20 points");
            for (double s : pts) {
                ++points;
                const double comp = rel(aoi_mgf_from_components(cfg, s), aoi_mgf_closed_form(cfg, s));
                const double y = interdeparture_mgf_closed_form(cfg, s);
                const double geo = rel(interdeparture_mgf_geometric(cfg, s), y);
                worst_component = std::max(worst_component, comp);
                worst_geo = std::max(worst_geo, geo);
                c.expect(comp <= kComponentRel, label(cfg) + fmt(" s=%g component/closed rel %.3g", s, comp));
                c.expect(geo <= kGeometricRel, label(cfg) + fmt(" s=%g geometric/closed rel %.3g", s, geo));
            }
        });
    }
    std::printf("  %d points: worst component-vs-closed %.3g, worst geometric-vs-closed %.3g\n", points,
                worst_component, worst_geo);
}

// Criteria 5, 7 and 8 share one simulated trace per configuration.
void simulation_grid(Criterion& c5, Criterion& c7, Criterion& c8) {
    const auto t0 = Clock::now();
    std::uint64_t seed = 501;
    double worst_sigma_m2 = 0.0, worst_pmf = 0.0;
    for (const auto& cfg : grid14()) {
        const std::string name = label(cfg);
        const SimResult r = run(SimConfig{.system = cfg,
                                          .deliveries = kDeliveries,
                                          .warmup_deliveries = 1000,
                                          .seed = seed++,
                                          .keep_trace = true});
        const SimSummary& s = r.summary;

        guarded(c5, name, [&] {
            const AnalyticSummary a = summarize(cfg);
            auto agree = [&](const char* what, double sim, double se, double ana) {
                const double tol = std::max(kSigmas * se, kAgreementRel * ana);
                c5.expect(std::abs(sim - ana) <= tol, name + " " + what + fmt(": sim %.6g ana %.6g tol %.3g", sim, ana, tol));
            };
            agree("avg AoI", s.avg_aoi, s.se_aoi, a.avg_aoi);
            agree("avg PAoI", s.avg_paoi, s.se_paoi, a.avg_paoi);
            agree("mean interdeparture", s.mean_interdeparture, s.se_interdeparture, a.mean_interdeparture);
            agree("delivery probability", s.delivery_prob, s.se_delivery_prob, a.delivery_prob);
        });

        guarded(c7, name, [&] {
            const double d = average_aoi(cfg), pa = average_paoi(cfg);
            c7.expect(rel(aoi_moment(cfg, 1), d) <= kMomentRel, name + " first AoI moment");
            c7.expect(rel(paoi_moment(cfg, 1), pa) <= kMomentRel, name + " first PAoI moment");
            const Estimate m2 = empirical_moment(r.trace, 2, Quantity::peak);
            const double ana = paoi_moment(cfg, 2);
            worst_sigma_m2 = std::max(worst_sigma_m2, std::abs(m2.value - ana) / m2.se);
            c7.expect(std::abs(m2.value - ana) <= kSigmas * m2.se,
                      name + fmt(" E[A^2] sim %.6g +- %.3g vs %.6g", m2.value, m2.se, ana));
        });

        if (cfg.theta == 0.0) continue;
        guarded(c8, name, [&] {
            const Decomposition dec = decompose_interdeparture(r.trace);
            const SimTrace& t = r.trace;
            const double n = static_cast<double>(dec.size());
            const double p = delivery_prob(cfg);
            for (std::uint32_t v = 0; v <= 5; ++v) {
                const double q = p * std::pow(1.0 - p, v);
                const double hits = static_cast<double>(std::count(dec.counts().begin(), dec.counts().end(), v));
                const double se = std::sqrt(q * (1.0 - q) / n);
                if (se > 0.0) worst_pmf = std::max(worst_pmf, std::abs(hits / n - q) / se);
                c8.expect(std::abs(hits / n - q) <= kSigmas * se,
                          name + fmt(" Pr(V=%g) sim %.6f vs %.6f", v, hits / n, q));
            }

            // per-cycle identity: idle + preempted + delivered = Y to within the
            // rounding of the epochs the sojourns were cut from
            for (std::size_t i = 0; i < dec.size(); ++i) {
                const CycleSojourns cy = dec.cycle(i);
                const double sum = std::accumulate(cy.preempted.begin(), cy.preempted.end(), cy.idle) + cy.delivered;
                const double ulp = std::numeric_limits<double>::epsilon() * t.deliver_time[i];
                if (std::abs(sum - t.interdeparture[i]) > 2.0 * ulp * static_cast<double>(cy.preempted.size() + 3)) {
                    c8.expect(false, name + " cycle identity at delivery " + std::to_string(t.index[i]));
                    break;
                }
            }
            c8.expect(true, "");

            // Every recorded sojourn enters the KS tests; they are iid across cycles.
            // The densities are evaluated with their normalizers computed once,
            // after checking them against the library's per-call versions.
            const double a = cfg.preemption_rate();
            const double c = cfg.service.transform_increment(-a);
            const auto pdf_eta = [&](double x) { return std::exp(-a * x) * cfg.service.pdf(x) / p; };
            const auto pdf_bar = [&](double x) { return std::exp(-a * x) * cfg.service.survival(x) / c; };
            for (double x : {0.1, 0.7, 1.9}) {
                const double want_bar = sojourn_pdf_etabar(cfg, x);
                c8.expect(std::abs(pdf_bar(x) - want_bar) <= 1e-14 * want_bar, name + " eta-bar density");
                const double want_eta = sojourn_pdf_eta(cfg, x);
                c8.expect(std::abs(pdf_eta(x) - want_eta) <= 1e-14 * want_eta, name + " eta density");
            }
            const std::vector<double> cuts = cfg.service.breakpoints();
            // a deterministic service makes the completed sojourn a point mass
            if (!std::holds_alternative<Deterministic>(cfg.service.family())) {
                const double crit = validation::ks_critical_value(dec.delivered().size(), kKsAlpha);
                const double d = validation::ks_statistic_from_density(dec.delivered(), pdf_eta, cuts);
                c8.expect(d < crit, name + fmt(" KS eta D=%.5f crit %.5f", d, crit));
            } else {
                const double u = std::get<Deterministic>(cfg.service.family()).value;
                c8.expect(std::all_of(dec.delivered().begin(), dec.delivered().end(),
                                      [&](double x) { return std::abs(x - u) <= 1e-9 * (1.0 + u); }),
                          name + " completed sojourn equals the service time");
            }
            const double crit = validation::ks_critical_value(dec.preempted().size(), kKsAlpha);
            const double d = validation::ks_statistic_from_density(dec.preempted(), pdf_bar, cuts);
            c8.expect(d < crit, name + fmt(" KS eta-bar D=%.5f crit %.5f", d, crit));
        });
    }
    const double secs = seconds_since(t0);
    c5.expect(secs < kGridSeconds, fmt("runtime %.1f s", secs, 0));
    std::printf("  14 configs x %llu deliveries in %.1f s; worst E[A^2] z = %.2f, worst V pmf z = %.2f\n",
                static_cast<unsigned long long>(kDeliveries), secs, worst_sigma_m2, worst_pmf);
}

}  // namespace

int main() {
    std::vector<Criterion> cs = {
        {1, "optimal theta at lambda=1 lies in [0.32, 0.36], < 10 s", {}},
        {2, "theta*=1 and average AoI non-increasing at lambda=0.2, < 10 s", {}},
        {3, "endpoint limits theta->0 and theta->1 within 1e-3", {}},
        {4, "closed-form spot values 2 and e, confirmed by simulation", {}},
        {5, "analytic vs simulated average AoI, PAoI, interdeparture, delivery probability", {}},
        {6, "transform normalization, component and geometric forms", {}},
        {7, "moments from transforms; second PAoI moment vs simulation", {}},
        {8, "interdeparture decomposition: V pmf, sojourn KS tests, cycle identity", {}},
    };

    std::printf("criterion 1\n");
    guarded(cs[0], "optimize", [&] { criterion1(cs[0]); });
    std::printf("criterion 2\n");
    guarded(cs[1], "optimize", [&] { criterion2(cs[1]); });
    std::printf("criterion 3\n");
    criterion3(cs[2]);
    std::printf("criterion 4\n");
    guarded(cs[3], "spot values", [&] { criterion4(cs[3]); });
    std::printf("criterion 6\n");
    criterion6(cs[5]);
    std::printf("criteria 5, 7, 8\n");
    simulation_grid(cs[4], cs[6], cs[7]);

    std::printf("\n");
    bool all = true;
    for (const Criterion& c : cs) {
        all = all && c.passed();
        std::printf("%s %d: %s (%d checks)\n", c.passed() ? "PASS" : "FAIL", c.id, c.title.c_str(), c.checks);
        for (std::size_t i = 0; i < c.failures.size() && i < 5; ++i) std::printf("    %s\n", c.failures[i].c_str());
    }
    return all ? 0 : 1;
}
