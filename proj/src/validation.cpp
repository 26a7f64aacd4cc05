#include "aoi/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "aoi/errors.hpp"
#include "aoi/optimizer.hpp"
#include "aoi/simulator.hpp"

namespace aoi::validation {

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_statistic_from_density(std::vector<double> samples, const std::function<double(double)>& pdf,
                                 std::span<const double> cuts) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double f = 0.0;
    double prev = 0.0;
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i] > prev) {
            f += quad::integrate_pieces(pdf, prev, samples[i], cuts).value;
            prev = samples[i];
        }
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_critical_value(std::size_t n, double alpha) {
    double c = 0.0;
    if (alpha == 0.01)
        c = 1.628;
    else if (alpha == 0.05)
        c = 1.358;
    else
        throw ConfigError("ks_critical_value supports alpha 0.01 or 0.05");
    const double rn = std::sqrt(static_cast<double>(n));
    return c / (rn + 0.12 + 0.11 / rn);
}

std::vector<SystemConfig> family_grid() {
    const std::vector<ServiceDistribution> families = {
        ServiceDistribution::exponential(1.0),
        ServiceDistribution::gamma(2.0, 2.0),
        ServiceDistribution::deterministic(1.0),
    };
    std::vector<SystemConfig> grid;
    for (const auto& u : families)
        for (double theta : {0.0, 0.5, 1.0})
            for (double lambda : {0.5, 2.0}) grid.emplace_back(lambda, theta, u);
    return grid;
}

std::vector<SystemConfig> lognormal_points() {
    const auto u = ServiceDistribution::lognormal(0.75, 0.75);
    return {SystemConfig(1.0, 0.34, u), SystemConfig(0.2, 1.0, u)};
}

bool Report::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* Report::first_failure() const {
    for (const Check& c : checks)
        if (!c.passed) return &c;
    return nullptr;
}

namespace {

std::string label(const SystemConfig& cfg) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "lambda=%g theta=%g %s", cfg.lambda, cfg.theta, cfg.service.spec().c_str());
    return buf;
}

void add(Report& r, std::string name, double observed, double expected, double tolerance) {
    const bool ok = std::isfinite(observed) && std::abs(observed - expected) <= tolerance;
    r.checks.push_back({std::move(name), observed, expected, tolerance, ok});
}

void normalization(Report& r, const std::vector<SystemConfig>& cfgs) {
    for (const auto& cfg : cfgs) {
        const AnalyticModel m(cfg);
        const double worst = std::max({std::abs(m.aoi_mgf(0.0) - 1.0), std::abs(m.paoi_mgf(0.0) - 1.0),
                                       std::abs(m.interdeparture_mgf(0.0) - 1.0),
                                       std::abs(m.system_time_mgf(0.0) - 1.0)});
        add(r, "MGF normalization at s=0 [" + label(cfg) + "]", 1.0 + worst, 1.0, 0.0);
    }
}

void consistency(Report& r, const std::vector<SystemConfig>& cfgs, double scale) {
    for (const auto& cfg : cfgs) {
        if (cfg.theta == 0.0) continue;
        const AnalyticModel m(cfg);
        double worst = 0.0;
        for (double s : {-1.5, -0.7, -0.2, 0.3 * m.roc_sup()}) {
            if (s == 0.0) continue;
            const double lhs = aoi_mgf_from_components(cfg, s);
            const double rhs = aoi_mgf_closed_form(cfg, s);
            worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
        }
        add(r, "AoI MGF components vs closed form, max rel diff [" + label(cfg) + "]", worst, 0.0,
            1e-10 * scale);
    }
}

void endpoint_limits(Report& r, double scale) {
    const std::vector<ServiceDistribution> families = {
        ServiceDistribution::exponential(1.0), ServiceDistribution::gamma(2.0, 2.0),
        ServiceDistribution::deterministic(1.0), ServiceDistribution::lognormal(0.75, 0.75)};
    for (const auto& u : families)
        for (double lambda : {0.5, 2.0}) {
            const double d0 = average_aoi(SystemConfig(lambda, 0.0, u));
            const double dsmall = average_aoi(SystemConfig(lambda, 1e-4, u));
            add(r, "theta->0 limit of average AoI [lambda=" + format_exact(lambda) + " " + u.spec() + "]",
                dsmall, d0, 1e-3 * d0 * scale);
            const double d1 = average_aoi(SystemConfig(lambda, 1.0, u));
            const double dnear = average_aoi(SystemConfig(lambda, 1.0 - 1e-4, u));
            add(r, "theta->1 limit of average AoI [lambda=" + format_exact(lambda) + " " + u.spec() + "]",
                dnear, d1, 1e-3 * d1 * scale);
        }
}

void agreement(Report& r, const SystemConfig& cfg, std::uint64_t deliveries, std::uint64_t seed, double scale) {
    const SimConfig sc{.system = cfg, .deliveries = deliveries, .warmup_deliveries = 1000, .seed = seed};
    const SimSummary s = run(sc).summary;
    const double pd = delivery_prob(cfg);
    auto tol = [&](double se, double v) { return std::max(3.0 * se, 0.005 * v) * scale; };
    const double aoi = average_aoi(cfg);
    const double paoi = average_paoi(cfg);
    const double ybar = mean_interdeparture(cfg);
    add(r, "simulated average AoI [" + label(cfg) + "]", s.avg_aoi, aoi, tol(s.se_aoi, aoi));
    add(r, "simulated average peak AoI [" + label(cfg) + "]", s.avg_paoi, paoi, tol(s.se_paoi, paoi));
    add(r, "simulated mean interdeparture [" + label(cfg) + "]", s.mean_interdeparture, ybar,
        tol(s.se_interdeparture, ybar));
    add(r, "simulated delivery probability [" + label(cfg) + "]", s.delivery_prob, pd,
        tol(s.se_delivery_prob, pd));
}

void decomposition(Report& r, const SystemConfig& cfg, std::uint64_t deliveries, std::uint64_t seed,
                   double scale) {
    const SimConfig sc{
        .system = cfg, .deliveries = deliveries, .warmup_deliveries = 1000, .seed = seed, .keep_trace = true};
    const SimResult res = run(sc);
    const Decomposition dec = decompose_interdeparture(res.trace);
    const double p = delivery_prob(cfg);
    const double n = static_cast<double>(dec.size());
    for (std::uint32_t v = 0; v <= 5; ++v) {
        const double q = p * std::pow(1.0 - p, v);
        const double hits = static_cast<double>(std::count(dec.counts().begin(), dec.counts().end(), v));
        const double se = std::sqrt(q * (1.0 - q) / n);
        add(r, "Pr(V=" + std::to_string(v) + ") geometric [" + label(cfg) + "]", hits / n, q, 3.0 * se * scale);
    }

    const std::size_t cap = 20000;
    auto head = [&](const std::vector<double>& x) {
        return std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(std::min(cap, x.size())));
    };
    const std::vector<double> cuts = cfg.service.breakpoints();
    if (!std::holds_alternative<Deterministic>(cfg.service.family())) {
        const auto eta = head(dec.delivered());
        const double d = ks_statistic_from_density(
            eta, [&](double t) { return sojourn_pdf_eta(cfg, t); }, cuts);
        add(r, "KS delivered sojourn vs f_eta [" + label(cfg) + "]", d, 0.0,
            ks_critical_value(eta.size()) * scale);
    }
    if (cfg.preemption_rate() > 0.0 && !dec.preempted().empty()) {
        const auto bar = head(dec.preempted());
        const double d = ks_statistic_from_density(
            bar, [&](double t) { return sojourn_pdf_etabar(cfg, t); }, cuts);
        add(r, "KS preempted sojourn vs f_etabar [" + label(cfg) + "]", d, 0.0,
            ks_critical_value(bar.size()) * scale);
    }
}

}  // namespace

Report run(const Options& options) {
    Report r;
    const double scale = options.tolerance_scale;
    std::vector<SystemConfig> all = family_grid();
    for (const auto& c : lognormal_points()) all.push_back(c);

    normalization(r, all);
    consistency(r, all, scale);
    add(r, "average AoI, lambda=1 theta=1 exp:rate=1", average_aoi(SystemConfig(1, 1, ServiceDistribution::exponential(1))),
        2.0, 2e-9 * scale);
    add(r, "average AoI, lambda=1 theta=1 det:value=1",
        average_aoi(SystemConfig(1, 1, ServiceDistribution::deterministic(1))), std::numbers::e,
        std::numbers::e * 1e-9 * scale);
    endpoint_limits(r, scale);
    for (const auto& cfg : all) {
        const double d = average_aoi(cfg);
        add(r, "first AoI moment from MGF [" + label(cfg) + "]", aoi_moment(cfg, 1), d, 1e-6 * d * scale);
    }
    const Optimum opt = optimize_theta(1.0, ServiceDistribution::lognormal(0.75, 0.75), Objective::aoi);
    add(r, "optimal theta, lambda=1 lognormal(0.75,0.75)", opt.theta_star, 0.34, 0.02 * scale);

    if (options.level == Level::quick) {
        agreement(r, SystemConfig(1.0, 1.0, ServiceDistribution::exponential(1.0)), 200'000, options.seed, scale);
        agreement(r, lognormal_points().front(), 200'000, options.seed + 1, scale);
        return r;
    }

    std::uint64_t seed = options.seed;
    for (const auto& cfg : all) agreement(r, cfg, 1'000'000, seed++, scale);
    for (const auto& cfg : family_grid())
        if (cfg.theta == 0.5 && cfg.lambda == 2.0) decomposition(r, cfg, 200'000, seed++, scale);
    decomposition(r, lognormal_points().front(), 200'000, seed++, scale);
    return r;
}

void print(std::ostream& out, const Report& report) {
    char line[512];
    for (const Check& c : report.checks) {
        std::snprintf(line, sizeof line, "[%s] %s: observed %.12g expected %.12g tolerance %.3g\n",
                      c.passed ? "PASS" : "FAIL", c.name.c_str(), c.observed, c.expected, c.tolerance);
        out << line;
    }
    const auto failed = std::count_if(report.checks.begin(), report.checks.end(),
                                      [](const Check& c) { return !c.passed; });
    out << report.checks.size() - static_cast<std::size_t>(failed) << "/" << report.checks.size()
        << " checks passed\n";
}

}  // namespace aoi::validation
