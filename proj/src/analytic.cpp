#include "aoi/analytic.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "aoi/errors.hpp"
#include "aoi/kernels.hpp"

namespace aoi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1 - a c(s - a): vanishes at the pole of M_Y that is not s = lambda.
double pole_factor(const ServiceDistribution& u, double a, double s) {
    return 1.0 - a * u.transform_increment(s - a);
}

double find_roc(const SystemConfig& cfg) {
    const double a = cfg.preemption_rate();
    const double sup = cfg.service.domain().sup;
    if (a == 0.0) return std::min(cfg.lambda, sup);

    const double cap = std::min(cfg.lambda, a + sup);
    // pole_factor is decreasing in s and equals p > 0 at s = 0.
    if (cfg.service.domain().contains(cap - a) && pole_factor(cfg.service, a, cap) > 0.0) return cap;

    double lo = 0.0;
    double hi = cap;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (pole_factor(cfg.service, a, mid) > 0.0 ? lo : hi) = mid;
    }
    return lo;
}

enum class Stencil { central, backward };

// m-th derivative at 0 of f via a Richardson tableau over step halvings,
// keeping the entry with the smallest error estimate.
template <class F>
double richardson_derivative(const F& f, int m, double h0, Stencil stencil) {
    auto difference = [&](double h) {
        if (stencil == Stencil::central) {
            switch (m) {
                case 1: return (f(h) - f(-h)) / (2.0 * h);
                case 2: return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
                default: return (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h);
            }
        }
        switch (m) {
            case 1: return (f(0.0) - f(-h)) / h;
            case 2: return (f(0.0) - 2.0 * f(-h) + f(-2.0 * h)) / (h * h);
            default: return (f(0.0) - 3.0 * f(-h) + 3.0 * f(-2.0 * h) - f(-3.0 * h)) / (h * h * h);
        }
    };
    // Central errors expand in h^2, one-sided in h.
    const double ratio = stencil == Stencil::central ? 4.0 : 2.0;
    constexpr int levels = 8;
    std::array<std::array<double, levels>, levels> t{};
    double best = kInf;
    double best_err = kInf;
    double h = h0;
    for (int i = 0; i < levels; ++i, h *= 0.5) {
        t[i][0] = difference(h);
        double factor = ratio;
        for (int j = 1; j <= i; ++j, factor *= ratio) {
            t[i][j] = t[i][j - 1] + (t[i][j - 1] - t[i - 1][j - 1]) / (factor - 1.0);
            const double err =
                std::max(std::abs(t[i][j] - t[i][j - 1]), std::abs(t[i][j] - t[i - 1][j - 1]));
            if (err <= best_err) {
                best_err = err;
                best = t[i][j];
            }
        }
        if (i > 0 && std::abs(t[i][i] - t[i - 1][i - 1]) >= 2.0 * best_err && i >= 3) break;
    }
    if (!(best_err <= 1e-5 * std::abs(best)))
        throw PrecisionError("finite-difference extrapolation for moment " + std::to_string(m) +
                             " did not settle (estimate " + std::to_string(best) + ", error " +
                             std::to_string(best_err) + ")");
    return best;
}

template <class F>
double mgf_moment(const F& mgf, double roc, int m) {
    if (m < 1 || m > 3) throw DomainError("moment order must be 1, 2 or 3, got " + std::to_string(m));
    if (roc >= 0.04) {
        // Outermost stencil point stays at half the region of convergence.
        const double h0 = 0.25 * std::min(1.0, roc) / m;
        return richardson_derivative(mgf, m, h0, Stencil::central);
    }
    return richardson_derivative(mgf, m, 0.05 / m, Stencil::backward);
}

}  // namespace

SystemConfig::SystemConfig(double lambda_, double theta_, ServiceDistribution service_)
    : lambda(lambda_), theta(theta_), service(std::move(service_)) {
    if (!(std::isfinite(lambda) && lambda > 0.0))
        throw ConfigError("arrival rate lambda must be > 0, got " + format_exact(lambda));
    if (!(theta >= 0.0 && theta <= 1.0))
        throw ConfigError("preemption probability theta must lie in [0, 1], got " + format_exact(theta));
}

// --- AnalyticModel -----------------------------------------------------------

AnalyticModel::AnalyticModel(SystemConfig cfg)
    : cfg_(std::move(cfg)),
      p_(cfg_.service.transform(-cfg_.preemption_rate())),
      inc_at_minus_a_(cfg_.service.transform_increment(-cfg_.preemption_rate())),
      roc_(find_roc(cfg_)) {}

double AnalyticModel::mean_interdeparture() const { return 1.0 / cfg_.lambda + inc_at_minus_a_ / p_; }

double AnalyticModel::mean_system_time() const {
    return cfg_.service.transform_deriv(-cfg_.preemption_rate()) / p_;
}

void AnalyticModel::require_roc(double s, const char* what) const {
    if (std::isnan(s) || !(s < roc_))
        throw DomainError(std::string(what) + " undefined at s=" + format_exact(s) +
                          ": outside region of convergence s < " + format_exact(roc_));
}

double AnalyticModel::system_time_mgf(double s) const {
    if (s == 0.0) return 1.0;
    const double a = cfg_.preemption_rate();
    if (!cfg_.service.domain().contains(s - a))
        throw DomainError("system-time MGF undefined at s=" + format_exact(s) + ": requires s < " +
                          format_exact(a + cfg_.service.domain().sup));
    return cfg_.service.transform(s - a) / p_;
}

double AnalyticModel::interdeparture_mgf(double s) const {
    if (s == 0.0) return 1.0;
    require_roc(s, "interdeparture MGF");
    const double a = cfg_.preemption_rate();
    const double m = cfg_.service.transform(s - a);
    return cfg_.lambda * m / ((cfg_.lambda - s) * pole_factor(cfg_.service, a, s));
}

double AnalyticModel::aoi_mgf(double s) const {
    if (std::abs(s) < 1e-12) return 1.0;
    require_roc(s, "AoI MGF");
    // (M_Y(s) - 1)/s = (1 + (lambda - a) c(s - a)) / ((lambda - s)(1 - a c(s - a)))
    const double a = cfg_.preemption_rate();
    const double c = cfg_.service.transform_increment(s - a);
    const double residual = (1.0 + (cfg_.lambda - a) * c) / ((cfg_.lambda - s) * (1.0 - a * c));
    return system_time_mgf(s) * residual / mean_interdeparture();
}

double AnalyticModel::paoi_mgf(double s) const {
    if (s == 0.0) return 1.0;
    require_roc(s, "peak-AoI MGF");
    return system_time_mgf(s) * interdeparture_mgf(s);
}

// --- free functions ----------------------------------------------------------

double delivery_prob(const SystemConfig& cfg) { return cfg.service.transform(-cfg.preemption_rate()); }

double system_time_mgf(const SystemConfig& cfg, double s) {
    if (s == 0.0) return 1.0;
    const double a = cfg.preemption_rate();
    if (!cfg.service.domain().contains(s - a))
        throw DomainError("system-time MGF undefined at s=" + format_exact(s) + ": requires s < " +
                          format_exact(a + cfg.service.domain().sup));
    return cfg.service.transform(s - a) / delivery_prob(cfg);
}

double system_time_pdf(const SystemConfig& cfg, double t) {
    if (t < 0.0) return 0.0;
    const double a = cfg.preemption_rate();
    const double f = cfg.service.pdf(t);
    if (a == 0.0) return f;
    return f == 0.0 ? 0.0 : f * std::exp(-a * t) / delivery_prob(cfg);
}

double mean_system_time(const SystemConfig& cfg) {
    const double a = cfg.preemption_rate();
    return cfg.service.transform_deriv(-a) / cfg.service.transform(-a);
}

double sojourn_pdf_eta(const SystemConfig& cfg, double t) { return system_time_pdf(cfg, t); }

double sojourn_pdf_etabar(const SystemConfig& cfg, double t) {
    const double a = cfg.preemption_rate();
    if (a == 0.0) throw DegenerateError("preempted-service sojourn undefined: theta*lambda = 0");
    // 1 - M_U(-a) = a c(-a); dividing by c avoids the cancellation for small a.
    const double c = cfg.service.transform_increment(-a);
    if (!(c > 0.0)) throw DegenerateError("preempted-service sojourn undefined: preemption impossible");
    if (t < 0.0) return 0.0;
    return std::exp(-a * t) * cfg.service.survival(t) / c;
}

double preempted_sojourn_mean(const SystemConfig& cfg) {
    const double a = cfg.preemption_rate();
    if (a == 0.0) throw DegenerateError("preempted-service sojourn undefined: theta*lambda = 0");
    const double c = cfg.service.transform_increment(-a);
    const std::vector<double> cuts = cfg.service.breakpoints();
    const auto r = quad::integrate_pieces(
        [&](double t) { return t * std::exp(-a * t) * cfg.service.survival(t); }, 0.0, kInf, cuts);
    return r.value / c;
}

SojournMgfs sojourn_mgfs(const SystemConfig& cfg, double s) {
    const double a = cfg.preemption_rate();
    const double p = delivery_prob(cfg);
    const double m = cfg.service.transform(s - a);
    SojournMgfs out{};
    out.idle = cfg.lambda / (cfg.lambda - s);
    out.delivered = m / p;
    out.preempted = a == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                             : a * (1.0 - m) / ((p - 1.0) * (s - a));
    return out;
}

double mgf_roc(const SystemConfig& cfg) { return find_roc(cfg); }

double interdeparture_mgf(const SystemConfig& cfg, double s) { return AnalyticModel(cfg).interdeparture_mgf(s); }

double interdeparture_mgf_closed_form(const SystemConfig& cfg, double s) {
    const double a = cfg.preemption_rate();
    const double l = cfg.lambda;
    const double m = cfg.service.transform(s - a);
    return l * (a - s) * m / ((l - s) * (a * m - s));
}

double interdeparture_mgf_geometric(const SystemConfig& cfg, double s) {
    const double p = delivery_prob(cfg);
    const SojournMgfs e = sojourn_mgfs(cfg, s);
    if (cfg.preemption_rate() == 0.0) return e.idle * e.delivered;
    return p * e.idle * e.delivered / (1.0 - (1.0 - p) * e.preempted);
}

double mean_interdeparture(const SystemConfig& cfg) {
    const double a = cfg.preemption_rate();
    const double idle = 1.0 / cfg.lambda;
    if (a == 0.0) return idle + cfg.service.mean();
    const double p = delivery_prob(cfg);
    const double pbar = a * cfg.service.transform_increment(-a);
    return idle + pbar / p * preempted_sojourn_mean(cfg) + mean_system_time(cfg);
}

double aoi_mgf(const SystemConfig& cfg, double s) { return AnalyticModel(cfg).aoi_mgf(s); }

double paoi_mgf(const SystemConfig& cfg, double s) { return AnalyticModel(cfg).paoi_mgf(s); }

double aoi_mgf_from_components(const SystemConfig& cfg, double s) {
    const AnalyticModel model(cfg);
    return model.system_time_mgf(s) * (model.interdeparture_mgf(s) - 1.0) /
           (s * model.mean_interdeparture());
}

double aoi_mgf_closed_form(const SystemConfig& cfg, double s) {
    const double a = cfg.preemption_rate();
    const double p = delivery_prob(cfg);
    const double ybar = AnalyticModel(cfg).mean_interdeparture();
    return cfg.service.transform(s - a) * (interdeparture_mgf_closed_form(cfg, s) - 1.0) / (s * p * ybar);
}

double paoi_mgf_closed_form(const SystemConfig& cfg, double s) {
    const double a = cfg.preemption_rate();
    return cfg.service.transform(s - a) * interdeparture_mgf_closed_form(cfg, s) / delivery_prob(cfg);
}

double average_aoi_no_preemption(double lambda, const ServiceDistribution& service) {
    const double eu = service.mean();
    const double eu2 = service.second_moment();
    const double ybar = 1.0 / lambda + eu;
    const double ey2 = 2.0 / (lambda * lambda) + 2.0 * eu / lambda + eu2;
    return eu + ey2 / (2.0 * ybar);
}

double average_paoi_no_preemption(double lambda, const ServiceDistribution& service) {
    return 1.0 / lambda + 2.0 * service.mean();
}

double average_aoi(const SystemConfig& cfg) {
    if (cfg.theta == 0.0) return average_aoi_no_preemption(cfg.lambda, cfg.service);
    const double th = cfg.theta;
    const double l = cfg.lambda;
    const double a = cfg.preemption_rate();
    const double m = cfg.service.transform(-a);
    const double dm = cfg.service.transform_deriv(-a);
    const double num = m * ((th * th - th) * (m + l * dm) + th - 1.0) + 1.0;
    const double den = l * m * m * (th * th - th) + l * m * th;
    return num / den;
}

double average_paoi(const SystemConfig& cfg) {
    if (cfg.theta == 0.0) return average_paoi_no_preemption(cfg.lambda, cfg.service);
    const double th = cfg.theta;
    const double l = cfg.lambda;
    const double a = cfg.preemption_rate();
    const double m = cfg.service.transform(-a);
    const double dm = cfg.service.transform_deriv(-a);
    return (m * (th - 1.0) + l * th * dm + 1.0) / (th * l * m);
}

double aoi_moment(const AnalyticModel& model, int m) {
    return mgf_moment([&](double s) { return model.aoi_mgf(s); }, model.roc_sup(), m);
}

double paoi_moment(const AnalyticModel& model, int m) {
    return mgf_moment([&](double s) { return model.paoi_mgf(s); }, model.roc_sup(), m);
}

double aoi_moment(const SystemConfig& cfg, int m) { return aoi_moment(AnalyticModel(cfg), m); }

double paoi_moment(const SystemConfig& cfg, int m) { return paoi_moment(AnalyticModel(cfg), m); }

AnalyticSummary summarize(const SystemConfig& cfg) {
    const AnalyticModel model(cfg);
    AnalyticSummary out{};
    out.avg_aoi = average_aoi(cfg);
    out.avg_paoi = average_paoi(cfg);
    out.mean_interdeparture = mean_interdeparture(cfg);
    out.delivery_prob = model.delivery_prob();
    out.mean_system_time = model.mean_system_time();
    out.aoi_second_moment = aoi_moment(model, 2);
    out.paoi_second_moment = paoi_moment(model, 2);
    out.roc_sup = model.roc_sup();
    out.quad_rel_tol = quad::default_tolerance().rel;
    out.kernel_backend = std::string(kernels::to_string(kernels::active()));
    return out;
}

}  // namespace aoi
