#pragma once

// Closed-form AoI / peak-AoI statistics of the single-source M/G/1/1 queue
// under probabilistic preemption: an arrival finding the server busy replaces
// the packet in service with probability theta and is discarded otherwise.
//
// Throughout, a = theta*lambda is the rate of preempting arrivals seen by a
// busy server, p = M_U(-a) the probability that a packet entering service is
// delivered, and c(x) = (M_U(x) - 1)/x the transform increment.

#include <string>

#include "aoi/distributions.hpp"

namespace aoi {

/// Arrival rate, preemption probability and service law.
struct SystemConfig {
    double lambda;
    double theta;
    ServiceDistribution service;

    /// Throws aoi::ConfigError unless lambda > 0 and theta in [0, 1].
    SystemConfig(double lambda, double theta, ServiceDistribution service);

    double preemption_rate() const { return theta * lambda; }

    bool operator==(const SystemConfig&) const = default;
};

struct AnalyticSummary {
    double avg_aoi;
    double avg_paoi;
    double mean_interdeparture;
    double delivery_prob;
    double mean_system_time;
    double aoi_second_moment;
    double paoi_second_moment;
    double roc_sup;
    // evaluation metadata
    double quad_rel_tol;
    std::string kernel_backend;
};

/// Precomputes the per-configuration constants (p, c(-a), region of
/// convergence) shared by the MGF evaluations. Immutable; cheap to copy.
class AnalyticModel {
public:
    explicit AnalyticModel(SystemConfig cfg);

    const SystemConfig& config() const { return cfg_; }
    double delivery_prob() const { return p_; }
    double roc_sup() const { return roc_; }
    /// dM_Y/ds at 0 = 1/lambda + c(-a)/p.
    double mean_interdeparture() const;
    /// E[T] = E[U e^{-aU}] / p.
    double mean_system_time() const;

    double system_time_mgf(double s) const;
    double interdeparture_mgf(double s) const;
    double aoi_mgf(double s) const;
    double paoi_mgf(double s) const;

private:
    void require_roc(double s, const char* what) const;

    SystemConfig cfg_;
    double p_;
    double inc_at_minus_a_;
    double roc_;
};

// --- delivery and system time -------------------------------------------------

/// Pr(D) = M_U(-theta*lambda).
double delivery_prob(const SystemConfig& cfg);
/// M_T(s) = M_U(s - a) / M_U(-a); requires s - a inside the service transform domain.
double system_time_mgf(const SystemConfig& cfg, double s);
/// f_T(t) = f_U(t) e^{-a t} / M_U(-a). Zero everywhere for a Deterministic law
/// (T is then the point mass at the service value).
double system_time_pdf(const SystemConfig& cfg, double t);
double mean_system_time(const SystemConfig& cfg);

// --- sojourns of the interdeparture semi-Markov chain ------------------------

/// Density of the delivered-service sojourn eta; equal to system_time_pdf.
double sojourn_pdf_eta(const SystemConfig& cfg, double t);
/// Density of the preempted-service sojourn eta-bar:
/// a e^{-a t} (1 - F_U(t)) / (1 - M_U(-a)). Throws aoi::DegenerateError when
/// preemption is impossible (a = 0).
double sojourn_pdf_etabar(const SystemConfig& cfg, double t);
/// E[eta-bar] by quadrature of t * f_etabar(t).
double preempted_sojourn_mean(const SystemConfig& cfg);

struct SojournMgfs {
    double idle;       // E[e^{s eta~}] = lambda / (lambda - s)
    double delivered;  // E[e^{s eta}]  = M_U(s - a) / M_U(-a)
    double preempted;  // E[e^{s eta-bar}]; NaN when a = 0
};
/// The three sojourn transforms as stated; s must avoid lambda and, for the
/// preempted sojourn, s = a.
SojournMgfs sojourn_mgfs(const SystemConfig& cfg, double s);

// --- interdeparture time Y ---------------------------------------------------

/// Supremum s* of the region where the AoI, peak-AoI and interdeparture MGFs
/// are finite: min(lambda, a + sup_s(U), root of 1 - a c(s - a)).
double mgf_roc(const SystemConfig& cfg);
/// M_Y(s) for s < mgf_roc(cfg); exactly 1 at s = 0.
double interdeparture_mgf(const SystemConfig& cfg, double s);
/// M_Y written as lambda (a - s) M_U(s - a) / ((lambda - s)(a M_U(s - a) - s)).
/// Literal form; loses accuracy near s = 0 and s = a and is undefined for a = 0.
double interdeparture_mgf_closed_form(const SystemConfig& cfg, double s);
/// M_Y assembled as the geometric sum p E[e^{s eta~}] E[e^{s eta}] / (1 - (1-p) E[e^{s eta-bar}]).
double interdeparture_mgf_geometric(const SystemConfig& cfg, double s);
/// Mean interdeparture time from the sojourn decomposition
/// 1/lambda + ((1-p)/p) E[eta-bar] + E[eta].
double mean_interdeparture(const SystemConfig& cfg);

// --- AoI and peak AoI --------------------------------------------------------

double aoi_mgf(const SystemConfig& cfg, double s);
double paoi_mgf(const SystemConfig& cfg, double s);
/// M_T(s) (M_Y(s) - 1) / (s Ybar) assembled from the component MGFs.
double aoi_mgf_from_components(const SystemConfig& cfg, double s);
/// M_U(s-a)(M_Y(s)-1) / (s M_U(-a) Ybar) with the literal M_Y; a > 0, s != 0.
double aoi_mgf_closed_form(const SystemConfig& cfg, double s);
/// M_U(s-a) M_Y(s) / M_U(-a) with the literal M_Y; a > 0.
double paoi_mgf_closed_form(const SystemConfig& cfg, double s);

/// Average AoI. theta = 0 takes the limit branch.
double average_aoi(const SystemConfig& cfg);
/// Average peak AoI. theta = 0 takes the limit branch.
double average_paoi(const SystemConfig& cfg);
/// theta -> 0 limits: E[U] + E[(X+U)^2] / (2 E[X+U]) with X ~ Exp(lambda),
/// and 1/lambda + 2 E[U].
double average_aoi_no_preemption(double lambda, const ServiceDistribution& service);
double average_paoi_no_preemption(double lambda, const ServiceDistribution& service);

/// m-th raw moment (m in {1,2,3}) by differentiating the MGF at 0 with
/// Richardson-extrapolated finite differences. Throws aoi::PrecisionError if
/// the extrapolation does not settle.
double aoi_moment(const SystemConfig& cfg, int m);
double paoi_moment(const SystemConfig& cfg, int m);
double aoi_moment(const AnalyticModel& model, int m);
double paoi_moment(const AnalyticModel& model, int m);

AnalyticSummary summarize(const SystemConfig& cfg);

}  // namespace aoi
