#include "aoi/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace aoi::report {
namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

nlohmann::json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return round_sig(v);
}

}  // namespace

double round_sig(double v, int digits) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return std::strtod(buf, nullptr);
}

nlohmann::json to_json(const SystemConfig& cfg) {
    return {{"lambda", cfg.lambda}, {"theta", cfg.theta}, {"dist", cfg.service.spec()}};
}

nlohmann::json to_json(const AnalyticSummary& s) {
    return {{"avg_aoi", num(s.avg_aoi)},
            {"avg_paoi", num(s.avg_paoi)},
            {"mean_interdeparture", num(s.mean_interdeparture)},
            {"delivery_prob", num(s.delivery_prob)},
            {"mean_system_time", num(s.mean_system_time)},
            {"aoi_second_moment", num(s.aoi_second_moment)},
            {"paoi_second_moment", num(s.paoi_second_moment)},
            {"roc_sup", num(s.roc_sup)}};
}

nlohmann::json to_json(const SimSummary& s) {
    return {{"avg_aoi", num(s.avg_aoi)},
            {"avg_paoi", num(s.avg_paoi)},
            {"mean_interdeparture", num(s.mean_interdeparture)},
            {"mean_system_time", num(s.mean_system_time)},
            {"delivery_prob", num(s.delivery_prob)},
            {"se",
             {{"avg_aoi", num(s.se_aoi)},
              {"avg_paoi", num(s.se_paoi)},
              {"mean_interdeparture", num(s.se_interdeparture)},
              {"mean_system_time", num(s.se_system_time)},
              {"delivery_prob", num(s.se_delivery_prob)}}},
            {"counts",
             {{"arrivals", s.counts.arrivals},
              {"service_entries", s.counts.service_entries},
              {"preemptions", s.counts.preemptions},
              {"discards", s.counts.discards},
              {"deliveries", s.counts.deliveries}}},
            {"observation_time", num(s.observation_time)},
            {"replications", s.replications},
            {"batches", s.batches}};
}

nlohmann::json to_json(const Optimum& o) {
    return {{"theta_star", num(o.theta_star)},
            {"objective_value", num(o.objective_value)},
            {"objective", to_string(o.objective)},
            {"grid_points", o.grid_points},
            {"refine_tolerance", o.refine_tolerance}};
}

nlohmann::json envelope(const std::string& command, nlohmann::json config, nlohmann::json results) {
    return {{"command", command}, {"version", kToolVersion}, {"config", std::move(config)},
            {"results", std::move(results)}};
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, bool with_sim) {
    out << "theta,avg_aoi,avg_paoi";
    if (with_sim) out << ",sim_avg_aoi,sim_avg_paoi,sim_se_aoi,sim_se_paoi";
    out << '\n';
    for (const SweepRow& r : rows) {
        out << fmt(r.theta) << ',' << (r.ok() ? fmt(r.avg_aoi) : "") << ','
            << (r.ok() ? fmt(r.avg_paoi) : "");
        if (with_sim)
            out << ',' << fmt_opt(r.sim_avg_aoi) << ',' << fmt_opt(r.sim_avg_paoi) << ','
                << fmt_opt(r.sim_se_aoi) << ',' << fmt_opt(r.sim_se_paoi);
        out << '\n';
    }
}

void write_flat_csv(std::ostream& out, const nlohmann::json& flat) {
    out << "quantity,value\n";
    for (const auto& [raw, value] : flat.items()) {
        // keys from json::flatten() look like "/se/avg_aoi"
        std::string key = raw.starts_with('/') ? raw.substr(1) : raw;
        std::replace(key.begin(), key.end(), '/', '.');
        if (value.is_number_float())
            out << key << ',' << fmt(value.get<double>()) << '\n';
        else if (value.is_primitive())
            out << key << ',' << value.dump() << '\n';
    }
}

}  // namespace aoi::report
