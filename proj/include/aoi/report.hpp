#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "json.hpp"

#include "aoi/analytic.hpp"
#include "aoi/optimizer.hpp"
#include "aoi/simulator.hpp"

namespace aoi::report {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSignificantDigits = 12;

/// v rounded to 12 significant digits; non-finite values pass through.
double round_sig(double v, int digits = kSignificantDigits);

nlohmann::json to_json(const SystemConfig& cfg);
nlohmann::json to_json(const AnalyticSummary& s);
nlohmann::json to_json(const SimSummary& s);
nlohmann::json to_json(const Optimum& o);

/// {"command", "version", "config", "results"} envelope.
nlohmann::json envelope(const std::string& command, nlohmann::json config, nlohmann::json results);

/// CSV header `theta,avg_aoi,avg_paoi[,sim_avg_aoi,sim_avg_paoi,sim_se_aoi,sim_se_paoi]`.
/// Failed rows print empty fields.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, bool with_sim);

/// Key/value CSV (`quantity,value`) for a flat JSON object.
void write_flat_csv(std::ostream& out, const nlohmann::json& flat);

}  // namespace aoi::report
