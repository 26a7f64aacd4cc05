#pragma once

// Event-driven simulation of the M/G/1/1 queue with probabilistic preemption.
//
// Time runs as a sequence of delivery cycles: the server idles until an
// arrival, serves it, and every further arrival during service either
// replaces the packet in service (probability theta, fresh service time) or
// is discarded. A cycle ends when a packet completes service. The first
// delivered packet only anchors the age process; records start with the
// second delivery, and the first `warmup_deliveries` of those are dropped.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "aoi/analytic.hpp"

namespace aoi {

struct SimConfig {
    SystemConfig system;
    std::uint64_t deliveries = 1'000'000;
    std::uint64_t warmup_deliveries = 1'000;
    std::uint64_t seed = 1;
    std::uint32_t replications = 1;
    /// Keep per-delivery records and service-entry epochs.
    bool keep_trace = false;

    /// Throws aoi::ConfigError unless deliveries > warmup_deliveries and replications >= 1.
    void validate() const;
};

struct DeliveryRecord {
    std::uint64_t index;  // delivery number; the anchor delivery is 0
    double gen_time;
    double deliver_time;
    double system_time;     // T_i
    double interdeparture;  // Y_i
    double peak;            // A_i = Y_i + T_{i-1}
    std::uint32_t preemptions;  // V_i
};

/// Post-warmup trajectory, one entry per delivery cycle, stored column-wise.
struct SimTrace {
    std::vector<std::uint64_t> index;
    std::vector<double> cycle_start;  // previous delivery epoch
    std::vector<double> gen_time;
    std::vector<double> deliver_time;
    std::vector<double> system_time;
    std::vector<double> interdeparture;
    std::vector<double> peak;
    std::vector<std::uint32_t> preemptions;
    /// Service-entry epochs of cycle i are entry_times[entry_offsets[i] .. entry_offsets[i+1]).
    std::vector<double> entry_times;
    std::vector<std::size_t> entry_offsets{0};

    std::size_t size() const { return index.size(); }
    DeliveryRecord record(std::size_t i) const;
    void append(const SimTrace& other);
};

struct SimCounts {
    std::uint64_t arrivals = 0;
    std::uint64_t service_entries = 0;
    std::uint64_t preemptions = 0;
    std::uint64_t discards = 0;
    std::uint64_t deliveries = 0;

    bool operator==(const SimCounts&) const = default;
};

struct SimSummary {
    SystemConfig system;
    double avg_aoi = 0.0;     // sawtooth area / observation time
    double avg_paoi = 0.0;
    double mean_interdeparture = 0.0;
    double mean_system_time = 0.0;  // over T_{i-1}, the packets paired with the window's peaks
    double delivery_prob = 0.0;     // deliveries / service entries
    double se_aoi = 0.0;
    double se_paoi = 0.0;
    double se_interdeparture = 0.0;
    double se_system_time = 0.0;
    double se_delivery_prob = 0.0;
    SimCounts counts{};
    double observation_time = 0.0;  // sum of post-warmup Y_i
    std::uint64_t seed = 0;
    std::uint32_t replications = 1;
    std::uint32_t batches = 0;

    bool operator==(const SimSummary&) const = default;
};

struct SimResult {
    SimSummary summary;
    SimTrace trace;  // empty unless SimConfig::keep_trace
};

/// Number of batches for batch-means standard errors: 30, or AOI_SE_BATCHES.
std::uint32_t default_batches();

/// One replication on stream `replication` of cfg.seed.
SimResult run_replication(const SimConfig& cfg, std::uint32_t replication);

/// All cfg.replications replications, merged; traces are concatenated.
/// Deterministic given cfg.
SimResult run(const SimConfig& cfg);

/// Pool summaries of one system. The average AoI is pooled by observation
/// time; per-delivery means by delivery count. Throws
/// aoi::ConfigMismatchError if the systems differ.
SimSummary merge_replications(std::span<const SimSummary> summaries);

enum class Quantity { system_time, interdeparture, peak };

struct Estimate {
    double value;
    double se;
};

/// Sample mean of e^{sX}. Throws aoi::DomainError for 0 < s where
/// s >= 0.8 * mgf_roc(system).
Estimate empirical_transform(const SimTrace& trace, const SystemConfig& system, double s, Quantity which);

/// Sample mean of X^m.
Estimate empirical_moment(const SimTrace& trace, int m, Quantity which);

/// Sojourns of each delivery cycle in the idle / in-service chain.
struct CycleSojourns {
    double idle;                       // eta~: idle wait for the first arrival
    std::span<const double> preempted; // eta-bar_j: services cut short by preemption
    double delivered;                  // eta: the completed service
};

class Decomposition {
public:
    explicit Decomposition(const SimTrace& trace);

    std::size_t size() const { return idle_.size(); }
    CycleSojourns cycle(std::size_t i) const;

    const std::vector<double>& idle() const { return idle_; }
    const std::vector<double>& delivered() const { return delivered_; }
    /// All preempted sojourns, cycle by cycle.
    const std::vector<double>& preempted() const { return preempted_; }
    const std::vector<std::uint32_t>& counts() const { return counts_; }

private:
    std::vector<double> idle_;
    std::vector<double> delivered_;
    std::vector<double> preempted_;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::uint32_t> counts_;
};

Decomposition decompose_interdeparture(const SimTrace& trace);

/// Time-average age over [deliver_time[0], deliver_time[n-1]] for packets
/// generated at gen_time[i] and delivered at deliver_time[i]; the first entry
/// only anchors the sawtooth. Throws aoi::ConfigError for fewer than two
/// deliveries or non-increasing delivery epochs.
double sawtooth_average(std::span<const double> gen_time, std::span<const double> deliver_time);

/// CSV with header `i,gen_time,deliver_time,T,Y,A,V`, 12 significant digits.
void write_trace_csv(std::ostream& out, const SimTrace& trace);

}  // namespace aoi
