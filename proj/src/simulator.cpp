#include "aoi/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <random>
#include <string>

#include "aoi/errors.hpp"
#include "aoi/kernels.hpp"

namespace aoi {
namespace {

struct BatchStats {
    double mean;
    double se;
};

// Standard error of the mean of `values` treated as iid batch estimates.
BatchStats batch_stats(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double se = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return {mean, se};
}

std::pair<std::size_t, std::size_t> batch_range(std::size_t n, std::size_t batches, std::size_t b) {
    return {b * n / batches, (b + 1) * n / batches};
}

// Column arrays the estimators work on.
struct Columns {
    std::vector<double> y;
    std::vector<double> t_prev;
    std::vector<std::uint32_t> v;
};

SimSummary summarize_columns(const SimConfig& cfg, const Columns& c, const SimCounts& counts) {
    const std::size_t n = c.y.size();
    const std::size_t batches = std::min<std::size_t>(default_batches(), n);
    std::vector<double> aoi(batches), paoi(batches), ys(batches), ts(batches), pd(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        const auto [lo, hi] = batch_range(n, batches, b);
        const std::span<const double> y(c.y.data() + lo, hi - lo);
        const std::span<const double> t(c.t_prev.data() + lo, hi - lo);
        const kernels::PowerSums sy = kernels::power_sums(y);
        const kernels::PowerSums st = kernels::power_sums(t);
        const double m = static_cast<double>(hi - lo);
        aoi[b] = kernels::sawtooth_area(y, t) / sy.sum;
        ys[b] = sy.sum / m;
        ts[b] = st.sum / m;
        paoi[b] = ys[b] + ts[b];
        std::uint64_t entries = 0;
        for (std::size_t i = lo; i < hi; ++i) entries += 1 + c.v[i];
        pd[b] = m / static_cast<double>(entries);
    }

    SimSummary s{.system = cfg.system};
    const kernels::PowerSums sy = kernels::power_sums(c.y);
    const kernels::PowerSums st = kernels::power_sums(c.t_prev);
    const double nn = static_cast<double>(n);
    s.observation_time = sy.sum;
    s.avg_aoi = kernels::sawtooth_area(c.y, c.t_prev) / sy.sum;
    s.mean_interdeparture = sy.sum / nn;
    s.mean_system_time = st.sum / nn;
    s.avg_paoi = s.mean_interdeparture + s.mean_system_time;
    s.delivery_prob = static_cast<double>(counts.deliveries) / static_cast<double>(counts.service_entries);
    s.se_aoi = batch_stats(aoi).se;
    s.se_paoi = batch_stats(paoi).se;
    s.se_interdeparture = batch_stats(ys).se;
    s.se_system_time = batch_stats(ts).se;
    s.se_delivery_prob = batch_stats(pd).se;
    s.counts = counts;
    s.seed = cfg.seed;
    s.replications = 1;
    s.batches = static_cast<std::uint32_t>(batches);
    return s;
}

std::span<const double> column(const SimTrace& trace, Quantity which) {
    switch (which) {
        case Quantity::system_time: return trace.system_time;
        case Quantity::interdeparture: return trace.interdeparture;
        case Quantity::peak: return trace.peak;
    }
    return {};
}

}  // namespace

void SimConfig::validate() const {
    if (!(deliveries > warmup_deliveries))
        throw ConfigError("deliveries (" + std::to_string(deliveries) + ") must exceed warmup_deliveries (" +
                          std::to_string(warmup_deliveries) + ")");
    if (replications < 1) throw ConfigError("replications must be >= 1");
}

DeliveryRecord SimTrace::record(std::size_t i) const {
    return {index[i],       gen_time[i], deliver_time[i], system_time[i],
            interdeparture[i], peak[i],  preemptions[i]};
}

void SimTrace::append(const SimTrace& o) {
    auto cat = [](auto& dst, const auto& src) { dst.insert(dst.end(), src.begin(), src.end()); };
    const std::size_t base = entry_times.size();
    cat(index, o.index);
    cat(cycle_start, o.cycle_start);
    cat(gen_time, o.gen_time);
    cat(deliver_time, o.deliver_time);
    cat(system_time, o.system_time);
    cat(interdeparture, o.interdeparture);
    cat(peak, o.peak);
    cat(preemptions, o.preemptions);
    cat(entry_times, o.entry_times);
    for (std::size_t i = 1; i < o.entry_offsets.size(); ++i) entry_offsets.push_back(base + o.entry_offsets[i]);
}

std::uint32_t default_batches() {
    if (const char* env = std::getenv("AOI_SE_BATCHES")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 2 && v <= 100000) return static_cast<std::uint32_t>(v);
    }
    return 30;
}

SimResult run_replication(const SimConfig& cfg, std::uint32_t replication) {
    cfg.validate();
    const SystemConfig& sys = cfg.system;
    const ServiceDistribution& service = sys.service;
    const double theta = sys.theta;
    const bool always = theta == 1.0;
    const bool never = theta == 0.0;

    Rng rng = make_stream(cfg.seed, replication);
    std::exponential_distribution<double> interarrival(sys.lambda);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    const std::size_t kept = cfg.deliveries - cfg.warmup_deliveries;
    Columns cols;
    cols.y.reserve(kept);
    cols.t_prev.reserve(kept);
    cols.v.reserve(kept);
    SimTrace tr;
    if (cfg.keep_trace) {
        tr.index.reserve(kept);
        tr.cycle_start.reserve(kept);
        tr.gen_time.reserve(kept);
        tr.deliver_time.reserve(kept);
        tr.system_time.reserve(kept);
        tr.interdeparture.reserve(kept);
        tr.peak.reserve(kept);
        tr.preemptions.reserve(kept);
        tr.entry_offsets.reserve(kept + 1);
    }
    SimCounts counts;

    double next_arrival = interarrival(rng);
    double last_delivery = 0.0;
    double prev_t = 0.0;
    std::vector<double> entries;

    for (std::uint64_t k = 0; k <= cfg.deliveries; ++k) {
        const bool keep = k > cfg.warmup_deliveries;
        // Idle until the next arrival, which enters service at once.
        double entry = next_arrival;
        double completion = entry + service.sample(rng);
        next_arrival += interarrival(rng);
        entries.clear();
        if (keep && cfg.keep_trace) entries.push_back(entry);
        std::uint32_t preempted = 0;
        std::uint64_t discarded = 0;
        while (next_arrival < completion) {
            if (always || (!never && coin(rng) < theta)) {
                ++preempted;
                entry = next_arrival;
                completion = entry + service.sample(rng);
                if (keep && cfg.keep_trace) entries.push_back(entry);
            } else {
                ++discarded;
            }
            next_arrival += interarrival(rng);
        }

        const double t = completion - entry;
        const double y = completion - last_delivery;
        if (keep) {
            counts.arrivals += 1 + preempted + discarded;
            counts.service_entries += 1 + preempted;
            counts.preemptions += preempted;
            counts.discards += discarded;
            counts.deliveries += 1;
            cols.y.push_back(y);
            cols.t_prev.push_back(prev_t);
            cols.v.push_back(preempted);
            if (cfg.keep_trace) {
                tr.index.push_back(k);
                tr.cycle_start.push_back(last_delivery);
                tr.gen_time.push_back(entry);
                tr.deliver_time.push_back(completion);
                tr.system_time.push_back(t);
                tr.interdeparture.push_back(y);
                tr.peak.push_back(y + prev_t);
                tr.preemptions.push_back(preempted);
                tr.entry_times.insert(tr.entry_times.end(), entries.begin(), entries.end());
                tr.entry_offsets.push_back(tr.entry_times.size());
            }
        }
        prev_t = t;
        last_delivery = completion;
    }

    return {summarize_columns(cfg, cols, counts), std::move(tr)};
}

SimResult run(const SimConfig& cfg) {
    cfg.validate();
    SimResult first = run_replication(cfg, 0);
    if (cfg.replications == 1) return first;
    std::vector<SimSummary> summaries{first.summary};
    for (std::uint32_t r = 1; r < cfg.replications; ++r) {
        SimResult next = run_replication(cfg, r);
        summaries.push_back(next.summary);
        if (cfg.keep_trace) first.trace.append(next.trace);
    }
    first.summary = merge_replications(summaries);
    return first;
}

SimSummary merge_replications(std::span<const SimSummary> summaries) {
    if (summaries.empty()) throw ConfigError("merge_replications needs at least one summary");
    if (summaries.size() == 1) return summaries.front();
    const SimSummary& head = summaries.front();
    double obs = 0.0;
    double deliveries = 0.0;
    for (const SimSummary& s : summaries) {
        if (!(s.system == head.system))
            throw ConfigMismatchError("cannot merge simulation summaries of different systems");
        obs += s.observation_time;
        deliveries += static_cast<double>(s.counts.deliveries);
    }

    SimSummary out{.system = head.system};
    out.replications = 0;
    double v_aoi = 0.0, v_paoi = 0.0, v_y = 0.0, v_t = 0.0, v_pd = 0.0;
    std::uint64_t entries = 0;
    for (const SimSummary& s : summaries) {
        const double wt = s.observation_time / obs;
        const double wn = static_cast<double>(s.counts.deliveries) / deliveries;
        out.avg_aoi += wt * s.avg_aoi;
        out.avg_paoi += wn * s.avg_paoi;
        out.mean_interdeparture += wn * s.mean_interdeparture;
        out.mean_system_time += wn * s.mean_system_time;
        out.delivery_prob += wn * s.delivery_prob;
        v_aoi += wt * wt * s.se_aoi * s.se_aoi;
        v_paoi += wn * wn * s.se_paoi * s.se_paoi;
        v_y += wn * wn * s.se_interdeparture * s.se_interdeparture;
        v_t += wn * wn * s.se_system_time * s.se_system_time;
        v_pd += wn * wn * s.se_delivery_prob * s.se_delivery_prob;
        out.counts.arrivals += s.counts.arrivals;
        out.counts.service_entries += s.counts.service_entries;
        out.counts.preemptions += s.counts.preemptions;
        out.counts.discards += s.counts.discards;
        out.counts.deliveries += s.counts.deliveries;
        entries += s.counts.service_entries;
        out.replications += s.replications;
    }
    out.delivery_prob = static_cast<double>(out.counts.deliveries) / static_cast<double>(entries);
    out.se_aoi = std::sqrt(v_aoi);
    out.se_paoi = std::sqrt(v_paoi);
    out.se_interdeparture = std::sqrt(v_y);
    out.se_system_time = std::sqrt(v_t);
    out.se_delivery_prob = std::sqrt(v_pd);
    out.observation_time = obs;
    out.seed = head.seed;
    out.batches = head.batches;
    return out;
}

Estimate empirical_transform(const SimTrace& trace, const SystemConfig& system, double s, Quantity which) {
    if (trace.size() == 0) throw ConfigError("empirical transform of an empty trace");
    if (s == 0.0) return {1.0, 0.0};
    if (s > 0.0) {
        const double roc = mgf_roc(system);
        if (!(s < 0.8 * roc))
            throw DomainError("empirical transform at s=" + format_exact(s) +
                              " beyond the safety cap 0.8 * " + format_exact(roc));
    }
    const std::span<const double> x = column(trace, which);
    const std::size_t n = x.size();
    const std::size_t batches = std::min<std::size_t>(default_batches(), n);
    std::vector<double> means(batches);
    double total = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
        const auto [lo, hi] = batch_range(n, batches, b);
        const double sum = kernels::sum_exp(x.subspan(lo, hi - lo), s);
        total += sum;
        means[b] = sum / static_cast<double>(hi - lo);
    }
    return {total / static_cast<double>(n), batch_stats(means).se};
}

Estimate empirical_moment(const SimTrace& trace, int m, Quantity which) {
    if (m < 1) throw DomainError("moment order must be >= 1");
    if (trace.size() == 0) throw ConfigError("empirical moment of an empty trace");
    const std::span<const double> x = column(trace, which);
    const std::size_t n = x.size();
    const std::size_t batches = std::min<std::size_t>(default_batches(), n);
    std::vector<double> means(batches);
    double total = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
        const auto [lo, hi] = batch_range(n, batches, b);
        double sum = 0.0;
        if (m <= 2) {
            const kernels::PowerSums ps = kernels::power_sums(x.subspan(lo, hi - lo));
            sum = m == 1 ? ps.sum : ps.sum_sq;
        } else {
            for (std::size_t i = lo; i < hi; ++i) sum += std::pow(x[i], m);
        }
        total += sum;
        means[b] = sum / static_cast<double>(hi - lo);
    }
    return {total / static_cast<double>(n), batch_stats(means).se};
}

Decomposition::Decomposition(const SimTrace& trace) {
    const std::size_t n = trace.size();
    if (trace.entry_offsets.size() != n + 1)
        throw ConfigError("trace lacks service-entry epochs; run with keep_trace");
    idle_.reserve(n);
    delivered_.reserve(n);
    counts_.reserve(n);
    offsets_.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = trace.entry_offsets[i];
        const std::size_t hi = trace.entry_offsets[i + 1];
        idle_.push_back(trace.entry_times[lo] - trace.cycle_start[i]);
        for (std::size_t j = lo; j + 1 < hi; ++j)
            preempted_.push_back(trace.entry_times[j + 1] - trace.entry_times[j]);
        delivered_.push_back(trace.deliver_time[i] - trace.entry_times[hi - 1]);
        offsets_.push_back(preempted_.size());
        counts_.push_back(static_cast<std::uint32_t>(hi - lo - 1));
    }
}

CycleSojourns Decomposition::cycle(std::size_t i) const {
    return {idle_[i],
            std::span<const double>(preempted_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]),
            delivered_[i]};
}

Decomposition decompose_interdeparture(const SimTrace& trace) { return Decomposition(trace); }

double sawtooth_average(std::span<const double> gen_time, std::span<const double> deliver_time) {
    const std::size_t n = std::min(gen_time.size(), deliver_time.size());
    if (n < 2) throw ConfigError("sawtooth average needs at least two deliveries");
    std::vector<double> y(n - 1), t_prev(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        y[i - 1] = deliver_time[i] - deliver_time[i - 1];
        t_prev[i - 1] = deliver_time[i - 1] - gen_time[i - 1];
        if (!(y[i - 1] > 0.0)) throw ConfigError("delivery epochs must be strictly increasing");
    }
    return kernels::sawtooth_area(y, t_prev) / (deliver_time[n - 1] - deliver_time[0]);
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    out << "i,gen_time,deliver_time,T,Y,A,V\n";
    char line[256];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(line, sizeof line, "%llu,%.12g,%.12g,%.12g,%.12g,%.12g,%u\n",
                      static_cast<unsigned long long>(trace.index[i]), trace.gen_time[i],
                      trace.deliver_time[i], trace.system_time[i], trace.interdeparture[i], trace.peak[i],
                      static_cast<unsigned>(trace.preemptions[i]));
        out << line;
    }
}

}  // namespace aoi
