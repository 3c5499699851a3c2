#ifndef TRANSIM_METRICS_HPP
#define TRANSIM_METRICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "transim/transition.hpp"

namespace transim {

/// Running mean/min/max over nonnegative samples. A metric with no samples
/// is reported as absent, never as zero.
struct Aggregate {
    double sum = 0;
    double min = 0;
    double max = 0;
    std::uint64_t count = 0;

    void add(double v) {
        if (count == 0) {
            min = max = v;
        } else {
            if (v < min) min = v;
            if (v > max) max = v;
        }
        sum += v;
        ++count;
    }
    bool present() const { return count > 0; }
    double mean() const { return count ? sum / static_cast<double>(count) : 0; }
};

struct RunCounters {
    std::uint64_t queue_drops = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t duplicate_acks = 0;
    std::uint64_t ttl_discards = 0;
    std::uint64_t encap_events = 0;
    std::uint64_t decap_events = 0;
    std::uint64_t overhead_violations = 0;  // encap/decap size delta != 20
    std::uint64_t delivered_bytes_total = 0;
    std::uint64_t delivered_bytes_window = 0;
    std::uint64_t pages_completed = 0;
    std::uint64_t requests_sent = 0;
    std::uint64_t flows_aborted = 0;
    bool queues_conserved = true;
    bool drained = true;
};

/// Everything one simulation run reports: windowed aggregates mirroring the
/// comparison tables, per-second series, and audit counters.
struct RunResult {
    MechanismPhase phase = MechanismPhase::Ipv4;
    std::uint64_t seed = 0;
    double duration_s = 0;
    double window_start_s = 0;  // warm-up cut, 0 when disabled
    std::uint64_t data_rate_bps = 0;
    std::string rate_label;     // set when a run is one of a --rate list

    Aggregate page_response;    // seconds
    Aggregate tcp_delay;        // seconds
    Aggregate queue_delay;      // seconds, designated point-to-point queue
    double cpu_utilization = 0; // percent over the window
    double throughput = 0;      // delivered bytes/second over the window

    // 1 s buckets over [0, duration)
    std::vector<double> series_page_sum, series_tcp_sum, series_queue_sum;
    std::vector<std::uint32_t> series_page_n, series_tcp_n, series_queue_n;
    std::vector<double> series_cpu_busy_s;      // busy seconds per bucket
    std::vector<double> series_delivered_bytes; // bytes per bucket

    RunCounters counters;
};

std::string format_g6(double v);

/// Aggregate table, schema: phase,metric,mean,min,max,count
std::string csv_report(const std::vector<RunResult>& runs);

/// One metric's time series, schema: phase,metric,t_bucket,value
std::string csv_series(const std::vector<RunResult>& runs, const std::string& metric);

const std::vector<std::string>& series_metric_names();

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ComparisonSummary {
    std::vector<CheckLine> checks;
    bool all_pass = true;
};

/// Ordering checks across the five phases (same seed and workload required;
/// throws ComparisonError otherwise).
ComparisonSummary compare_phases(const std::vector<RunResult>& runs);

/// Per-phase throughput monotonicity across increasing bottleneck rates,
/// plus the capacity bound.
ComparisonSummary compare_throughput(const std::vector<RunResult>& runs);

}  // namespace transim

#endif
