#include "transim/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace transim {

std::string format_g6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

namespace {

void aggregate_row(std::ostringstream& o, const std::string& phase,
                   const std::string& metric, const Aggregate& a) {
    o << phase << ',' << metric << ',';
    if (a.present())
        o << format_g6(a.mean()) << ',' << format_g6(a.min) << ',' << format_g6(a.max);
    else
        o << "absent,absent,absent";
    o << ',' << a.count << '\n';
}

void value_row(std::ostringstream& o, const std::string& phase, const std::string& metric,
               double value, std::uint64_t count) {
    o << phase << ',' << metric << ',' << format_g6(value) << ',' << format_g6(value)
      << ',' << format_g6(value) << ',' << count << '\n';
}

}  // namespace

std::string csv_report(const std::vector<RunResult>& runs) {
    std::ostringstream o;
    o << "phase,metric,mean,min,max,count\n";
    for (const auto& r : runs) {
        std::string phase = to_string(r.phase);
        aggregate_row(o, phase, "page_response_time", r.page_response);
        aggregate_row(o, phase, "tcp_delay", r.tcp_delay);
        aggregate_row(o, phase, "queue_delay", r.queue_delay);
        value_row(o, phase, "cpu_utilization", r.cpu_utilization,
                  static_cast<std::uint64_t>(r.series_cpu_busy_s.size()));
        std::string tname = r.rate_label.empty() ? "throughput" : "throughput_" + r.rate_label;
        value_row(o, phase, tname, r.throughput, r.counters.pages_completed);
    }
    return o.str();
}

const std::vector<std::string>& series_metric_names() {
    static const std::vector<std::string> names = {
        "page_response_time", "tcp_delay", "queue_delay", "cpu_utilization", "throughput"};
    return names;
}

std::string csv_series(const std::vector<RunResult>& runs, const std::string& metric) {
    std::ostringstream o;
    o << "phase,metric,t_bucket,value\n";
    for (const auto& r : runs) {
        std::string phase = to_string(r.phase);
        auto sampled = [&](const std::vector<double>& sums,
                           const std::vector<std::uint32_t>& counts) {
            for (std::size_t t = 0; t < sums.size(); ++t) {
                if (!counts[t]) continue;
                o << phase << ',' << metric << ',' << t << ','
                  << format_g6(sums[t] / counts[t]) << '\n';
            }
        };
        if (metric == "page_response_time") sampled(r.series_page_sum, r.series_page_n);
        else if (metric == "tcp_delay") sampled(r.series_tcp_sum, r.series_tcp_n);
        else if (metric == "queue_delay") sampled(r.series_queue_sum, r.series_queue_n);
        else if (metric == "cpu_utilization") {
            for (std::size_t t = 0; t < r.series_cpu_busy_s.size(); ++t)
                o << phase << ',' << metric << ',' << t << ','
                  << format_g6(100.0 * r.series_cpu_busy_s[t]) << '\n';
        } else if (metric == "throughput") {
            for (std::size_t t = 0; t < r.series_delivered_bytes.size(); ++t)
                o << phase << ',' << metric << ',' << t << ','
                  << format_g6(r.series_delivered_bytes[t]) << '\n';
        } else {
            throw Error("unknown series metric: " + metric);
        }
    }
    return o.str();
}

namespace {

const RunResult* find_phase(const std::vector<RunResult>& runs, MechanismPhase p) {
    for (const auto& r : runs)
        if (r.phase == p) return &r;
    return nullptr;
}

std::string ratio_detail(double a, double b) {
    return format_g6(a) + " vs " + format_g6(b);
}

}  // namespace

ComparisonSummary compare_phases(const std::vector<RunResult>& runs) {
    if (runs.size() < 2)
        throw ComparisonError("need at least two phase reports to compare");
    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].seed != runs[0].seed)
            throw ComparisonError("phase reports were produced with different seeds");
    }

    const RunResult* v4 = find_phase(runs, MechanismPhase::Ipv4);
    const RunResult* v6 = find_phase(runs, MechanismPhase::Ipv6);
    const RunResult* ds = find_phase(runs, MechanismPhase::DualStack);
    const RunResult* manual = find_phase(runs, MechanismPhase::ManualTunnel);
    const RunResult* sixto4 = find_phase(runs, MechanismPhase::SixToFour);

    ComparisonSummary out;
    auto check = [&](const std::string& name, bool pass, const std::string& detail) {
        out.checks.push_back({name, pass, detail});
        if (!pass) out.all_pass = false;
    };

    if (manual && sixto4) {
        check("tcp_delay manual > 6to4",
              manual->tcp_delay.mean() > sixto4->tcp_delay.mean(),
              ratio_detail(manual->tcp_delay.mean(), sixto4->tcp_delay.mean()));
    }
    for (const RunResult* native : {v4, v6, ds}) {
        if (!native || !sixto4) continue;
        check(std::string("tcp_delay 6to4 > ") + to_string(native->phase),
              sixto4->tcp_delay.mean() > native->tcp_delay.mean(),
              ratio_detail(sixto4->tcp_delay.mean(), native->tcp_delay.mean()));
    }
    if (manual && sixto4 && v4 && v6 && ds) {
        double best_native = std::min({v4->tcp_delay.mean(), v6->tcp_delay.mean(),
                                       ds->tcp_delay.mean()});
        double worst_tunnel = std::min(manual->tcp_delay.mean(), sixto4->tcp_delay.mean());
        check("tcp_delay tunnel margin >= 10% over best native",
              worst_tunnel >= 1.10 * best_native,
              "margin " + format_g6(100.0 * (worst_tunnel / best_native - 1.0)) + "%");

        check("cpu manual > 6to4", manual->cpu_utilization > sixto4->cpu_utilization,
              ratio_detail(manual->cpu_utilization, sixto4->cpu_utilization));
        double max_native_cpu = std::max(
            {v4->cpu_utilization, v6->cpu_utilization, ds->cpu_utilization});
        check("cpu 6to4 > max(native)", sixto4->cpu_utilization > max_native_cpu,
              ratio_detail(sixto4->cpu_utilization, max_native_cpu));
        double ratio = manual->cpu_utilization / v4->cpu_utilization;
        check("cpu ratio manual/ipv4 in [1.5, 3.0]", ratio >= 1.5 && ratio <= 3.0,
              "ratio " + format_g6(ratio));

        double max_native_page = std::max({v4->page_response.mean(), v6->page_response.mean(),
                                           ds->page_response.mean()});
        double min_tunnel_page =
            std::min(manual->page_response.mean(), sixto4->page_response.mean());
        check("page_response natives < tunnels", max_native_page < min_tunnel_page,
              ratio_detail(max_native_page, min_tunnel_page));
    }
    if (v4 && v6) {
        check("queue_delay ipv4 <= ipv6", v4->queue_delay.mean() <= v6->queue_delay.mean(),
              ratio_detail(v4->queue_delay.mean(), v6->queue_delay.mean()));
    }
    for (const auto& r : runs) {
        std::string phase = to_string(r.phase);
        check("drops occur in " + phase, r.counters.queue_drops > 0,
              std::to_string(r.counters.queue_drops) + " drops");
        check("each drop retransmitted once in " + phase,
              r.counters.retransmissions == r.counters.queue_drops,
              std::to_string(r.counters.retransmissions) + " retransmissions vs " +
                  std::to_string(r.counters.queue_drops) + " drops");
    }
    return out;
}

ComparisonSummary compare_throughput(const std::vector<RunResult>& runs) {
    ComparisonSummary out;
    auto check = [&](const std::string& name, bool pass, const std::string& detail) {
        out.checks.push_back({name, pass, detail});
        if (!pass) out.all_pass = false;
    };

    std::map<MechanismPhase, std::vector<const RunResult*>> by_phase;
    for (const auto& r : runs) by_phase[r.phase].push_back(&r);
    for (auto& [phase, list] : by_phase) {
        std::sort(list.begin(), list.end(), [](const RunResult* a, const RunResult* b) {
            return a->data_rate_bps < b->data_rate_bps;
        });
        std::string pname = to_string(phase);
        for (std::size_t i = 1; i < list.size(); ++i) {
            check("throughput rises with rate in " + pname + " (" +
                      list[i - 1]->rate_label + " -> " + list[i]->rate_label + ")",
                  list[i]->throughput > list[i - 1]->throughput,
                  ratio_detail(list[i]->throughput, list[i - 1]->throughput));
        }
        for (const RunResult* r : list) {
            double bound = static_cast<double>(r->data_rate_bps) / 8.0;
            check("throughput under capacity in " + pname + " at " + r->rate_label,
                  r->throughput <= bound,
                  format_g6(r->throughput) + " <= " + format_g6(bound));
        }
    }
    return out;
}

}  // namespace transim
