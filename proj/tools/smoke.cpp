#include <cstdio>

#include "transim/simulation.hpp"

using namespace transim;

int main(int argc, char** argv) {
    ScenarioConfig cfg;
    cfg.phase = argc > 1 ? *parse_phase(argv[1]) : MechanismPhase::Ipv4;
    cfg.hosts = argc > 2 ? std::atoi(argv[2]) : 100;
    cfg.duration_s = argc > 3 ? std::atof(argv[3]) : 30;
    cfg.seed = 7;
    Scenario sc = build_reference_topology(cfg);
    std::printf("nodes=%zu links=%zu\n", sc.topo.nodes.size(), sc.topo.links.size());

    RunOptions opt;
    opt.warmup_cut = false;
    Simulation sim(sc, opt);
    RunResult r = sim.run();
    std::printf(
        "phase=%s pages=%llu req=%llu tcp=%s page=%s queue=%s cpu=%s thr=%s drops=%llu "
        "retx=%llu dup=%llu conserved=%d drained=%d encap=%llu viol=%llu aborted=%llu\n",
        to_string(r.phase), (unsigned long long)r.counters.pages_completed,
        (unsigned long long)r.counters.requests_sent, format_g6(r.tcp_delay.mean()).c_str(),
        format_g6(r.page_response.mean()).c_str(), format_g6(r.queue_delay.mean()).c_str(),
        format_g6(r.cpu_utilization).c_str(), format_g6(r.throughput).c_str(),
        (unsigned long long)r.counters.queue_drops,
        (unsigned long long)r.counters.retransmissions,
        (unsigned long long)r.counters.duplicate_acks, (int)r.counters.queues_conserved,
        (int)r.counters.drained, (unsigned long long)r.counters.encap_events,
        (unsigned long long)r.counters.overhead_violations,
        (unsigned long long)r.counters.flows_aborted);

    Simulation probe_sim(build_reference_topology(cfg), opt);
    auto pr = probe_sim.probe(64);
    std::printf("probe64: arrived=%d residual=%d at=%s\n", pr.arrived, pr.residual_hops,
                pr.discarded_at.c_str());
    Simulation probe_sim2(build_reference_topology(cfg), opt);
    auto p2 = probe_sim2.probe(6);
    std::printf("probe6: arrived=%d residual=%d at=%s\n", p2.arrived, p2.residual_hops,
                p2.discarded_at.c_str());
    return 0;
}
