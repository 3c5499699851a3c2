#ifndef TRANSIM_SIMULATION_HPP
#define TRANSIM_SIMULATION_HPP

#include <memory>
#include <optional>
#include <unordered_map>

#include "transim/des.hpp"
#include "transim/metrics.hpp"
#include "transim/rng.hpp"
#include "transim/scenario.hpp"
#include "transim/tcp.hpp"

namespace transim {

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<double> duration_s;
    bool warmup_cut = true;   // false: aggregate over the full run
    std::string rate_label;
};

/// One deterministic run of a scenario: hosts exchange HTTP pages or FTP
/// files with the server over the phase's dataplane, and the run reports
/// the delay/queue/CPU/throughput statistics.
class Simulation {
  public:
    Simulation(const Scenario& sc, const RunOptions& opt = {});
    ~Simulation();

    RunResult run();

    struct ProbeResult {
        bool arrived = false;
        int residual_hops = -1;        // outer ttl/hop_limit on arrival
        std::string discarded_at;      // router name when expired in transit
    };

    /// Sends a single probe packet from the first host to the server through
    /// an otherwise idle network.
    ProbeResult probe(int hop_limit);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Convenience: rebuilds the reference topology after config overrides.
Scenario rebuild_scenario(ScenarioConfig cfg);

}  // namespace transim

#endif
