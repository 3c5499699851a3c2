#ifndef TRANSIM_SCENARIO_HPP
#define TRANSIM_SCENARIO_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "transim/des.hpp"
#include "transim/tcp.hpp"
#include "transim/transition.hpp"

namespace transim {

enum class NodeKind { Host, Switch, Router };

struct NodeSpec {
    int id = -1;
    std::string name;
    NodeKind kind = NodeKind::Host;
    bool v4 = false;
    bool v6 = false;
};

struct IfaceSpec {
    int id = -1;
    int node = -1;
    std::string name;
    int link = -1;
    std::optional<Ipv4Address> v4;
    std::optional<Ipv6Address> v6;
};

struct LinkSpec {
    int id = -1;
    int iface_a = -1;
    int iface_b = -1;
    std::uint64_t bandwidth_bps = 0;
    SimTime propagation{};
    std::string media;        // "100baseT", "ppp_ds3", "tunnel"
    bool is_virtual = false;  // tunnel adjacency, not a physical cable
};

struct Topology {
    std::vector<NodeSpec> nodes;
    std::vector<IfaceSpec> ifaces;
    std::vector<LinkSpec> links;

    int add_node(const std::string& name, NodeKind kind, bool v4, bool v6);
    int add_iface(int node, const std::string& name,
                  std::optional<Ipv4Address> v4 = std::nullopt,
                  std::optional<Ipv6Address> v6 = std::nullopt);
    int connect(int iface_a, int iface_b, std::uint64_t bps, SimTime prop,
                const std::string& media, bool is_virtual = false);

    int node_by_name(const std::string& name) const;  // -1 when absent
    int iface_by_name(int node, const std::string& name) const;
    int peer_node(const LinkSpec& l, int node) const;

    int owner_of(Ipv4Address a) const;
    int owner_of(const Ipv6Address& a) const;

    /// Connectivity over physical links, interface references, and address
    /// uniqueness. Throws ConfigError.
    void validate() const;
};

enum class AppKind { Http, Ftp };

struct AppParams {
    AppKind kind = AppKind::Http;
    std::uint32_t page_size = 100'000;   // heavy browsing page, bytes
    std::uint32_t request_size = 350;
    std::uint32_t file_size = 1'000'000; // ftp transfer, bytes
    double think_time_mean_s = 5.0;
    int repeat_count = 0;                // 0 = repeat until run end
    bool synchronized_start = true;      // all clients fire at t = 0
    double start_window_s = 0.0;         // uniform stagger when not synchronized
};

struct DesParams {
    std::size_t queue_capacity = 100;    // packets per egress interface
    CpuParams cpu{};
    TcpParams tcp{};
    std::uint64_t lan_bps = 100'000'000;      // 100 base T
    std::uint64_t wan_bps = 44'736'000;       // PPP DS3
    std::uint64_t tunnel_rate_bps = 0;        // virtual tunnel line rate; 0 = wan rate
    SimTime lan_prop = SimTime::from_us(10);
    SimTime wan_prop = SimTime::from_us(200);
    SimTime backbone_prop = SimTime::from_us(100);
    std::uint8_t initial_ttl = 64;
    std::string measured_queue = "router_b:IF10";
    std::string measured_cpu = "router_a";
};

struct AddressingOverrides {
    std::optional<Ipv6Address> lan_v6_prefix;  // /64 network for the host LAN
    std::optional<Ipv4Address> router_a_v4, router_b_v4;
    std::optional<Ipv6Address> router_a_v6, router_b_v6;
    std::optional<Ipv4Address> server_v4;
    std::optional<Ipv6Address> server_v6;
};

struct ScenarioConfig {
    MechanismPhase phase = MechanismPhase::Ipv4;
    double duration_s = 300;
    std::uint64_t seed = 1;
    std::uint64_t data_rate_bps = 0;  // 0 = media default on the edge links
    double warmup_s = 30;
    int hosts = 100;
    DualStackPolicy policy = DualStackPolicy::PreferV6;
    AppParams app;
    DesParams des;
    AddressingOverrides addressing;
    /// Router name -> tunnel configuration; filled with the reference values
    /// for tunnel phases when a scenario file does not spell them out.
    std::vector<std::pair<std::string, TunnelConfig>> tunnels;
};

struct Scenario {
    Topology topo;
    ScenarioConfig cfg;
    std::vector<int> host_nodes;
    int server_node = -1;
    int router_a = -1;
    int router_b = -1;

    /// Canonical text form; two builds of the same scenario compare equal.
    std::string canonical_dump() const;
};

/// The experiment network: 100 hosts behind four switches, two dual-stack
/// edge routers joined by a five-router IPv4 backbone, and a server LAN on
/// the far side. Addressing follows the phase.
Scenario build_reference_topology(const ScenarioConfig& cfg);

struct RouteTables {
    // next_hop[node][dst_node] = neighbor node id, or -1 when unreachable
    std::vector<std::vector<int>> next_v4;
    std::vector<std::vector<int>> next_v6;
    std::vector<std::pair<int, int>> unreachable_v4;  // detected partitions
    std::vector<std::pair<int, int>> unreachable_v6;

    int next_hop(IpVersion family, int node, int dst) const {
        const auto& t = family == IpVersion::V4 ? next_v4 : next_v6;
        return t[node][dst];
    }
};

/// Minimum-hop next-hop tables per address family, converged offline.
/// Ties break toward the lowest neighbor id; destinations more than 15
/// router hops away are unreachable.
RouteTables compute_routes(const Topology& topo);

/// Throws NoRoute unless every host can reach the server in the phase's
/// address family.
void check_reachability(const Scenario& sc, const RouteTables& routes);

/// Parses a scenario file; throws ScenarioError carrying the line number.
Scenario load_scenario(const std::string& path);
Scenario load_scenario_text(const std::string& text, const std::string& origin);

}  // namespace transim

#endif
