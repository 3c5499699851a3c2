#include "transim/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace transim {

int Topology::add_node(const std::string& name, NodeKind kind, bool v4, bool v6) {
    NodeSpec n;
    n.id = static_cast<int>(nodes.size());
    n.name = name;
    n.kind = kind;
    n.v4 = v4;
    n.v6 = v6;
    nodes.push_back(n);
    return n.id;
}

int Topology::add_iface(int node, const std::string& name,
                        std::optional<Ipv4Address> v4, std::optional<Ipv6Address> v6) {
    IfaceSpec f;
    f.id = static_cast<int>(ifaces.size());
    f.node = node;
    f.name = name;
    f.v4 = v4;
    f.v6 = v6;
    ifaces.push_back(f);
    return f.id;
}

int Topology::connect(int iface_a, int iface_b, std::uint64_t bps, SimTime prop,
                      const std::string& media, bool is_virtual) {
    LinkSpec l;
    l.id = static_cast<int>(links.size());
    l.iface_a = iface_a;
    l.iface_b = iface_b;
    l.bandwidth_bps = bps;
    l.propagation = prop;
    l.media = media;
    l.is_virtual = is_virtual;
    links.push_back(l);
    ifaces[iface_a].link = l.id;
    ifaces[iface_b].link = l.id;
    return l.id;
}

int Topology::node_by_name(const std::string& name) const {
    for (const auto& n : nodes)
        if (n.name == name) return n.id;
    return -1;
}

int Topology::iface_by_name(int node, const std::string& name) const {
    for (const auto& f : ifaces)
        if (f.node == node && f.name == name) return f.id;
    return -1;
}

int Topology::peer_node(const LinkSpec& l, int node) const {
    int a = ifaces[l.iface_a].node;
    int b = ifaces[l.iface_b].node;
    return a == node ? b : a;
}

int Topology::owner_of(Ipv4Address a) const {
    for (const auto& f : ifaces)
        if (f.v4 && *f.v4 == a) return f.node;
    return -1;
}

int Topology::owner_of(const Ipv6Address& a) const {
    for (const auto& f : ifaces)
        if (f.v6 && *f.v6 == a) return f.node;
    return -1;
}

void Topology::validate() const {
    for (const auto& f : ifaces) {
        if (f.link < 0 || f.link >= static_cast<int>(links.size()))
            throw ConfigError("interface " + f.name + " is not attached to a link");
    }
    std::map<std::uint32_t, std::string> seen4;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::string> seen6;
    for (const auto& f : ifaces) {
        if (f.v4) {
            auto [it, fresh] = seen4.emplace(f.v4->value, f.name);
            if (!fresh)
                throw ConfigError("duplicate interface address " + format_address(*f.v4) +
                                  " on " + it->second + " and " + f.name);
        }
        if (f.v6) {
            auto key = std::make_pair(f.v6->hi(), f.v6->lo());
            auto [it, fresh] = seen6.emplace(key, f.name);
            if (!fresh)
                throw ConfigError("duplicate interface address " + format_address(*f.v6) +
                                  " on " + it->second + " and " + f.name);
        }
    }
    // Physical connectivity.
    if (nodes.empty()) throw ConfigError("topology has no nodes");
    std::vector<char> seen(nodes.size(), 0);
    std::queue<int> bfs;
    bfs.push(0);
    seen[0] = 1;
    while (!bfs.empty()) {
        int n = bfs.front();
        bfs.pop();
        for (const auto& l : links) {
            if (l.is_virtual) continue;
            int a = ifaces[l.iface_a].node, b = ifaces[l.iface_b].node;
            int other = a == n ? b : (b == n ? a : -1);
            if (other >= 0 && !seen[other]) {
                seen[other] = 1;
                bfs.push(other);
            }
        }
    }
    for (const auto& n : nodes)
        if (!seen[n.id])
            throw ConfigError("topology is not connected: " + n.name + " is isolated");
}

namespace {

Ipv6Address with_low(Ipv6Address net, std::uint64_t low) {
    return Ipv6Address::from_words(net.hi(), low);
}

Ipv6Address subnetted(const SixToFourPrefix& p, std::uint16_t subnet, std::uint64_t low) {
    Ipv6Address a = p.as_address();
    a.set_group(3, subnet);
    return with_low(a, low);
}

}  // namespace

Scenario build_reference_topology(const ScenarioConfig& cfg_in) {
    ScenarioConfig cfg = cfg_in;
    const MechanismPhase phase = cfg.phase;
    const bool tunnel_phase =
        phase == MechanismPhase::ManualTunnel || phase == MechanismPhase::SixToFour;
    const bool v4_hosts = phase == MechanismPhase::Ipv4 || phase == MechanismPhase::DualStack;
    const bool v6_hosts = phase != MechanismPhase::Ipv4;
    const bool v4_backbone = phase != MechanismPhase::Ipv6;
    const bool v6_backbone = phase == MechanismPhase::Ipv6 || phase == MechanismPhase::DualStack;

    Ipv4Address a_v4 = cfg.addressing.router_a_v4.value_or(parse_ipv4("192.168.1.1"));
    Ipv4Address b_v4 = cfg.addressing.router_b_v4.value_or(parse_ipv4("10.1.1.1"));

    // Host LAN and server LAN v6 networks, by phase convention.
    Ipv6Address lan6{}, srv6{};
    if (v6_hosts) {
        if (cfg.addressing.lan_v6_prefix) {
            lan6 = *cfg.addressing.lan_v6_prefix;
        } else if (phase == MechanismPhase::SixToFour) {
            lan6 = subnetted(derive_6to4_prefix(a_v4), 1, 0);
        } else if (phase == MechanismPhase::ManualTunnel) {
            lan6 = subnetted(derive_6to4_prefix(a_v4), 1, 0);
            lan6.set_group(0, 0x2001);  // manual sites use 2001, not 2002
        } else {
            lan6 = parse_ipv6("2001:db8:1::");
        }
        if (phase == MechanismPhase::SixToFour) {
            srv6 = subnetted(derive_6to4_prefix(b_v4), 0xa, 0);
        } else if (phase == MechanismPhase::ManualTunnel) {
            srv6 = subnetted(derive_6to4_prefix(b_v4), 0xa, 0);
            srv6.set_group(0, 0x2001);
        } else {
            srv6 = parse_ipv6("2001:db8:2::");
        }
    }

    Scenario sc;
    sc.cfg = cfg;
    Topology& t = sc.topo;

    const std::uint64_t wan_bps = cfg.data_rate_bps ? cfg.data_rate_bps : cfg.des.wan_bps;
    const std::uint64_t lan_bps = cfg.des.lan_bps;

    // Hosts and the four access switches.
    std::vector<int> switches;
    for (int s = 0; s < 4; ++s)
        switches.push_back(t.add_node("switch" + std::to_string(s), NodeKind::Switch, true, true));

    sc.router_a = t.add_node("router_a", NodeKind::Router, v4_backbone || tunnel_phase,
                             v6_hosts);
    for (int i = 0; i < cfg.hosts; ++i) {
        int h = t.add_node("host" + std::to_string(i), NodeKind::Host, v4_hosts, v6_hosts);
        sc.host_nodes.push_back(h);
        auto hv4 = v4_hosts ? std::optional<Ipv4Address>(Ipv4Address::from_octets(
                                  192, 168, 2, static_cast<std::uint8_t>(i + 1)))
                            : std::nullopt;
        auto hv6 = v6_hosts ? std::optional<Ipv6Address>(with_low(
                                  lan6, (tunnel_phase ? 2 : 0x10) + std::uint64_t(i)))
                            : std::nullopt;
        int hif = t.add_iface(h, "eth0", hv4, hv6);
        int sif = t.add_iface(switches[i % 4], "h" + std::to_string(i));
        t.connect(hif, sif, lan_bps, cfg.des.lan_prop, "100baseT");
    }
    for (int s = 0; s < 4; ++s) {
        // Router A keeps one addressed LAN interface; the other switch legs
        // are unnumbered.
        auto av4 = (v4_hosts && s == 0)
                       ? std::optional<Ipv4Address>(Ipv4Address::from_octets(192, 168, 2, 254))
                       : std::nullopt;
        auto av6 = (v6_hosts && s == 0) ? std::optional<Ipv6Address>(with_low(lan6, 1))
                                        : std::nullopt;
        if (s == 0 && v6_hosts && cfg.addressing.router_a_v6) av6 = cfg.addressing.router_a_v6;
        int rif = t.add_iface(sc.router_a, "IF" + std::to_string(s), av4, av6);
        int sif = t.add_iface(switches[s], "uplink");
        t.connect(rif, sif, lan_bps, cfg.des.lan_prop, "100baseT");
    }

    // Five-router IPv4 backbone, chained, edges joined by PPP DS3.
    std::vector<int> backbone;
    for (int i = 1; i <= 5; ++i)
        backbone.push_back(t.add_node("r" + std::to_string(i), NodeKind::Router,
                                      v4_backbone, v6_backbone));
    sc.router_b = t.add_node("router_b", NodeKind::Router, v4_backbone || tunnel_phase,
                             v6_hosts);

    {
        auto av4 = v4_backbone || tunnel_phase ? std::optional<Ipv4Address>(a_v4) : std::nullopt;
        auto bb6 = v6_backbone ? std::optional<Ipv6Address>(parse_ipv6("2001:db8:b:0::1"))
                               : std::nullopt;
        int aif = t.add_iface(sc.router_a, "IF10", av4, bb6);
        auto r1v4 = v4_backbone || tunnel_phase
                        ? std::optional<Ipv4Address>(Ipv4Address::from_octets(192, 168, 1, 2))
                        : std::nullopt;
        auto r1v6 = v6_backbone ? std::optional<Ipv6Address>(parse_ipv6("2001:db8:b:0::2"))
                                : std::nullopt;
        int rif = t.add_iface(backbone[0], "IF10", r1v4, r1v6);
        t.connect(aif, rif, wan_bps, cfg.des.wan_prop, "ppp_ds3");
    }
    for (int i = 0; i < 4; ++i) {
        auto lv4 = v4_backbone || tunnel_phase
                       ? std::optional<Ipv4Address>(Ipv4Address::from_octets(
                             172, 16, static_cast<std::uint8_t>(i + 1), 1))
                       : std::nullopt;
        auto rv4 = v4_backbone || tunnel_phase
                       ? std::optional<Ipv4Address>(Ipv4Address::from_octets(
                             172, 16, static_cast<std::uint8_t>(i + 1), 2))
                       : std::nullopt;
        auto lv6 = v6_backbone ? std::optional<Ipv6Address>(parse_ipv6(
                                     "2001:db8:b:" + std::to_string(i + 1) + "::1"))
                               : std::nullopt;
        auto rv6 = v6_backbone ? std::optional<Ipv6Address>(parse_ipv6(
                                     "2001:db8:b:" + std::to_string(i + 1) + "::2"))
                               : std::nullopt;
        int lif = t.add_iface(backbone[i], "de" + std::to_string(i + 1), lv4, lv6);
        int rif = t.add_iface(backbone[i + 1], "du" + std::to_string(i + 1), rv4, rv6);
        t.connect(lif, rif, lan_bps, cfg.des.backbone_prop, "100baseT");
    }
    {
        auto r5v4 = v4_backbone || tunnel_phase
                        ? std::optional<Ipv4Address>(Ipv4Address::from_octets(10, 1, 1, 2))
                        : std::nullopt;
        auto r5v6 = v6_backbone ? std::optional<Ipv6Address>(parse_ipv6("2001:db8:b:5::2"))
                                : std::nullopt;
        int rif = t.add_iface(backbone[4], "IF10", r5v4, r5v6);
        auto bv4 = v4_backbone || tunnel_phase ? std::optional<Ipv4Address>(b_v4) : std::nullopt;
        auto bv6 = v6_backbone ? std::optional<Ipv6Address>(parse_ipv6("2001:db8:b:5::1"))
                               : std::nullopt;
        int bif = t.add_iface(sc.router_b, "IF10", bv4, bv6);
        t.connect(rif, bif, wan_bps, cfg.des.wan_prop, "ppp_ds3");
    }

    // Server LAN.
    int server_switch = t.add_node("server_switch", NodeKind::Switch, true, true);
    sc.server_node = t.add_node("server", NodeKind::Host, v4_hosts, v6_hosts);
    {
        auto bv4 = v4_hosts ? std::optional<Ipv4Address>(Ipv4Address::from_octets(10, 1, 2, 1))
                            : std::nullopt;
        auto bv6 = v6_hosts ? std::optional<Ipv6Address>(with_low(srv6, 1)) : std::nullopt;
        if (v6_hosts && cfg.addressing.router_b_v6) bv6 = cfg.addressing.router_b_v6;
        int bif = t.add_iface(sc.router_b, "IF0", bv4, bv6);
        int sif = t.add_iface(server_switch, "uplink");
        t.connect(bif, sif, lan_bps, cfg.des.lan_prop, "100baseT");

        auto sv4 = v4_hosts ? std::optional<Ipv4Address>(cfg.addressing.server_v4.value_or(
                                  Ipv4Address::from_octets(10, 1, 2, 10)))
                            : std::nullopt;
        auto sv6 = v6_hosts ? std::optional<Ipv6Address>(
                                  cfg.addressing.server_v6.value_or(with_low(srv6, 0x10)))
                            : std::nullopt;
        int svif = t.add_iface(sc.server_node, "eth0", sv4, sv6);
        int ssif = t.add_iface(server_switch, "srv");
        t.connect(svif, ssif, lan_bps, cfg.des.lan_prop, "100baseT");
    }

    // Tunnel endpoints and their virtual adjacency.
    if (tunnel_phase) {
        if (sc.cfg.tunnels.empty()) {
            TunnelConfig ta, tb;
            ta.mode = tb.mode = phase == MechanismPhase::ManualTunnel ? TunnelMode::Manual
                                                                      : TunnelMode::SixToFour;
            ta.source_if = tb.source_if = "IF10";
            ta.tunnel_v6 = subnetted(derive_6to4_prefix(a_v4), 0xd, 1);
            tb.tunnel_v6 = subnetted(derive_6to4_prefix(b_v4), 0xb, 1);
            if (ta.mode == TunnelMode::Manual) {
                ta.dest_v4 = b_v4;
                tb.dest_v4 = a_v4;
            }
            sc.cfg.tunnels.emplace_back("router_a", ta);
            sc.cfg.tunnels.emplace_back("router_b", tb);
        }
        for (auto& [router, tun] : sc.cfg.tunnels) {
            tun.validate();
            int node = t.node_by_name(router);
            if (node < 0) throw ConfigError("tunnel on unknown router " + router);
            int src_if = t.iface_by_name(node, tun.source_if);
            if (src_if < 0)
                throw ConfigError("tunnel source interface " + tun.source_if +
                                  " not found on " + router);
            if (!t.ifaces[src_if].v4)
                throw ConfigError("tunnel source interface " + tun.source_if +
                                  " has no IPv4 address");
            tun.source_if_v4 = *t.ifaces[src_if].v4;
        }
        int ta = t.add_iface(sc.router_a, "tun0", std::nullopt,
                             sc.cfg.tunnels[0].second.tunnel_v6);
        int tb = t.add_iface(sc.router_b, "tun0", std::nullopt,
                             sc.cfg.tunnels.size() > 1
                                 ? sc.cfg.tunnels[1].second.tunnel_v6
                                 : Ipv6Address{});
        t.connect(ta, tb, wan_bps, SimTime{}, "tunnel", /*is_virtual=*/true);
    } else if (!sc.cfg.tunnels.empty()) {
        throw ConfigError("tunnel section present in a non-tunnel phase");
    }

    t.validate();
    return sc;
}

namespace {

int router_hops_on_path(const Topology& topo, const std::vector<std::vector<int>>& next,
                        int from, int dst) {
    int hops = 0;
    int cur = from;
    int guard = static_cast<int>(topo.nodes.size()) + 1;
    while (cur != dst && guard-- > 0) {
        cur = next[cur][dst];
        if (cur < 0) return -1;
        if (topo.nodes[cur].kind == NodeKind::Router) ++hops;
    }
    return guard <= 0 ? -1 : hops;
}

std::vector<std::vector<int>> family_tables(const Topology& topo, bool v6,
                                            std::vector<std::pair<int, int>>& unreachable) {
    const int n = static_cast<int>(topo.nodes.size());
    // Adjacency in this family: both endpoint nodes run the family's stack.
    std::vector<std::vector<int>> adj(n);
    for (const auto& l : topo.links) {
        int a = topo.ifaces[l.iface_a].node;
        int b = topo.ifaces[l.iface_b].node;
        bool capable = v6 ? (topo.nodes[a].v6 && topo.nodes[b].v6)
                          : (topo.nodes[a].v4 && topo.nodes[b].v4);
        if (l.is_virtual && !v6) capable = false;  // tunnels carry IPv6 only
        if (capable) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
    }
    for (auto& v : adj) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    std::vector<std::vector<int>> next(n, std::vector<int>(n, -1));
    std::vector<int> dist(n);
    for (int dst = 0; dst < n; ++dst) {
        std::fill(dist.begin(), dist.end(), -1);
        std::queue<int> q;
        q.push(dst);
        dist[dst] = 0;
        while (!q.empty()) {
            int cur = q.front();
            q.pop();
            for (int nb : adj[cur]) {
                if (dist[nb] < 0) {
                    dist[nb] = dist[cur] + 1;
                    q.push(nb);
                }
            }
        }
        for (int from = 0; from < n; ++from) {
            if (from == dst || dist[from] < 0) continue;
            // Lowest-id neighbor strictly closer to the destination.
            for (int nb : adj[from]) {
                if (dist[nb] == dist[from] - 1) {
                    next[from][dst] = nb;
                    break;
                }
            }
        }
    }

    // RIP semantics: paths longer than 15 router hops do not converge.
    for (int from = 0; from < n; ++from) {
        for (int dst = 0; dst < n; ++dst) {
            if (from == dst || next[from][dst] < 0) continue;
            int hops = router_hops_on_path(topo, next, from, dst);
            if (hops < 0 || hops > 15) next[from][dst] = -1;
        }
    }

    // Partitions among family-capable endpoints.
    for (int from = 0; from < n; ++from) {
        bool f_cap = v6 ? topo.nodes[from].v6 : topo.nodes[from].v4;
        if (!f_cap || topo.nodes[from].kind == NodeKind::Switch) continue;
        for (int dst = 0; dst < n; ++dst) {
            bool d_cap = v6 ? topo.nodes[dst].v6 : topo.nodes[dst].v4;
            if (dst == from || !d_cap || topo.nodes[dst].kind == NodeKind::Switch) continue;
            if (next[from][dst] < 0) unreachable.emplace_back(from, dst);
        }
    }
    return next;
}

}  // namespace

RouteTables compute_routes(const Topology& topo) {
    RouteTables rt;
    rt.next_v4 = family_tables(topo, false, rt.unreachable_v4);
    rt.next_v6 = family_tables(topo, true, rt.unreachable_v6);
    return rt;
}

void check_reachability(const Scenario& sc, const RouteTables& routes) {
    IpVersion fam = sc.cfg.phase == MechanismPhase::Ipv4 ? IpVersion::V4 : IpVersion::V6;
    if (sc.cfg.phase == MechanismPhase::DualStack)
        fam = dualstack_select(DstCaps::Both, sc.cfg.policy);
    for (int h : sc.host_nodes) {
        if (routes.next_hop(fam, h, sc.server_node) < 0 ||
            routes.next_hop(fam, sc.server_node, h) < 0)
            throw NoRoute("host " + sc.topo.nodes[h].name +
                          " cannot reach the server in this phase");
    }
}

// ---------------------------------------------------------------------------
// Scenario files: line-oriented key = value grammar under [section] headers.

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::uint64_t parse_rate(const std::string& s, int line) {
    if (s.empty()) throw ScenarioError("empty rate value", line);
    double mult = 1;
    std::string num = s;
    char suffix = s.back();
    if (suffix == 'k' || suffix == 'K') mult = 1e3;
    else if (suffix == 'M') mult = 1e6;
    else if (suffix == 'G') mult = 1e9;
    if (mult != 1) num = s.substr(0, s.size() - 1);
    try {
        double v = std::stod(num);
        if (v <= 0) throw ScenarioError("rate must be positive: " + s, line);
        return static_cast<std::uint64_t>(v * mult + 0.5);
    } catch (const std::invalid_argument&) {
        throw ScenarioError("bad rate value: " + s, line);
    }
}

double parse_double(const std::string& s, int line) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw ScenarioError("bad numeric value: " + s, line);
        return v;
    } catch (const std::invalid_argument&) {
        throw ScenarioError("bad numeric value: " + s, line);
    }
}

std::uint64_t parse_uint(const std::string& s, int line) {
    for (char c : s)
        if (c < '0' || c > '9') throw ScenarioError("bad integer value: " + s, line);
    return std::stoull(s);
}

Ipv4Address addr4(const std::string& s, int line) {
    try {
        return parse_ipv4(s);
    } catch (const AddressParseError& e) {
        throw ScenarioError(e.what(), line);
    }
}

Ipv6Address addr6(const std::string& s, int line) {
    try {
        return parse_ipv6(s);
    } catch (const AddressParseError& e) {
        throw ScenarioError(e.what(), line);
    }
}

}  // namespace

Scenario load_scenario_text(const std::string& text, const std::string& origin) {
    ScenarioConfig cfg;
    bool phase_set = false;
    std::string section;
    std::string tunnel_label;
    std::map<std::string, TunnelConfig> tunnels;  // label -> cfg
    std::map<std::string, int> tunnel_lines;
    std::vector<std::string> tunnel_order;

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ScenarioError("unterminated section header", line);
            std::string body = trim(s.substr(1, s.size() - 2));
            auto sp = body.find(' ');
            section = sp == std::string::npos ? body : body.substr(0, sp);
            tunnel_label = sp == std::string::npos ? "" : trim(body.substr(sp + 1));
            if (section != "run" && section != "topology" && section != "addressing" &&
                section != "tunnel" && section != "application" && section != "profile" &&
                section != "des")
                throw ScenarioError("unknown section [" + body + "]", line);
            if (section == "tunnel") {
                if (tunnel_label.empty())
                    throw ScenarioError("[tunnel] needs a router label, e.g. [tunnel a]", line);
                if (tunnel_label == "a") tunnel_label = "router_a";
                if (tunnel_label == "b") tunnel_label = "router_b";
                if (!tunnels.count(tunnel_label)) {
                    tunnels[tunnel_label] = TunnelConfig{};
                    tunnel_lines[tunnel_label] = line;
                    tunnel_order.push_back(tunnel_label);
                }
            }
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ScenarioError("expected key = value: " + s, line);
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (section.empty())
            throw ScenarioError("key outside any [section]: " + key, line);

        if (section == "run") {
            if (key == "phase") {
                auto p = parse_phase(val);
                if (!p) throw ScenarioError("unknown phase: " + val, line);
                cfg.phase = *p;
                phase_set = true;
            } else if (key == "duration") {
                cfg.duration_s = parse_double(val, line);
            } else if (key == "seed") {
                cfg.seed = parse_uint(val, line);
            } else if (key == "data_rate") {
                cfg.data_rate_bps = parse_rate(val, line);
            } else if (key == "warmup") {
                cfg.warmup_s = parse_double(val, line);
            } else {
                throw ScenarioError("unknown key in [run]: " + key, line);
            }
        } else if (section == "topology") {
            if (key == "reference") {
                if (val != "true")
                    throw ScenarioError("only reference = true topologies are supported", line);
            } else if (key == "hosts") {
                cfg.hosts = static_cast<int>(parse_uint(val, line));
                if (cfg.hosts < 1 || cfg.hosts > 250)
                    throw ScenarioError("hosts must be within 1..250", line);
            } else {
                throw ScenarioError("unknown key in [topology]: " + key, line);
            }
        } else if (section == "addressing") {
            if (key == "lan_v6_prefix") cfg.addressing.lan_v6_prefix = addr6(val, line);
            else if (key == "router_a_v4") cfg.addressing.router_a_v4 = addr4(val, line);
            else if (key == "router_b_v4") cfg.addressing.router_b_v4 = addr4(val, line);
            else if (key == "router_a_v6") cfg.addressing.router_a_v6 = addr6(val, line);
            else if (key == "router_b_v6") cfg.addressing.router_b_v6 = addr6(val, line);
            else if (key == "server_v4") cfg.addressing.server_v4 = addr4(val, line);
            else if (key == "server_v6") cfg.addressing.server_v6 = addr6(val, line);
            else if (key == "policy") {
                if (val == "prefer_v6") cfg.policy = DualStackPolicy::PreferV6;
                else if (val == "prefer_v4") cfg.policy = DualStackPolicy::PreferV4;
                else throw ScenarioError("policy must be prefer_v4 or prefer_v6", line);
            } else {
                throw ScenarioError("unknown key in [addressing]: " + key, line);
            }
        } else if (section == "tunnel") {
            TunnelConfig& tc = tunnels[tunnel_label];
            if (key == "tunnel_type") {
                if (val == "manual") tc.mode = TunnelMode::Manual;
                else if (val == "6to4") tc.mode = TunnelMode::SixToFour;
                else throw ScenarioError("tunnel_type must be manual or 6to4", line);
            } else if (key == "tunnel_source") {
                tc.source_if = val;
            } else if (key == "tunnel_destination") {
                tc.dest_v4 = addr4(val, line);
            } else if (key == "address") {
                tc.tunnel_v6 = addr6(val, line);
            } else if (key == "prefix") {
                tc.prefix_len = static_cast<int>(parse_uint(val, line));
            } else {
                throw ScenarioError("unknown key in [tunnel]: " + key, line);
            }
        } else if (section == "application") {
            if (key == "type") {
                if (val == "http") cfg.app.kind = AppKind::Http;
                else if (val == "ftp") cfg.app.kind = AppKind::Ftp;
                else throw ScenarioError("application type must be http or ftp", line);
            } else if (key == "page_size") cfg.app.page_size = static_cast<std::uint32_t>(parse_uint(val, line));
            else if (key == "request_size") cfg.app.request_size = static_cast<std::uint32_t>(parse_uint(val, line));
            else if (key == "file_size") cfg.app.file_size = static_cast<std::uint32_t>(parse_uint(val, line));
            else throw ScenarioError("unknown key in [application]: " + key, line);
        } else if (section == "profile") {
            if (key == "think_time_mean") cfg.app.think_time_mean_s = parse_double(val, line);
            else if (key == "repeat_count") cfg.app.repeat_count = static_cast<int>(parse_uint(val, line));
            else if (key == "start") {
                if (val == "synchronized") cfg.app.synchronized_start = true;
                else if (val == "staggered") cfg.app.synchronized_start = false;
                else throw ScenarioError("start must be synchronized or staggered", line);
            } else if (key == "start_window") cfg.app.start_window_s = parse_double(val, line);
            else throw ScenarioError("unknown key in [profile]: " + key, line);
        } else if (section == "des") {
            if (key == "queue_capacity") cfg.des.queue_capacity = parse_uint(val, line);
            else if (key == "base_service_us")
                cfg.des.cpu.base_service = SimTime::from_ns(
                    static_cast<std::int64_t>(parse_double(val, line) * 1000));
            else if (key == "tunnel_surcharge_us")
                cfg.des.cpu.tunnel_surcharge = SimTime::from_ns(
                    static_cast<std::int64_t>(parse_double(val, line) * 1000));
            else if (key == "translate_surcharge_us")
                cfg.des.cpu.translate_surcharge = SimTime::from_ns(
                    static_cast<std::int64_t>(parse_double(val, line) * 1000));
            else if (key == "max_window") cfg.des.tcp.max_window = parse_double(val, line);
            else if (key == "mss") cfg.des.tcp.mss = static_cast<std::uint32_t>(parse_uint(val, line));
            else if (key == "rto_min_ms") cfg.des.tcp.rto_min = SimTime::from_ms(static_cast<std::int64_t>(parse_uint(val, line)));
            else if (key == "rto_initial_ms") cfg.des.tcp.rto_initial = SimTime::from_ms(static_cast<std::int64_t>(parse_uint(val, line)));
            else if (key == "lan_rate") cfg.des.lan_bps = parse_rate(val, line);
            else if (key == "wan_rate") cfg.des.wan_bps = parse_rate(val, line);
            else if (key == "lan_prop_us") cfg.des.lan_prop = SimTime::from_us(static_cast<std::int64_t>(parse_uint(val, line)));
            else if (key == "wan_prop_us") cfg.des.wan_prop = SimTime::from_us(static_cast<std::int64_t>(parse_uint(val, line)));
            else if (key == "backbone_prop_us") cfg.des.backbone_prop = SimTime::from_us(static_cast<std::int64_t>(parse_uint(val, line)));
            else if (key == "initial_ttl") cfg.des.initial_ttl = static_cast<std::uint8_t>(parse_uint(val, line));
            else if (key == "measured_queue") cfg.des.measured_queue = val;
            else if (key == "measured_cpu") cfg.des.measured_cpu = val;
            else throw ScenarioError("unknown key in [des]: " + key, line);
        }
    }

    if (!phase_set) throw ScenarioError("missing phase in [run] section of " + origin, 0);

    for (const auto& label : tunnel_order)
        cfg.tunnels.emplace_back(label, tunnels[label]);

    // Phase-consistent addressing.
    const bool tunnel_phase = cfg.phase == MechanismPhase::ManualTunnel ||
                              cfg.phase == MechanismPhase::SixToFour;
    if (cfg.phase == MechanismPhase::SixToFour && cfg.addressing.lan_v6_prefix &&
        !is_6to4(*cfg.addressing.lan_v6_prefix))
        throw ScenarioError("6to4 phase requires a 2002::/16 LAN prefix, got " +
                                format_address(*cfg.addressing.lan_v6_prefix),
                            0);
    for (auto& [router, tc] : cfg.tunnels) {
        if (!tunnel_phase)
            throw ScenarioError("tunnel configured for " + router + " in a non-tunnel phase", 0);
        if (cfg.phase == MechanismPhase::ManualTunnel && tc.mode != TunnelMode::Manual)
            throw ScenarioError("manual phase requires tunnel_type = manual on " + router,
                                tunnel_lines[router]);
        if (cfg.phase == MechanismPhase::SixToFour && tc.mode != TunnelMode::SixToFour)
            throw ScenarioError("6to4 phase requires tunnel_type = 6to4 on " + router,
                                tunnel_lines[router]);
        try {
            tc.validate();
        } catch (const ConfigError& e) {
            throw ScenarioError(e.what(), tunnel_lines[router]);
        }
    }

    try {
        return build_reference_topology(cfg);
    } catch (const ConfigError& e) {
        throw ScenarioError(std::string(e.what()) + " in " + origin, 0);
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return load_scenario_text(ss.str(), path);
}

std::string Scenario::canonical_dump() const {
    std::ostringstream o;
    o << "phase=" << to_string(cfg.phase) << "\nduration=" << cfg.duration_s
      << "\nseed=" << cfg.seed << "\ndata_rate=" << cfg.data_rate_bps
      << "\nwarmup=" << cfg.warmup_s << "\nhosts=" << cfg.hosts
      << "\npolicy=" << (cfg.policy == DualStackPolicy::PreferV6 ? "prefer_v6" : "prefer_v4")
      << "\napp=" << (cfg.app.kind == AppKind::Http ? "http" : "ftp")
      << " page=" << cfg.app.page_size << " req=" << cfg.app.request_size
      << " file=" << cfg.app.file_size << " think=" << cfg.app.think_time_mean_s
      << " repeat=" << cfg.app.repeat_count
      << " start=" << (cfg.app.synchronized_start ? "sync" : "staggered")
      << " window=" << cfg.app.start_window_s
      << "\ndes cap=" << cfg.des.queue_capacity
      << " base_ns=" << cfg.des.cpu.base_service.ns()
      << " tun_ns=" << cfg.des.cpu.tunnel_surcharge.ns()
      << " xlat_ns=" << cfg.des.cpu.translate_surcharge.ns()
      << " mss=" << cfg.des.tcp.mss << " maxw=" << cfg.des.tcp.max_window
      << " rtomin_ns=" << cfg.des.tcp.rto_min.ns()
      << " lan=" << cfg.des.lan_bps << " wan=" << cfg.des.wan_bps
      << " props=" << cfg.des.lan_prop.ns() << "/" << cfg.des.wan_prop.ns() << "/"
      << cfg.des.backbone_prop.ns() << "\n";
    for (const auto& [router, tc] : cfg.tunnels) {
        o << "tunnel " << router << " mode="
          << (tc.mode == TunnelMode::Manual ? "manual" : "6to4")
          << " src=" << tc.source_if << " src_v4=" << format_address(tc.source_if_v4);
        if (tc.dest_v4) o << " dst=" << format_address(*tc.dest_v4);
        o << " addr=" << format_address(tc.tunnel_v6) << "/" << tc.prefix_len << "\n";
    }
    o << "nodes=" << topo.nodes.size() << " links=" << topo.links.size() << "\n";
    for (const auto& f : topo.ifaces) {
        if (!f.v4 && !f.v6) continue;
        o << topo.nodes[f.node].name << ":" << f.name;
        if (f.v4) o << " v4=" << format_address(*f.v4);
        if (f.v6) o << " v6=" << format_address(*f.v6);
        o << "\n";
    }
    return o.str();
}

}  // namespace transim
