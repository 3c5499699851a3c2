#include "transim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <unordered_map>
#include <vector>

namespace transim {

namespace {

int log_level() {
    static int level = [] {
        const char* env = std::getenv("TRANSIM_LOG");
        if (!env) return 0;
        if (std::strcmp(env, "debug") == 0) return 2;
        if (std::strcmp(env, "info") == 0) return 1;
        return 0;
    }();
    return level;
}

// flow_id layout: [client:16][response:1][page:16][kind:3][seq:28]
enum class SegKind : std::uint8_t { Data = 0, Ack = 1, Probe = 2 };

struct FlowId {
    std::uint32_t client = 0;
    bool response = false;
    std::uint32_t page = 0;
    SegKind kind = SegKind::Data;
    std::uint32_t seq = 0;
};

std::uint64_t encode_flow(const FlowId& f) {
    return (std::uint64_t(f.client) << 48) | (std::uint64_t(f.response ? 1 : 0) << 47) |
           (std::uint64_t(f.page & 0xffff) << 31) |
           (std::uint64_t(static_cast<std::uint8_t>(f.kind)) << 28) |
           std::uint64_t(f.seq & 0x0fffffff);
}

FlowId decode_flow(std::uint64_t v) {
    FlowId f;
    f.client = static_cast<std::uint32_t>(v >> 48);
    f.response = ((v >> 47) & 1) != 0;
    f.page = static_cast<std::uint32_t>((v >> 31) & 0xffff);
    f.kind = static_cast<SegKind>((v >> 28) & 0x7);
    f.seq = static_cast<std::uint32_t>(v & 0x0fffffff);
    return f;
}

std::uint64_t transfer_key(std::uint32_t client, bool response, std::uint32_t page) {
    return (std::uint64_t(client) << 20) | (std::uint64_t(page) << 1) | (response ? 1 : 0);
}

}  // namespace

struct Simulation::Impl {
    Scenario sc;
    RunOptions opt;
    RouteTables routes;
    Engine engine;

    // --- runtime node/interface state -------------------------------------
    struct RIface {
        int spec = -1;
        int node = -1;
        int peer = -1;
        std::uint64_t rate = 0;
        SimTime prop{};
        bool is_virtual = false;
        bool measured = false;
        FifoQueue q{100};
        bool busy = false;
    };

    struct RNode {
        int id = -1;
        NodeKind kind = NodeKind::Host;
        NodeCpu cpu;
        bool measured_cpu = false;
        std::unordered_map<int, int> egress_for_peer;  // peer node -> riface idx
        const TunnelConfig* tunnel = nullptr;
        int tunnel_iface = -1;
    };

    std::vector<RIface> rifaces;
    std::vector<RNode> rnodes;
    std::unordered_map<std::uint32_t, int> owner_v4;
    std::unordered_map<Ipv6Address, int, Ipv6Hasher> owner_v6;

    // Primary per-node addresses used to build application packets.
    std::vector<std::optional<Ipv4Address>> node_v4;
    std::vector<std::optional<Ipv6Address>> node_v6;

    // --- transport state ---------------------------------------------------
    struct Transfer {
        std::uint32_t client = 0;
        bool response = false;
        std::uint32_t page = 0;
        int sender_node = -1, receiver_node = -1;
        std::uint32_t total_bytes = 0, total_segments = 0;
        std::uint32_t next_seq = 0, acked_count = 0, received_count = 0;
        std::vector<char> acked, received;
        std::vector<std::uint32_t> timer_gen;
        TcpConnection* conn = nullptr;
        SimTime request_time{};
        bool sender_done = false;
    };

    struct Client {
        int id = -1;
        int node = -1;
        TcpConnection up, down;
        Rng rng{0};
        std::uint32_t pages_started = 0;
        std::uint64_t pages_done = 0;
    };

    std::vector<Client> clients;
    std::unordered_map<std::uint64_t, std::shared_ptr<Transfer>> transfers;

    // --- measurement -------------------------------------------------------
    RunResult result;
    SimTime duration{};
    SimTime window_start{};
    int bucket_count = 0;
    bool probe_mode = false;
    ProbeResult probe_result;

    IpVersion app_family = IpVersion::V4;

    Impl(const Scenario& scenario, const RunOptions& options) : sc(scenario), opt(options) {
        if (opt.seed) sc.cfg.seed = *opt.seed;
        if (opt.duration_s) sc.cfg.duration_s = *opt.duration_s;

        routes = compute_routes(sc.topo);
        check_reachability(sc, routes);

        duration = SimTime::from_seconds(sc.cfg.duration_s);
        double w = opt.warmup_cut ? std::min(sc.cfg.warmup_s, sc.cfg.duration_s) : 0.0;
        window_start = SimTime::from_seconds(w);
        bucket_count = static_cast<int>(sc.cfg.duration_s);
        if (bucket_count < 1) bucket_count = 1;

        result.phase = sc.cfg.phase;
        result.seed = sc.cfg.seed;
        result.duration_s = sc.cfg.duration_s;
        result.window_start_s = w;
        result.data_rate_bps = sc.cfg.data_rate_bps ? sc.cfg.data_rate_bps : sc.cfg.des.wan_bps;
        result.rate_label = opt.rate_label;
        result.series_page_sum.assign(bucket_count, 0);
        result.series_page_n.assign(bucket_count, 0);
        result.series_tcp_sum.assign(bucket_count, 0);
        result.series_tcp_n.assign(bucket_count, 0);
        result.series_queue_sum.assign(bucket_count, 0);
        result.series_queue_n.assign(bucket_count, 0);
        result.series_cpu_busy_s.assign(bucket_count, 0);
        result.series_delivered_bytes.assign(bucket_count, 0);

        switch (sc.cfg.phase) {
            case MechanismPhase::Ipv4: app_family = IpVersion::V4; break;
            case MechanismPhase::DualStack:
                app_family = dualstack_select(DstCaps::Both, sc.cfg.policy);
                break;
            default: app_family = IpVersion::V6; break;
        }

        build_runtime();
        build_clients();
    }

    // ------------------------------------------------------------------ setup
    void build_runtime() {
        const Topology& t = sc.topo;
        rnodes.resize(t.nodes.size());
        node_v4.resize(t.nodes.size());
        node_v6.resize(t.nodes.size());
        for (const auto& n : t.nodes) {
            RNode& rn = rnodes[n.id];
            rn.id = n.id;
            rn.kind = n.kind;
            rn.cpu = NodeCpu(sc.cfg.des.cpu);
        }

        // Designated CPU: <node>, designated queue: <node>:<iface>.
        int measured_cpu_node = t.node_by_name(sc.cfg.des.measured_cpu);
        if (measured_cpu_node < 0)
            throw ConfigError("measured_cpu names unknown node " + sc.cfg.des.measured_cpu);
        rnodes[measured_cpu_node].measured_cpu = true;

        auto colon = sc.cfg.des.measured_queue.find(':');
        if (colon == std::string::npos)
            throw ConfigError("measured_queue must be <node>:<iface>");
        int mq_node = t.node_by_name(sc.cfg.des.measured_queue.substr(0, colon));
        if (mq_node < 0)
            throw ConfigError("measured_queue names unknown node " + sc.cfg.des.measured_queue);
        int mq_iface = t.iface_by_name(mq_node, sc.cfg.des.measured_queue.substr(colon + 1));
        if (mq_iface < 0)
            throw ConfigError("measured_queue names unknown interface " +
                              sc.cfg.des.measured_queue);

        for (const auto& f : t.ifaces) {
            const LinkSpec& l = t.links[f.link];
            RIface rf;
            rf.spec = f.id;
            rf.node = f.node;
            rf.peer = t.peer_node(l, f.node);
            rf.rate = l.bandwidth_bps;
            rf.prop = l.propagation;
            rf.is_virtual = l.is_virtual;
            rf.measured = (f.id == mq_iface);
            rf.q = FifoQueue(sc.cfg.des.queue_capacity);
            int idx = static_cast<int>(rifaces.size());
            rifaces.push_back(std::move(rf));
            if (!l.is_virtual) rnodes[f.node].egress_for_peer[rifaces[idx].peer] = idx;

            if (f.v4) owner_v4.emplace(f.v4->value, f.node);
            if (f.v6) owner_v6.emplace(*f.v6, f.node);
            if (f.v4 && !node_v4[f.node]) node_v4[f.node] = f.v4;
            if (f.v6 && !node_v6[f.node]) node_v6[f.node] = f.v6;
        }

        // Tunnel runtime: the virtual adjacency routes IPv6 between the edge
        // routers. A manual tunnel is a point-to-point virtual interface and
        // keeps its own serializing queue at the underlying path rate; 6to4
        // resolves per packet and hands straight to the physical egress.
        for (const auto& [router, tun] : sc.cfg.tunnels) {
            int node = t.node_by_name(router);
            RNode& rn = rnodes[node];
            rn.tunnel = &tun;
            for (const auto& f : t.ifaces) {
                if (f.node == node && t.links[f.link].is_virtual) {
                    rn.tunnel_iface = f.id;
                    rn.egress_for_peer[rifaces[f.id].peer] = f.id;
                }
            }
        }
    }

    void build_clients() {
        clients.resize(sc.host_nodes.size());
        for (std::size_t i = 0; i < sc.host_nodes.size(); ++i) {
            Client& c = clients[i];
            c.id = static_cast<int>(i);
            c.node = sc.host_nodes[i];
            c.up = TcpConnection(sc.cfg.des.tcp);
            c.down = TcpConnection(sc.cfg.des.tcp);
            c.rng = Rng::stream(sc.cfg.seed, i);
        }
    }

    // -------------------------------------------------------------- plumbing
    int bucket_of(SimTime t) const {
        auto b = t.ns() / 1'000'000'000;
        if (b < 0) b = 0;
        if (b >= bucket_count) b = bucket_count - 1;
        return static_cast<int>(b);
    }
    bool in_window(SimTime t) const { return t >= window_start && t <= duration; }

    void sample_tcp_delay(double v, SimTime t) {
        if (t > duration) return;
        if (in_window(t)) result.tcp_delay.add(v);
        result.series_tcp_sum[bucket_of(t)] += v;
        result.series_tcp_n[bucket_of(t)] += 1;
    }
    void sample_page(double v, SimTime t) {
        if (t > duration) return;
        if (in_window(t)) result.page_response.add(v);
        result.series_page_sum[bucket_of(t)] += v;
        result.series_page_n[bucket_of(t)] += 1;
    }
    void sample_queue(double v, SimTime t) {
        if (t > duration) return;
        if (in_window(t)) result.queue_delay.add(v);
        result.series_queue_sum[bucket_of(t)] += v;
        result.series_queue_n[bucket_of(t)] += 1;
    }
    void account_delivered(std::uint32_t bytes, SimTime t) {
        result.counters.delivered_bytes_total += bytes;
        if (t > duration) return;
        if (in_window(t)) result.counters.delivered_bytes_window += bytes;
        result.series_delivered_bytes[bucket_of(t)] += bytes;
    }
    void account_cpu(const RNode& n, NodeCpu::Service svc) {
        if (!n.measured_cpu) return;
        // split the service interval across 1 s buckets
        std::int64_t start = svc.start.ns(), finish = svc.finish.ns();
        std::int64_t cap = duration.ns();
        if (start >= cap) return;
        if (finish > cap) finish = cap;
        while (start < finish) {
            std::int64_t edge = (start / 1'000'000'000 + 1) * 1'000'000'000;
            std::int64_t upto = finish < edge ? finish : edge;
            result.series_cpu_busy_s[bucket_of(SimTime::from_ns(start))] +=
                static_cast<double>(upto - start) / 1e9;
            start = upto;
        }
    }

    Ipv4Address v4_of(int node) const {
        if (!node_v4[node]) throw NoRoute("node has no IPv4 address");
        return *node_v4[node];
    }
    Ipv6Address v6_of(int node) const {
        if (!node_v6[node]) throw NoRoute("node has no IPv6 address");
        return *node_v6[node];
    }

    int owner_of_outer_dst(const Packet& p) const {
        if (p.outer_is_v4()) {
            auto it = owner_v4.find(p.outer_v4().dst.value);
            return it == owner_v4.end() ? -1 : it->second;
        }
        auto it = owner_v6.find(p.outer_v6().dst);
        return it == owner_v6.end() ? -1 : it->second;
    }

    // ------------------------------------------------------------- dataplane
    struct Plan {
        enum class Act { Deliver, Forward, TtlExpire, NoRoute } act = Act::Deliver;
        unsigned ops = kOpForward;
        Packet pkt;
        int egress = -1;
    };

    Plan plan_forward(const RNode& node, Packet p, unsigned ops, bool decrement) {
        Plan plan;
        plan.ops = ops;
        if (decrement && node.kind == NodeKind::Router) {
            auto d = decrement_hop(p);
            if (!d) {
                plan.act = Plan::Act::TtlExpire;
                plan.pkt = p;
                return plan;
            }
            p = *d;
        }

        IpVersion fam = p.outer_is_v4() ? IpVersion::V4 : IpVersion::V6;
        int dst_node = owner_of_outer_dst(p);
        int next = dst_node < 0 ? -1 : routes.next_hop(fam, node.id, dst_node);
        if (next < 0) {
            plan.act = Plan::Act::NoRoute;
            plan.pkt = p;
            return plan;
        }

        auto eg = node.egress_for_peer.find(next);
        if (eg == node.egress_for_peer.end()) {
            plan.act = Plan::Act::NoRoute;
            plan.pkt = p;
            return plan;
        }

        if (rifaces[eg->second].is_virtual) {
            // Tunnel ingress: wrap and route the outer IPv4 packet.
            const TunnelConfig& tun = *node.tunnel;
            Ipv4Address outer_dst = tun.mode == TunnelMode::Manual
                                        ? manual_next_hop(tun)
                                        : sixto4_next_hop(p.outer_v6().dst);
            std::size_t before = on_wire_size(p);
            Packet enc = encapsulate(p, tun.source_if_v4, outer_dst, sc.cfg.des.initial_ttl);
            ++result.counters.encap_events;
            if (on_wire_size(enc) - before != 20) ++result.counters.overhead_violations;
            plan.ops |= kOpEncap;
            plan.pkt = enc;
            if (tun.mode == TunnelMode::Manual) {
                plan.act = Plan::Act::Forward;
                plan.egress = eg->second;  // serialized virtual interface
                return plan;
            }
            // 6to4: direct to the physical egress toward the outer next hop.
            auto it4 = owner_v4.find(outer_dst.value);
            int next4 = it4 == owner_v4.end()
                            ? -1
                            : routes.next_hop(IpVersion::V4, node.id, it4->second);
            auto eg4 = next4 < 0 ? node.egress_for_peer.end()
                                 : node.egress_for_peer.find(next4);
            if (eg4 == node.egress_for_peer.end() || rifaces[eg4->second].is_virtual) {
                plan.act = Plan::Act::NoRoute;
                return plan;
            }
            plan.act = Plan::Act::Forward;
            plan.egress = eg4->second;
            return plan;
        }

        plan.act = Plan::Act::Forward;
        plan.pkt = p;
        plan.egress = eg->second;
        return plan;
    }

    Plan make_plan(const RNode& node, const Packet& p, bool originating) {
        int dst_node = owner_of_outer_dst(p);
        if (dst_node == node.id) {
            if (p.outer_is_v4() && p.header_count == 2 &&
                p.outer_v4().protocol == kProtoIpv6InIpv4) {
                // Tunnel egress: unwrap, then forward the inner packet.
                std::size_t before = on_wire_size(p);
                Packet inner = decapsulate(p);
                ++result.counters.decap_events;
                if (before - on_wire_size(inner) != 20) ++result.counters.overhead_violations;
                return plan_forward(node, inner, kOpForward | kOpDecap, /*decrement=*/true);
            }
            Plan plan;
            plan.act = Plan::Act::Deliver;
            plan.pkt = p;
            return plan;
        }
        return plan_forward(node, p, kOpForward, /*decrement=*/!originating);
    }

    void process_at(int node_id, const Packet& p, bool originating) {
        RNode& node = rnodes[node_id];
        Plan plan = make_plan(node, p, originating);
        auto svc = node.cpu.process(engine.now(), plan.ops);
        account_cpu(node, svc);
        engine.schedule_at(svc.finish, [this, node_id, plan = std::move(plan)] {
            execute(node_id, plan);
        });
    }

    void execute(int node_id, const Plan& plan) {
        switch (plan.act) {
            case Plan::Act::Deliver:
                transport_deliver(node_id, plan.pkt);
                break;
            case Plan::Act::TtlExpire:
                ++result.counters.ttl_discards;
                if (probe_mode && decode_flow(plan.pkt.flow_id).kind == SegKind::Probe)
                    probe_result.discarded_at = sc.topo.nodes[node_id].name;
                break;
            case Plan::Act::NoRoute:
                ++result.counters.flows_aborted;
                break;
            case Plan::Act::Forward:
                egress_enqueue(plan.egress, plan.pkt);
                break;
        }
    }

    void egress_enqueue(int iface_idx, const Packet& p) {
        RIface& f = rifaces[iface_idx];
        bool accepted = f.q.enqueue(p, engine.now());
        if (accepted && !f.busy) start_tx(iface_idx);
    }

    void start_tx(int iface_idx) {
        RIface& f = rifaces[iface_idx];
        auto d = f.q.dequeue(engine.now());
        if (f.measured) sample_queue(d.wait.seconds(), engine.now());
        f.busy = true;
        Link link{f.rate, f.prop};
        SimTime ser = link.serialization(on_wire_size(d.packet));
        engine.schedule_in(ser, [this, iface_idx, pkt = std::move(d.packet)] {
            tx_done(iface_idx, pkt);
        });
    }

    void tx_done(int iface_idx, const Packet& p) {
        RIface& f = rifaces[iface_idx];
        f.busy = false;
        if (!f.q.queue_empty()) start_tx(iface_idx);
        if (f.is_virtual) {
            // The manual tunnel hands the wrapped packet to the physical
            // egress of the same router; the outer path delivers it.
            handoff_underlay(f.node, p);
        } else {
            engine.schedule_in(f.prop, [this, peer = f.peer, pkt = p] {
                process_at(peer, pkt, /*originating=*/false);
            });
        }
    }

    void handoff_underlay(int node_id, const Packet& p) {
        RNode& node = rnodes[node_id];
        auto it = owner_v4.find(p.outer_v4().dst.value);
        int next = it == owner_v4.end() ? -1
                                        : routes.next_hop(IpVersion::V4, node_id, it->second);
        auto eg = next < 0 ? node.egress_for_peer.end() : node.egress_for_peer.find(next);
        if (eg == node.egress_for_peer.end() || rifaces[eg->second].is_virtual) {
            ++result.counters.flows_aborted;
            return;
        }
        egress_enqueue(eg->second, p);
    }

    // ------------------------------------------------------------- transport
    Packet build_segment(int from_node, int to_node, const FlowId& flow,
                         std::uint32_t payload, std::optional<int> hop_limit = {}) {
        std::uint8_t hops = static_cast<std::uint8_t>(
            hop_limit.value_or(sc.cfg.des.initial_ttl));
        Packet p;
        if (app_family == IpVersion::V4) {
            p = make_ipv4_packet(v4_of(from_node), v4_of(to_node), payload, kProtoTcp, hops);
        } else {
            p = make_ipv6_packet(v6_of(from_node), v6_of(to_node), payload, kProtoTcp, hops);
        }
        p.flow_id = encode_flow(flow);
        p.created_at = engine.now();
        return p;
    }

    std::uint32_t seg_payload(const Transfer& t, std::uint32_t seq) const {
        std::uint64_t off = std::uint64_t(seq) * sc.cfg.des.tcp.mss;
        std::uint64_t left = t.total_bytes - off;
        return static_cast<std::uint32_t>(std::min<std::uint64_t>(left, sc.cfg.des.tcp.mss));
    }

    void send_segment(const std::shared_ptr<Transfer>& t, std::uint32_t seq, bool retx) {
        FlowId flow{t->client, t->response, t->page, SegKind::Data, seq};
        Packet p = build_segment(t->sender_node, t->receiver_node, flow, seg_payload(*t, seq));
        if (retx) {
            t->conn->record_resend(seq, engine.now());
            ++result.counters.retransmissions;
        } else {
            t->conn->record_send(seq, engine.now());
        }
        std::uint32_t gen = ++t->timer_gen[seq];
        engine.schedule_in(t->conn->rto(), [this, t, seq, gen] { on_rto(t, seq, gen); });
        process_at(t->sender_node, p, /*originating=*/true);
    }

    void fill_window(const std::shared_ptr<Transfer>& t) {
        while (t->next_seq < t->total_segments && t->conn->can_send())
            send_segment(t, t->next_seq++, /*retx=*/false);
    }

    void on_rto(const std::shared_ptr<Transfer>& t, std::uint32_t seq, std::uint32_t gen) {
        if (t->acked[seq] || t->timer_gen[seq] != gen) return;
        if (!t->conn->on_drop(seq, engine.now())) return;
        send_segment(t, seq, /*retx=*/true);
    }

    std::shared_ptr<Transfer> make_transfer(std::uint32_t client, bool response,
                                            std::uint32_t page, int sender, int receiver,
                                            std::uint32_t bytes, TcpConnection* conn,
                                            SimTime request_time) {
        auto t = std::make_shared<Transfer>();
        t->client = client;
        t->response = response;
        t->page = page;
        t->sender_node = sender;
        t->receiver_node = receiver;
        t->total_bytes = bytes;
        t->total_segments = static_cast<std::uint32_t>(
            (std::uint64_t(bytes) + sc.cfg.des.tcp.mss - 1) / sc.cfg.des.tcp.mss);
        if (t->total_segments == 0) t->total_segments = 1;
        t->acked.assign(t->total_segments, 0);
        t->received.assign(t->total_segments, 0);
        t->timer_gen.assign(t->total_segments, 0);
        t->conn = conn;
        t->request_time = request_time;
        transfers[transfer_key(client, response, page)] = t;
        return t;
    }

    void maybe_retire(const std::shared_ptr<Transfer>& t) {
        if (t->sender_done && t->received_count == t->total_segments)
            transfers.erase(transfer_key(t->client, t->response, t->page));
    }

    void issue_request(std::uint32_t client_id) {
        if (engine.now() >= duration) return;
        Client& c = clients[client_id];
        if (sc.cfg.app.repeat_count > 0 &&
            c.pages_done >= static_cast<std::uint64_t>(sc.cfg.app.repeat_count))
            return;
        std::uint32_t page = c.pages_started++ & 0xffff;
        ++result.counters.requests_sent;
        auto t = make_transfer(client_id, /*response=*/false, page, c.node, sc.server_node,
                               sc.cfg.app.request_size, &c.up, engine.now());
        fill_window(t);
    }

    std::uint32_t response_bytes() const {
        return sc.cfg.app.kind == AppKind::Http ? sc.cfg.app.page_size : sc.cfg.app.file_size;
    }

    void on_transfer_complete_at_receiver(const std::shared_ptr<Transfer>& t) {
        if (!t->response) {
            // Request landed at the server: answer with the page/file.
            Client& c = clients[t->client];
            auto resp = make_transfer(t->client, /*response=*/true, t->page, sc.server_node,
                                      c.node, response_bytes(), &c.down, t->request_time);
            fill_window(resp);
            return;
        }
        // Page fully delivered to the client.
        Client& c = clients[t->client];
        ++c.pages_done;
        ++result.counters.pages_completed;
        sample_page((engine.now() - t->request_time).seconds(), engine.now());
        if (engine.now() < duration) {
            SimTime think = SimTime::from_seconds(
                c.rng.exponential(sc.cfg.app.think_time_mean_s));
            engine.schedule_in(think, [this, id = t->client] { issue_request(id); });
        }
    }

    void transport_deliver(int node_id, const Packet& p) {
        FlowId flow = decode_flow(p.flow_id);
        if (flow.kind == SegKind::Probe) {
            probe_result.arrived = true;
            probe_result.residual_hops =
                p.outer_is_v4() ? p.outer_v4().ttl : p.outer_v6().hop_limit;
            return;
        }

        auto it = transfers.find(transfer_key(flow.client, flow.response, flow.page));
        std::shared_ptr<Transfer> t = it == transfers.end() ? nullptr : it->second;

        if (flow.kind == SegKind::Data) {
            bool duplicate = true;
            if (t && node_id == t->receiver_node && !t->received[flow.seq]) {
                duplicate = false;
                t->received[flow.seq] = 1;
                ++t->received_count;
                if (t->response) account_delivered(seg_payload(*t, flow.seq), engine.now());
                if (t->received_count == t->total_segments)
                    on_transfer_complete_at_receiver(t);
                maybe_retire(t);
            }
            (void)duplicate;
            // Ack every arrival, duplicates included: the sender's copy may
            // have lost its ack.
            FlowId ack = flow;
            ack.kind = SegKind::Ack;
            int back_to = t ? t->sender_node : owner_of_packet_src(p);
            if (back_to >= 0) {
                Packet a = build_segment(node_id, back_to, ack, 0);
                process_at(node_id, a, /*originating=*/true);
            }
            return;
        }

        // Ack for one of our outstanding segments.
        if (!t || node_id != t->sender_node) {
            ++result.counters.duplicate_acks;
            return;
        }
        auto sample = t->conn->on_ack(flow.seq, engine.now());
        if (!sample) {
            ++result.counters.duplicate_acks;
            return;
        }
        sample_tcp_delay(*sample, engine.now());
        if (!t->acked[flow.seq]) {
            t->acked[flow.seq] = 1;
            ++t->acked_count;
            ++t->timer_gen[flow.seq];  // cancels the pending timer
        }
        if (t->acked_count == t->total_segments) {
            t->sender_done = true;
            maybe_retire(t);
        } else {
            fill_window(t);
        }
    }

    int owner_of_packet_src(const Packet& p) const {
        if (p.outer_is_v4()) {
            auto it = owner_v4.find(p.outer_v4().src.value);
            return it == owner_v4.end() ? -1 : it->second;
        }
        auto it = owner_v6.find(p.outer_v6().src);
        return it == owner_v6.end() ? -1 : it->second;
    }

    // ------------------------------------------------------------------ runs
    void start_workload() {
        for (auto& c : clients) {
            if (sc.cfg.app.synchronized_start) {
                engine.schedule_at(SimTime{}, [this, id = c.id] {
                    issue_request(static_cast<std::uint32_t>(id));
                });
            } else {
                double dt = c.rng.uniform(0.0, std::max(sc.cfg.app.start_window_s, 1e-9));
                engine.schedule_at(SimTime::from_seconds(dt), [this, id = c.id] {
                    issue_request(static_cast<std::uint32_t>(id));
                });
            }
        }
    }

    void drain() {
        SimTime hard_cap = duration + SimTime::from_s(600);
        while (!engine.empty()) {
            SimTime next = engine.next_event_time();
            if (next > hard_cap) {
                result.counters.drained = false;
                break;
            }
            engine.run_until(next);
        }
    }

    RunResult finish() {
        for (const auto& f : rifaces) {
            result.counters.queue_drops += f.q.drop_count();
            if (!f.q.conserved()) result.counters.queues_conserved = false;
            if (!result.counters.drained) continue;
            if (!f.q.queue_empty()) result.counters.queues_conserved = false;
        }

        double window_s = (duration - window_start).seconds();
        if (window_s <= 0) window_s = duration.seconds() > 0 ? duration.seconds() : 1;
        double busy = 0;
        int w0 = static_cast<int>(window_start.ns() / 1'000'000'000);
        for (int b = w0; b < bucket_count; ++b) busy += result.series_cpu_busy_s[b];
        result.cpu_utilization = 100.0 * busy / window_s;
        result.throughput =
            static_cast<double>(result.counters.delivered_bytes_window) / window_s;

        if (log_level() >= 1) {
            std::fprintf(stderr,
                         "[transim] phase=%s seed=%llu pages=%llu drops=%llu retx=%llu "
                         "tcp_delay=%s cpu=%s thr=%s\n",
                         to_string(result.phase),
                         static_cast<unsigned long long>(result.seed),
                         static_cast<unsigned long long>(result.counters.pages_completed),
                         static_cast<unsigned long long>(result.counters.queue_drops),
                         static_cast<unsigned long long>(result.counters.retransmissions),
                         format_g6(result.tcp_delay.mean()).c_str(),
                         format_g6(result.cpu_utilization).c_str(),
                         format_g6(result.throughput).c_str());
        }
        return result;
    }

    RunResult run() {
        start_workload();
        engine.run_until(duration);
        drain();
        return finish();
    }

    ProbeResult probe(int hop_limit) {
        probe_mode = true;
        int host = sc.host_nodes.front();
        FlowId flow{0, false, 0, SegKind::Probe, 0};
        Packet p = build_segment(host, sc.server_node, flow, 64, hop_limit);
        engine.schedule_at(SimTime{}, [this, host, p] {
            process_at(host, p, /*originating=*/true);
        });
        drain();
        return probe_result;
    }
};

Simulation::Simulation(const Scenario& sc, const RunOptions& opt)
    : impl_(std::make_unique<Impl>(sc, opt)) {}

Simulation::~Simulation() = default;

RunResult Simulation::run() { return impl_->run(); }

Simulation::ProbeResult Simulation::probe(int hop_limit) { return impl_->probe(hop_limit); }

Scenario rebuild_scenario(ScenarioConfig cfg) { return build_reference_topology(cfg); }

}  // namespace transim
