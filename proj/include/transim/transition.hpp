#ifndef TRANSIM_TRANSITION_HPP
#define TRANSIM_TRANSITION_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>

#include "transim/addressing.hpp"
#include "transim/packet.hpp"

namespace transim {

/// The five experiment configurations. A scenario run binds exactly one.
enum class MechanismPhase { Ipv4, Ipv6, DualStack, ManualTunnel, SixToFour };

const char* to_string(MechanismPhase p);
std::optional<MechanismPhase> parse_phase(const std::string& name);

enum class IpVersion { V4, V6 };
enum class DstCaps { V4, V6, Both };
enum class DualStackPolicy { PreferV4, PreferV6 };

/// Per-destination version choice of a dual-stack node. Single-capability
/// destinations get that version; dual-capability follows the policy.
IpVersion dualstack_select(DstCaps caps, DualStackPolicy policy);

enum class TunnelMode { Manual, SixToFour };

/// Tunnel endpoint configuration, mirroring the scenario file keys.
/// Manual mode is point-to-point and requires dest_v4; 6to4 is
/// point-to-multipoint and derives the other end per packet.
struct TunnelConfig {
    TunnelMode mode = TunnelMode::SixToFour;
    std::string source_if;                 // name of the underlying interface
    Ipv4Address source_if_v4{};
    std::optional<Ipv4Address> dest_v4;
    Ipv6Address tunnel_v6{};
    int prefix_len = 128;

    void validate() const;                 // throws ConfigError
};

/// Prepends an outer IPv4 header (protocol 41) around a single-header IPv6
/// packet. The inner header is untouched; the outer ttl starts fresh.
Packet encapsulate(const Packet& p, Ipv4Address outer_src, Ipv4Address outer_dst,
                   std::uint8_t outer_ttl = 64);

/// Removes the outer IPv4 header; returns the inner packet bit-identical to
/// its pre-encapsulation form. Throws NotTunneled unless the outer header is
/// IPv4 with protocol 41 and an inner IPv6 header exists.
Packet decapsulate(const Packet& p);

/// Automatic point-to-multipoint endpoint selection: the IPv4 next hop is
/// embedded in the 6to4 destination. Throws NoRoute outside 2002::/16.
Ipv4Address sixto4_next_hop(const Ipv6Address& dst);

/// Static point-to-point endpoint; throws ConfigError on mode mismatch.
Ipv4Address manual_next_hop(const TunnelConfig& cfg);

/// Stateless header rewriting. Field mapping: ttl<->hop_limit,
/// type_of_service<->traffic_class, protocol<->next_header,
/// total_length = payload_length + 20.
Packet siit_translate_v4_to_v6(const Packet& p);
Packet siit_translate_v6_to_v4(const Packet& p);

/// Bindings from (inner IPv6 source, port) to an allocated pool address and
/// port. One pool address is held per inner source; ports are handed out
/// sequentially from 49152 within it. The transport port is taken from the
/// low 16 bits of the packet's flow id.
class NatBindingTable {
  public:
    NatBindingTable(std::deque<Ipv4Address> pool, const Ipv6Address& prefix96)
        : free_pool_(std::move(pool)), prefix_(prefix96) {}

    const Ipv6Address& prefix() const { return prefix_; }
    std::size_t binding_count() const { return out_.size(); }
    std::size_t pool_free() const { return free_pool_.size(); }

    struct Binding {
        Ipv4Address pool_addr;
        std::uint16_t port;
    };

    /// Allocates or reuses; throws PoolExhausted when a new inner source
    /// arrives and the pool is empty.
    Binding bind_outbound(const Ipv6Address& inner_src, std::uint16_t port);

    /// Throws NoBinding for unknown inbound (pool address, port) pairs.
    std::pair<Ipv6Address, std::uint16_t> lookup_inbound(Ipv4Address pool_addr,
                                                         std::uint16_t port) const;

  private:
    std::map<std::pair<Ipv6Address, std::uint16_t>, Binding> out_;
    std::map<std::pair<Ipv4Address, std::uint16_t>, std::pair<Ipv6Address, std::uint16_t>> in_;
    std::map<Ipv6Address, Ipv4Address> addr_for_src_;
    std::map<Ipv4Address, std::uint16_t> next_port_;
    std::deque<Ipv4Address> free_pool_;
    Ipv6Address prefix_;
};

/// Stateful translation. Outbound allocates/reuses a pool source and strips
/// the 96-bit prefix from the destination; inbound inverts via the table.
Packet natpt_translate_v6_to_v4(const Packet& p, NatBindingTable& table);
Packet natpt_translate_v4_to_v6(const Packet& p, NatBindingTable& table);

}  // namespace transim

#endif
