#include "transim/transition.hpp"

namespace transim {

const char* to_string(MechanismPhase p) {
    switch (p) {
        case MechanismPhase::Ipv4: return "ipv4";
        case MechanismPhase::Ipv6: return "ipv6";
        case MechanismPhase::DualStack: return "dualstack";
        case MechanismPhase::ManualTunnel: return "manual";
        case MechanismPhase::SixToFour: return "6to4";
    }
    return "?";
}

std::optional<MechanismPhase> parse_phase(const std::string& name) {
    if (name == "ipv4") return MechanismPhase::Ipv4;
    if (name == "ipv6") return MechanismPhase::Ipv6;
    if (name == "dualstack" || name == "dual-stack") return MechanismPhase::DualStack;
    if (name == "manual") return MechanismPhase::ManualTunnel;
    if (name == "6to4") return MechanismPhase::SixToFour;
    return std::nullopt;
}

IpVersion dualstack_select(DstCaps caps, DualStackPolicy policy) {
    switch (caps) {
        case DstCaps::V4: return IpVersion::V4;
        case DstCaps::V6: return IpVersion::V6;
        case DstCaps::Both:
            return policy == DualStackPolicy::PreferV6 ? IpVersion::V6 : IpVersion::V4;
    }
    return IpVersion::V4;
}

void TunnelConfig::validate() const {
    if (mode == TunnelMode::Manual && !dest_v4)
        throw ConfigError("manual tunnel requires tunnel_destination (point-to-point)");
    if (mode == TunnelMode::SixToFour && dest_v4)
        throw ConfigError("6to4 tunnel takes no tunnel_destination (point-to-multipoint)");
}

Packet encapsulate(const Packet& p, Ipv4Address outer_src, Ipv4Address outer_dst,
                   std::uint8_t outer_ttl) {
    if (p.header_count != 1)
        throw NestedTunnel("packet is already encapsulated");
    if (p.outer_is_v4())
        throw NestedTunnel("only IPv6 packets can enter a tunnel");

    Ipv4Header outer;
    outer.src = outer_src;
    outer.dst = outer_dst;
    outer.ttl = outer_ttl;
    outer.protocol = kProtoIpv6InIpv4;
    outer.total_length = static_cast<std::uint16_t>(
        Ipv4Header::kWireSize + Ipv6Header::kWireSize + p.payload_bytes);
    finalize_checksum(outer);

    Packet out = p;
    out.headers[1] = out.headers[0];
    out.headers[0] = outer;
    out.header_count = 2;
    return out;
}

Packet decapsulate(const Packet& p) {
    if (p.header_count != 2 || !p.outer_is_v4())
        throw NotTunneled("no outer IPv4 header to remove");
    const auto& outer = p.outer_v4();
    if (outer.protocol != kProtoIpv6InIpv4)
        throw NotTunneled("outer protocol is not 41");
    if (!std::holds_alternative<Ipv6Header>(p.headers[1]))
        throw NotTunneled("no inner IPv6 header");

    Packet out = p;
    out.headers[0] = out.headers[1];
    out.headers[1] = Header{};
    out.header_count = 1;
    return out;
}

Ipv4Address sixto4_next_hop(const Ipv6Address& dst) {
    if (!is_6to4(dst))
        throw NoRoute("6to4 next hop undefined for " + format_address(dst));
    return extract_6to4_v4(dst);
}

Ipv4Address manual_next_hop(const TunnelConfig& cfg) {
    if (cfg.mode != TunnelMode::Manual)
        throw ConfigError("manual_next_hop on a non-manual tunnel");
    if (!cfg.dest_v4)
        throw ConfigError("manual tunnel has no destination configured");
    return *cfg.dest_v4;
}

Packet siit_translate_v4_to_v6(const Packet& p) {
    if (p.header_count != 1 || !p.outer_is_v4())
        throw NotTranslatable("expected a plain IPv4 packet");
    const auto& v4 = p.outer_v4();

    Ipv6Header v6;
    v6.traffic_class = v4.type_of_service;
    v6.payload_length = static_cast<std::uint16_t>(v4.total_length - Ipv4Header::kWireSize);
    v6.next_header = v4.protocol;
    v6.hop_limit = v4.ttl;
    v6.src = siit_v4_mapped(v4.src);
    v6.dst = siit_v4_translated(v4.dst);

    Packet out = p;
    out.headers[0] = v6;
    return out;
}

Packet siit_translate_v6_to_v4(const Packet& p) {
    if (p.header_count != 1 || p.outer_is_v4())
        throw NotTranslatable("expected a plain IPv6 packet");
    const auto& v6 = p.outer_v6();
    auto src = siit_strip(v6.src);
    auto dst = siit_strip(v6.dst);
    if (!src || !dst)
        throw NotTranslatable("addresses do not carry a SIIT prefix");

    Ipv4Header v4;
    v4.type_of_service = v6.traffic_class;
    v4.total_length = static_cast<std::uint16_t>(v6.payload_length + Ipv4Header::kWireSize);
    v4.identification = 0;
    v4.flags = 0x2;  // DF; fragmentation is not modeled
    v4.ttl = v6.hop_limit;
    v4.protocol = v6.next_header;
    v4.src = *src;
    v4.dst = *dst;
    finalize_checksum(v4);

    Packet out = p;
    out.headers[0] = v4;
    return out;
}

NatBindingTable::Binding NatBindingTable::bind_outbound(const Ipv6Address& inner_src,
                                                        std::uint16_t port) {
    auto key = std::make_pair(inner_src, port);
    if (auto it = out_.find(key); it != out_.end()) return it->second;

    Ipv4Address addr;
    if (auto it = addr_for_src_.find(inner_src); it != addr_for_src_.end()) {
        addr = it->second;
    } else {
        if (free_pool_.empty())
            throw PoolExhausted("NAT-PT pool has no free IPv4 address");
        addr = free_pool_.front();
        free_pool_.pop_front();
        addr_for_src_[inner_src] = addr;
        next_port_[addr] = 49152;
    }
    Binding b{addr, next_port_[addr]++};
    out_[key] = b;
    in_[std::make_pair(b.pool_addr, b.port)] = key;
    return b;
}

std::pair<Ipv6Address, std::uint16_t> NatBindingTable::lookup_inbound(
    Ipv4Address pool_addr, std::uint16_t port) const {
    auto it = in_.find(std::make_pair(pool_addr, port));
    if (it == in_.end())
        throw NoBinding("no NAT-PT binding for " + format_address(pool_addr) + ":" +
                        std::to_string(port));
    return it->second;
}

Packet natpt_translate_v6_to_v4(const Packet& p, NatBindingTable& table) {
    if (p.header_count != 1 || p.outer_is_v4())
        throw NotTranslatable("expected a plain IPv6 packet");
    const auto& v6 = p.outer_v6();
    auto port = static_cast<std::uint16_t>(p.flow_id & 0xffff);
    auto binding = table.bind_outbound(v6.src, port);
    Ipv4Address dst = natpt_strip(v6.dst, table.prefix());

    Ipv4Header v4;
    v4.type_of_service = v6.traffic_class;
    v4.total_length = static_cast<std::uint16_t>(v6.payload_length + Ipv4Header::kWireSize);
    v4.ttl = v6.hop_limit;
    v4.protocol = v6.next_header;
    v4.src = binding.pool_addr;
    v4.dst = dst;
    finalize_checksum(v4);

    Packet out = p;
    out.headers[0] = v4;
    return out;
}

Packet natpt_translate_v4_to_v6(const Packet& p, NatBindingTable& table) {
    if (p.header_count != 1 || !p.outer_is_v4())
        throw NotTranslatable("expected a plain IPv4 packet");
    const auto& v4 = p.outer_v4();
    auto port = static_cast<std::uint16_t>(p.flow_id & 0xffff);
    auto [inner_dst, inner_port] = table.lookup_inbound(v4.dst, port);
    (void)inner_port;

    Ipv6Header v6;
    v6.traffic_class = v4.type_of_service;
    v6.payload_length = static_cast<std::uint16_t>(v4.total_length - Ipv4Header::kWireSize);
    v6.next_header = v4.protocol;
    v6.hop_limit = v4.ttl;
    v6.src = natpt_embed(v4.src, table.prefix());
    v6.dst = inner_dst;

    Packet out = p;
    out.headers[0] = v6;
    return out;
}

}  // namespace transim
