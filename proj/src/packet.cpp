#include "transim/packet.hpp"

#include <cassert>

namespace transim {

std::array<std::uint8_t, Ipv4Header::kWireSize> Ipv4Header::serialize() const {
    std::array<std::uint8_t, kWireSize> b{};
    b[0] = static_cast<std::uint8_t>((version << 4) | (ihl & 0x0f));
    b[1] = type_of_service;
    b[2] = static_cast<std::uint8_t>(total_length >> 8);
    b[3] = static_cast<std::uint8_t>(total_length & 0xff);
    b[4] = static_cast<std::uint8_t>(identification >> 8);
    b[5] = static_cast<std::uint8_t>(identification & 0xff);
    b[6] = static_cast<std::uint8_t>(((flags & 0x7) << 5) |
                                     ((fragment_offset >> 8) & 0x1f));
    b[7] = static_cast<std::uint8_t>(fragment_offset & 0xff);
    b[8] = ttl;
    b[9] = protocol;
    b[10] = static_cast<std::uint8_t>(header_checksum >> 8);
    b[11] = static_cast<std::uint8_t>(header_checksum & 0xff);
    for (int i = 0; i < 4; ++i) {
        b[12 + i] = src.octet(i);
        b[16 + i] = dst.octet(i);
    }
    return b;
}

std::array<std::uint8_t, Ipv6Header::kWireSize> Ipv6Header::serialize() const {
    std::array<std::uint8_t, kWireSize> b{};
    b[0] = static_cast<std::uint8_t>((version << 4) | (traffic_class >> 4));
    b[1] = static_cast<std::uint8_t>(((traffic_class & 0x0f) << 4) |
                                     ((flow_label >> 16) & 0x0f));
    b[2] = static_cast<std::uint8_t>((flow_label >> 8) & 0xff);
    b[3] = static_cast<std::uint8_t>(flow_label & 0xff);
    b[4] = static_cast<std::uint8_t>(payload_length >> 8);
    b[5] = static_cast<std::uint8_t>(payload_length & 0xff);
    b[6] = next_header;
    b[7] = hop_limit;
    for (int i = 0; i < 16; ++i) {
        b[8 + i] = src.octets[i];
        b[24 + i] = dst.octets[i];
    }
    return b;
}

namespace {

std::uint16_t fold_checksum(const std::array<std::uint8_t, 20>& bytes) {
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i < bytes.size(); i += 2)
        sum += (std::uint32_t(bytes[i]) << 8) | bytes[i + 1];
    while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
    return static_cast<std::uint16_t>(~sum & 0xffff);
}

}  // namespace

std::uint16_t compute_checksum(const Ipv4Header& h) {
    Ipv4Header zeroed = h;
    zeroed.header_checksum = 0;
    return fold_checksum(zeroed.serialize());
}

bool verify_checksum(const Ipv4Header& h) {
    // Summing the header including the stored checksum yields all-ones,
    // i.e. the complemented fold is zero.
    return fold_checksum(h.serialize()) == 0;
}

void finalize_checksum(Ipv4Header& h) {
    h.header_checksum = compute_checksum(h);
}

Packet make_ipv4_packet(Ipv4Address src, Ipv4Address dst, std::uint32_t payload,
                        std::uint8_t protocol, std::uint8_t ttl) {
    Ipv4Header h;
    h.src = src;
    h.dst = dst;
    h.protocol = protocol;
    h.ttl = ttl;
    h.total_length = static_cast<std::uint16_t>(Ipv4Header::kWireSize + payload);
    finalize_checksum(h);
    Packet p;
    p.headers[0] = h;
    p.header_count = 1;
    p.payload_bytes = payload;
    return p;
}

Packet make_ipv6_packet(const Ipv6Address& src, const Ipv6Address& dst,
                        std::uint32_t payload, std::uint8_t next_header,
                        std::uint8_t hop_limit) {
    Ipv6Header h;
    h.src = src;
    h.dst = dst;
    h.next_header = next_header;
    h.hop_limit = hop_limit;
    h.payload_length = static_cast<std::uint16_t>(payload);
    Packet p;
    p.headers[0] = h;
    p.header_count = 1;
    p.payload_bytes = payload;
    return p;
}

std::size_t on_wire_size(const Packet& p) {
    std::size_t n = p.payload_bytes;
    for (std::uint8_t i = 0; i < p.header_count; ++i)
        n += header_wire_size(p.headers[i]);
    return n;
}

std::optional<Packet> decrement_hop(const Packet& p) {
    assert(p.header_count >= 1);
    Packet out = p;
    if (out.outer_is_v4()) {
        auto& h = std::get<Ipv4Header>(out.headers[0]);
        if (h.ttl <= 1) return std::nullopt;
        h.ttl -= 1;
        finalize_checksum(h);
    } else {
        auto& h = std::get<Ipv6Header>(out.headers[0]);
        if (h.hop_limit <= 1) return std::nullopt;
        h.hop_limit -= 1;
    }
    return out;
}

}  // namespace transim
