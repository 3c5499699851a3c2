#ifndef TRANSIM_PACKET_HPP
#define TRANSIM_PACKET_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <variant>

#include "transim/address.hpp"
#include "transim/time.hpp"

namespace transim {

/// Protocol number carried in the outer IPv4 header for tunneled IPv6.
inline constexpr std::uint8_t kProtoIpv6InIpv4 = 41;
inline constexpr std::uint8_t kProtoTcp = 6;

/// Fixed 20-byte IPv4 header; options are unsupported, so ihl is pinned to 5.
struct Ipv4Header {
    std::uint8_t version = 4;
    std::uint8_t ihl = 5;                 // 32-bit words
    std::uint8_t type_of_service = 0;
    std::uint16_t total_length = 20;      // header + payload bytes
    std::uint16_t identification = 0;
    std::uint8_t flags = 0;               // 3 bits
    std::uint16_t fragment_offset = 0;    // 13 bits
    std::uint8_t ttl = 64;
    std::uint8_t protocol = 0;
    std::uint16_t header_checksum = 0;
    Ipv4Address src{};
    Ipv4Address dst{};

    static constexpr std::size_t kWireSize = 20;
    std::array<std::uint8_t, kWireSize> serialize() const;
    bool operator==(const Ipv4Header&) const = default;
};

/// Fixed 40-byte IPv6 header; extension headers are unsupported.
struct Ipv6Header {
    std::uint8_t version = 6;
    std::uint8_t traffic_class = 0;
    std::uint32_t flow_label = 0;         // 20 bits
    std::uint16_t payload_length = 0;
    std::uint8_t next_header = 0;
    std::uint8_t hop_limit = 64;
    Ipv6Address src{};
    Ipv6Address dst{};

    static constexpr std::size_t kWireSize = 40;
    std::array<std::uint8_t, kWireSize> serialize() const;
    bool operator==(const Ipv6Header&) const = default;
};

using Header = std::variant<Ipv4Header, Ipv6Header>;

inline std::size_t header_wire_size(const Header& h) {
    return std::holds_alternative<Ipv4Header>(h) ? Ipv4Header::kWireSize
                                                 : Ipv6Header::kWireSize;
}

/// Standard internet checksum: ones'-complement sum of the header's 16-bit
/// words with the checksum field taken as zero.
std::uint16_t compute_checksum(const Ipv4Header& h);
bool verify_checksum(const Ipv4Header& h);
/// Stores a checksum that makes verify_checksum() true.
void finalize_checksum(Ipv4Header& h);

/// The unit flowing through the simulator: a header stack (outermost first,
/// at most one level of IPv4-over-IPv6 encapsulation), a payload byte count
/// and flow metadata. Payload content is never modeled, only its size.
struct Packet {
    std::array<Header, 2> headers{};
    std::uint8_t header_count = 0;
    std::uint32_t payload_bytes = 0;
    std::uint64_t flow_id = 0;
    SimTime created_at{};

    Header& outer() { return headers[0]; }
    const Header& outer() const { return headers[0]; }
    const Header& inner() const { return headers[1]; }

    bool outer_is_v4() const { return std::holds_alternative<Ipv4Header>(headers[0]); }
    const Ipv4Header& outer_v4() const { return std::get<Ipv4Header>(headers[0]); }
    const Ipv6Header& outer_v6() const { return std::get<Ipv6Header>(headers[0]); }

    bool operator==(const Packet&) const = default;
};

Packet make_ipv4_packet(Ipv4Address src, Ipv4Address dst, std::uint32_t payload,
                        std::uint8_t protocol = kProtoTcp, std::uint8_t ttl = 64);
Packet make_ipv6_packet(const Ipv6Address& src, const Ipv6Address& dst,
                        std::uint32_t payload, std::uint8_t next_header = kProtoTcp,
                        std::uint8_t hop_limit = 64);

/// Header-stack sizes plus payload.
std::size_t on_wire_size(const Packet& p);

/// Decrements the outermost ttl/hop_limit. A pre-decrement value <= 1 means
/// the packet expires; nullopt is the discard outcome, counted by the caller.
/// The IPv4 checksum is recomputed after a decrement.
std::optional<Packet> decrement_hop(const Packet& p);

}  // namespace transim

#endif
