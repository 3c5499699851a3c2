#ifndef TRANSIM_ADDRESS_HPP
#define TRANSIM_ADDRESS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>

#include "transim/errors.hpp"

namespace transim {

/// 32-bit IPv4 address, value held in host order.
struct Ipv4Address {
    std::uint32_t value = 0;

    constexpr std::uint8_t octet(int i) const {
        return static_cast<std::uint8_t>(value >> (8 * (3 - i)));
    }
    static constexpr Ipv4Address from_octets(std::uint8_t a, std::uint8_t b,
                                             std::uint8_t c, std::uint8_t d) {
        return Ipv4Address{(std::uint32_t(a) << 24) | (std::uint32_t(b) << 16) |
                           (std::uint32_t(c) << 8) | std::uint32_t(d)};
    }
    constexpr auto operator<=>(const Ipv4Address&) const = default;
};

/// 128-bit IPv6 address as 16 octets in network order.
struct Ipv6Address {
    std::array<std::uint8_t, 16> octets{};

    static Ipv6Address from_words(std::uint64_t hi, std::uint64_t lo);
    std::uint64_t hi() const;
    std::uint64_t lo() const;

    /// 16-bit group i (0 = most significant).
    std::uint16_t group(int i) const {
        return static_cast<std::uint16_t>((octets[2 * i] << 8) | octets[2 * i + 1]);
    }
    void set_group(int i, std::uint16_t g) {
        octets[2 * i] = static_cast<std::uint8_t>(g >> 8);
        octets[2 * i + 1] = static_cast<std::uint8_t>(g & 0xff);
    }

    bool is_multicast() const { return octets[0] == 0xff; }
    /// fe80::/10
    bool is_link_local() const {
        return octets[0] == 0xfe && (octets[1] & 0xc0) == 0x80;
    }

    auto operator<=>(const Ipv6Address&) const = default;
};

/// Canonical dotted quad, no leading zeros.
std::string format_address(Ipv4Address a);

/// Canonical form: lowercase hex, longest zero run (>= 2 groups) compressed
/// with "::", leftmost run on ties.
std::string format_address(const Ipv6Address& a);

/// Throws AddressParseError naming the offending token.
Ipv4Address parse_ipv4(const std::string& text);

/// Accepts full and "::"-compressed forms. A dotted quad may stand in for two
/// consecutive groups at any position, e.g. "2002:192.168.1.1:1::1".
Ipv6Address parse_ipv6(const std::string& text);

struct Ipv6Hasher {
    std::size_t operator()(const Ipv6Address& a) const {
        return std::hash<std::uint64_t>()(a.hi() * 1000003ULL ^ a.lo());
    }
};

}  // namespace transim

#endif
