#ifndef TRANSIM_ADDRESSING_HPP
#define TRANSIM_ADDRESSING_HPP

#include <optional>

#include "transim/address.hpp"

namespace transim {

/// 2002:VVVV:VVVV::/48 with the embedded IPv4 tunnel endpoint.
struct SixToFourPrefix {
    Ipv4Address embedded_v4{};

    /// The prefix rendered as a full address with zero subnet/interface bits.
    Ipv6Address as_address() const;
    bool operator==(const SixToFourPrefix&) const = default;
};

enum class AddressClass { A, B, C, D, E };

SixToFourPrefix derive_6to4_prefix(Ipv4Address v4);

/// Throws NotSixToFour unless addr lies within 2002::/16.
Ipv4Address extract_6to4_v4(const Ipv6Address& addr);

bool is_6to4(const Ipv6Address& addr);

/// fe80::5efe:VVVV:VVVV (link-local, IPv4 in the low 32 bits).
Ipv6Address make_isatap_address(Ipv4Address v4);

/// ::ffff:a.b.c.d — the IPv4-mapped form (ffff in group 5).
Ipv6Address siit_v4_mapped(Ipv4Address v4);

/// ::ffff:0:a.b.c.d — the IPv4-translated form (ffff in group 4).
Ipv6Address siit_v4_translated(Ipv4Address v4);

/// Strips either SIIT prefix; nullopt when the top 96 bits match neither.
std::optional<Ipv4Address> siit_strip(const Ipv6Address& addr);

/// Places v4 in the low 32 bits under the given 96-bit prefix.
Ipv6Address natpt_embed(Ipv4Address v4, const Ipv6Address& prefix96);

/// Inverse of natpt_embed; throws PrefixMismatch when the top 96 bits differ.
Ipv4Address natpt_strip(const Ipv6Address& addr, const Ipv6Address& prefix96);

/// Leading-bit rule: 0 -> A, 10 -> B, 110 -> C, 1110 -> D, 1111 -> E.
AddressClass classify_v4(Ipv4Address v4);

const char* to_string(AddressClass c);

}  // namespace transim

#endif
