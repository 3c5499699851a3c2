#include "transim/addressing.hpp"

namespace transim {

Ipv6Address SixToFourPrefix::as_address() const {
    Ipv6Address a{};
    a.set_group(0, 0x2002);
    a.set_group(1, static_cast<std::uint16_t>(embedded_v4.value >> 16));
    a.set_group(2, static_cast<std::uint16_t>(embedded_v4.value & 0xffff));
    return a;
}

SixToFourPrefix derive_6to4_prefix(Ipv4Address v4) {
    return SixToFourPrefix{v4};
}

bool is_6to4(const Ipv6Address& addr) {
    return addr.group(0) == 0x2002;
}

Ipv4Address extract_6to4_v4(const Ipv6Address& addr) {
    if (!is_6to4(addr))
        throw NotSixToFour("address not in 2002::/16: " + format_address(addr));
    return Ipv4Address{(std::uint32_t(addr.group(1)) << 16) | addr.group(2)};
}

Ipv6Address make_isatap_address(Ipv4Address v4) {
    Ipv6Address a{};
    a.set_group(0, 0xfe80);
    a.set_group(5, 0x5efe);
    a.set_group(6, static_cast<std::uint16_t>(v4.value >> 16));
    a.set_group(7, static_cast<std::uint16_t>(v4.value & 0xffff));
    return a;
}

Ipv6Address siit_v4_mapped(Ipv4Address v4) {
    Ipv6Address a{};
    a.set_group(5, 0xffff);
    a.set_group(6, static_cast<std::uint16_t>(v4.value >> 16));
    a.set_group(7, static_cast<std::uint16_t>(v4.value & 0xffff));
    return a;
}

Ipv6Address siit_v4_translated(Ipv4Address v4) {
    Ipv6Address a{};
    a.set_group(4, 0xffff);
    a.set_group(6, static_cast<std::uint16_t>(v4.value >> 16));
    a.set_group(7, static_cast<std::uint16_t>(v4.value & 0xffff));
    return a;
}

std::optional<Ipv4Address> siit_strip(const Ipv6Address& addr) {
    bool mapped = addr.hi() == 0 && addr.group(4) == 0 && addr.group(5) == 0xffff;
    bool translated = addr.hi() == 0 && addr.group(4) == 0xffff && addr.group(5) == 0;
    if (!mapped && !translated) return std::nullopt;
    return Ipv4Address{(std::uint32_t(addr.group(6)) << 16) | addr.group(7)};
}

Ipv6Address natpt_embed(Ipv4Address v4, const Ipv6Address& prefix96) {
    Ipv6Address a = prefix96;
    a.set_group(6, static_cast<std::uint16_t>(v4.value >> 16));
    a.set_group(7, static_cast<std::uint16_t>(v4.value & 0xffff));
    return a;
}

Ipv4Address natpt_strip(const Ipv6Address& addr, const Ipv6Address& prefix96) {
    for (int i = 0; i < 12; ++i) {
        if (addr.octets[i] != prefix96.octets[i])
            throw PrefixMismatch("address " + format_address(addr) +
                                 " is not under prefix " + format_address(prefix96));
    }
    return Ipv4Address{(std::uint32_t(addr.group(6)) << 16) | addr.group(7)};
}

AddressClass classify_v4(Ipv4Address v4) {
    std::uint8_t top = v4.octet(0);
    if ((top & 0x80) == 0) return AddressClass::A;
    if ((top & 0xc0) == 0x80) return AddressClass::B;
    if ((top & 0xe0) == 0xc0) return AddressClass::C;
    if ((top & 0xf0) == 0xe0) return AddressClass::D;
    return AddressClass::E;
}

const char* to_string(AddressClass c) {
    switch (c) {
        case AddressClass::A: return "A";
        case AddressClass::B: return "B";
        case AddressClass::C: return "C";
        case AddressClass::D: return "D";
        case AddressClass::E: return "E";
    }
    return "?";
}

}  // namespace transim
