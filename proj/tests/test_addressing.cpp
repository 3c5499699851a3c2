#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "transim/addressing.hpp"
#include "transim/rng.hpp"

using namespace transim;

namespace {

// Per-octet hex conversion, the long way around.
Ipv6Address oracle_6to4(Ipv4Address v4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "2002:%02x%02x:%02x%02x::", v4.octet(0), v4.octet(1),
                  v4.octet(2), v4.octet(3));
    return parse_ipv6(buf);
}

Ipv6Address oracle_isatap(Ipv4Address v4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "fe80::5efe:%02x%02x:%02x%02x", v4.octet(0),
                  v4.octet(1), v4.octet(2), v4.octet(3));
    return parse_ipv6(buf);
}

const std::uint8_t kBoundaryOctets[] = {0, 127, 128, 191, 192, 223, 224, 239, 240, 255};

}  // namespace

TEST_CASE("6to4 prefix derivation") {
    CHECK(derive_6to4_prefix(parse_ipv4("192.168.1.1")).as_address() ==
          parse_ipv6("2002:c0a8:101::"));
    CHECK(derive_6to4_prefix(parse_ipv4("0.0.0.0")).as_address() == parse_ipv6("2002::"));

    SUBCASE("display form with embedded dotted quad matches the derivation") {
        Ipv6Address shown = parse_ipv6("2002:192.168.1.1:1::1");
        auto derived = derive_6to4_prefix(parse_ipv4("192.168.1.1")).as_address();
        for (int g = 0; g < 3; ++g) CHECK(shown.group(g) == derived.group(g));
    }
    SUBCASE("against per-octet oracle") {
        Rng rng(17);
        for (int i = 0; i < 2000; ++i) {
            Ipv4Address v4{static_cast<std::uint32_t>(rng.bits())};
            CHECK(derive_6to4_prefix(v4).as_address() == oracle_6to4(v4));
        }
    }
}

TEST_CASE("6to4 extraction") {
    CHECK(extract_6to4_v4(parse_ipv6("2002:c0a8:101:d::1")) == parse_ipv4("192.168.1.1"));
    CHECK(extract_6to4_v4(parse_ipv6("2002:a01:101:b::1")) == parse_ipv4("10.1.1.1"));
    CHECK_THROWS_AS(extract_6to4_v4(parse_ipv6("2001:db8::1")), NotSixToFour);
}

TEST_CASE("ISATAP addresses") {
    CHECK(make_isatap_address(parse_ipv4("10.1.1.1")) == parse_ipv6("fe80::5efe:a01:101"));
    CHECK(make_isatap_address(parse_ipv4("0.0.0.0")) == parse_ipv6("fe80::5efe:0:0"));
    Rng rng(23);
    for (int i = 0; i < 2000; ++i) {
        Ipv4Address v4{static_cast<std::uint32_t>(rng.bits())};
        Ipv6Address a = make_isatap_address(v4);
        CHECK((a.lo() & 0xffffffffu) == v4.value);
        CHECK(a.is_link_local());
        CHECK(a == oracle_isatap(v4));
    }
}

TEST_CASE("SIIT mapped and translated prefixes") {
    CHECK(siit_v4_mapped(parse_ipv4("192.0.2.1")) == parse_ipv6("::ffff:c000:201"));
    CHECK(siit_v4_translated(parse_ipv4("192.0.2.1")) == parse_ipv6("::ffff:0:c000:201"));

    CHECK(siit_strip(siit_v4_mapped(parse_ipv4("10.1.1.1"))) == parse_ipv4("10.1.1.1"));
    CHECK(siit_strip(siit_v4_translated(parse_ipv4("10.1.1.1"))) == parse_ipv4("10.1.1.1"));
    CHECK(!siit_strip(parse_ipv6("2001:db8::1")).has_value());
}

TEST_CASE("NAT-PT embed and strip") {
    Ipv6Address zero_prefix{};
    CHECK(natpt_embed(parse_ipv4("10.1.1.1"), zero_prefix) == parse_ipv6("::a01:101"));
    CHECK_THROWS_AS(natpt_strip(parse_ipv6("2001:db8::1"), zero_prefix), PrefixMismatch);
}

TEST_CASE("classify_v4 follows the leading-bit rule") {
    CHECK(classify_v4(parse_ipv4("10.1.1.1")) == AddressClass::A);
    CHECK(classify_v4(parse_ipv4("192.168.1.1")) == AddressClass::C);
    CHECK(classify_v4(parse_ipv4("255.255.255.255")) == AddressClass::E);

    SUBCASE("boundary octets") {
        auto cls = [](std::uint8_t top) {
            return classify_v4(Ipv4Address::from_octets(top, 0, 0, 0));
        };
        CHECK(cls(0) == AddressClass::A);
        CHECK(cls(127) == AddressClass::A);
        CHECK(cls(128) == AddressClass::B);
        CHECK(cls(191) == AddressClass::B);
        CHECK(cls(192) == AddressClass::C);
        CHECK(cls(223) == AddressClass::C);
        CHECK(cls(224) == AddressClass::D);
        CHECK(cls(239) == AddressClass::D);
        CHECK(cls(240) == AddressClass::E);
        CHECK(cls(255) == AddressClass::E);
    }
    SUBCASE("partition: exactly one class per address") {
        Rng rng(31);
        for (int i = 0; i < 100000; ++i) {
            Ipv4Address v4{static_cast<std::uint32_t>(rng.bits())};
            AddressClass c = classify_v4(v4);
            std::uint8_t top = v4.octet(0);
            switch (c) {
                case AddressClass::A: CHECK(top <= 127); break;
                case AddressClass::B: CHECK((top >= 128 && top <= 191)); break;
                case AddressClass::C: CHECK((top >= 192 && top <= 223)); break;
                case AddressClass::D: CHECK((top >= 224 && top <= 239)); break;
                case AddressClass::E: CHECK(top >= 240); break;
            }
        }
    }
}

TEST_CASE("derivations invert exactly over the 32-bit space") {
    Rng rng(1009);
    auto check_all = [](Ipv4Address v4) {
        CHECK(extract_6to4_v4(derive_6to4_prefix(v4).as_address()) == v4);
        CHECK(siit_strip(siit_v4_mapped(v4)) == v4);
        CHECK(siit_strip(siit_v4_translated(v4)) == v4);
        Ipv6Address p = parse_ipv6("64:ff9b::");
        CHECK(natpt_strip(natpt_embed(v4, p), p) == v4);
    };
    for (int i = 0; i < 100000; ++i)
        check_all(Ipv4Address{static_cast<std::uint32_t>(rng.bits())});
    for (std::uint8_t top : kBoundaryOctets)
        for (std::uint8_t rest : kBoundaryOctets)
            check_all(Ipv4Address::from_octets(top, rest, rest, rest));
}

TEST_CASE("natpt embed/strip invert under random prefixes") {
    Rng rng(77);
    for (int i = 0; i < 20000; ++i) {
        Ipv4Address v4{static_cast<std::uint32_t>(rng.bits())};
        Ipv6Address prefix = Ipv6Address::from_words(rng.bits(), rng.bits() & ~0xffffffffull);
        CHECK(natpt_strip(natpt_embed(v4, prefix), prefix) == v4);
    }
}
