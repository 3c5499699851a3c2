#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "transim/rng.hpp"
#include "transim/transition.hpp"

using namespace transim;

namespace {

Packet random_v6_packet(Rng& rng) {
    Packet p = make_ipv6_packet(Ipv6Address::from_words(rng.bits(), rng.bits()),
                                Ipv6Address::from_words(rng.bits(), rng.bits()),
                                static_cast<std::uint32_t>(rng.below(5000)), kProtoTcp,
                                static_cast<std::uint8_t>(1 + rng.below(255)));
    p.flow_id = rng.bits();
    return p;
}

TunnelConfig table3_router_a() {
    TunnelConfig c;
    c.mode = TunnelMode::Manual;
    c.source_if = "IF10";
    c.source_if_v4 = parse_ipv4("192.168.1.1");
    c.dest_v4 = parse_ipv4("10.1.1.1");
    c.tunnel_v6 = parse_ipv6("2002:192.168.1.1:d::1");
    c.prefix_len = 128;
    return c;
}

TunnelConfig table3_router_b() {
    TunnelConfig c;
    c.mode = TunnelMode::Manual;
    c.source_if = "IF10";
    c.source_if_v4 = parse_ipv4("10.1.1.1");
    c.dest_v4 = parse_ipv4("192.168.1.1");
    c.tunnel_v6 = parse_ipv6("2002:10.1.1.1:b::1");
    c.prefix_len = 128;
    return c;
}

}  // namespace

TEST_CASE("dual-stack version selection") {
    CHECK(dualstack_select(DstCaps::Both, DualStackPolicy::PreferV6) == IpVersion::V6);
    CHECK(dualstack_select(DstCaps::Both, DualStackPolicy::PreferV4) == IpVersion::V4);
    CHECK(dualstack_select(DstCaps::V4, DualStackPolicy::PreferV6) == IpVersion::V4);
    CHECK(dualstack_select(DstCaps::V6, DualStackPolicy::PreferV4) == IpVersion::V6);
}

TEST_CASE("encapsulate and decapsulate") {
    Packet p = make_ipv6_packet(parse_ipv6("2002:c0a8:101:1::2"),
                                parse_ipv6("2002:a01:101:a::10"), 1000);
    Packet e = encapsulate(p, parse_ipv4("192.168.1.1"), parse_ipv4("10.1.1.1"));

    CHECK(on_wire_size(e) == 1060);
    const auto& outer = e.outer_v4();
    CHECK(outer.protocol == 41);
    CHECK(outer.ttl == 64);
    CHECK(outer.total_length == 20 + 40 + 1000);
    CHECK(verify_checksum(outer));
    CHECK(std::get<Ipv6Header>(e.headers[1]) == p.outer_v6());

    SUBCASE("decapsulation inverts bit-exactly") {
        CHECK(decapsulate(e) == p);
        CHECK(on_wire_size(e) - on_wire_size(decapsulate(e)) == 20);
    }
    SUBCASE("nested tunnels are rejected") {
        CHECK_THROWS_AS(encapsulate(e, outer.src, outer.dst), NestedTunnel);
    }
    SUBCASE("plain IPv4 cannot be decapsulated") {
        Packet v4 = make_ipv4_packet(parse_ipv4("10.0.0.1"), parse_ipv4("10.0.0.2"), 50);
        CHECK_THROWS_AS(decapsulate(v4), NotTunneled);
        CHECK_THROWS_AS(encapsulate(v4, outer.src, outer.dst), NestedTunnel);
    }
    SUBCASE("protocol other than 41 is not a tunnel") {
        Packet bad = e;
        auto& h = std::get<Ipv4Header>(bad.headers[0]);
        h.protocol = 6;
        finalize_checksum(h);
        CHECK_THROWS_AS(decapsulate(bad), NotTunneled);
    }
}

TEST_CASE("decapsulate(encapsulate(p)) is the identity on random packets") {
    Rng rng(99);
    for (int i = 0; i < 5000; ++i) {
        Packet p = random_v6_packet(rng);
        std::uint8_t inner_hops_before = p.outer_v6().hop_limit;
        Packet e = encapsulate(p, Ipv4Address{static_cast<std::uint32_t>(rng.bits())},
                               Ipv4Address{static_cast<std::uint32_t>(rng.bits())});
        CHECK(on_wire_size(e) - on_wire_size(p) == 20);
        CHECK(std::get<Ipv6Header>(e.headers[1]).hop_limit == inner_hops_before);
        CHECK(decapsulate(e) == p);
    }
}

TEST_CASE("6to4 next hop extracts the embedded endpoint") {
    CHECK(sixto4_next_hop(parse_ipv6("2002:a01:101:a::1")) == parse_ipv4("10.1.1.1"));
    CHECK(sixto4_next_hop(parse_ipv6("2002:c0a8:101:1::2")) == parse_ipv4("192.168.1.1"));
    CHECK_THROWS_AS(sixto4_next_hop(parse_ipv6("2001::")), NoRoute);

    SUBCASE("pure function of the destination") {
        Rng rng(4);
        for (int i = 0; i < 1000; ++i) {
            Ipv6Address dst = Ipv6Address::from_words(
                (0x2002ull << 48) | (rng.bits() & 0xffffffffffffull), rng.bits());
            CHECK(sixto4_next_hop(dst) == sixto4_next_hop(dst));
            CHECK(sixto4_next_hop(dst) == extract_6to4_v4(dst));
        }
    }
}

TEST_CASE("manual next hop is the configured destination") {
    CHECK(manual_next_hop(table3_router_a()) == parse_ipv4("10.1.1.1"));
    CHECK(manual_next_hop(table3_router_b()) == parse_ipv4("192.168.1.1"));

    TunnelConfig sixto4;
    sixto4.mode = TunnelMode::SixToFour;
    CHECK_THROWS_AS(manual_next_hop(sixto4), ConfigError);

    SUBCASE("constant over random inner destinations") {
        TunnelConfig c = table3_router_a();
        Rng rng(6);
        for (int i = 0; i < 1000; ++i) {
            (void)rng.bits();
            CHECK(manual_next_hop(c) == parse_ipv4("10.1.1.1"));
        }
    }
    SUBCASE("validation mirrors point-to-point vs point-to-multipoint") {
        TunnelConfig manual = table3_router_a();
        manual.dest_v4.reset();
        CHECK_THROWS_AS(manual.validate(), ConfigError);
        TunnelConfig s = table3_router_a();
        s.mode = TunnelMode::SixToFour;
        CHECK_THROWS_AS(s.validate(), ConfigError);  // stale destination
        s.dest_v4.reset();
        CHECK_NOTHROW(s.validate());
    }
}

TEST_CASE("SIIT v4->v6 applies the two prefixes") {
    Packet v4 = make_ipv4_packet(parse_ipv4("10.1.1.1"), parse_ipv4("192.0.2.7"), 333,
                                 kProtoTcp, 17);
    Packet v6 = siit_translate_v4_to_v6(v4);
    const auto& h = v6.outer_v6();
    CHECK(h.src == siit_v4_mapped(parse_ipv4("10.1.1.1")));
    CHECK(h.dst == siit_v4_translated(parse_ipv4("192.0.2.7")));
    CHECK(h.hop_limit == 17);
    CHECK(h.payload_length == 333);
    CHECK(h.next_header == kProtoTcp);
}

TEST_CASE("SIIT round trip restores header fields") {
    Rng rng(123);
    for (int i = 0; i < 5000; ++i) {
        Packet v4 = make_ipv4_packet(Ipv4Address{static_cast<std::uint32_t>(rng.bits())},
                                     Ipv4Address{static_cast<std::uint32_t>(rng.bits())},
                                     static_cast<std::uint32_t>(rng.below(2000)),
                                     static_cast<std::uint8_t>(rng.bits()),
                                     static_cast<std::uint8_t>(1 + rng.below(255)));
        auto& h0 = std::get<Ipv4Header>(v4.headers[0]);
        h0.type_of_service = static_cast<std::uint8_t>(rng.bits());
        finalize_checksum(h0);

        Packet back = siit_translate_v6_to_v4(siit_translate_v4_to_v6(v4));
        const auto& h1 = back.outer_v4();
        CHECK(h1.src == h0.src);
        CHECK(h1.dst == h0.dst);
        CHECK(h1.ttl == h0.ttl);
        CHECK(h1.protocol == h0.protocol);
        CHECK(h1.type_of_service == h0.type_of_service);
        CHECK(h1.total_length == h0.total_length);
        CHECK(verify_checksum(h1));
    }
}

TEST_CASE("SIIT is stateless and rejects unprefixed addresses") {
    Packet v6 = make_ipv6_packet(parse_ipv6("2001:db8::1"), parse_ipv6("2001:db8::2"), 10);
    CHECK_THROWS_AS(siit_translate_v6_to_v4(v6), NotTranslatable);

    Packet ok = make_ipv4_packet(parse_ipv4("10.0.0.1"), parse_ipv4("10.0.0.2"), 42);
    Packet a = siit_translate_v4_to_v6(ok);
    Packet b = siit_translate_v4_to_v6(ok);
    CHECK(a == b);  // no hidden state
}

TEST_CASE("NAT-PT binds flows statefully") {
    std::deque<Ipv4Address> pool{parse_ipv4("203.0.113.1"), parse_ipv4("203.0.113.2")};
    NatBindingTable table(pool, Ipv6Address{});  // ::/96

    Packet p = make_ipv6_packet(parse_ipv6("2001:db8::aa"), parse_ipv6("::a01:101"), 77);
    p.flow_id = 0x1234;

    Packet out1 = natpt_translate_v6_to_v4(p, table);
    CHECK(out1.outer_v4().dst == parse_ipv4("10.1.1.1"));
    CHECK(out1.outer_v4().src == parse_ipv4("203.0.113.1"));
    CHECK(table.binding_count() == 1);

    SUBCASE("second packet of the same flow reuses the binding") {
        Packet out2 = natpt_translate_v6_to_v4(p, table);
        CHECK(out2.outer_v4().src == out1.outer_v4().src);
        CHECK(table.binding_count() == 1);
    }
    SUBCASE("pool of size N is exhausted by flow N+1") {
        Packet q = p;
        q.headers[0] = [&] {
            auto h = p.outer_v6();
            h.src = parse_ipv6("2001:db8::bb");
            return Header{h};
        }();
        natpt_translate_v6_to_v4(q, table);
        CHECK(table.binding_count() == 2);

        Packet r = p;
        r.headers[0] = [&] {
            auto h = p.outer_v6();
            h.src = parse_ipv6("2001:db8::cc");
            return Header{h};
        }();
        CHECK_THROWS_AS(natpt_translate_v6_to_v4(r, table), PoolExhausted);
    }
    SUBCASE("reply direction restores the original endpoints") {
        // The external host replies to the allocated (pool address, port) pair;
        // allocation starts at 49152.
        Packet reply = make_ipv4_packet(parse_ipv4("10.1.1.1"), out1.outer_v4().src, 88);
        reply.flow_id = 49152;
        Packet back = natpt_translate_v4_to_v6(reply, table);
        CHECK(back.outer_v6().dst == parse_ipv6("2001:db8::aa"));
        CHECK(back.outer_v6().src == parse_ipv6("::a01:101"));
    }
    SUBCASE("unknown inbound binding") {
        Packet stranger = make_ipv4_packet(parse_ipv4("10.9.9.9"), parse_ipv4("203.0.113.2"), 5);
        stranger.flow_id = 0xbeef;
        CHECK_THROWS_AS(natpt_translate_v4_to_v6(stranger, table), NoBinding);
    }
}

TEST_CASE("NAT-PT binding count equals distinct outbound flows") {
    std::deque<Ipv4Address> pool;
    for (int i = 1; i <= 50; ++i)
        pool.push_back(Ipv4Address::from_octets(203, 0, 113, static_cast<std::uint8_t>(i)));
    NatBindingTable table(pool, Ipv6Address{});

    Rng rng(55);
    std::size_t distinct = 0;
    for (int host = 0; host < 20; ++host) {
        Ipv6Address src = Ipv6Address::from_words(0x20010db800000000ull, 0x100 + host);
        for (int flow = 0; flow < 5; ++flow) {
            Packet p = make_ipv6_packet(src, parse_ipv6("::c000:201"),
                                        static_cast<std::uint32_t>(rng.below(500)));
            p.flow_id = static_cast<std::uint64_t>(host * 16 + flow);
            natpt_translate_v6_to_v4(p, table);
            natpt_translate_v6_to_v4(p, table);  // repeat packets add no state
        }
        distinct += 5;
        CHECK(table.binding_count() == distinct);
    }
    // one pool address per inner host
    CHECK(table.pool_free() == 50 - 20);
}
