#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <vector>

#include "transim/des.hpp"
#include "transim/rng.hpp"

using namespace transim;

namespace {

Packet dummy_packet(std::uint32_t payload = 100) {
    return make_ipv4_packet(parse_ipv4("10.0.0.1"), parse_ipv4("10.0.0.2"), payload);
}

}  // namespace

TEST_CASE("events dispatch in time order regardless of scheduling order") {
    Engine e;
    std::vector<int> order;
    e.schedule_at(SimTime::from_s(3), [&] { order.push_back(3); });
    e.schedule_at(SimTime::from_s(1), [&] { order.push_back(1); });
    e.schedule_at(SimTime::from_s(2), [&] { order.push_back(2); });
    std::size_t n = e.run_until(SimTime::from_s(10));
    CHECK(n == 3);
    CHECK(order == std::vector<int>{1, 2, 3});
    CHECK(e.now() == SimTime::from_s(10));
}

TEST_CASE("simultaneous events dispatch in scheduling order") {
    Engine e;
    std::vector<int> order;
    e.schedule_at(SimTime::from_s(5), [&] { order.push_back(1); });
    e.schedule_at(SimTime::from_s(5), [&] { order.push_back(2); });
    e.schedule_at(SimTime::from_s(5), [&] { order.push_back(3); });
    e.run_until(SimTime::from_s(5));
    CHECK(order == std::vector<int>{1, 2, 3});
}

TEST_CASE("empty queue returns immediately with clock at t_end") {
    Engine e;
    CHECK(e.run_until(SimTime::from_s(42)) == 0);
    CHECK(e.now() == SimTime::from_s(42));
}

TEST_CASE("scheduling into the past is fatal") {
    Engine e;
    e.schedule_at(SimTime::from_s(2), [] {});
    e.run_until(SimTime::from_s(2));
    CHECK_THROWS_AS(e.schedule_at(SimTime::from_s(1), [] {}), SchedulingError);
}

TEST_CASE("events scheduled during dispatch run in the same sweep") {
    Engine e;
    std::vector<int> order;
    e.schedule_at(SimTime::from_s(1), [&] {
        order.push_back(1);
        e.schedule_at(SimTime::from_s(1), [&] { order.push_back(2); });
        e.schedule_in(SimTime::from_s(1), [&] { order.push_back(3); });
    });
    e.run_until(SimTime::from_s(5));
    CHECK(order == std::vector<int>{1, 2, 3});
}

TEST_CASE("replaying an identical event set yields an identical trace") {
    auto run = [] {
        Engine e;
        Rng rng(2024);
        std::vector<std::pair<std::int64_t, int>> trace;
        for (int i = 0; i < 500; ++i) {
            SimTime t = SimTime::from_ns(static_cast<std::int64_t>(rng.below(1'000'000)));
            e.schedule_at(t, [&trace, i, &e] { trace.emplace_back(e.now().ns(), i); });
        }
        e.run_until(SimTime::from_s(1));
        return trace;
    };
    CHECK(run() == run());
}

TEST_CASE("link serialization and propagation arithmetic") {
    Link l{1'000'000, SimTime{}};  // 1 Mbps, no delay
    CHECK(l.serialization(1500) == SimTime::from_us(12000));  // 0.012 s

    LinkTransmitter tx(l);
    auto t1 = tx.transmit(SimTime{}, 1500);
    CHECK(t1.arrival == SimTime::from_us(12000));

    SUBCASE("degenerate limit: no delay, enormous bandwidth") {
        LinkTransmitter fat(Link{1'000'000'000'000ull, SimTime{}});
        auto t = fat.transmit(SimTime::from_s(3), 1500);
        CHECK(t.arrival == SimTime::from_s(3) + SimTime::from_ns(12));
    }
    SUBCASE("back-to-back packets are separated by at least one serialization") {
        auto t2 = tx.transmit(SimTime::from_ns(1), 1500);
        CHECK(t2.start == t1.done);
        CHECK(t2.arrival - t1.arrival >= l.serialization(1500));
    }
    SUBCASE("propagation adds on top") {
        LinkTransmitter far(Link{1'000'000, SimTime::from_ms(5)});
        auto t = far.transmit(SimTime{}, 1500);
        CHECK(t.arrival == SimTime::from_us(12000) + SimTime::from_ms(5));
    }
}

TEST_CASE("drop-tail FIFO") {
    FifoQueue q(2);
    CHECK(q.enqueue(dummy_packet(1), SimTime::from_s(1)));
    CHECK(q.enqueue(dummy_packet(2), SimTime::from_s(1)));
    CHECK(!q.enqueue(dummy_packet(3), SimTime::from_s(1)));
    CHECK(q.drop_count() == 1);

    SUBCASE("waits accumulate on dequeue") {
        auto d = q.dequeue(SimTime::from_s(3));
        CHECK(d.wait == SimTime::from_s(2));
        CHECK(q.cumulative_wait() == SimTime::from_s(2));
        CHECK(d.packet.payload_bytes == 1);
    }
    SUBCASE("dequeue on empty is a bug") {
        q.dequeue(SimTime::from_s(1));
        q.dequeue(SimTime::from_s(1));
        CHECK_THROWS_AS(q.dequeue(SimTime::from_s(1)), EmptyQueue);
    }
    SUBCASE("conservation holds") {
        CHECK(q.conserved());
        q.dequeue(SimTime::from_s(2));
        CHECK(q.conserved());
        CHECK(q.offered_count() == 3);
        CHECK(q.dequeued_count() + q.drop_count() + q.size() == 3);
    }
}

TEST_CASE("FIFO drain order equals arrival order on random traces") {
    Rng rng(404);
    FifoQueue q(64);
    std::deque<std::uint32_t> reference;
    SimTime now{};
    std::uint32_t tag = 0;
    for (int step = 0; step < 20000; ++step) {
        now += SimTime::from_ns(static_cast<std::int64_t>(rng.below(1000)));
        if (rng.uniform() < 0.55) {
            bool accepted = q.enqueue(dummy_packet(tag), now);
            if (accepted) reference.push_back(tag);
            ++tag;
        } else if (!q.queue_empty()) {
            auto d = q.dequeue(now);
            REQUIRE(!reference.empty());
            CHECK(d.packet.payload_bytes == reference.front());
            reference.pop_front();
        }
    }
    CHECK(q.conserved());
    CHECK(q.size() == reference.size());
}

TEST_CASE("cpu service accumulates per-operation surcharges") {
    CpuParams p;
    p.base_service = SimTime::from_us(5);
    p.tunnel_surcharge = SimTime::from_us(5);
    p.translate_surcharge = SimTime::from_us(7);
    NodeCpu cpu(p);

    CHECK(cpu.service_for(kOpForward) == SimTime::from_us(5));
    CHECK(cpu.service_for(kOpForward | kOpEncap) == SimTime::from_us(10));
    CHECK(cpu.service_for(kOpForward | kOpDecap) == SimTime::from_us(10));
    CHECK(cpu.service_for(kOpForward | kOpTranslate) == SimTime::from_us(12));

    auto s1 = cpu.process(SimTime{}, kOpForward);
    CHECK(s1.finish == SimTime::from_us(5));
    // second packet arriving while busy waits for the first
    auto s2 = cpu.process(SimTime::from_us(1), kOpForward | kOpEncap);
    CHECK(s2.start == SimTime::from_us(5));
    CHECK(s2.finish == SimTime::from_us(15));
    CHECK(cpu.busy_time() == SimTime::from_us(15));
    CHECK(cpu.busy_time() <= s2.finish);

    CHECK(cpu.utilization_percent(SimTime::from_us(30)) == doctest::Approx(50.0));
}

TEST_CASE("utilization is within [0,100] and monotone in offered load") {
    auto run_load = [](int packets) {
        NodeCpu cpu(CpuParams{});
        SimTime now{};
        for (int i = 0; i < packets; ++i) {
            cpu.process(now, kOpForward);
            now += SimTime::from_us(10);
        }
        return cpu.utilization_percent(SimTime::from_ms(100));
    };
    double low = run_load(100), high = run_load(1000);
    CHECK(low >= 0.0);
    CHECK(high <= 100.0);
    CHECK(high >= low);
}

namespace {

// Single-server queue driven by Poisson arrivals with deterministic service.
struct MicroQueueRun {
    double mean_wait_s = 0;
    double mean_queue_len = 0;   // time average
    double arrival_rate = 0;     // accepted packets per second
    std::uint64_t served = 0;
};

MicroQueueRun run_md1(double rho, int packets, std::uint64_t seed) {
    Engine e;
    Rng rng(seed);
    const SimTime service = SimTime::from_us(100);       // D
    const double lambda = rho / service.seconds();       // arrivals per second

    FifoQueue q(1u << 20);  // effectively infinite
    bool busy = false;
    double wait_sum = 0;
    std::uint64_t served = 0;
    SimTime last_arrival{};

    std::function<void()> serve_next = [&] {
        if (q.queue_empty()) {
            busy = false;
            return;
        }
        busy = true;
        auto d = q.dequeue(e.now());
        wait_sum += d.wait.seconds();
        ++served;
        e.schedule_in(service, serve_next);
    };

    std::function<void(int)> arrive = [&](int remaining) {
        q.enqueue(dummy_packet(), e.now());
        if (!busy) serve_next();
        if (remaining > 0) {
            SimTime dt = SimTime::from_seconds(rng.exponential(1.0 / lambda));
            e.schedule_in(dt, [&, remaining] { arrive(remaining - 1); });
        }
    };

    e.schedule_at(SimTime{}, [&] { arrive(packets - 1); });
    e.run_until(SimTime::from_s(100000));
    // drain leftovers
    while (!e.empty()) e.run_until(e.next_event_time());

    MicroQueueRun out;
    out.served = served;
    out.mean_wait_s = wait_sum / static_cast<double>(served);
    SimTime end = e.now();
    out.mean_queue_len = q.length_time_integral_s(end) / end.seconds();
    out.arrival_rate = static_cast<double>(served) / end.seconds();
    (void)last_arrival;
    return out;
}

}  // namespace

TEST_CASE("M/D/1 at 80% load matches the analytic mean wait within 10%") {
    const double rho = 0.8;
    const double service_s = 100e-6;
    const double analytic = rho * service_s / (2.0 * (1.0 - rho));  // 2 * D

    auto r = run_md1(rho, 10000, 90210);
    CHECK(r.served == 10000);
    CHECK(r.mean_wait_s == doctest::Approx(analytic).epsilon(0.10));
}

TEST_CASE("Little's law holds for the waiting room within 10%") {
    auto r = run_md1(0.8, 10000, 31337);
    double expected_len = r.arrival_rate * r.mean_wait_s;
    CHECK(r.mean_queue_len == doctest::Approx(expected_len).epsilon(0.10));
}

TEST_CASE("wait is zero for an arrival into an idle empty queue") {
    FifoQueue q(10);
    q.enqueue(dummy_packet(), SimTime::from_s(7));
    auto d = q.dequeue(SimTime::from_s(7));
    CHECK(d.wait == SimTime{});
}
