#ifndef TRANSIM_DES_HPP
#define TRANSIM_DES_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <queue>
#include <vector>

#include "transim/errors.hpp"
#include "transim/packet.hpp"
#include "transim/time.hpp"

namespace transim {

/// Deterministic event engine. Events dispatch in nondecreasing (time, seq)
/// order; seq is the insertion counter, so simultaneous events run in
/// scheduling order. Replaying an identical event set yields an identical
/// trace.
class Engine {
  public:
    SimTime now() const { return now_; }

    std::uint64_t schedule_at(SimTime t, std::function<void()> action) {
        if (t < now_)
            throw SchedulingError("event scheduled into the past");
        std::uint64_t seq = next_seq_++;
        queue_.push(Event{t, seq, std::move(action)});
        return seq;
    }

    std::uint64_t schedule_in(SimTime dt, std::function<void()> action) {
        return schedule_at(now_ + dt, std::move(action));
    }

    /// Dispatches every event with time <= t_end, then leaves the clock at
    /// t_end. Returns the number of events dispatched.
    std::size_t run_until(SimTime t_end) {
        std::size_t dispatched = 0;
        while (!queue_.empty() && queue_.top().time <= t_end) {
            Event ev = std::move(const_cast<Event&>(queue_.top()));
            queue_.pop();
            now_ = ev.time;
            ev.action();
            ++dispatched;
        }
        if (t_end > now_) now_ = t_end;
        return dispatched;
    }

    bool empty() const { return queue_.empty(); }
    SimTime next_event_time() const { return queue_.top().time; }

  private:
    struct Event {
        SimTime time;
        std::uint64_t seq;
        std::function<void()> action;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return b.time < a.time;
            return b.seq < a.seq;
        }
    };

    SimTime now_{};
    std::uint64_t next_seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

/// Point-to-point link parameters; bandwidth > 0, delay >= 0.
struct Link {
    std::uint64_t bandwidth_bps = 0;
    SimTime propagation{};

    SimTime serialization(std::size_t bytes) const {
        // bits * 1e9 / bps in integer arithmetic; sizes stay far below the
        // overflow bound.
        return SimTime::from_ns(static_cast<std::int64_t>(
            (static_cast<std::uint64_t>(bytes) * 8u * 1'000'000'000ull) / bandwidth_bps));
    }
};

/// One packet at a time on the wire: a transmission starts when the previous
/// one finished, arrival = start + serialization + propagation.
class LinkTransmitter {
  public:
    explicit LinkTransmitter(Link link) : link_(link) {}

    struct TxTimes {
        SimTime start;
        SimTime done;     // transmitter free again
        SimTime arrival;  // at the far end
    };

    TxTimes transmit(SimTime now, std::size_t bytes) {
        SimTime start = now < busy_until_ ? busy_until_ : now;
        SimTime done = start + link_.serialization(bytes);
        busy_until_ = done;
        return TxTimes{start, done, done + link_.propagation};
    }

    const Link& link() const { return link_; }

  private:
    Link link_;
    SimTime busy_until_{};
};

/// Drop-tail FIFO with the bookkeeping the reports need: per-packet waits,
/// drop and conservation counters, and a time integral of the queue length
/// for occupancy checks.
class FifoQueue {
  public:
    explicit FifoQueue(std::size_t capacity) : capacity_(capacity) {}

    /// False means the packet was dropped (queue full).
    bool enqueue(const Packet& p, SimTime now) {
        ++offered_;
        if (items_.size() >= capacity_) {
            ++drop_count_;
            return false;
        }
        integrate(now);
        items_.push_back(Item{p, now});
        return true;
    }

    struct Dequeued {
        Packet packet;
        SimTime wait;
    };

    Dequeued dequeue(SimTime now) {
        if (items_.empty())
            throw EmptyQueue("dequeue on empty queue");
        integrate(now);
        Item it = std::move(items_.front());
        items_.pop_front();
        SimTime wait = now - it.enqueued_at;
        cumulative_wait_ += wait;
        ++dequeued_;
        return Dequeued{std::move(it.packet), wait};
    }

    std::size_t size() const { return items_.size(); }
    bool queue_empty() const { return items_.empty(); }
    std::size_t capacity() const { return capacity_; }

    std::uint64_t drop_count() const { return drop_count_; }
    std::uint64_t offered_count() const { return offered_; }
    std::uint64_t dequeued_count() const { return dequeued_; }
    SimTime cumulative_wait() const { return cumulative_wait_; }

    /// integral of queue length over time, in packet-seconds
    double length_time_integral_s(SimTime now) {
        integrate(now);
        return length_integral_;
    }

    /// offered = dequeued + dropped + resident
    bool conserved() const {
        return offered_ == dequeued_ + drop_count_ + items_.size();
    }

  private:
    struct Item {
        Packet packet;
        SimTime enqueued_at;
    };

    void integrate(SimTime now) {
        length_integral_ +=
            static_cast<double>(items_.size()) * (now - last_change_).seconds();
        last_change_ = now;
    }

    std::size_t capacity_;
    std::deque<Item> items_;
    std::uint64_t drop_count_ = 0;
    std::uint64_t offered_ = 0;
    std::uint64_t dequeued_ = 0;
    SimTime cumulative_wait_{};
    SimTime last_change_{};
    double length_integral_ = 0;
};

enum CpuOp : unsigned {
    kOpForward = 1u << 0,
    kOpEncap = 1u << 1,
    kOpDecap = 1u << 2,
    kOpTranslate = 1u << 3,
};

struct CpuParams {
    SimTime base_service = SimTime::from_us(5);
    SimTime tunnel_surcharge = SimTime::from_us(5);
    SimTime translate_surcharge = SimTime::from_us(5);
};

/// Per-packet processor. Serves one packet at a time; busy_time accrues
/// service and therefore never exceeds elapsed simulated time.
class NodeCpu {
  public:
    NodeCpu() = default;
    explicit NodeCpu(CpuParams p) : params_(p) {}

    SimTime service_for(unsigned ops) const {
        SimTime s = params_.base_service;
        if (ops & kOpEncap) s += params_.tunnel_surcharge;
        if (ops & kOpDecap) s += params_.tunnel_surcharge;
        if (ops & kOpTranslate) s += params_.translate_surcharge;
        return s;
    }

    struct Service {
        SimTime start;
        SimTime finish;
    };

    Service process(SimTime now, unsigned ops) {
        SimTime service = service_for(ops);
        SimTime start = now < busy_until_ ? busy_until_ : now;
        SimTime finish = start + service;
        busy_until_ = finish;
        busy_time_ += service;
        return Service{start, finish};
    }

    SimTime busy_time() const { return busy_time_; }

    double utilization_percent(SimTime elapsed) const {
        if (elapsed.ns() <= 0) return 0.0;
        return 100.0 * busy_time_.seconds() / elapsed.seconds();
    }

    const CpuParams& params() const { return params_; }

  private:
    CpuParams params_{};
    SimTime busy_until_{};
    SimTime busy_time_{};
};

}  // namespace transim

#endif
