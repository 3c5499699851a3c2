#ifndef TRANSIM_TCP_HPP
#define TRANSIM_TCP_HPP

#include <cstdint>
#include <optional>
#include <unordered_map>

#include "transim/time.hpp"

namespace transim {

struct TcpParams {
    std::uint32_t mss = 1460;          // bytes per segment
    double max_window = 128;           // segments
    SimTime rto_min = SimTime::from_ms(200);
    SimTime rto_initial = SimTime::from_s(1);
};

/// Window-based reliable sender state. Loss detection is timeout-only: on a
/// drop the window collapses to one segment and ssthresh halves, then the
/// window regrows by doubling below ssthresh and one segment per window
/// above it.
class TcpConnection {
  public:
    TcpConnection() : ssthresh_(params_.max_window) {}
    explicit TcpConnection(TcpParams p) : params_(p), ssthresh_(p.max_window) {}

    std::uint32_t window() const {
        double w = cwnd_ < 1.0 ? 1.0 : cwnd_;
        return static_cast<std::uint32_t>(w);
    }
    bool can_send() const { return in_flight_.size() < window(); }

    void record_send(std::uint64_t seq, SimTime now) {
        in_flight_[seq] = Outstanding{now, now, false};
    }

    /// Delay sample in seconds (time since the first transmission) when the
    /// ack matched an outstanding segment; nullopt for duplicates.
    std::optional<double> on_ack(std::uint64_t seq, SimTime now) {
        auto it = in_flight_.find(seq);
        if (it == in_flight_.end()) {
            ++duplicate_acks_;
            return std::nullopt;
        }
        Outstanding seg = it->second;
        in_flight_.erase(it);

        // Karn: retransmitted segments never feed the RTT estimator.
        if (!seg.retransmitted) {
            SimTime sample = now - seg.last_send;
            if (have_srtt_) {
                srtt_ = SimTime::from_ns(srtt_.ns() - srtt_.ns() / 8 + sample.ns() / 8);
            } else {
                srtt_ = sample;
                have_srtt_ = true;
            }
        }

        if (cwnd_ < ssthresh_) cwnd_ += 1.0;       // slow start
        else cwnd_ += 1.0 / cwnd_;                 // congestion avoidance
        if (cwnd_ > params_.max_window) cwnd_ = params_.max_window;

        return (now - seg.first_send).seconds();
    }

    /// Timeout handling for one segment. Returns true when the segment was
    /// outstanding, in which case the caller re-sends it (exactly once per
    /// drop event) and must call record_resend.
    bool on_drop(std::uint64_t seq, SimTime) {
        auto it = in_flight_.find(seq);
        if (it == in_flight_.end()) return false;
        ssthresh_ = cwnd_ / 2.0 < 1.0 ? 1.0 : cwnd_ / 2.0;
        cwnd_ = 1.0;
        ++retransmit_count_;
        return true;
    }

    void record_resend(std::uint64_t seq, SimTime now) {
        auto it = in_flight_.find(seq);
        if (it == in_flight_.end()) return;
        it->second.last_send = now;
        it->second.retransmitted = true;
    }

    SimTime rto() const {
        if (!have_srtt_) return params_.rto_initial;
        SimTime doubled = SimTime::from_ns(2 * srtt_.ns());
        return doubled < params_.rto_min ? params_.rto_min : doubled;
    }

    double cwnd() const { return cwnd_; }
    double ssthresh() const { return ssthresh_; }
    std::size_t in_flight_size() const { return in_flight_.size(); }
    std::uint64_t retransmit_count() const { return retransmit_count_; }
    std::uint64_t duplicate_acks() const { return duplicate_acks_; }
    SimTime srtt() const { return srtt_; }
    const TcpParams& params() const { return params_; }

  private:
    struct Outstanding {
        SimTime first_send;
        SimTime last_send;
        bool retransmitted;
    };

    TcpParams params_{};
    double cwnd_ = 1.0;
    double ssthresh_;
    SimTime srtt_{};
    bool have_srtt_ = false;
    std::unordered_map<std::uint64_t, Outstanding> in_flight_;
    std::uint64_t retransmit_count_ = 0;
    std::uint64_t duplicate_acks_ = 0;
};

}  // namespace transim

#endif
