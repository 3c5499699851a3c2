#ifndef TRANSIM_TIME_HPP
#define TRANSIM_TIME_HPP

#include <cstdint>
#include <compare>

namespace transim {

/// Simulated time as integer nanoseconds. Integer arithmetic keeps event
/// ordering identical across platforms and optimization levels.
class SimTime {
  public:
    constexpr SimTime() = default;
    static constexpr SimTime from_ns(std::int64_t ns) { return SimTime(ns); }
    static constexpr SimTime from_us(std::int64_t us) { return SimTime(us * 1000); }
    static constexpr SimTime from_ms(std::int64_t ms) { return SimTime(ms * 1'000'000); }
    static constexpr SimTime from_s(std::int64_t s) { return SimTime(s * 1'000'000'000); }
    static SimTime from_seconds(double s) {
        return SimTime(static_cast<std::int64_t>(s * 1e9 + (s >= 0 ? 0.5 : -0.5)));
    }

    constexpr std::int64_t ns() const { return ns_; }
    constexpr double seconds() const { return static_cast<double>(ns_) / 1e9; }

    constexpr auto operator<=>(const SimTime&) const = default;
    constexpr SimTime operator+(SimTime o) const { return SimTime(ns_ + o.ns_); }
    constexpr SimTime operator-(SimTime o) const { return SimTime(ns_ - o.ns_); }
    constexpr SimTime& operator+=(SimTime o) { ns_ += o.ns_; return *this; }

  private:
    constexpr explicit SimTime(std::int64_t ns) : ns_(ns) {}
    std::int64_t ns_ = 0;
};

}  // namespace transim

#endif
