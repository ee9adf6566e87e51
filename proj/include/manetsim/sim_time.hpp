#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>

namespace manetsim {

// Fixed-point simulation clock with microsecond resolution. Integer
// arithmetic keeps replay runs identical across platforms.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime micros(std::int64_t us) {
        if (us < 0) throw std::invalid_argument("SimTime cannot be negative");
        SimTime t;
        t.us_ = us;
        return t;
    }
    static SimTime seconds(double s) { return micros(std::llround(s * 1e6)); }
    static constexpr SimTime millis(std::int64_t ms) { return micros(ms * 1000); }

    constexpr std::int64_t count_micros() const { return us_; }
    constexpr double as_seconds() const { return static_cast<double>(us_) * 1e-6; }

    friend constexpr auto operator<=>(SimTime, SimTime) = default;

    constexpr SimTime operator+(SimTime rhs) const { return micros(us_ + rhs.us_); }
    constexpr SimTime operator-(SimTime rhs) const {
        if (rhs.us_ > us_) throw std::invalid_argument("SimTime subtraction underflow");
        return micros(us_ - rhs.us_);
    }
    SimTime& operator+=(SimTime rhs) {
        us_ += rhs.us_;
        return *this;
    }

private:
    std::int64_t us_ = 0;
};

}  // namespace manetsim
