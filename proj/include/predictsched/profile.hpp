#pragma once

#include <limits>
#include <map>
#include <vector>

#include "predictsched/types.hpp"

namespace predictsched {

inline constexpr Seconds kForever = std::numeric_limits<Seconds>::max();

/// Piecewise-constant free-cpu availability from `origin` to infinity.
/// Each key holds the free count until the next key; the last one extends
/// forever. Reservations may drive a region negative (overcommit); fitting
/// queries never place work there.
class ScheduleProfile {
public:
    ScheduleProfile(Seconds origin, int total_cpus);

    Seconds origin() const noexcept { return origin_; }
    int total_cpus() const noexcept { return total_; }

    // Subtracts `cpus` over [start, end), clipped to the origin.
    void reserve(Seconds start, Seconds end, int cpus);
    void release(Seconds start, Seconds end, int cpus) { reserve(start, end, -cpus); }

    int free_at(Seconds t) const;
    int min_free(Seconds start, Seconds end) const;

    /// Earliest t >= not_before with at least `cpus` free over [t, t + duration).
    Seconds earliest_fit(int cpus, Seconds duration, Seconds not_before) const;

    struct Segment {
        Seconds start;
        Seconds end;  // kForever for the tail
        int free;
    };
    // Maximal constant-capacity segments from `from` on (adjacent equal values merged).
    std::vector<Segment> segments(Seconds from) const;

private:
    void split_at(Seconds t);
    void coalesce();

    Seconds origin_;
    int total_;
    std::map<Seconds, int> free_;
};

}  // namespace predictsched
