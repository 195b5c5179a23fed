#include "predictsched/profile.hpp"

#include <algorithm>
#include <string>

namespace predictsched {

ScheduleProfile::ScheduleProfile(Seconds origin, int total_cpus) : origin_(origin), total_(total_cpus) {
    free_.emplace(origin, total_cpus);
}

void ScheduleProfile::split_at(Seconds t) {
    auto it = free_.upper_bound(t);
    --it;  // origin key always exists and t >= origin
    if (it->first != t) free_.emplace_hint(std::next(it), t, it->second);
}

void ScheduleProfile::coalesce() {
    auto it = free_.begin();
    while (it != free_.end()) {
        auto next = std::next(it);
        if (next != free_.end() && next->second == it->second) {
            free_.erase(next);
        } else {
            it = next;
        }
    }
}

void ScheduleProfile::reserve(Seconds start, Seconds end, int cpus) {
    start = std::max(start, origin_);
    if (end <= start || cpus == 0) return;
    split_at(start);
    if (end != kForever) split_at(end);
    for (auto it = free_.find(start); it != free_.end() && it->first < end; ++it) it->second -= cpus;
    coalesce();
}

int ScheduleProfile::free_at(Seconds t) const {
    t = std::max(t, origin_);
    auto it = free_.upper_bound(t);
    return std::prev(it)->second;
}

int ScheduleProfile::min_free(Seconds start, Seconds end) const {
    start = std::max(start, origin_);
    auto it = std::prev(free_.upper_bound(start));
    int m = it->second;
    for (++it; it != free_.end() && it->first < end; ++it) m = std::min(m, it->second);
    return m;
}

Seconds ScheduleProfile::earliest_fit(int cpus, Seconds duration, Seconds not_before) const {
    if (cpus > total_) {
        throw InvariantViolation("job needs " + std::to_string(cpus) + " cpus on a " + std::to_string(total_) +
                                 "-cpu profile");
    }
    not_before = std::max(not_before, origin_);
    duration = std::max<Seconds>(duration, 1);
    auto fits = [&](Seconds t) { return min_free(t, t + duration) >= cpus; };
    if (fits(not_before)) return not_before;
    for (auto it = free_.upper_bound(not_before); it != free_.end(); ++it) {
        if (it->second >= cpus && fits(it->first)) return it->first;
    }
    // Unreachable while every reservation is finite: the tail holds total_.
    throw InvariantViolation("no feasible start in schedule profile");
}

std::vector<ScheduleProfile::Segment> ScheduleProfile::segments(Seconds from) const {
    std::vector<Segment> out;
    from = std::max(from, origin_);
    auto it = std::prev(free_.upper_bound(from));
    Seconds start = from;
    for (; it != free_.end(); ++it) {
        auto next = std::next(it);
        const Seconds end = next == free_.end() ? kForever : next->first;
        if (!out.empty() && out.back().free == it->second) {
            out.back().end = end;
        } else {
            out.push_back({start, end, it->second});
        }
        start = end;
    }
    return out;
}

}  // namespace predictsched
