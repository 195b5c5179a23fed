#include "predictsched/metrics.hpp"

#include <algorithm>
#include <map>

namespace predictsched {

namespace {

void require_records(const SimTrace& trace) {
    if (trace.records.empty()) throw ConfigError("empty trace");
}

}  // namespace

Seconds makespan(const SimTrace& trace) {
    require_records(trace);
    Seconds m = trace.records.front().finish_time;
    for (const auto& r : trace.records) m = std::max(m, r.finish_time);
    return m;
}

double resource_utilization(const SimTrace& trace, const ClusterConfig& cluster) {
    require_records(trace);
    // Net change of (active, requested) cpus at each instant.
    std::map<Seconds, std::pair<long long, long long>> delta;
    for (const auto& r : trace.records) {
        delta[r.submit_time].second += r.cpus;
        delta[r.start_time].first += r.cpus;
        delta[r.finish_time].first -= r.cpus;
        delta[r.finish_time].second -= r.cpus;
    }
    const Seconds end = makespan(trace);
    long long active = 0, requested = 0;
    double weighted = 0.0, counted = 0.0;
    for (auto it = delta.begin(); it != delta.end(); ++it) {
        active += it->second.first;
        requested += it->second.second;
        auto next = std::next(it);
        if (next == delta.end() || it->first >= end) break;
        const auto dt = static_cast<double>(std::min(next->first, end) - it->first);
        if (requested <= 0 || dt <= 0) continue;
        const double denom = static_cast<double>(std::min<long long>(cluster.total_cpus, requested));
        weighted += static_cast<double>(active) / denom * dt;
        counted += dt;
    }
    if (counted <= 0.0) throw ConfigError("trace has no interval with requested cpus");
    return 100.0 * weighted / counted;
}

double slowdown(const SimTrace& trace) {
    require_records(trace);
    double total = 0.0;
    for (const auto& r : trace.records) {
        if (r.finish_time <= r.start_time) {
            throw ConfigError("job " + std::to_string(r.job_id) + " has zero runtime in trace");
        }
        total += static_cast<double>(r.finish_time - r.submit_time) / static_cast<double>(r.finish_time - r.start_time);
    }
    return total;
}

ObjectiveVector evaluate(const SimTrace& trace) {
    return {static_cast<double>(makespan(trace)), resource_utilization(trace), slowdown(trace)};
}

int peak_cpus(const SimTrace& trace) {
    std::map<Seconds, long long> delta;
    for (const auto& r : trace.records) {
        delta[r.start_time] += r.cpus;
        delta[r.finish_time] -= r.cpus;
    }
    long long cur = 0, peak = 0;
    for (const auto& [t, d] : delta) {
        cur += d;
        peak = std::max(peak, cur);
    }
    return static_cast<int>(peak);
}

}  // namespace predictsched
