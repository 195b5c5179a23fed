#pragma once

#include "predictsched/simulator.hpp"

namespace predictsched {

// Completion time of the last job (clock origin is the earliest submit).
Seconds makespan(const SimTrace& trace);

/// Time-weighted mean over [0, makespan) of
///   active(t) / min(total_cpus, requested(t)),
/// requested counting every submitted, unfinished job. Intervals without
/// requests are left out. Percent.
double resource_utilization(const SimTrace& trace, const ClusterConfig& cluster);
inline double resource_utilization(const SimTrace& trace) { return resource_utilization(trace, trace.cluster); }

// Sum over jobs of (finish - submit) / (finish - start).
double slowdown(const SimTrace& trace);

struct ObjectiveVector {
    double makespan = 0.0;     // minimize
    double utilization = 0.0;  // maximize
    double slowdown = 0.0;     // minimize
};

ObjectiveVector evaluate(const SimTrace& trace);

// Largest sum of cpus of jobs running at the same instant.
int peak_cpus(const SimTrace& trace);

}  // namespace predictsched
