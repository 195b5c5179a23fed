#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "predictsched/workload.hpp"

namespace predictsched {

// One recurring job stream injected into a synthetic workload.
struct PatternTemplate {
    int user_id = 1;
    int cpus = 1;
    Seconds runtime = 3600;
    Seconds period = 86400;
    Seconds start_offset = 0;
    int occurrences = 1;
    double submit_jitter = 0.0;   // fraction of period, uniform in [-j, +j]
    double runtime_jitter = 0.0;  // fraction of runtime, uniform in [-j, +j]
};

struct SynthSpec {
    Seconds horizon = 0;
    std::vector<PatternTemplate> templates;
    double background_rate = 0.0;  // Poisson arrivals per second
    int background_users = 20;
    int background_max_cpus = 8;
    Seconds background_min_runtime = 60;
    Seconds background_max_runtime = 7200;
    std::uint64_t seed = 1;
};

struct GroundTruthOccurrence {
    int template_id = 0;
    int occurrence_index = 0;
    JobId job_id = 0;
    Seconds submit_time = 0;
    int cpus = 0;
    Seconds runtime = 0;
};

struct SynthResult {
    Workload workload;
    std::vector<GroundTruthOccurrence> ground_truth;  // in template, occurrence order
};

// User ids of background jobs start here so they never collide with templates.
inline constexpr int kBackgroundUserBase = 100000;

/// Generates a workload from `spec` using a single mt19937_64 stream seeded
/// with `seed`. Draw order: for each template, for each occurrence, one
/// submit jitter u in [-1,1) then one runtime jitter u in [-1,1); then the
/// background stream, per job: exponential gap, user index, cpus, runtime.
/// Occurrences falling outside [0, horizon) are skipped. Job ids follow
/// (submit_time, template order, background last).
SynthResult synth_workload(const SynthSpec& spec, std::uint64_t seed);

/// Reads a key/value spec. Keys: horizon, seed, background_rate,
/// background_users, background_max_cpus, background_min_runtime,
/// background_max_runtime; each `template = k=v ...` line adds a template
/// with keys user, cpus, runtime, period, offset, count, submit_jitter,
/// runtime_jitter. '#' starts a comment.
SynthSpec parse_synth_spec(std::string_view text);

// CSV "template_id,occurrence_index,submit_time,cpus,runtime".
std::string write_ground_truth(const std::vector<GroundTruthOccurrence>& truth);

}  // namespace predictsched
