#pragma once

#include <span>
#include <vector>

#include "predictsched/workload.hpp"

namespace predictsched {

struct SimilarityParams {
    double cpu_tol = 0.0;      // relative
    double runtime_tol = 0.25; // relative
    double period_jitter = 0.10;
    int min_occurrences = 3;
    bool same_user = true;

    void validate() const;
};

// Two requirement vectors match when each differs by at most tol * max(a, b).
bool requirements_match(double cpus_a, double runtime_a, double cpus_b, double runtime_b,
                        const SimilarityParams& params);

struct Occurrence {
    JobId id = 0;  // job id on layer 1, child pattern id above
    Seconds submit_time = 0;

    bool operator==(const Occurrence&) const = default;
};

struct Pattern {
    int pattern_id = 0;
    int layer = 1;
    int user_id = 0;
    int rep_cpus = 0;
    Seconds rep_runtime = 0;
    Seconds period = 0;
    std::vector<Occurrence> occurrences;  // sorted by time
    std::vector<int> children;            // child pattern ids, layers >= 2

    std::size_t length() const noexcept { return occurrences.size(); }
    Seconds first_time() const { return occurrences.front().submit_time; }
    Seconds last_time() const { return occurrences.back().submit_time; }
    Seconds span() const { return last_time() - first_time(); }
};

struct PredictedJob {
    int pattern_id = 0;
    int layer = 1;
    int user_id = 0;
    Seconds predicted_submit = 0;
    int cpus = 0;
    Seconds runtime = 0;
    Seconds period = 0;          // period of the layer-1 stream being extended
    int source_pattern_id = 0;   // that layer-1 pattern
    int position = 0;            // its length counting this prediction
    double confidence = 0.0;
};

// Layered result of pattern mining; `layers[k]` holds layer k+1.
struct PatternSet {
    std::vector<std::vector<Pattern>> layers;

    const Pattern* find(int pattern_id) const;
    std::vector<Pattern> all() const;
    std::size_t total() const;
};

/// Partitions jobs (by user when `same_user`) into requirement clusters.
/// Single pass in submit order; a job joins the first existing cluster whose
/// median (cpus, runtime_estimate) it matches, otherwise opens a new one.
std::vector<std::vector<Job>> group_similar_jobs(std::span<const Job> jobs, const SimilarityParams& params);

/// Greedy median-period chaining over one cluster (sorted by submit time).
/// Pattern ids are assigned sequentially from `first_id`. When
/// `min_gap_over_span` is set (higher layers), a chain gap must exceed the
/// span of the child pattern at the chain tail; `child_spans` is indexed
/// like `cluster`.
std::vector<Pattern> detect_patterns(std::span<const Job> cluster, const SimilarityParams& params,
                                     int first_id = 0, int layer = 1,
                                     std::span<const Seconds> child_spans = {});

/// Stacks layers: each layer-k pattern becomes a pseudo-job at its first
/// occurrence with requirements (rep_cpus, rep_runtime * length), and
/// detection is repeated. Stops at `max_layer` or when a layer is empty.
PatternSet build_layers(std::vector<Pattern> layer1, const SimilarityParams& params, int max_layer = 3);

/// group_similar_jobs + detect_patterns + build_layers with global ids.
PatternSet mine_patterns(std::span<const Job> jobs, const SimilarityParams& params, int max_layer = 3);

struct ProlongParams {
    double stale_periods = 2.0;  // a pattern silent longer than this many periods is dropped
};

/// Extends every live layer-1 pattern to last + k*period inside
/// (now, now + horizon]; layer-2+ patterns additionally emit a whole child
/// block at each predicted super-period tick. Confidence is left at 0.
/// Output is ordered by (predicted_submit, pattern_id).
std::vector<PredictedJob> prolong(const PatternSet& patterns, Seconds now, Seconds horizon,
                                  const ProlongParams& params = {});

// CSV "pattern_id,layer,predicted_submit,cpus,runtime,confidence".
std::string write_predictions(std::span<const PredictedJob> predictions);

}  // namespace predictsched
