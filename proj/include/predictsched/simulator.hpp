#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "predictsched/confidence.hpp"
#include "predictsched/forecaster.hpp"
#include "predictsched/policy.hpp"
#include "predictsched/workload.hpp"

namespace predictsched {

struct JobRecord {
    JobId job_id = 0;
    Seconds submit_time = 0;
    Seconds start_time = 0;
    Seconds finish_time = 0;
    int cpus = 0;

    bool operator==(const JobRecord&) const = default;
};

struct SimTrace {
    std::vector<JobRecord> records;  // workload order
    ClusterConfig cluster;
    std::string policy_name;
};

// CSV "job_id,submit,start,finish,cpus".
std::string write_trace(const SimTrace& trace);
SimTrace parse_trace(std::string_view text, ClusterConfig cluster = {}, std::string policy_name = {});

enum class ReservationStatus { Pending, Holding, Consumed, Expired, Cancelled };

struct Reservation {
    int res_id = 0;
    PredictedJob prediction;
    int cpus = 0;
    Seconds window_start = 0;
    Seconds window_end = 0;
    Seconds half_width = 0;             // match tolerance around predicted_submit
    Decision decision = Decision::Ignore;  // after admission; Ignore only watches
    bool claims = false;                // soft or hard, capacity-bearing
    bool hard = false;
    ReservationStatus status = ReservationStatus::Pending;

    bool unresolved() const {
        return status == ReservationStatus::Pending || status == ReservationStatus::Holding;
    }
};

/// Nearest-center unresolved reservation whose prediction matches the job
/// (same user, requirements within `req`) with |submit - predicted| within
/// the reservation's half width. Ties go to the lower res_id.
std::optional<std::size_t> match_arrival(const Job& job, std::span<const Reservation> reservations,
                                         const SimilarityParams& req);

struct FeedbackRecord {
    int pattern_id = 0;
    Seconds predicted_submit = 0;
    double confidence = 0.0;
    Decision decision = Decision::Ignore;
    bool came_true = false;
    Seconds observed_time = 0;
};

// CSV "pattern_id,predicted_submit,confidence,decision,came_true".
std::string write_feedback(std::span<const FeedbackRecord> feedback);

struct CapacitySample {
    Seconds time = 0;
    int running_cpus = 0;
    int hard_held = 0;
    int soft_held = 0;
    std::size_t queued = 0;
};

struct ReservationStats {
    std::size_t created = 0;
    std::size_t ignored = 0;
    std::size_t soft = 0;
    std::size_t hard = 0;
    std::size_t downgraded = 0;  // hard requests admitted as soft
    std::size_t demoted = 0;     // hard reservations that could not hold at window start
    std::size_t consumed = 0;
    std::size_t expired = 0;
    std::size_t cancelled = 0;
    std::size_t immediate_starts = 0;
};

struct SimResult {
    SimTrace trace;
    std::vector<FeedbackRecord> feedback;
    std::vector<Reservation> reservations;
    ThresholdState thresholds;
    std::vector<CapacitySample> capacity;
    ReservationStats stats;
    std::size_t forecast_ticks = 0;
};

/// Runs the workload to completion on a homogeneous, non-preemptive cluster.
/// Events at one instant are applied in (kind, seq) order, finishes first,
/// and the policy is consulted once after the instant. With a forecaster,
/// periodic ticks mine the jobs submitted so far and turn predictions into
/// watched, soft or hard reservations.
SimResult run(const Workload& workload, const ClusterConfig& cluster, Policy& policy,
              const std::optional<ForecasterConfig>& forecaster = std::nullopt);

SimResult run(const Workload& workload, const ClusterConfig& cluster, PolicyKind kind,
              const std::optional<ForecasterConfig>& forecaster = std::nullopt);

// Replaces pattern mining at forecast ticks: gets the jobs submitted so far
// and the tick time, returns scored predictions.
using PredictionSource = std::function<std::vector<PredictedJob>(std::span<const Job> history, Seconds now)>;

/// As above, with predictions taken from `source`; `forecaster` still sets
/// the tick cadence, thresholds, windows and matching tolerances.
SimResult run(const Workload& workload, const ClusterConfig& cluster, Policy& policy,
              const ForecasterConfig& forecaster, PredictionSource source);

}  // namespace predictsched
