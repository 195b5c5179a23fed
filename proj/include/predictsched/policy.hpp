#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "predictsched/profile.hpp"
#include "predictsched/workload.hpp"

namespace predictsched {

enum class PolicyKind {
    FCFS,
    LCFS,
    ShortestJF,
    SmallestJF,
    EDF,
    FirstFit,
    ConservativeBF,
    EasyBF,
    ESG,
    BestGap,
    DLPredictive,
};

inline constexpr PolicyKind kAllPolicies[] = {
    PolicyKind::FCFS,     PolicyKind::LCFS,           PolicyKind::ShortestJF, PolicyKind::SmallestJF,
    PolicyKind::EDF,      PolicyKind::FirstFit,       PolicyKind::ConservativeBF, PolicyKind::EasyBF,
    PolicyKind::ESG,      PolicyKind::BestGap,        PolicyKind::DLPredictive,
};

// CLI tokens: fcfs|lcfs|sjf|smjf|edf|first-fit|cons-bf|easy-bf|esg|best-gap|dl.
// "pbs" is accepted as an alias of first-fit.
PolicyKind parse_policy(std::string_view token);
std::string_view policy_token(PolicyKind kind);
// Display name used in reports, e.g. "Cons BF".
std::string_view policy_label(PolicyKind kind);

struct RunningJob {
    JobId job_id = 0;
    int cpus = 0;
    Seconds start = 0;
    Seconds expected_end = 0;  // by runtime estimate, always > now
};

// Capacity a reservation claims from the schedule (pending or already held).
struct ReservationBlock {
    int res_id = 0;
    Seconds start = 0;
    Seconds end = 0;
    int cpus = 0;
    bool hard = false;
};

/// What a policy sees at one scheduling instant.
struct SchedulerView {
    Seconds now = 0;
    int total_cpus = 0;
    int free_cpus = 0;  // total - running - held hard reservations
    std::span<const Job> queue;  // arrival order
    std::span<const RunningJob> running;
    std::span<const ReservationBlock> reservations;
};

struct PolicyDecision {
    std::vector<JobId> start;
    std::optional<Seconds> wakeup;  // ask to be invoked again at this time
};

struct PlanRecord {
    Seconds at = 0;
    JobId job_id = 0;
    Seconds planned_start = 0;
    bool head = false;  // EASY head-of-queue reservation
};

class Policy {
public:
    explicit Policy(PolicyKind kind) : kind_(kind) {}
    virtual ~Policy() = default;

    Policy(const Policy&) = delete;
    Policy& operator=(const Policy&) = delete;

    PolicyKind kind() const noexcept { return kind_; }
    std::string_view name() const { return policy_token(kind_); }

    virtual PolicyDecision select(const SchedulerView& view) = 0;

    // Planning history, recorded only when enabled (tests, diagnostics).
    void set_plan_logging(bool on) { log_plans_ = on; }
    const std::vector<PlanRecord>& plan_log() const noexcept { return plan_log_; }

protected:
    void log_plan(Seconds at, JobId job, Seconds planned, bool head = false) {
        if (log_plans_) plan_log_.push_back({at, job, planned, head});
    }

private:
    PolicyKind kind_;
    bool log_plans_ = false;
    std::vector<PlanRecord> plan_log_;
};

std::unique_ptr<Policy> make_policy(PolicyKind kind);

// Builds the profile every planning policy starts from: running jobs until
// their expected end and every hard reservation block. Soft blocks are
// left out since queued work may take their capacity.
ScheduleProfile base_profile(const SchedulerView& view);

}  // namespace predictsched
