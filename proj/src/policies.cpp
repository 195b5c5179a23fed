#include "predictsched/policy.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <tuple>

namespace predictsched {

namespace {

struct PolicyInfo {
    PolicyKind kind;
    std::string_view token;
    std::string_view label;
};

constexpr PolicyInfo kPolicyInfo[] = {
    {PolicyKind::FCFS, "fcfs", "FCFS"},
    {PolicyKind::LCFS, "lcfs", "LCFS"},
    {PolicyKind::ShortestJF, "sjf", "SJF"},
    {PolicyKind::SmallestJF, "smjf", "Smallest JF"},
    {PolicyKind::EDF, "edf", "EDF"},
    {PolicyKind::FirstFit, "first-fit", "First Fit"},
    {PolicyKind::ConservativeBF, "cons-bf", "Cons BF"},
    {PolicyKind::EasyBF, "easy-bf", "EASY BF"},
    {PolicyKind::ESG, "esg", "ESG"},
    {PolicyKind::BestGap, "best-gap", "Best Gap"},
    {PolicyKind::DLPredictive, "dl", "DL"},
};

bool arrival_less(const Job& a, const Job& b) {
    return std::tie(a.submit_time, a.job_id) < std::tie(b.submit_time, b.job_id);
}

// Queue-ordering policies: sort, then start in order while jobs fit. With
// `skip_blocked`, a job that does not fit is passed over instead of
// stopping the scan.
class OrderedPolicy final : public Policy {
public:
    using Less = std::function<bool(const Job&, const Job&)>;

    OrderedPolicy(PolicyKind kind, Less less, bool skip_blocked)
        : Policy(kind), less_(std::move(less)), skip_blocked_(skip_blocked) {}

    PolicyDecision select(const SchedulerView& view) override {
        std::vector<const Job*> order;
        order.reserve(view.queue.size());
        for (const auto& job : view.queue) order.push_back(&job);
        std::stable_sort(order.begin(), order.end(), [&](const Job* a, const Job* b) {
            if (less_(*a, *b)) return true;
            if (less_(*b, *a)) return false;
            return arrival_less(*a, *b);
        });
        PolicyDecision decision;
        int free = view.free_cpus;
        for (const Job* job : order) {
            if (job->cpus <= free) {
                decision.start.push_back(job->job_id);
                free -= job->cpus;
            } else if (!skip_blocked_) {
                break;
            }
        }
        return decision;
    }

private:
    Less less_;
    bool skip_blocked_;
};

/// Conservative backfilling: every queued job holds a planned start. On each
/// invocation existing plans are compressed in priority order (a job is
/// lifted out and re-placed at its earliest fit, which is never later than
/// its old slot while capacity only grows), then new arrivals are appended
/// at their earliest fit. Jobs planned for `now` start.
///
/// Also serves DLPredictive: hard reservations arrive as view blocks and
/// are part of the base profile, so with no reservations both coincide.
class ConservativeBackfill final : public Policy {
public:
    explicit ConservativeBackfill(PolicyKind kind) : Policy(kind) {}

    PolicyDecision select(const SchedulerView& view) override {
        std::map<JobId, Seconds> kept;
        for (const auto& job : view.queue) {
            if (auto it = plans_.find(job.job_id); it != plans_.end()) {
                kept.emplace(job.job_id, std::max(it->second, view.now));
            }
        }
        plans_ = std::move(kept);

        ScheduleProfile profile = base_profile(view);
        for (const auto& job : view.queue) {
            if (auto it = plans_.find(job.job_id); it != plans_.end()) {
                profile.reserve(it->second, it->second + job.runtime_estimate, job.cpus);
            }
        }
        for (const auto& job : view.queue) {
            auto it = plans_.find(job.job_id);
            if (it == plans_.end()) continue;
            const Seconds old = it->second;
            profile.release(old, old + job.runtime_estimate, job.cpus);
            const Seconds fit = profile.earliest_fit(job.cpus, job.runtime_estimate, view.now);
            profile.reserve(fit, fit + job.runtime_estimate, job.cpus);
            if (fit != old) log_plan(view.now, job.job_id, fit);
            it->second = fit;
        }
        for (const auto& job : view.queue) {
            if (plans_.count(job.job_id)) continue;
            const Seconds fit = profile.earliest_fit(job.cpus, job.runtime_estimate, view.now);
            profile.reserve(fit, fit + job.runtime_estimate, job.cpus);
            plans_.emplace(job.job_id, fit);
            log_plan(view.now, job.job_id, fit);
        }

        PolicyDecision decision;
        for (const auto& job : view.queue) {
            const Seconds planned = plans_.at(job.job_id);
            if (planned == view.now) {
                decision.start.push_back(job.job_id);
            } else if (!decision.wakeup || planned < *decision.wakeup) {
                decision.wakeup = planned;
            }
        }
        return decision;
    }

private:
    std::map<JobId, Seconds> plans_;
};

/// EASY backfilling: start jobs from the head while they fit; the first
/// blocked job gets a reservation at its earliest fit (the shadow time) and
/// later jobs may start now only if they fit around it.
class EasyBackfill final : public Policy {
public:
    EasyBackfill() : Policy(PolicyKind::EasyBF) {}

    PolicyDecision select(const SchedulerView& view) override {
        ScheduleProfile profile = base_profile(view);
        PolicyDecision decision;
        bool head_reserved = false;
        for (const auto& job : view.queue) {
            const bool fits_now = profile.min_free(view.now, view.now + job.runtime_estimate) >= job.cpus;
            if (!head_reserved) {
                if (fits_now) {
                    log_plan(view.now, job.job_id, view.now, true);
                    profile.reserve(view.now, view.now + job.runtime_estimate, job.cpus);
                    decision.start.push_back(job.job_id);
                    continue;
                }
                const Seconds shadow = profile.earliest_fit(job.cpus, job.runtime_estimate, view.now);
                log_plan(view.now, job.job_id, shadow, true);
                profile.reserve(shadow, shadow + job.runtime_estimate, job.cpus);
                decision.wakeup = shadow;
                head_reserved = true;
                continue;
            }
            if (fits_now) {
                profile.reserve(view.now, view.now + job.runtime_estimate, job.cpus);
                decision.start.push_back(job.job_id);
            }
        }
        return decision;
    }
};

/// Schedule-based gap filling. Every invocation rebuilds the plan of all
/// waiting jobs in arrival order; a job must fit inside one constant-capacity
/// segment of the profile (its "gap"). ESG takes the earliest such gap,
/// BestGap the one with the least (cpu slack, time slack), earliest on ties.
class GapPolicy final : public Policy {
public:
    explicit GapPolicy(PolicyKind kind) : Policy(kind) {}

    PolicyDecision select(const SchedulerView& view) override {
        ScheduleProfile profile = base_profile(view);
        PolicyDecision decision;
        for (const auto& job : view.queue) {
            const Seconds duration = std::max<Seconds>(job.runtime_estimate, 1);
            const Seconds start = choose(profile.segments(view.now), job.cpus, duration);
            profile.reserve(start, start + duration, job.cpus);
            log_plan(view.now, job.job_id, start);
            if (start == view.now) {
                decision.start.push_back(job.job_id);
            } else if (!decision.wakeup || start < *decision.wakeup) {
                decision.wakeup = start;
            }
        }
        return decision;
    }

private:
    Seconds choose(const std::vector<ScheduleProfile::Segment>& gaps, int cpus, Seconds duration) const {
        const ScheduleProfile::Segment* best = nullptr;
        auto length = [](const ScheduleProfile::Segment& s) {
            return s.end == kForever ? kForever : s.end - s.start;
        };
        for (const auto& gap : gaps) {
            if (gap.free < cpus || length(gap) < duration) continue;
            if (kind() == PolicyKind::ESG) return gap.start;
            if (best == nullptr) {
                best = &gap;
                continue;
            }
            const auto slack = [&](const ScheduleProfile::Segment& s) {
                const Seconds len = length(s);
                return std::pair{s.free - cpus, len == kForever ? kForever : len - duration};
            };
            if (slack(gap) < slack(*best)) best = &gap;
        }
        if (best == nullptr) throw InvariantViolation("no gap can hold the job");
        return best->start;
    }
};

}  // namespace

PolicyKind parse_policy(std::string_view token) {
    if (token == "pbs") return PolicyKind::FirstFit;
    for (const auto& info : kPolicyInfo) {
        if (info.token == token) return info.kind;
    }
    throw ConfigError("unknown policy '" + std::string(token) + "'");
}

std::string_view policy_token(PolicyKind kind) {
    for (const auto& info : kPolicyInfo) {
        if (info.kind == kind) return info.token;
    }
    return "?";
}

std::string_view policy_label(PolicyKind kind) {
    for (const auto& info : kPolicyInfo) {
        if (info.kind == kind) return info.label;
    }
    return "?";
}

ScheduleProfile base_profile(const SchedulerView& view) {
    ScheduleProfile profile(view.now, view.total_cpus);
    for (const auto& r : view.running) profile.reserve(view.now, r.expected_end, r.cpus);
    for (const auto& block : view.reservations) {
        if (block.hard) profile.reserve(block.start, block.end, block.cpus);
    }
    return profile;
}

std::unique_ptr<Policy> make_policy(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::FCFS:
            return std::make_unique<OrderedPolicy>(kind, [](const Job&, const Job&) { return false; }, false);
        case PolicyKind::LCFS:
            return std::make_unique<OrderedPolicy>(
                kind, [](const Job& a, const Job& b) { return arrival_less(b, a); }, false);
        case PolicyKind::ShortestJF:
            return std::make_unique<OrderedPolicy>(
                kind, [](const Job& a, const Job& b) { return a.runtime_estimate < b.runtime_estimate; }, false);
        case PolicyKind::SmallestJF:
            return std::make_unique<OrderedPolicy>(
                kind, [](const Job& a, const Job& b) { return a.cpus < b.cpus; }, false);
        case PolicyKind::EDF:
            return std::make_unique<OrderedPolicy>(
                kind,
                [](const Job& a, const Job& b) {
                    return a.deadline.value_or(a.submit_time) < b.deadline.value_or(b.submit_time);
                },
                false);
        case PolicyKind::FirstFit:
            return std::make_unique<OrderedPolicy>(kind, [](const Job&, const Job&) { return false; }, true);
        case PolicyKind::ConservativeBF:
        case PolicyKind::DLPredictive:
            return std::make_unique<ConservativeBackfill>(kind);
        case PolicyKind::EasyBF:
            return std::make_unique<EasyBackfill>();
        case PolicyKind::ESG:
        case PolicyKind::BestGap:
            return std::make_unique<GapPolicy>(kind);
    }
    throw ConfigError("unsupported policy");
}

}  // namespace predictsched
