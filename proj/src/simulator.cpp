#include "predictsched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "text_util.hpp"

namespace predictsched {

namespace {

// Equal-time order: frees before demands.
enum class EventKind : int {
    Finish = 0,
    ReservationExpire = 1,
    Submit = 2,
    ReservationStart = 3,
    ForecastTick = 4,
    Wakeup = 5,
};

struct Event {
    Seconds time;
    EventKind kind;
    std::uint64_t seq;
    std::size_t index;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        return std::tuple(a.time, static_cast<int>(a.kind), a.seq) >
               std::tuple(b.time, static_cast<int>(b.kind), b.seq);
    }
};

class Engine {
public:
    Engine(const Workload& workload, const ClusterConfig& cluster, Policy& policy,
           const std::optional<ForecasterConfig>& forecaster, PredictionSource source = {})
        : workload_(workload), cluster_(cluster), policy_(policy), forecaster_(forecaster), source_(std::move(source)) {}

    SimResult run();

private:
    int available() const { return cluster_.total_cpus - running_cpus_ - hard_held_ - soft_held_; }

    void push(Seconds t, EventKind kind, std::size_t index) { events_.push({t, kind, seq_++, index}); }

    void dispatch(const Event& e);
    void on_finish(std::size_t job);
    void on_submit(std::size_t job);
    void on_reservation_start(std::size_t res);
    void on_reservation_expire(std::size_t res);
    void on_tick();

    void consult_policy();
    void start_job(std::size_t job);
    void release_hold(Reservation& r);
    void resolve(Reservation& r, bool came_true);
    bool cancel_youngest_soft();
    ScheduleProfile occupancy_profile() const;
    SchedulerView view(std::vector<Job>& queue, std::vector<RunningJob>& running,
                       std::vector<ReservationBlock>& blocks) const;

    const Workload& workload_;
    ClusterConfig cluster_;
    Policy& policy_;
    std::optional<ForecasterConfig> forecaster_;
    PredictionSource source_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
    std::uint64_t seq_ = 0;
    Seconds now_ = 0;

    std::vector<JobRecord> records_;
    std::unordered_map<JobId, std::size_t> index_of_;
    std::vector<std::size_t> queue_;       // workload indices, arrival order
    std::map<JobId, std::size_t> running_; // job id -> workload index
    std::vector<Job> submitted_;
    std::set<Seconds> wakeups_;
    std::size_t finished_ = 0;
    bool dirty_ = false;  // state changed since the policy last ran
    int running_cpus_ = 0;
    int hard_held_ = 0;
    int soft_held_ = 0;

    ThresholdState thresholds_;
    SimResult result_;
};

SimResult Engine::run() {
    if (cluster_.total_cpus < 1) throw ConfigError("cluster needs at least one cpu");
    for (const auto& job : workload_.jobs) {
        if (job.cpus > cluster_.total_cpus) {
            throw ConfigError("job " + std::to_string(job.job_id) + " requests " + std::to_string(job.cpus) +
                              " cpus, cluster has " + std::to_string(cluster_.total_cpus));
        }
    }
    if (forecaster_) {
        forecaster_->validate();
        thresholds_ = forecaster_->thresholds;
    }

    records_.resize(workload_.size());
    for (std::size_t i = 0; i < workload_.size(); ++i) {
        const auto& job = workload_.jobs[i];
        records_[i] = {job.job_id, job.submit_time, -1, -1, job.cpus};
        index_of_.emplace(job.job_id, i);
        push(job.submit_time, EventKind::Submit, i);
    }
    if (forecaster_ && !workload_.empty()) push(forecaster_->tick, EventKind::ForecastTick, 0);

    while (finished_ < workload_.size()) {
        if (events_.empty()) throw InvariantViolation("simulation stalled with waiting jobs");
        now_ = events_.top().time;
        while (!events_.empty() && events_.top().time == now_) {
            const Event e = events_.top();
            events_.pop();
            dispatch(e);
        }
        if (!queue_.empty() && dirty_) consult_policy();
        dirty_ = false;
        if (running_cpus_ + hard_held_ + soft_held_ > cluster_.total_cpus) {
            throw InvariantViolation("capacity exceeded at t=" + std::to_string(now_));
        }
        result_.capacity.push_back({now_, running_cpus_, hard_held_, soft_held_, queue_.size()});
    }

    // No further arrivals can match what is still open.
    for (auto& r : result_.reservations) {
        if (r.unresolved()) {
            release_hold(r);
            r.status = ReservationStatus::Expired;
            ++result_.stats.expired;
            resolve(r, false);
        }
    }

    result_.trace.records = std::move(records_);
    result_.trace.cluster = cluster_;
    result_.trace.policy_name = std::string(policy_.name());
    result_.thresholds = thresholds_;
    return std::move(result_);
}

void Engine::dispatch(const Event& e) {
    // A tick alone changes nothing the policy sees unless it adds reservations.
    if (e.kind != EventKind::ForecastTick) dirty_ = true;
    switch (e.kind) {
        case EventKind::Finish: on_finish(e.index); break;
        case EventKind::ReservationExpire: on_reservation_expire(e.index); break;
        case EventKind::Submit: on_submit(e.index); break;
        case EventKind::ReservationStart: on_reservation_start(e.index); break;
        case EventKind::ForecastTick: on_tick(); break;
        case EventKind::Wakeup: wakeups_.erase(e.time); break;
    }
}

void Engine::on_finish(std::size_t job) {
    const auto& j = workload_.jobs[job];
    running_.erase(j.job_id);
    running_cpus_ -= j.cpus;
    records_[job].finish_time = now_;
    ++finished_;
}

void Engine::on_submit(std::size_t job) {
    const auto& j = workload_.jobs[job];
    submitted_.push_back(j);
    if (forecaster_) {
        if (auto match = match_arrival(j, result_.reservations, forecaster_->similarity)) {
            auto& r = result_.reservations[*match];
            const bool held = r.status == ReservationStatus::Holding;
            release_hold(r);
            r.status = ReservationStatus::Consumed;
            ++result_.stats.consumed;
            resolve(r, true);
            if (held && j.cpus <= available()) {
                ++result_.stats.immediate_starts;
                start_job(job);
                return;
            }
        }
    }
    queue_.push_back(job);
}

void Engine::on_reservation_start(std::size_t res) {
    auto& r = result_.reservations[res];
    if (r.status != ReservationStatus::Pending || !r.claims) return;
    if (r.hard) {
        while (available() < r.cpus && cancel_youngest_soft()) {
        }
        if (available() >= r.cpus) {
            r.status = ReservationStatus::Holding;
            hard_held_ += r.cpus;
        } else {
            // Running work overlaps the window; keep watching for feedback only.
            r.claims = false;
            r.hard = false;
            ++result_.stats.demoted;
        }
        return;
    }
    if (available() >= r.cpus) {
        r.status = ReservationStatus::Holding;
        soft_held_ += r.cpus;
    } else {
        r.status = ReservationStatus::Cancelled;
        r.claims = false;
        ++result_.stats.cancelled;
    }
}

void Engine::on_reservation_expire(std::size_t res) {
    auto& r = result_.reservations[res];
    if (!r.unresolved()) return;
    release_hold(r);
    r.status = ReservationStatus::Expired;
    ++result_.stats.expired;
    resolve(r, false);
}

ScheduleProfile Engine::occupancy_profile() const {
    ScheduleProfile profile(now_, cluster_.total_cpus);
    for (const auto& [id, idx] : running_) {
        const auto& rec = records_[idx];
        const auto& job = workload_.jobs[idx];
        profile.reserve(now_, std::max(rec.start_time + job.runtime_estimate, now_ + 1), job.cpus);
    }
    for (const auto& r : result_.reservations) {
        if (r.unresolved() && r.claims && r.hard) profile.reserve(r.window_start, r.window_end, r.cpus);
    }
    return profile;
}

void Engine::on_tick() {
    ++result_.forecast_ticks;
    const auto& cfg = *forecaster_;
    const auto predictions = source_ ? source_(submitted_, now_) : forecast(submitted_, now_, cfg).predictions;
    for (const auto& p : predictions) {
        if (p.cpus > cluster_.total_cpus || p.predicted_submit <= now_) continue;
        const bool duplicate = std::any_of(result_.reservations.begin(), result_.reservations.end(), [&](const Reservation& r) {
            return r.unresolved() && r.prediction.user_id == p.user_id && r.cpus == p.cpus &&
                   std::abs(r.prediction.predicted_submit - p.predicted_submit) <= r.half_width;
        });
        if (duplicate) continue;

        Reservation r;
        r.res_id = static_cast<int>(result_.reservations.size());
        r.prediction = p;
        r.cpus = p.cpus;
        r.half_width = cfg.half_width(p.period);
        r.window_start = std::max(now_, p.predicted_submit - r.half_width);
        r.window_end = p.predicted_submit + r.half_width;
        r.decision = decide(p.confidence, thresholds_);
        if (r.decision == Decision::HardReserve &&
            occupancy_profile().min_free(r.window_start, r.window_end) < r.cpus) {
            r.decision = Decision::SoftReserve;
            ++result_.stats.downgraded;
        }
        r.claims = r.decision != Decision::Ignore;
        r.hard = r.decision == Decision::HardReserve;

        ++result_.stats.created;
        if (r.claims) dirty_ = true;
        switch (r.decision) {
            case Decision::Ignore: ++result_.stats.ignored; break;
            case Decision::SoftReserve: ++result_.stats.soft; break;
            case Decision::HardReserve: ++result_.stats.hard; break;
        }
        const std::size_t index = result_.reservations.size();
        if (r.claims) push(r.window_start, EventKind::ReservationStart, index);
        push(r.window_end, EventKind::ReservationExpire, index);
        result_.reservations.push_back(std::move(r));
    }
    const bool pending = submitted_.size() < workload_.size() || !queue_.empty() || !running_.empty();
    if (pending) push(now_ + cfg.tick, EventKind::ForecastTick, 0);
}

SchedulerView Engine::view(std::vector<Job>& queue, std::vector<RunningJob>& running,
                           std::vector<ReservationBlock>& blocks) const {
    queue.reserve(queue_.size());
    for (auto idx : queue_) queue.push_back(workload_.jobs[idx]);
    running.reserve(running_.size());
    for (const auto& [id, idx] : running_) {
        const auto& rec = records_[idx];
        const auto& job = workload_.jobs[idx];
        running.push_back({id, job.cpus, rec.start_time, std::max(rec.start_time + job.runtime_estimate, now_ + 1)});
    }
    for (const auto& r : result_.reservations) {
        if (r.unresolved() && r.claims) {
            blocks.push_back({r.res_id, std::max(r.window_start, now_), r.window_end, r.cpus, r.hard});
        }
    }
    SchedulerView v;
    v.now = now_;
    v.total_cpus = cluster_.total_cpus;
    v.free_cpus = cluster_.total_cpus - running_cpus_ - hard_held_;
    v.queue = queue;
    v.running = running;
    v.reservations = blocks;
    return v;
}

void Engine::consult_policy() {
    std::vector<Job> queue;
    std::vector<RunningJob> running;
    std::vector<ReservationBlock> blocks;
    const SchedulerView v = view(queue, running, blocks);
    const PolicyDecision decision = policy_.select(v);

    std::unordered_set<JobId> queued;
    for (auto idx : queue_) queued.insert(workload_.jobs[idx].job_id);
    int demand = 0;
    std::unordered_set<JobId> chosen;
    for (JobId id : decision.start) {
        if (!queued.count(id) || !chosen.insert(id).second) {
            throw InvariantViolation(std::string(policy_.name()) + " started job " + std::to_string(id) +
                                     " which is not waiting");
        }
        demand += workload_.jobs[index_of_.at(id)].cpus;
    }
    if (demand > v.free_cpus) {
        throw InvariantViolation(std::string(policy_.name()) + " started " + std::to_string(demand) +
                                 " cpus with only " + std::to_string(v.free_cpus) + " free at t=" +
                                 std::to_string(now_));
    }
    if (!chosen.empty()) {
        std::erase_if(queue_, [&](std::size_t idx) { return chosen.count(workload_.jobs[idx].job_id) > 0; });
        for (JobId id : decision.start) start_job(index_of_.at(id));
        // Soft holds give way to real work, youngest first.
        while (available() < 0) {
            if (!cancel_youngest_soft()) throw InvariantViolation("capacity exceeded without soft holds to release");
        }
    }
    if (decision.wakeup && *decision.wakeup > now_ && wakeups_.insert(*decision.wakeup).second) {
        push(*decision.wakeup, EventKind::Wakeup, 0);
    }
}

void Engine::start_job(std::size_t job) {
    const auto& j = workload_.jobs[job];
    records_[job].start_time = now_;
    running_.emplace(j.job_id, job);
    running_cpus_ += j.cpus;
    push(now_ + j.runtime, EventKind::Finish, job);
}

void Engine::release_hold(Reservation& r) {
    if (r.status != ReservationStatus::Holding) return;
    if (r.hard) {
        hard_held_ -= r.cpus;
    } else {
        soft_held_ -= r.cpus;
    }
}

void Engine::resolve(Reservation& r, bool came_true) {
    result_.feedback.push_back(
        {r.prediction.pattern_id, r.prediction.predicted_submit, r.prediction.confidence, r.decision, came_true, now_});
    thresholds_ = update_thresholds(thresholds_, FeedbackEvent{r.prediction, came_true, now_}, r.prediction.confidence);
}

bool Engine::cancel_youngest_soft() {
    Reservation* youngest = nullptr;
    for (auto& r : result_.reservations) {
        if (r.status == ReservationStatus::Holding && !r.hard) youngest = &r;
    }
    if (youngest == nullptr) return false;
    soft_held_ -= youngest->cpus;
    youngest->status = ReservationStatus::Cancelled;
    youngest->claims = false;
    ++result_.stats.cancelled;
    return true;
}

}  // namespace

std::optional<std::size_t> match_arrival(const Job& job, std::span<const Reservation> reservations,
                                         const SimilarityParams& req) {
    std::optional<std::size_t> best;
    Seconds best_distance = 0;
    for (std::size_t i = 0; i < reservations.size(); ++i) {
        const auto& r = reservations[i];
        if (!r.unresolved()) continue;
        const auto& p = r.prediction;
        if (p.user_id != job.user_id) continue;
        if (!requirements_match(job.cpus, static_cast<double>(job.runtime_estimate), p.cpus,
                                static_cast<double>(p.runtime), req)) {
            continue;
        }
        const Seconds distance = std::abs(job.submit_time - p.predicted_submit);
        if (distance > r.half_width) continue;
        if (!best || distance < best_distance ||
            (distance == best_distance && r.res_id < reservations[*best].res_id)) {
            best = i;
            best_distance = distance;
        }
    }
    return best;
}

std::string write_trace(const SimTrace& trace) {
    std::ostringstream out;
    out << "job_id,submit,start,finish,cpus\n";
    for (const auto& r : trace.records) {
        out << r.job_id << ',' << r.submit_time << ',' << r.start_time << ',' << r.finish_time << ',' << r.cpus
            << '\n';
    }
    return out.str();
}

SimTrace parse_trace(std::string_view text, ClusterConfig cluster, std::string policy_name) {
    SimTrace trace;
    trace.cluster = cluster;
    trace.policy_name = std::move(policy_name);
    const auto lines = detail::split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = detail::trim(lines[i]);
        if (line.empty()) continue;
        if (i == 0 && line.rfind("job_id", 0) == 0) continue;
        const auto cells = detail::split_on(line, ',');
        if (cells.size() != 5) throw ParseError("trace row needs 5 cells", i + 1);
        long long v[5];
        for (int c = 0; c < 5; ++c) {
            auto parsed = detail::to_integer(cells[c]);
            if (!parsed) throw ParseError("trace cell is not an integer", i + 1);
            v[c] = *parsed;
        }
        trace.records.push_back({v[0], v[1], v[2], v[3], static_cast<int>(v[4])});
    }
    return trace;
}

std::string write_feedback(std::span<const FeedbackRecord> feedback) {
    std::ostringstream out;
    out << "pattern_id,predicted_submit,confidence,decision,came_true\n";
    for (const auto& f : feedback) {
        out << f.pattern_id << ',' << f.predicted_submit << ',' << f.confidence << ',' << to_string(f.decision) << ','
            << (f.came_true ? 1 : 0) << '\n';
    }
    return out.str();
}

SimResult run(const Workload& workload, const ClusterConfig& cluster, Policy& policy,
              const std::optional<ForecasterConfig>& forecaster) {
    Engine engine(workload, cluster, policy, forecaster);
    return engine.run();
}

SimResult run(const Workload& workload, const ClusterConfig& cluster, Policy& policy,
              const ForecasterConfig& forecaster, PredictionSource source) {
    Engine engine(workload, cluster, policy, forecaster, std::move(source));
    return engine.run();
}

SimResult run(const Workload& workload, const ClusterConfig& cluster, PolicyKind kind,
              const std::optional<ForecasterConfig>& forecaster) {
    auto policy = make_policy(kind);
    return run(workload, cluster, *policy, forecaster);
}

}  // namespace predictsched
