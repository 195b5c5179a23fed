#include <gtest/gtest.h>

#include <map>
#include <random>

#include "predictsched/metrics.hpp"
#include "predictsched/simulator.hpp"
#include "predictsched/synth.hpp"

using namespace predictsched;

namespace {

Job job(JobId id, Seconds submit, Seconds runtime, int cpus, int user = 1) {
    Job j;
    j.job_id = id;
    j.user_id = user;
    j.submit_time = submit;
    j.runtime = j.runtime_estimate = runtime;
    j.cpus = cpus;
    return j;
}

std::map<JobId, Seconds> starts(const SimTrace& t) {
    std::map<JobId, Seconds> out;
    for (const auto& r : t.records) out[r.job_id] = r.start_time;
    return out;
}

Workload random_workload(std::uint64_t seed, int n, int max_cpus, Seconds max_runtime, Seconds spread) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> cpus(1, max_cpus);
    std::uniform_int_distribution<Seconds> rt(1, max_runtime);
    std::uniform_int_distribution<Seconds> at(0, spread);
    std::uniform_real_distribution<double> misestimate(0.5, 2.0);
    std::vector<Job> jobs;
    for (int i = 0; i < n; ++i) {
        auto j = job(i + 1, at(rng), rt(rng), cpus(rng), 1 + i % 5);
        j.runtime_estimate = std::max<Seconds>(1, static_cast<Seconds>(j.runtime * misestimate(rng)));
        jobs.push_back(j);
    }
    return make_workload(jobs);
}

// Checks sum of overlapping cpus <= total over the trace.
bool capacity_respected(const SimTrace& t) {
    std::map<Seconds, int> delta;
    for (const auto& r : t.records) {
        delta[r.start_time] += r.cpus;
        delta[r.finish_time] -= r.cpus;
    }
    int used = 0;
    for (const auto& [time, d] : delta) {
        used += d;
        if (used > t.cluster.total_cpus) return false;
    }
    return true;
}

PredictedJob predicted(int user, Seconds at, int cpus, Seconds runtime, Seconds period, double confidence) {
    PredictedJob p;
    p.pattern_id = 1;
    p.user_id = user;
    p.predicted_submit = at;
    p.cpus = cpus;
    p.runtime = runtime;
    p.period = period;
    p.source_pattern_id = 1;
    p.confidence = confidence;
    return p;
}

// One prediction at t=150 with a +-50 window, announced at the first tick.
SimResult run_with_reservation(const Workload& w, double confidence) {
    ForecasterConfig cfg;
    cfg.tick = 10;
    auto source = [confidence](std::span<const Job>, Seconds now) {
        std::vector<PredictedJob> out;
        if (now == 10) out.push_back(predicted(99, 150, 4, 100, 200, confidence));
        return out;
    };
    auto policy = make_policy(PolicyKind::DLPredictive);
    return run(w, {4}, *policy, cfg, source);
}

}  // namespace

TEST(Simulator, SingleJob) {
    const auto r = run(make_workload({job(1, 0, 10, 4)}), {8}, PolicyKind::FCFS);
    ASSERT_EQ(r.trace.records.size(), 1u);
    EXPECT_EQ(r.trace.records[0], (JobRecord{1, 0, 0, 10, 4}));
}

TEST(Simulator, TwoJobFcfs) {
    const auto r = run(make_workload({job(1, 0, 10, 1), job(2, 0, 5, 1)}), {1}, PolicyKind::FCFS);
    EXPECT_EQ(r.trace.records[0], (JobRecord{1, 0, 0, 10, 1}));
    EXPECT_EQ(r.trace.records[1], (JobRecord{2, 0, 10, 15, 1}));
}

TEST(Simulator, Deterministic) {
    const auto w = random_workload(5, 200, 8, 500, 5000);
    for (auto kind : kAllPolicies) {
        const auto a = write_trace(run(w, {16}, kind).trace);
        const auto b = write_trace(run(w, {16}, kind).trace);
        EXPECT_EQ(a, b) << policy_token(kind);
    }
}

TEST(Simulator, RejectsOversizedJob) {
    EXPECT_THROW(run(make_workload({job(1, 0, 10, 5)}), {4}, PolicyKind::FCFS), ConfigError);
}

TEST(Simulator, TraceInvariantsAllPolicies) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto w = random_workload(seed, 150, 6, 300, 3000);
        for (auto kind : kAllPolicies) {
            const auto r = run(w, {8}, kind);
            EXPECT_TRUE(capacity_respected(r.trace)) << policy_token(kind);
            for (std::size_t i = 0; i < w.size(); ++i) {
                const auto& rec = r.trace.records[i];
                EXPECT_EQ(rec.job_id, w.jobs[i].job_id);
                EXPECT_GE(rec.start_time, rec.submit_time);
                EXPECT_EQ(rec.finish_time, rec.start_time + w.jobs[i].runtime);
            }
            for (const auto& s : r.capacity) EXPECT_LE(s.running_cpus + s.hard_held + s.soft_held, 8);
        }
    }
}

TEST(Simulator, EdfEqualsFcfsWithoutDeadlines) {
    const auto w = random_workload(17, 300, 8, 400, 4000);
    EXPECT_EQ(write_trace(run(w, {8}, PolicyKind::EDF).trace), write_trace(run(w, {8}, PolicyKind::FCFS).trace));
}

TEST(Simulator, FcfsWorkConservingOnOneCpu) {
    // Every instance of up to 4 jobs with runtimes 1..3 and submits 0..3.
    for (int code = 0; code < 12 * 12 * 12 * 12; ++code) {
        std::vector<Job> jobs;
        int c = code;
        for (int i = 0; i < 4; ++i) {
            const int v = c % 12;
            c /= 12;
            jobs.push_back(job(i + 1, v / 3, 1 + v % 3, 1));
        }
        const auto r = run(make_workload(jobs), {1}, PolicyKind::FCFS);
        // Idle time while work waits would show as a start later than both
        // its submit and the previous finish.
        Seconds free_at = 0;
        auto recs = r.trace.records;
        std::sort(recs.begin(), recs.end(), [](auto& a, auto& b) { return a.start_time < b.start_time; });
        for (const auto& rec : recs) {
            ASSERT_EQ(rec.start_time, std::max(free_at, rec.submit_time));
            free_at = rec.finish_time;
        }
    }
}

TEST(Simulator, NoLookahead) {
    SynthSpec spec;
    spec.horizon = 20 * 86400;
    for (int t = 0; t < 3; ++t) {
        PatternTemplate tpl;
        tpl.user_id = t + 1;
        tpl.cpus = 4 + 2 * t;
        tpl.runtime = 7200;
        tpl.period = 86400;
        tpl.start_offset = 3600 * t;
        tpl.occurrences = 20;
        tpl.submit_jitter = 0.01;
        spec.templates.push_back(tpl);
    }
    spec.background_rate = 1.0 / 5000;
    const auto full = synth_workload(spec, 8).workload;
    const Seconds cut = 9 * 86400;
    std::vector<Job> head;
    for (const auto& j : full.jobs) {
        if (j.submit_time <= cut) head.push_back(j);
    }
    const auto truncated = make_workload(head);
    for (auto kind : {PolicyKind::FCFS, PolicyKind::ConservativeBF, PolicyKind::EasyBF, PolicyKind::BestGap,
                      PolicyKind::DLPredictive}) {
        std::optional<ForecasterConfig> cfg;
        if (kind == PolicyKind::DLPredictive) cfg = ForecasterConfig{};
        const auto a = starts(run(full, {16}, kind, cfg).trace);
        const auto b = starts(run(truncated, {16}, kind, cfg).trace);
        for (const auto& [id, start] : b) {
            if (start <= cut) {
                EXPECT_EQ(a.at(id), start) << policy_token(kind) << " job " << id;
            }
        }
    }
}

TEST(MatchArrival, WindowAndNearestCenter) {
    ForecasterConfig cfg;
    Reservation r;
    r.res_id = 0;
    r.prediction = predicted(7, 259200, 4, 3600, 86400, 0.5);
    r.half_width = cfg.half_width(86400);
    EXPECT_EQ(r.half_width, 21600);
    std::vector<Reservation> rs = {r};
    auto j = job(1, 259000, 3600, 4, 7);
    EXPECT_EQ(match_arrival(j, rs, cfg.similarity), std::optional<std::size_t>(0));
    j.submit_time = 300000;
    EXPECT_FALSE(match_arrival(j, rs, cfg.similarity).has_value());

    Reservation second = r;
    second.res_id = 1;
    second.prediction.predicted_submit = 270000;
    rs.push_back(second);
    j.submit_time = 268000;
    EXPECT_EQ(match_arrival(j, rs, cfg.similarity), std::optional<std::size_t>(1));
    j.user_id = 8;
    EXPECT_FALSE(match_arrival(j, rs, cfg.similarity).has_value());
}

TEST(DlReservations, HardBlocksNonMatchingJob) {
    const auto r = run_with_reservation(make_workload({job(1, 90, 50, 4)}), 0.9);
    EXPECT_EQ(r.trace.records[0].start_time, 200);
    ASSERT_EQ(r.reservations.size(), 1u);
    EXPECT_TRUE(r.reservations[0].hard);
    ASSERT_EQ(r.feedback.size(), 1u);
    EXPECT_FALSE(r.feedback[0].came_true);
}

TEST(DlReservations, SoftReleasedForRealWork) {
    const auto r = run_with_reservation(make_workload({job(1, 90, 50, 4)}), 0.5);
    EXPECT_EQ(r.trace.records[0].start_time, 90);
    EXPECT_EQ(r.reservations[0].status, ReservationStatus::Cancelled);
    EXPECT_TRUE(r.feedback.empty());
}

TEST(DlReservations, MatchingJobConsumesHold) {
    const auto r = run_with_reservation(make_workload({job(1, 110, 100, 4, 99)}), 0.9);
    EXPECT_EQ(r.trace.records[0].start_time, 110);
    EXPECT_EQ(r.reservations[0].status, ReservationStatus::Consumed);
    ASSERT_EQ(r.feedback.size(), 1u);
    EXPECT_TRUE(r.feedback[0].came_true);
    EXPECT_EQ(r.stats.immediate_starts, 1u);
}

TEST(DlReservations, LowConfidenceOnlyWatched) {
    const auto r = run_with_reservation(make_workload({job(1, 90, 50, 4)}), 0.1);
    EXPECT_EQ(r.trace.records[0].start_time, 90);
    EXPECT_EQ(r.stats.ignored, 1u);
    ASSERT_EQ(r.feedback.size(), 1u);
    EXPECT_EQ(r.feedback[0].decision, Decision::Ignore);
    // A low-confidence miss raises t_low.
    EXPECT_NEAR(r.thresholds.t_low, 0.35, 1e-12);
}

TEST(DlReservations, LifecycleEndsOnce) {
    SynthSpec spec;
    spec.horizon = 15 * 86400;
    for (int t = 0; t < 4; ++t) {
        PatternTemplate tpl;
        tpl.user_id = t + 1;
        tpl.cpus = 2 + t;
        tpl.runtime = 5400;
        tpl.period = 43200 * (1 + t % 2);
        tpl.start_offset = 1800 * t;
        tpl.occurrences = 25;
        tpl.submit_jitter = 0.01;
        tpl.runtime_jitter = 0.01;
        spec.templates.push_back(tpl);
    }
    spec.background_rate = 1.0 / 4000;
    const auto w = synth_workload(spec, 4).workload;
    ForecasterConfig cfg;
    cfg.tick = 21600;
    const auto r = run(w, {16}, PolicyKind::DLPredictive, cfg);
    EXPECT_GT(r.stats.created, 0u);
    std::size_t resolved = 0;
    for (const auto& res : r.reservations) {
        EXPECT_FALSE(res.unresolved());
        if (res.status != ReservationStatus::Cancelled) ++resolved;
    }
    EXPECT_EQ(r.feedback.size(), resolved);
    EXPECT_EQ(r.stats.consumed + r.stats.expired + r.stats.cancelled, r.stats.created);
    EXPECT_TRUE(r.thresholds.valid());
    EXPECT_TRUE(capacity_respected(r.trace));
}

TEST(DlReservations, NoPredictionsMatchesConservative) {
    const auto w = random_workload(23, 250, 8, 600, 6000);
    ForecasterConfig cfg;
    cfg.tick = 500;
    auto none = [](std::span<const Job>, Seconds) { return std::vector<PredictedJob>{}; };
    auto dl = make_policy(PolicyKind::DLPredictive);
    const auto a = run(w, {8}, *dl, cfg, none);
    const auto b = run(w, {8}, PolicyKind::ConservativeBF);
    EXPECT_EQ(write_trace(a.trace), write_trace(b.trace));
}

TEST(Trace, CsvRoundTrip) {
    const auto r = run(make_workload({job(1, 0, 10, 1), job(2, 0, 5, 1)}), {1}, PolicyKind::FCFS);
    const auto text = write_trace(r.trace);
    EXPECT_EQ(text, "job_id,submit,start,finish,cpus\n1,0,0,10,1\n2,0,10,15,1\n");
    EXPECT_EQ(parse_trace(text).records, r.trace.records);
}
