#include <gtest/gtest.h>

#include <set>

#include "predictsched/pattern.hpp"
#include "predictsched/synth.hpp"

using namespace predictsched;

namespace {

constexpr Seconds kDay = 86400;

std::vector<Job> at_times(const std::vector<Seconds>& times, int user = 1, int cpus = 4, Seconds runtime = 3600,
                          JobId first_id = 1) {
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < times.size(); ++i) {
        Job j;
        j.job_id = first_id + static_cast<JobId>(i);
        j.user_id = user;
        j.submit_time = times[i];
        j.runtime = j.runtime_estimate = runtime;
        j.cpus = cpus;
        jobs.push_back(j);
    }
    return jobs;
}

}  // namespace

TEST(GroupSimilarJobs, IdenticalJobsFormOneCluster) {
    const auto jobs = at_times({0, 10, 20});
    const auto clusters = group_similar_jobs(jobs, {});
    ASSERT_EQ(clusters.size(), 1u);
    EXPECT_EQ(clusters[0].size(), 3u);
}

TEST(GroupSimilarJobs, SplitsByUser) {
    auto jobs = at_times({0, 10}, 1);
    auto more = at_times({5}, 2, 4, 3600, 10);
    jobs.insert(jobs.end(), more.begin(), more.end());
    EXPECT_EQ(group_similar_jobs(jobs, {}).size(), 2u);
    SimilarityParams any_user;
    any_user.same_user = false;
    EXPECT_EQ(group_similar_jobs(jobs, any_user).size(), 1u);
}

TEST(GroupSimilarJobs, ExactCpuTolerance) {
    auto jobs = at_times({0, 10, 20});
    jobs[2].cpus = 5;
    const auto clusters = group_similar_jobs(jobs, {});
    ASSERT_EQ(clusters.size(), 2u);
    EXPECT_EQ(clusters[0].size(), 2u);
    EXPECT_EQ(clusters[1][0].cpus, 5);
}

TEST(RequirementsMatch, RelativeTolerance) {
    SimilarityParams p;
    EXPECT_TRUE(requirements_match(4, 1000, 4, 1250, p));   // 250 <= 0.25 * 1250
    EXPECT_FALSE(requirements_match(4, 1000, 4, 1400, p));
    EXPECT_FALSE(requirements_match(4, 1000, 5, 1000, p));
}

TEST(DetectPatterns, DailyTriple) {
    const auto jobs = at_times({0, kDay, 2 * kDay});
    const auto patterns = detect_patterns(jobs, {});
    ASSERT_EQ(patterns.size(), 1u);
    EXPECT_EQ(patterns[0].period, kDay);
    EXPECT_EQ(patterns[0].length(), 3u);
    EXPECT_EQ(patterns[0].rep_cpus, 4);
    EXPECT_EQ(patterns[0].rep_runtime, 3600);
}

TEST(DetectPatterns, OutlierExcluded) {
    const auto jobs = at_times({0, kDay, 2 * kDay, 500000});
    const auto patterns = detect_patterns(jobs, {});
    ASSERT_EQ(patterns.size(), 1u);
    EXPECT_EQ(patterns[0].length(), 3u);
    EXPECT_EQ(patterns[0].last_time(), 2 * kDay);
}

TEST(DetectPatterns, TooFewJobs) {
    EXPECT_TRUE(detect_patterns(at_times({0, kDay}), {}).empty());
}

TEST(DetectPatterns, GapsRespectJitterBound) {
    const auto jobs = at_times({0, 3000, kDay, kDay + 5000, 2 * kDay + 2000, 3 * kDay - 1000, 4 * kDay + 100, 400000});
    SimilarityParams params;
    for (const auto& p : detect_patterns(jobs, params)) {
        for (std::size_t i = 1; i < p.length(); ++i) {
            const double gap = static_cast<double>(p.occurrences[i].submit_time - p.occurrences[i - 1].submit_time);
            EXPECT_LE(std::abs(gap - static_cast<double>(p.period)), params.period_jitter * p.period * 1.0001 + 1);
        }
    }
}

TEST(MinePatterns, JobsBelongToOnePatternPerLayer) {
    std::vector<Seconds> times;
    for (int k = 0; k < 12; ++k) times.push_back(k * kDay);
    for (int k = 0; k < 12; ++k) times.push_back(k * kDay + 600);
    auto jobs = at_times(times);
    const auto set = mine_patterns(jobs, {});
    std::set<JobId> seen;
    for (const auto& p : set.layers.at(0)) {
        for (const auto& o : p.occurrences) EXPECT_TRUE(seen.insert(o.id).second);
    }
    // Seeding pairs the first job with its 600 s neighbour, which fails and
    // strands it; every other job is chained.
    EXPECT_EQ(seen.size(), 23u);
    EXPECT_EQ(seen.count(1), 0u);
}

TEST(MinePatterns, ZeroJitterSynthRecoveredExactly) {
    SynthSpec spec;
    spec.horizon = 60 * kDay;
    for (int t = 0; t < 4; ++t) {
        PatternTemplate tpl;
        tpl.user_id = t + 1;
        tpl.cpus = 2 + t;
        tpl.runtime = 1800 * (t + 1);
        tpl.period = (t + 1) * 43200;
        tpl.start_offset = 1000 * t;
        tpl.occurrences = 10;
        spec.templates.push_back(tpl);
    }
    const auto synth = synth_workload(spec, 3);
    const auto set = mine_patterns(synth.workload.jobs, {}, 1);
    ASSERT_EQ(set.layers.size(), 1u);
    ASSERT_EQ(set.layers[0].size(), 4u);
    for (const auto& p : set.layers[0]) {
        const int t = p.user_id - 1;
        EXPECT_EQ(p.period, spec.templates[t].period);
        EXPECT_EQ(p.length(), 10u);
        std::set<JobId> truth;
        for (const auto& g : synth.ground_truth) {
            if (g.template_id == t) truth.insert(g.job_id);
        }
        for (const auto& o : p.occurrences) EXPECT_TRUE(truth.count(o.id));
    }
}

TEST(BuildLayers, HalfYearlyBlocksOfDailyPatterns) {
    std::vector<Seconds> times;
    for (int b = 0; b < 4; ++b) {
        for (int d = 0; d < 5; ++d) times.push_back(b * 180 * kDay + d * kDay);
    }
    const auto set = mine_patterns(at_times(times), {}, 3);
    ASSERT_GE(set.layers.size(), 2u);
    ASSERT_EQ(set.layers[0].size(), 4u);
    ASSERT_EQ(set.layers[1].size(), 1u);
    const auto& top = set.layers[1][0];
    EXPECT_EQ(top.layer, 2);
    EXPECT_EQ(top.length(), 4u);
    EXPECT_NEAR(static_cast<double>(top.period), 180.0 * kDay, kDay);
    EXPECT_EQ(top.children.size(), 4u);
}

TEST(BuildLayers, SingleOrEmptyInput) {
    EXPECT_EQ(mine_patterns(at_times({0, kDay, 2 * kDay}), {}, 3).layers.size(), 1u);
    EXPECT_EQ(build_layers({}, {}, 3).total(), 0u);
}

TEST(Prolong, NextOccurrence) {
    const auto set = mine_patterns(at_times({0, kDay, 2 * kDay}), {});
    const auto pred = prolong(set, 2 * kDay, kDay);
    ASSERT_EQ(pred.size(), 1u);
    EXPECT_EQ(pred[0].predicted_submit, 3 * kDay);
    EXPECT_EQ(pred[0].cpus, 4);
    EXPECT_EQ(pred[0].runtime, 3600);
    EXPECT_EQ(pred[0].position, 4);
    EXPECT_DOUBLE_EQ(pred[0].confidence, 0.0);
}

TEST(Prolong, StalePatternDropped) {
    const auto set = mine_patterns(at_times({0, kDay, 2 * kDay}), {});
    EXPECT_TRUE(prolong(set, 10 * kDay, kDay).empty());
}

TEST(Prolong, ThreePeriods) {
    const auto set = mine_patterns(at_times({0, kDay, 2 * kDay}), {});
    const auto pred = prolong(set, 2 * kDay, 3 * kDay);
    ASSERT_EQ(pred.size(), 3u);
    for (int k = 0; k < 3; ++k) EXPECT_EQ(pred[k].predicted_submit, (3 + k) * kDay);
}

TEST(Prolong, LayerTwoSpawnsChildBlock) {
    std::vector<Seconds> times;
    for (int b = 0; b < 3; ++b) {
        for (int d = 0; d < 5; ++d) times.push_back(b * 30 * kDay + d * kDay);
    }
    const auto set = mine_patterns(at_times(times), {}, 2);
    ASSERT_EQ(set.layers.size(), 2u);
    const Seconds now = 64 * kDay;
    const auto pred = prolong(set, now, 40 * kDay);
    std::vector<Seconds> block;
    for (const auto& p : pred) {
        EXPECT_GT(p.predicted_submit, now);
        EXPECT_LE(p.predicted_submit, now + 40 * kDay);
        if (p.layer == 2) block.push_back(p.predicted_submit);
    }
    ASSERT_EQ(block.size(), 5u);
    for (int d = 0; d < 5; ++d) EXPECT_EQ(block[d], 90 * kDay + d * kDay);
}

TEST(Prolong, StrictlyIncreasingPerPattern) {
    std::vector<Seconds> times;
    for (int k = 0; k < 6; ++k) times.push_back(k * 3600);
    const auto set = mine_patterns(at_times(times), {});
    const auto pred = prolong(set, 5 * 3600, 10 * 3600);
    for (std::size_t i = 1; i < pred.size(); ++i) {
        if (pred[i].pattern_id == pred[i - 1].pattern_id) {
            EXPECT_GT(pred[i].predicted_submit, pred[i - 1].predicted_submit);
        }
    }
    EXPECT_EQ(pred.size(), 10u);
}

TEST(Predictions, CsvHeader) {
    PredictedJob p;
    p.pattern_id = 3;
    p.predicted_submit = 100;
    p.cpus = 2;
    p.runtime = 50;
    p.confidence = 0.5;
    const PredictedJob arr[] = {p};
    EXPECT_EQ(write_predictions(arr), "pattern_id,layer,predicted_submit,cpus,runtime,confidence\n3,1,100,2,50,0.5\n");
}
