#include <gtest/gtest.h>

#include <algorithm>

#include "predictsched/metrics.hpp"

using namespace predictsched;

namespace {

SimTrace trace(std::vector<JobRecord> records, int cpus) {
    SimTrace t;
    t.records = std::move(records);
    t.cluster.total_cpus = cpus;
    return t;
}

}  // namespace

TEST(Makespan, Basics) {
    EXPECT_EQ(makespan(trace({{1, 0, 0, 10, 1}, {2, 0, 10, 15, 1}}, 1)), 15);
    EXPECT_EQ(makespan(trace({{1, 0, 0, 10, 1}}, 1)), 10);
    EXPECT_EQ(makespan(trace({{2, 0, 10, 15, 1}, {1, 0, 0, 10, 1}}, 1)), 15);
    EXPECT_THROW(makespan(trace({}, 1)), Error);
}

TEST(Utilization, SoleJobIsFull) {
    EXPECT_DOUBLE_EQ(resource_utilization(trace({{1, 0, 0, 10, 4}}, 8)), 100.0);
}

TEST(Utilization, TwoJobFcfs) {
    EXPECT_DOUBLE_EQ(resource_utilization(trace({{1, 0, 0, 10, 1}, {2, 0, 10, 15, 1}}, 1)), 100.0);
}

TEST(Utilization, ArrivalGapExcluded) {
    // B arrives at 12 after A finished at 10: [10,12) has nothing present.
    EXPECT_DOUBLE_EQ(resource_utilization(trace({{1, 0, 0, 10, 1}, {2, 12, 12, 17, 1}}, 1)), 100.0);
}

TEST(Utilization, ForcedIdleCounts) {
    // B waits queued over [10,12): active 0, requested 1.
    const double u = resource_utilization(trace({{1, 0, 0, 10, 1}, {2, 5, 12, 15, 1}}, 1));
    EXPECT_NEAR(u, 100.0 * 13.0 / 15.0, 1e-9);
}

TEST(Utilization, CappedByAvailable) {
    // 2 of 4 cpus busy while 6 are requested: u = 2 / min(4, 6).
    const double u = resource_utilization(trace({{1, 0, 0, 10, 2}, {2, 0, 10, 20, 4}}, 4));
    EXPECT_NEAR(u, 100.0 * (10 * 0.5 + 10 * 1.0) / 20.0, 1e-9);
}

TEST(Slowdown, Basics) {
    EXPECT_DOUBLE_EQ(slowdown(trace({{1, 0, 0, 10, 1}}, 1)), 1.0);
    EXPECT_DOUBLE_EQ(slowdown(trace({{1, 0, 0, 10, 1}, {2, 0, 10, 15, 1}}, 1)), 4.0);
    EXPECT_DOUBLE_EQ(slowdown(trace({{1, 0, 0, 1, 1}, {2, 3, 3, 5, 1}, {3, 9, 9, 20, 1}}, 1)), 3.0);
    EXPECT_THROW(slowdown(trace({{1, 0, 4, 4, 1}}, 1)), Error);
}

TEST(Objectives, InvariantUnderRelabeling) {
    auto t = trace({{1, 0, 0, 10, 2}, {2, 1, 3, 9, 1}, {3, 2, 10, 14, 3}}, 4);
    const auto a = evaluate(t);
    for (auto& r : t.records) r.job_id = 100 - r.job_id;
    std::reverse(t.records.begin(), t.records.end());
    const auto b = evaluate(t);
    EXPECT_DOUBLE_EQ(a.makespan, b.makespan);
    EXPECT_DOUBLE_EQ(a.utilization, b.utilization);
    EXPECT_DOUBLE_EQ(a.slowdown, b.slowdown);
}

TEST(PeakCpus, Overlap) {
    EXPECT_EQ(peak_cpus(trace({{1, 0, 0, 10, 2}, {2, 0, 5, 15, 3}, {3, 0, 10, 12, 4}}, 8)), 7);
}
