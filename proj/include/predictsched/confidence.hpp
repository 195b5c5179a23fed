#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "predictsched/pattern.hpp"

namespace predictsched {

struct PatternGroup {
    std::vector<int> member_pattern_ids;
    std::vector<int> lengths;
    double mean_len = 0.0;
    double std_len = 0.0;  // population standard deviation

    void recompute();
};

/// Cohorts patterns with similar period (max/min ratio <= 1 + period_ratio_tol)
/// and requirements (SimilarityParams semantics), single pass in pattern_id
/// order against group medians.
std::vector<PatternGroup> group_patterns(std::span<const Pattern> patterns, double period_ratio_tol,
                                         const SimilarityParams& req_tol);

enum class ConfidenceMode { Survival, PdfNormalized };

ConfidenceMode parse_confidence_mode(std::string_view token);

double standard_normal_cdf(double z);

/// Confidence that a pattern of the cohort reaches `length`, counting the
/// predicted job. Survival: 1 - Phi((n - mean) / std). PdfNormalized:
/// exp(-(n - mean)^2 / (2 std^2)). A zero std degenerates to a step.
double confidence_factor(int length, const PatternGroup& group, ConfidenceMode mode = ConfidenceMode::Survival);

enum class Decision { Ignore, SoftReserve, HardReserve };

std::string_view to_string(Decision d);

struct ThresholdState {
    double t_low = 0.33;
    double t_high = 0.66;
    double step = 0.02;
    double min_gap = 0.05;

    // 0 <= t_low <= t_high - min_gap, t_high <= 1.
    bool valid(double eps = 1e-12) const;
    void validate() const;
};

// c < t_low -> Ignore; t_low <= c < t_high -> SoftReserve; otherwise HardReserve.
Decision decide(double confidence, const ThresholdState& thresholds);

struct FeedbackEvent {
    PredictedJob prediction;
    bool came_true = false;
    Seconds observed_time = 0;
};

/// Moves the range borders after a resolved prediction: a low-confidence hit
/// lowers t_low, a high-confidence miss raises t_high, and the two mirror
/// cases move them back. Medium-range outcomes change nothing. Results are
/// clamped to [0, 1] and keep min_gap between the borders.
ThresholdState update_thresholds(const ThresholdState& state, const FeedbackEvent& feedback,
                                 double confidence_at_decision);

}  // namespace predictsched
