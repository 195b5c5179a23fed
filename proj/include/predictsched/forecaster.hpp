#pragma once

#include <span>
#include <vector>

#include "predictsched/confidence.hpp"
#include "predictsched/pattern.hpp"

namespace predictsched {

struct ForecasterConfig {
    SimilarityParams similarity;
    int max_layer = 3;
    Seconds tick = 86400;
    Seconds horizon = 86400;
    Seconds history_window = 0;  // 0: mine the whole history
    double stale_periods = 2.0;
    ConfidenceMode mode = ConfidenceMode::Survival;
    ThresholdState thresholds;
    double period_ratio_tol = 0.25;
    bool group_same_user = false;  // cohorts may span users
    double window_fraction = 0.25; // reservation half-width as a fraction of period
    Seconds window_cap = 6 * 3600;

    void validate() const;
    Seconds half_width(Seconds period) const;
};

struct Forecast {
    PatternSet patterns;
    std::vector<PatternGroup> groups;
    std::vector<PredictedJob> predictions;  // confidence filled
};

/// Mines `history` (jobs submitted at or before `now`), prolongs live
/// patterns over (now, now + horizon] and scores each prediction against
/// the cohort of its layer-1 source pattern.
Forecast forecast(std::span<const Job> history, Seconds now, const ForecasterConfig& config);

}  // namespace predictsched
