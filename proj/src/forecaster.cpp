#include "predictsched/forecaster.hpp"

#include <algorithm>
#include <map>

namespace predictsched {

void ForecasterConfig::validate() const {
    similarity.validate();
    thresholds.validate();
    if (max_layer < 1) throw ConfigError("max_layer must be at least 1");
    if (tick <= 0) throw ConfigError("forecast tick must be positive");
    if (horizon <= 0) throw ConfigError("forecast horizon must be positive");
    if (history_window < 0) throw ConfigError("history window must be non-negative");
    if (stale_periods <= 0) throw ConfigError("stale_periods must be positive");
    if (period_ratio_tol < 0) throw ConfigError("period_ratio_tol must be non-negative");
    if (window_fraction <= 0 || window_cap <= 0) throw ConfigError("reservation window must be positive");
}

Seconds ForecasterConfig::half_width(Seconds period) const {
    const auto w = static_cast<Seconds>(window_fraction * static_cast<double>(period));
    return std::clamp<Seconds>(w, 1, window_cap);
}

Forecast forecast(std::span<const Job> history, Seconds now, const ForecasterConfig& config) {
    std::vector<Job> visible;
    visible.reserve(history.size());
    for (const auto& job : history) {
        if (job.submit_time > now) continue;
        if (config.history_window > 0 && job.submit_time < now - config.history_window) continue;
        visible.push_back(job);
    }

    Forecast out;
    out.patterns = mine_patterns(visible, config.similarity, config.max_layer);
    if (out.patterns.layers.empty()) return out;

    SimilarityParams cohort = config.similarity;
    cohort.same_user = config.group_same_user;
    out.groups = group_patterns(out.patterns.layers.front(), config.period_ratio_tol, cohort);
    std::map<int, std::size_t> group_of;
    for (std::size_t g = 0; g < out.groups.size(); ++g) {
        for (int id : out.groups[g].member_pattern_ids) group_of[id] = g;
    }

    out.predictions = prolong(out.patterns, now, config.horizon, ProlongParams{config.stale_periods});
    for (auto& p : out.predictions) {
        auto it = group_of.find(p.source_pattern_id);
        p.confidence = it == group_of.end() ? 0.0 : confidence_factor(p.position, out.groups[it->second], config.mode);
    }
    return out;
}

}  // namespace predictsched
