#include "predictsched/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stats_util.hpp"

namespace predictsched {

void PatternGroup::recompute() {
    if (lengths.empty()) {
        mean_len = std_len = 0.0;
        return;
    }
    const double n = static_cast<double>(lengths.size());
    mean_len = std::accumulate(lengths.begin(), lengths.end(), 0.0) / n;
    double ss = 0.0;
    for (int l : lengths) ss += (l - mean_len) * (l - mean_len);
    std_len = std::sqrt(ss / n);
}

std::vector<PatternGroup> group_patterns(std::span<const Pattern> patterns, double period_ratio_tol,
                                         const SimilarityParams& req_tol) {
    std::vector<const Pattern*> ordered;
    for (const auto& p : patterns) ordered.push_back(&p);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const Pattern* a, const Pattern* b) { return a->pattern_id < b->pattern_id; });

    struct Accumulator {
        PatternGroup group;
        int user_id;
        detail::RunningMedian period, cpus, runtime;
    };
    std::vector<Accumulator> acc;
    for (const Pattern* p : ordered) {
        Accumulator* home = nullptr;
        for (auto& a : acc) {
            if (req_tol.same_user && a.user_id != p->user_id) continue;
            const double per = a.period.value();
            const double ratio = std::max<double>(per, p->period) / std::min<double>(per, p->period);
            if (ratio > 1.0 + period_ratio_tol) continue;
            if (!requirements_match(p->rep_cpus, static_cast<double>(p->rep_runtime), a.cpus.value(),
                                    a.runtime.value(), req_tol)) {
                continue;
            }
            home = &a;
            break;
        }
        if (home == nullptr) {
            acc.push_back(Accumulator{{}, p->user_id, {}, {}, {}});
            home = &acc.back();
        }
        home->group.member_pattern_ids.push_back(p->pattern_id);
        home->group.lengths.push_back(static_cast<int>(p->length()));
        home->period.insert(static_cast<double>(p->period));
        home->cpus.insert(p->rep_cpus);
        home->runtime.insert(static_cast<double>(p->rep_runtime));
    }

    std::vector<PatternGroup> groups;
    groups.reserve(acc.size());
    for (auto& a : acc) {
        a.group.recompute();
        groups.push_back(std::move(a.group));
    }
    return groups;
}

ConfidenceMode parse_confidence_mode(std::string_view token) {
    if (token == "survival") return ConfidenceMode::Survival;
    if (token == "pdf" || token == "pdf_normalized") return ConfidenceMode::PdfNormalized;
    throw ConfigError("unknown confidence mode '" + std::string(token) + "'");
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double confidence_factor(int length, const PatternGroup& group, ConfidenceMode mode) {
    const double n = length;
    if (group.std_len <= 0.0) {
        if (mode == ConfidenceMode::Survival) return n <= group.mean_len ? 1.0 : 0.0;
        return n == group.mean_len ? 1.0 : 0.0;
    }
    const double z = (n - group.mean_len) / group.std_len;
    if (mode == ConfidenceMode::Survival) return std::clamp(0.5 * std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
    return std::exp(-0.5 * z * z);
}

std::string_view to_string(Decision d) {
    switch (d) {
        case Decision::Ignore: return "ignore";
        case Decision::SoftReserve: return "soft";
        case Decision::HardReserve: return "hard";
    }
    return "?";
}

bool ThresholdState::valid(double eps) const {
    return t_low >= -eps && t_low <= t_high - min_gap + eps && t_high <= 1.0 + eps && step >= 0.0 &&
           min_gap >= 0.0;
}

void ThresholdState::validate() const {
    if (!valid()) throw ConfigError("thresholds must satisfy 0 <= t_low <= t_high - min_gap, t_high <= 1");
}

Decision decide(double confidence, const ThresholdState& thresholds) {
    if (confidence < thresholds.t_low) return Decision::Ignore;
    if (confidence < thresholds.t_high) return Decision::SoftReserve;
    return Decision::HardReserve;
}

ThresholdState update_thresholds(const ThresholdState& state, const FeedbackEvent& feedback,
                                 double confidence_at_decision) {
    ThresholdState next = state;
    const double c = confidence_at_decision;
    const bool low = c < state.t_low;
    const bool high = c >= state.t_high;
    if (low) {
        const double moved = feedback.came_true ? state.t_low - state.step : state.t_low + state.step;
        next.t_low = std::clamp(moved, 0.0, std::max(0.0, state.t_high - state.min_gap));
    } else if (high) {
        const double moved = feedback.came_true ? state.t_high - state.step : state.t_high + state.step;
        next.t_high = std::clamp(moved, std::min(1.0, state.t_low + state.min_gap), 1.0);
    }
    return next;
}

}  // namespace predictsched
