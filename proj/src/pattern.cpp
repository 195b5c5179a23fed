#include "predictsched/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "stats_util.hpp"

namespace predictsched {

namespace {

bool within(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(a, b); }

Seconds round_seconds(double v) { return static_cast<Seconds>(std::llround(v)); }

struct Cluster {
    int user_id;
    detail::RunningMedian cpus;
    detail::RunningMedian runtime;
    std::vector<Job> jobs;
};

}  // namespace

void SimilarityParams::validate() const {
    auto fraction = [](double v) { return v >= 0.0 && v < 1.0; };
    if (!fraction(cpu_tol) || !fraction(runtime_tol) || !fraction(period_jitter)) {
        throw ConfigError("similarity tolerances must lie in [0, 1)");
    }
    if (min_occurrences < 3) throw ConfigError("min_occurrences must be at least 3");
}

bool requirements_match(double cpus_a, double runtime_a, double cpus_b, double runtime_b,
                        const SimilarityParams& params) {
    return within(cpus_a, cpus_b, params.cpu_tol) && within(runtime_a, runtime_b, params.runtime_tol);
}

const Pattern* PatternSet::find(int pattern_id) const {
    for (const auto& layer : layers) {
        for (const auto& p : layer) {
            if (p.pattern_id == pattern_id) return &p;
        }
    }
    return nullptr;
}

std::vector<Pattern> PatternSet::all() const {
    std::vector<Pattern> out;
    for (const auto& layer : layers) out.insert(out.end(), layer.begin(), layer.end());
    return out;
}

std::size_t PatternSet::total() const {
    std::size_t n = 0;
    for (const auto& layer : layers) n += layer.size();
    return n;
}

std::vector<std::vector<Job>> group_similar_jobs(std::span<const Job> jobs, const SimilarityParams& params) {
    std::vector<Job> ordered(jobs.begin(), jobs.end());
    std::stable_sort(ordered.begin(), ordered.end(), [](const Job& a, const Job& b) {
        return std::tie(a.submit_time, a.job_id) < std::tie(b.submit_time, b.job_id);
    });

    std::vector<Cluster> clusters;
    // Cluster indices per user keep the scan proportional to one user's clusters.
    std::map<int, std::vector<std::size_t>> by_user;
    for (const auto& job : ordered) {
        const int key = params.same_user ? job.user_id : 0;
        auto& candidates = by_user[key];
        Cluster* home = nullptr;
        for (auto idx : candidates) {
            auto& c = clusters[idx];
            if (requirements_match(job.cpus, static_cast<double>(job.runtime_estimate), c.cpus.value(),
                                   c.runtime.value(), params)) {
                home = &c;
                break;
            }
        }
        if (home == nullptr) {
            candidates.push_back(clusters.size());
            clusters.push_back(Cluster{job.user_id, {}, {}, {}});
            home = &clusters.back();
        }
        home->cpus.insert(job.cpus);
        home->runtime.insert(static_cast<double>(job.runtime_estimate));
        home->jobs.push_back(job);
    }

    std::vector<std::vector<Job>> out;
    out.reserve(clusters.size());
    for (auto& c : clusters) out.push_back(std::move(c.jobs));
    return out;
}

std::vector<Pattern> detect_patterns(std::span<const Job> cluster, const SimilarityParams& params, int first_id,
                                     int layer, std::span<const Seconds> child_spans) {
    const std::size_t n = cluster.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(cluster[a].submit_time, cluster[a].job_id) <
               std::tie(cluster[b].submit_time, cluster[b].job_id);
    });
    auto time_of = [&](std::size_t k) { return cluster[order[k]].submit_time; };
    auto span_of = [&](std::size_t k) -> Seconds {
        return child_spans.empty() ? Seconds{0} : child_spans[order[k]];
    };
    const bool span_rule = !child_spans.empty();

    std::vector<Pattern> patterns;
    std::vector<bool> used(n, false);
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (used[seed]) continue;

        // Second seed job: earliest unused with a positive gap.
        std::size_t second = seed + 1;
        while (second < n && (used[second] || time_of(second) == time_of(seed) ||
                              (span_rule && time_of(second) - time_of(seed) <= span_of(seed)))) {
            ++second;
        }
        if (second >= n) break;

        std::vector<std::size_t> chain{seed, second};
        std::vector<Seconds> gaps{time_of(second) - time_of(seed)};
        std::size_t cursor = second + 1;
        while (cursor < n) {
            const double period = detail::median(gaps);
            const double lo = period * (1.0 - params.period_jitter);
            const double hi = period * (1.0 + params.period_jitter);
            const std::size_t tail = chain.back();
            bool extended = false;
            for (std::size_t k = cursor; k < n; ++k) {
                if (used[k]) continue;
                const auto gap = static_cast<double>(time_of(k) - time_of(tail));
                if (gap < lo || (span_rule && gap <= static_cast<double>(span_of(tail)))) continue;
                if (gap > hi) break;
                chain.push_back(k);
                gaps.push_back(time_of(k) - time_of(tail));
                cursor = k + 1;
                extended = true;
                break;
            }
            if (!extended) break;
        }
        if (static_cast<int>(chain.size()) < params.min_occurrences) continue;

        Pattern p;
        p.pattern_id = first_id + static_cast<int>(patterns.size());
        p.layer = layer;
        p.user_id = cluster[order[seed]].user_id;
        std::vector<int> cpus;
        std::vector<Seconds> runtimes;
        for (auto k : chain) {
            used[k] = true;
            const auto& job = cluster[order[k]];
            p.occurrences.push_back({job.job_id, job.submit_time});
            cpus.push_back(job.cpus);
            runtimes.push_back(job.runtime_estimate);
        }
        p.rep_cpus = static_cast<int>(std::llround(detail::median(cpus)));
        p.rep_runtime = round_seconds(detail::median(runtimes));
        p.period = std::max<Seconds>(1, round_seconds(detail::median(gaps)));
        if (layer > 1) {
            for (const auto& occ : p.occurrences) p.children.push_back(static_cast<int>(occ.id));
        }
        patterns.push_back(std::move(p));
    }
    return patterns;
}

PatternSet build_layers(std::vector<Pattern> layer1, const SimilarityParams& params, int max_layer) {
    PatternSet set;
    if (layer1.empty()) return set;
    int next_id = 0;
    for (const auto& p : layer1) next_id = std::max(next_id, p.pattern_id + 1);
    set.layers.push_back(std::move(layer1));

    for (int layer = 2; layer <= max_layer; ++layer) {
        const auto& below = set.layers.back();
        std::vector<Job> pseudo;
        std::map<JobId, Seconds> spans;
        pseudo.reserve(below.size());
        for (const auto& p : below) {
            Job j;
            j.job_id = p.pattern_id;
            j.user_id = p.user_id;
            j.submit_time = p.first_time();
            j.cpus = p.rep_cpus;
            j.runtime = j.runtime_estimate = p.rep_runtime * static_cast<Seconds>(p.length());
            pseudo.push_back(j);
            spans[j.job_id] = p.span();
        }
        std::vector<Pattern> found;
        for (const auto& cluster : group_similar_jobs(pseudo, params)) {
            std::vector<Seconds> cluster_spans;
            cluster_spans.reserve(cluster.size());
            for (const auto& j : cluster) cluster_spans.push_back(spans.at(j.job_id));
            auto patterns = detect_patterns(cluster, params, next_id, layer, cluster_spans);
            for (auto& p : patterns) {
                next_id = std::max(next_id, p.pattern_id + 1);
                found.push_back(std::move(p));
            }
        }
        if (found.empty()) break;
        set.layers.push_back(std::move(found));
    }
    return set;
}

PatternSet mine_patterns(std::span<const Job> jobs, const SimilarityParams& params, int max_layer) {
    params.validate();
    std::vector<Pattern> layer1;
    for (const auto& cluster : group_similar_jobs(jobs, params)) {
        auto patterns = detect_patterns(cluster, params, static_cast<int>(layer1.size()), 1);
        for (auto& p : patterns) layer1.push_back(std::move(p));
    }
    return build_layers(std::move(layer1), params, max_layer);
}

namespace {

// Emits the occurrences of `p` as if a new instance of it began at `start`,
// recursing down to layer 1.
void emit_block(const PatternSet& set, const Pattern& p, Seconds start, int owner_id, int owner_layer,
                Seconds lo, Seconds hi, std::vector<PredictedJob>& out) {
    if (p.layer == 1) {
        for (std::size_t i = 0; i < p.length(); ++i) {
            const Seconds t = start + static_cast<Seconds>(i) * p.period;
            if (t > hi) break;
            if (t <= lo) continue;
            out.push_back({owner_id, owner_layer, p.user_id, t, p.rep_cpus, p.rep_runtime, p.period,
                           p.pattern_id, static_cast<int>(i + 1), 0.0});
        }
        return;
    }
    const Pattern* child = p.children.empty() ? nullptr : set.find(p.children.back());
    if (child == nullptr) return;
    for (std::size_t i = 0; i < p.length(); ++i) {
        const Seconds t = start + static_cast<Seconds>(i) * p.period;
        if (t > hi) break;
        emit_block(set, *child, t, owner_id, owner_layer, lo, hi, out);
    }
}

}  // namespace

std::vector<PredictedJob> prolong(const PatternSet& patterns, Seconds now, Seconds horizon,
                                  const ProlongParams& params) {
    std::vector<PredictedJob> out;
    if (horizon <= 0) return out;
    const Seconds end = now + horizon;
    for (const auto& layer : patterns.layers) {
        for (const auto& p : layer) {
            if (p.period <= 0 || p.occurrences.empty()) continue;
            const Seconds last = p.last_time();
            if (static_cast<double>(now - last) > params.stale_periods * static_cast<double>(p.period)) continue;
            if (p.layer == 1) {
                for (Seconds k = 1;; ++k) {
                    const Seconds t = last + k * p.period;
                    if (t > end) break;
                    if (t <= now) continue;
                    out.push_back({p.pattern_id, 1, p.user_id, t, p.rep_cpus, p.rep_runtime, p.period,
                                   p.pattern_id, static_cast<int>(p.length() + static_cast<std::size_t>(k)), 0.0});
                }
                continue;
            }
            const Pattern* child = p.children.empty() ? nullptr : patterns.find(p.children.back());
            if (child == nullptr) continue;
            for (Seconds k = 1;; ++k) {
                const Seconds tick = last + k * p.period;
                if (tick > end) break;
                emit_block(patterns, *child, tick, p.pattern_id, p.layer, now, end, out);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const PredictedJob& a, const PredictedJob& b) {
        return std::tie(a.predicted_submit, a.pattern_id, a.position) <
               std::tie(b.predicted_submit, b.pattern_id, b.position);
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const PredictedJob& a, const PredictedJob& b) {
                              return a.pattern_id == b.pattern_id && a.predicted_submit == b.predicted_submit;
                          }),
              out.end());
    return out;
}

std::string write_predictions(std::span<const PredictedJob> predictions) {
    std::ostringstream out;
    out << "pattern_id,layer,predicted_submit,cpus,runtime,confidence\n";
    for (const auto& p : predictions) {
        out << p.pattern_id << ',' << p.layer << ',' << p.predicted_submit << ',' << p.cpus << ',' << p.runtime
            << ',' << p.confidence << '\n';
    }
    return out.str();
}

}  // namespace predictsched
