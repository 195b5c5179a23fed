#include "predictsched/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <tuple>

#include "text_util.hpp"

namespace predictsched {

namespace {

void validate(const SynthSpec& spec) {
    if (spec.horizon <= 0) throw ConfigError("horizon must be positive");
    for (std::size_t i = 0; i < spec.templates.size(); ++i) {
        const auto& t = spec.templates[i];
        const auto where = "template " + std::to_string(i) + ": ";
        if (t.period <= 0) throw ConfigError(where + "period must be positive");
        if (t.cpus < 1) throw ConfigError(where + "cpus must be >= 1");
        if (t.runtime <= 0) throw ConfigError(where + "runtime must be positive");
        if (t.occurrences < 0) throw ConfigError(where + "count must be non-negative");
        if (t.submit_jitter < 0 || t.submit_jitter >= 0.5 || t.runtime_jitter < 0 || t.runtime_jitter >= 1) {
            throw ConfigError(where + "jitter fraction out of range");
        }
    }
    if (spec.background_rate < 0) throw ConfigError("background_rate must be non-negative");
    if (spec.background_rate > 0) {
        if (spec.background_users < 1 || spec.background_max_cpus < 1 || spec.background_min_runtime <= 0 ||
            spec.background_max_runtime < spec.background_min_runtime) {
            throw ConfigError("invalid background job parameters");
        }
    }
}

struct Draft {
    Job job;
    int template_id;  // -1 for background
    int occurrence;
};

}  // namespace

SynthResult synth_workload(const SynthSpec& spec, std::uint64_t seed) {
    validate(spec);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    std::vector<Draft> drafts;
    for (std::size_t t = 0; t < spec.templates.size(); ++t) {
        const auto& tpl = spec.templates[t];
        for (int k = 0; k < tpl.occurrences; ++k) {
            const double u_submit = unit(rng);
            const double u_runtime = unit(rng);
            const double submit = static_cast<double>(tpl.start_offset) +
                                  static_cast<double>(k) * static_cast<double>(tpl.period) +
                                  u_submit * tpl.submit_jitter * static_cast<double>(tpl.period);
            const double runtime = static_cast<double>(tpl.runtime) * (1.0 + u_runtime * tpl.runtime_jitter);
            const auto submit_s = static_cast<Seconds>(std::llround(submit));
            if (submit_s < 0 || submit_s >= spec.horizon) continue;
            Job job;
            job.user_id = tpl.user_id;
            job.group_id = 1;
            job.submit_time = submit_s;
            job.runtime = std::max<Seconds>(1, static_cast<Seconds>(std::llround(runtime)));
            job.runtime_estimate = job.runtime;
            job.cpus = tpl.cpus;
            drafts.push_back({job, static_cast<int>(t), k});
        }
    }

    if (spec.background_rate > 0) {
        std::exponential_distribution<double> gap(spec.background_rate);
        std::uniform_int_distribution<int> user(0, spec.background_users - 1);
        std::uniform_int_distribution<int> cpus(1, spec.background_max_cpus);
        std::uniform_int_distribution<Seconds> runtime(spec.background_min_runtime, spec.background_max_runtime);
        double clock = 0.0;
        while (true) {
            clock += gap(rng);
            if (clock >= static_cast<double>(spec.horizon)) break;
            Job job;
            job.user_id = kBackgroundUserBase + user(rng);
            job.group_id = 2;
            job.cpus = cpus(rng);
            job.runtime = runtime(rng);
            job.runtime_estimate = job.runtime;
            job.submit_time = static_cast<Seconds>(std::floor(clock));
            drafts.push_back({job, -1, 0});
        }
    }

    std::stable_sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
        const int ta = a.template_id < 0 ? 1 << 30 : a.template_id;
        const int tb = b.template_id < 0 ? 1 << 30 : b.template_id;
        return std::tie(a.job.submit_time, ta, a.occurrence) < std::tie(b.job.submit_time, tb, b.occurrence);
    });

    SynthResult result;
    std::vector<Job> jobs;
    jobs.reserve(drafts.size());
    for (std::size_t i = 0; i < drafts.size(); ++i) {
        drafts[i].job.job_id = static_cast<JobId>(i + 1);
        jobs.push_back(drafts[i].job);
        if (drafts[i].template_id >= 0) {
            const auto& j = drafts[i].job;
            result.ground_truth.push_back(
                {drafts[i].template_id, drafts[i].occurrence, j.job_id, j.submit_time, j.cpus, j.runtime});
        }
    }
    std::sort(result.ground_truth.begin(), result.ground_truth.end(), [](const auto& a, const auto& b) {
        return std::tie(a.template_id, a.occurrence_index) < std::tie(b.template_id, b.occurrence_index);
    });
    result.workload = make_workload(std::move(jobs), "synthetic");
    return result;
}

SynthSpec parse_synth_spec(std::string_view text) {
    SynthSpec spec;
    const auto lines = detail::split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto line = lines[i];
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key = value", i + 1);
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));

        auto number = [&](std::string_view v, std::string_view name) {
            auto d = detail::to_double(v);
            if (!d) throw ParseError("value of '" + std::string(name) + "' is not numeric", i + 1);
            return *d;
        };
        auto integer = [&](std::string_view v, std::string_view name) {
            const double d = number(v, name);
            if (std::floor(d) != d) throw ParseError("value of '" + std::string(name) + "' must be an integer", i + 1);
            return static_cast<long long>(d);
        };

        if (key == "template") {
            PatternTemplate tpl;
            for (auto item : detail::split_whitespace(value)) {
                const auto e = item.find('=');
                if (e == std::string_view::npos) throw ParseError("template item needs k=v", i + 1);
                const auto k = item.substr(0, e);
                const auto v = item.substr(e + 1);
                if (k == "user") tpl.user_id = static_cast<int>(integer(v, k));
                else if (k == "cpus") tpl.cpus = static_cast<int>(integer(v, k));
                else if (k == "runtime") tpl.runtime = integer(v, k);
                else if (k == "period") tpl.period = integer(v, k);
                else if (k == "offset") tpl.start_offset = integer(v, k);
                else if (k == "count") tpl.occurrences = static_cast<int>(integer(v, k));
                else if (k == "submit_jitter") tpl.submit_jitter = number(v, k);
                else if (k == "runtime_jitter") tpl.runtime_jitter = number(v, k);
                else throw ParseError("unknown template key '" + std::string(k) + "'", i + 1);
            }
            spec.templates.push_back(tpl);
        } else if (key == "horizon") spec.horizon = integer(value, key);
        else if (key == "seed") spec.seed = static_cast<std::uint64_t>(integer(value, key));
        else if (key == "background_rate") spec.background_rate = number(value, key);
        else if (key == "background_users") spec.background_users = static_cast<int>(integer(value, key));
        else if (key == "background_max_cpus") spec.background_max_cpus = static_cast<int>(integer(value, key));
        else if (key == "background_min_runtime") spec.background_min_runtime = integer(value, key);
        else if (key == "background_max_runtime") spec.background_max_runtime = integer(value, key);
        else throw ParseError("unknown key '" + std::string(key) + "'", i + 1);
    }
    return spec;
}

std::string write_ground_truth(const std::vector<GroundTruthOccurrence>& truth) {
    std::ostringstream out;
    out << "template_id,occurrence_index,submit_time,cpus,runtime\n";
    for (const auto& g : truth) {
        out << g.template_id << ',' << g.occurrence_index << ',' << g.submit_time << ',' << g.cpus << ','
            << g.runtime << '\n';
    }
    return out.str();
}

}  // namespace predictsched
