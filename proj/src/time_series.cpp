#include "predictsched/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace predictsched {

namespace {

constexpr std::size_t kMinWindow = 8;
constexpr std::size_t kMinLength = 32;

}  // namespace

Channel parse_channel(std::string_view token) {
    if (token == "interarrival") return Channel::Interarrival;
    if (token == "job_count" || token == "submitted_job_count") return Channel::SubmittedJobCount;
    if (token == "cpu_time" || token == "submitted_cpu_time") return Channel::SubmittedCpuTime;
    throw ConfigError("unknown channel '" + std::string(token) + "'");
}

std::string_view to_string(Channel channel) {
    switch (channel) {
        case Channel::SubmittedCpuTime: return "submitted_cpu_time";
        case Channel::SubmittedJobCount: return "submitted_job_count";
        case Channel::Interarrival: return "interarrival";
    }
    return "?";
}

TimeSeries to_time_series(const Workload& workload, Channel channel, Seconds bin_width) {
    if (workload.empty()) throw ConfigError("empty workload");
    TimeSeries series;
    series.start_time = workload.jobs.front().submit_time;

    if (channel == Channel::Interarrival) {
        if (workload.size() < 2) throw ConfigError("interarrival series needs at least 2 jobs");
        series.bin_width = 0;
        series.values.reserve(workload.size() - 1);
        for (std::size_t i = 1; i < workload.size(); ++i) {
            series.values.push_back(
                static_cast<double>(workload.jobs[i].submit_time - workload.jobs[i - 1].submit_time));
        }
        return series;
    }

    if (bin_width <= 0) throw ConfigError("bin width must be positive");
    series.bin_width = bin_width;
    const Seconds span = workload.jobs.back().submit_time - series.start_time;
    series.values.assign(static_cast<std::size_t>(span / bin_width) + 1, 0.0);
    for (const auto& job : workload.jobs) {
        const auto bin = static_cast<std::size_t>((job.submit_time - series.start_time) / bin_width);
        series.values[bin] += channel == Channel::SubmittedJobCount
                                  ? 1.0
                                  : static_cast<double>(job.cpus) * static_cast<double>(job.runtime_estimate);
    }
    return series;
}

HurstResult hurst_exponent(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < kMinLength) {
        throw NumericError("series too short for R/S analysis: " + std::to_string(n) + " < " +
                           std::to_string(kMinLength));
    }
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    if (var <= 0.0) throw NumericError("zero variance");

    HurstResult result;
    for (std::size_t window = kMinWindow; window <= n / 2; window *= 2) {
        double rs_sum = 0.0;
        std::size_t used = 0;
        for (std::size_t begin = 0; begin + window <= n; begin += window) {
            const auto chunk = series.subspan(begin, window);
            const double m = std::accumulate(chunk.begin(), chunk.end(), 0.0) / static_cast<double>(window);
            double cum = 0.0, lo = 0.0, hi = 0.0, ss = 0.0;
            bool first = true;
            for (double v : chunk) {
                cum += v - m;
                ss += (v - m) * (v - m);
                if (first) {
                    lo = hi = cum;
                    first = false;
                } else {
                    lo = std::min(lo, cum);
                    hi = std::max(hi, cum);
                }
            }
            const double range = hi - lo;
            const double sd = std::sqrt(ss / static_cast<double>(window));
            if (range <= 0.0 || sd <= 0.0) continue;
            rs_sum += range / sd;
            ++used;
        }
        if (used == 0) continue;
        result.rs_points.emplace_back(std::log(static_cast<double>(window)),
                                      std::log(rs_sum / static_cast<double>(used)));
    }
    if (result.rs_points.size() < 2) throw NumericError("not enough non-degenerate windows for R/S fit");

    // Ordinary least squares on the log-log points.
    const double k = static_cast<double>(result.rs_points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : result.rs_points) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / k;
    double sse = 0.0;
    for (auto [x, y] : result.rs_points) {
        const double r = y - (intercept + slope * x);
        sse += r * r;
    }
    result.h = slope;
    result.fit_residual = std::sqrt(sse / k);
    return result;
}

}  // namespace predictsched
