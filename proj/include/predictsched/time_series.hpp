#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "predictsched/workload.hpp"

namespace predictsched {

struct TimeSeries {
    Seconds start_time = 0;
    Seconds bin_width = 1;  // unused by the interarrival channel
    std::vector<double> values;
};

enum class Channel { SubmittedCpuTime, SubmittedJobCount, Interarrival };

Channel parse_channel(std::string_view token);
std::string_view to_string(Channel channel);

// Bins cover [start + i*bin_width, start + (i+1)*bin_width), start being the
// earliest submit. The interarrival channel ignores bin_width.
TimeSeries to_time_series(const Workload& workload, Channel channel, Seconds bin_width);

struct HurstResult {
    double h = 0.0;
    std::vector<std::pair<double, double>> rs_points;  // (log n, log mean R/S)
    double fit_residual = 0.0;                         // RMS of the log-log fit
};

// Rescaled-range estimate over a doubling ladder of window sizes from 8 to
// length/2, averaging R/S over non-overlapping windows.
HurstResult hurst_exponent(std::span<const double> series);

}  // namespace predictsched
