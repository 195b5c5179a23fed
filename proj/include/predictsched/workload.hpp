#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "predictsched/types.hpp"

namespace predictsched {

struct Job {
    JobId job_id = 0;
    int user_id = 0;
    int group_id = 0;
    Seconds submit_time = 0;
    Seconds runtime = 0;           // actual
    Seconds runtime_estimate = 0;  // user-requested wall time, may undershoot
    int cpus = 1;
    std::optional<Seconds> deadline;

    bool operator==(const Job&) const = default;
};

struct Workload {
    std::vector<Job> jobs;  // sorted by (submit_time, job_id), ids unique
    std::string source_name;
    std::size_t dropped = 0;  // records rejected during parsing

    std::size_t size() const noexcept { return jobs.size(); }
    bool empty() const noexcept { return jobs.empty(); }
    int max_cpus() const noexcept;
};

struct ClusterConfig {
    int total_cpus = 1;
};

// Sorts, validates ids and job fields. Throws ParseError on duplicate ids.
Workload make_workload(std::vector<Job> jobs, std::string source_name = {});

// Shifts all submit times (and deadlines) so the earliest submit is 0.
void shift_to_origin(Workload& workload);

Workload parse_swf(std::string_view text, std::string source_name = {});
Workload parse_csv(std::string_view text, std::string source_name = {});

std::string write_swf(const Workload& workload);
std::string write_csv(const Workload& workload);

enum class WorkloadFormat { Auto, Swf, Csv };

// Reads a workload from disk; Auto picks the parser from the extension
// (".csv" is CSV, everything else SWF).
Workload load_workload(const std::string& path, WorkloadFormat format = WorkloadFormat::Auto);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace predictsched
