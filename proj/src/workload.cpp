#include "predictsched/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "text_util.hpp"

namespace predictsched {

namespace {

constexpr std::size_t kSwfFields = 18;

Seconds to_seconds(double v) { return static_cast<Seconds>(std::llround(v)); }

// Applies the shared normalization: estimate fallback, record filtering,
// shift to origin.
Workload finalize(std::vector<Job> jobs, std::size_t dropped, std::string source_name) {
    if (jobs.empty()) throw ParseError("empty workload");
    auto workload = make_workload(std::move(jobs), std::move(source_name));
    workload.dropped = dropped;
    shift_to_origin(workload);
    return workload;
}

}  // namespace

int Workload::max_cpus() const noexcept {
    int m = 0;
    for (const auto& job : jobs) m = std::max(m, job.cpus);
    return m;
}

Workload make_workload(std::vector<Job> jobs, std::string source_name) {
    std::unordered_set<JobId> ids;
    for (const auto& job : jobs) {
        if (job.job_id <= 0) throw ParseError("job id must be positive: " + std::to_string(job.job_id));
        if (job.runtime <= 0 || job.cpus < 1 || job.submit_time < 0 || job.runtime_estimate <= 0) {
            throw ParseError("invalid job fields for id " + std::to_string(job.job_id));
        }
        if (!ids.insert(job.job_id).second) {
            throw ParseError("duplicate id " + std::to_string(job.job_id));
        }
    }
    std::stable_sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
        return a.submit_time != b.submit_time ? a.submit_time < b.submit_time : a.job_id < b.job_id;
    });
    Workload w;
    w.jobs = std::move(jobs);
    w.source_name = std::move(source_name);
    return w;
}

void shift_to_origin(Workload& workload) {
    if (workload.jobs.empty()) return;
    const Seconds origin = workload.jobs.front().submit_time;
    for (auto& job : workload.jobs) {
        job.submit_time -= origin;
        if (job.deadline) *job.deadline -= origin;
    }
}

Workload parse_swf(std::string_view text, std::string source_name) {
    std::vector<Job> jobs;
    std::size_t dropped = 0;
    const auto lines = detail::split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = detail::trim(lines[i]);
        if (line.empty() || line.front() == ';') continue;
        const auto fields = detail::split_whitespace(line);
        if (fields.size() != kSwfFields) {
            throw ParseError("expected 18 fields, found " + std::to_string(fields.size()), i + 1);
        }
        double v[kSwfFields];
        for (std::size_t f = 0; f < kSwfFields; ++f) {
            auto parsed = detail::to_double(fields[f]);
            if (!parsed) {
                throw ParseError("field " + std::to_string(f + 1) + " is not numeric: '" +
                                     std::string(fields[f]) + "'",
                                 i + 1);
            }
            v[f] = *parsed;
        }
        Job job;
        job.job_id = to_seconds(v[0]);
        job.submit_time = to_seconds(v[1]);
        job.runtime = to_seconds(v[3]);
        const int allocated = static_cast<int>(v[4]);
        const int requested = static_cast<int>(v[7]);
        job.cpus = requested > 0 ? requested : allocated;
        job.runtime_estimate = v[8] > 0 ? to_seconds(v[8]) : job.runtime;
        job.user_id = static_cast<int>(v[11]);
        job.group_id = static_cast<int>(v[12]);
        if (job.runtime <= 0 || job.cpus <= 0 || job.submit_time < 0) {
            ++dropped;
            continue;
        }
        if (job.runtime_estimate <= 0) job.runtime_estimate = job.runtime;
        jobs.push_back(job);
    }
    return finalize(std::move(jobs), dropped, std::move(source_name));
}

Workload parse_csv(std::string_view text, std::string source_name) {
    static const char* kRequired[] = {"job_id",  "user_id",          "group_id", "submit_time",
                                      "runtime", "runtime_estimate", "cpus"};
    const auto lines = detail::split_lines(text);
    std::size_t header_line = 0;
    while (header_line < lines.size() && detail::trim(lines[header_line]).empty()) ++header_line;
    if (header_line == lines.size()) throw ParseError("empty workload");

    std::map<std::string, std::size_t, std::less<>> column;
    const auto header = detail::split_on(detail::trim(lines[header_line]), ',');
    for (std::size_t c = 0; c < header.size(); ++c) column.emplace(std::string(header[c]), c);
    for (const char* name : kRequired) {
        if (!column.count(name)) throw ParseError(std::string("missing column '") + name + "'", header_line + 1);
    }
    const auto deadline_col = column.find("deadline");

    std::vector<Job> jobs;
    std::size_t dropped = 0;
    for (std::size_t i = header_line + 1; i < lines.size(); ++i) {
        const auto line = detail::trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        const auto cells = detail::split_on(line, ',');
        if (cells.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " cells, found " +
                                 std::to_string(cells.size()),
                             i + 1);
        }
        auto get = [&](const char* name) -> long long {
            auto v = detail::to_integer(cells[column.find(name)->second]);
            if (!v) throw ParseError(std::string("column '") + name + "' is not an integer", i + 1);
            return *v;
        };
        Job job;
        job.job_id = get("job_id");
        job.user_id = static_cast<int>(get("user_id"));
        job.group_id = static_cast<int>(get("group_id"));
        job.submit_time = get("submit_time");
        job.runtime = get("runtime");
        job.runtime_estimate = get("runtime_estimate");
        job.cpus = static_cast<int>(get("cpus"));
        if (deadline_col != column.end() && !cells[deadline_col->second].empty()) {
            auto d = detail::to_integer(cells[deadline_col->second]);
            if (!d) throw ParseError("column 'deadline' is not an integer", i + 1);
            job.deadline = *d;
        }
        if (job.runtime <= 0 || job.cpus <= 0 || job.submit_time < 0) {
            ++dropped;
            continue;
        }
        if (job.runtime_estimate <= 0) job.runtime_estimate = job.runtime;
        jobs.push_back(job);
    }
    return finalize(std::move(jobs), dropped, std::move(source_name));
}

std::string write_swf(const Workload& workload) {
    std::ostringstream out;
    out << "; predictsched workload";
    if (!workload.source_name.empty()) out << " (" << workload.source_name << ")";
    out << "\n";
    for (const auto& j : workload.jobs) {
        out << j.job_id << ' ' << j.submit_time << " -1 " << j.runtime << ' ' << j.cpus << " -1 -1 "
            << j.cpus << ' ' << j.runtime_estimate << " -1 1 " << j.user_id << ' ' << j.group_id
            << " -1 -1 -1 -1 -1\n";
    }
    return out.str();
}

std::string write_csv(const Workload& workload) {
    std::ostringstream out;
    out << "job_id,user_id,group_id,submit_time,runtime,runtime_estimate,cpus,deadline\n";
    for (const auto& j : workload.jobs) {
        out << j.job_id << ',' << j.user_id << ',' << j.group_id << ',' << j.submit_time << ','
            << j.runtime << ',' << j.runtime_estimate << ',' << j.cpus << ',';
        if (j.deadline) out << *j.deadline;
        out << '\n';
    }
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot write file: " + path);
    out << contents;
}

Workload load_workload(const std::string& path, WorkloadFormat format) {
    const auto text = read_file(path);
    if (format == WorkloadFormat::Auto) {
        const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
        format = csv ? WorkloadFormat::Csv : WorkloadFormat::Swf;
    }
    return format == WorkloadFormat::Csv ? parse_csv(text, path) : parse_swf(text, path);
}

}  // namespace predictsched
