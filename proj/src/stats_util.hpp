#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace predictsched::detail {

// Median with the even-count case averaged.
template <typename T>
double median(std::vector<T> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = static_cast<double>(values[mid]);
    if (values.size() % 2 == 1) return upper;
    const double lower = static_cast<double>(*std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid)));
    return 0.5 * (lower + upper);
}

// Keeps a sorted multiset for O(1) median reads.
class RunningMedian {
public:
    void insert(double v) { values_.insert(std::upper_bound(values_.begin(), values_.end(), v), v); }
    double value() const {
        const std::size_t n = values_.size();
        if (n == 0) return 0.0;
        return n % 2 == 1 ? values_[n / 2] : 0.5 * (values_[n / 2 - 1] + values_[n / 2]);
    }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
};

}  // namespace predictsched::detail
