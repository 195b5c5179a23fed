#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace predictsched {

// Dense row-major square matrix.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

struct Weights {
    std::vector<double> raw;         // row sums
    std::vector<double> normalized;  // sum 1 (uniform when every raw weight is 0)
};

/// Criteria weights from a binary preference matrix (entries 0, 0.5, 1 with
/// m[i][j] + m[j][i] = 1 off the diagonal; the diagonal is ignored).
Weights weights_from_binary_matrix(const Matrix& preferences);

// Criteria preferences over (makespan, slowdown, resource usage); row sums
// (0.5, 1.5, 1).
Matrix default_criteria_preferences();

enum class Orientation { Minimize, Maximize };

struct RelativeEstimations {
    // values[algorithm][objective], 0 = best, 1 = worst.
    std::vector<std::vector<double>> values;
    std::vector<bool> degenerate;  // per objective: max == min, column left at 0
};

RelativeEstimations relative_estimations(const std::vector<std::vector<double>>& objectives,
                                         std::span<const Orientation> orientations);

inline constexpr double kDominanceCap = 1e3;

/// Reciprocal comparison matrix. Superiority of i over k sums, over the
/// objectives where i is better, weight * (r[k] - r[i]); A[i][k] is the
/// ratio of the two superiorities, capped at `cap` when only one side has any.
Matrix global_matrix(const RelativeEstimations& estimations, std::span<const double> weights,
                     double cap = kDominanceCap);

struct Ranking {
    std::vector<double> eigenvector;  // unit Euclidean norm, positive
    std::size_t winner = 0;
    double eigenvalue = 0.0;
    int iterations = 0;
};

/// Power iteration from the uniform vector, renormalized to unit norm each
/// step, until successive iterates differ by less than `tol` (max norm).
Ranking principal_eigenvector(const Matrix& matrix, double tol = 1e-10, int max_iters = 10000);

struct LabeledMatrix {
    std::vector<std::string> labels;
    Matrix matrix;
};

/// Reads a square matrix from TSV. With a header row ("<blank>\tA\tB...")
/// every data row starts with its label; without one, rows are purely
/// numeric and labels default to A1, A2, ...
LabeledMatrix parse_matrix_tsv(std::string_view text);
std::string write_matrix_tsv(const LabeledMatrix& matrix);

}  // namespace predictsched
