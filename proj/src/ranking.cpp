#include "predictsched/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "predictsched/types.hpp"
#include "text_util.hpp"

namespace predictsched {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) : n_(rows.size()) {
    data_.reserve(n_ * n_);
    for (const auto& row : rows) {
        if (row.size() != n_) throw ConfigError("matrix must be square");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Weights weights_from_binary_matrix(const Matrix& m) {
    const std::size_t n = m.size();
    if (n == 0) throw ConfigError("empty preference matrix");
    Weights w;
    w.raw.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double v = m(i, j);
            if (v != 0.0 && v != 0.5 && v != 1.0) {
                throw ConfigError("binary preference entries must be 0, 0.5 or 1");
            }
            if (std::abs(v + m(j, i) - 1.0) > 1e-12) {
                throw ConfigError("preference matrix violates m[i][j] + m[j][i] = 1 at (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
            }
            w.raw[i] += v;
        }
    }
    const double total = std::accumulate(w.raw.begin(), w.raw.end(), 0.0);
    w.normalized.resize(n);
    for (std::size_t i = 0; i < n; ++i) w.normalized[i] = total > 0 ? w.raw[i] / total : 1.0 / static_cast<double>(n);
    return w;
}

Matrix default_criteria_preferences() {
    return Matrix{{0.0, 0.5, 0.0}, {0.5, 0.0, 1.0}, {1.0, 0.0, 0.0}};
}

RelativeEstimations relative_estimations(const std::vector<std::vector<double>>& objectives,
                                         std::span<const Orientation> orientations) {
    const std::size_t algorithms = objectives.size();
    if (algorithms < 2) throw ConfigError("need at least two algorithms to compare");
    const std::size_t criteria = orientations.size();
    for (const auto& row : objectives) {
        if (row.size() != criteria) throw ConfigError("objective table has ragged rows");
    }
    RelativeEstimations out;
    out.values.assign(algorithms, std::vector<double>(criteria, 0.0));
    out.degenerate.assign(criteria, false);
    for (std::size_t j = 0; j < criteria; ++j) {
        double lo = objectives[0][j], hi = objectives[0][j];
        for (const auto& row : objectives) {
            lo = std::min(lo, row[j]);
            hi = std::max(hi, row[j]);
        }
        if (hi == lo) {
            out.degenerate[j] = true;
            continue;
        }
        for (std::size_t a = 0; a < algorithms; ++a) {
            const double v = objectives[a][j];
            out.values[a][j] = orientations[j] == Orientation::Minimize ? (v - lo) / (hi - lo) : (hi - v) / (hi - lo);
        }
    }
    return out;
}

Matrix global_matrix(const RelativeEstimations& est, std::span<const double> weights, double cap) {
    const std::size_t n = est.values.size();
    Matrix superiority(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (i == k) continue;
            double s = 0.0;
            for (std::size_t j = 0; j < weights.size(); ++j) {
                const double diff = est.values[k][j] - est.values[i][j];
                if (diff > 0) s += weights[j] * diff;
            }
            superiority(i, k) = s;
        }
    }
    Matrix a(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            const double sik = superiority(i, k), ski = superiority(k, i);
            if (sik > 0 && ski > 0) {
                a(i, k) = sik / ski;
                a(k, i) = ski / sik;
            } else if (sik > 0) {
                a(i, k) = cap;
                a(k, i) = 1.0 / cap;
            } else if (ski > 0) {
                a(k, i) = cap;
                a(i, k) = 1.0 / cap;
            }
        }
    }
    return a;
}

Ranking principal_eigenvector(const Matrix& matrix, double tol, int max_iters) {
    const std::size_t n = matrix.size();
    if (n == 0) throw ConfigError("empty matrix");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!(matrix(i, j) > 0.0) || !std::isfinite(matrix(i, j))) throw ConfigError("matrix must be positive");
        }
    }
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> y(n);
    double gap = 0.0;
    for (int iter = 1; iter <= max_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += matrix(i, j) * x[j];
            y[i] = s;
        }
        const double norm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
        for (auto& v : y) v /= norm;
        gap = 0.0;
        for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, std::abs(y[i] - x[i]));
        x.swap(y);
        if (gap < tol) {
            Ranking r;
            r.eigenvector = x;
            r.winner = static_cast<std::size_t>(std::max_element(x.begin(), x.end()) - x.begin());
            r.eigenvalue = norm;
            r.iterations = iter;
            return r;
        }
    }
    std::ostringstream msg;
    msg << "power iteration did not converge after " << max_iters << " iterations (iterate gap " << gap << ")";
    throw NumericError(msg.str());
}

LabeledMatrix parse_matrix_tsv(std::string_view text) {
    std::vector<std::vector<std::string_view>> rows;
    for (auto line : detail::split_lines(text)) {
        if (detail::trim(line).empty() || detail::trim(line).front() == '#') continue;
        std::vector<std::string_view> cells;
        for (auto c : detail::split_on(line, '\t')) cells.push_back(c);
        rows.push_back(std::move(cells));
    }
    if (rows.empty()) throw ParseError("empty matrix file");

    LabeledMatrix out;
    const bool header = !detail::to_double(rows[0].back());
    std::size_t first = 0;
    if (header) {
        for (std::size_t c = 1; c < rows[0].size(); ++c) out.labels.emplace_back(rows[0][c]);
        // Tolerate a header without the leading blank cell.
        if (!rows[0].empty() && !rows[0][0].empty() && rows.size() > 1 && rows[0].size() + 1 == rows[1].size()) {
            out.labels.insert(out.labels.begin(), std::string(rows[0][0]));
        }
        first = 1;
    }
    const std::size_t n = rows.size() - first;
    out.matrix = Matrix(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& cells = rows[first + r];
        const std::size_t offset = header ? 1 : 0;
        if (cells.size() < n + offset) throw ParseError("matrix row has too few cells", first + r + 1);
        for (std::size_t c = 0; c < n; ++c) {
            auto v = detail::to_double(cells[offset + c]);
            if (!v) throw ParseError("matrix cell is not numeric", first + r + 1);
            out.matrix(r, c) = *v;
        }
    }
    if (!header) {
        for (std::size_t i = 0; i < n; ++i) out.labels.push_back("A" + std::to_string(i + 1));
    }
    if (out.labels.size() != n) throw ParseError("matrix header does not match row count");
    return out;
}

std::string write_matrix_tsv(const LabeledMatrix& m) {
    std::ostringstream out;
    out.precision(10);
    for (const auto& l : m.labels) out << '\t' << l;
    out << '\n';
    for (std::size_t i = 0; i < m.matrix.size(); ++i) {
        out << m.labels[i];
        for (std::size_t j = 0; j < m.matrix.size(); ++j) out << '\t' << m.matrix(i, j);
        out << '\n';
    }
    return out.str();
}

}  // namespace predictsched
