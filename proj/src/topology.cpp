#include "pco/topology.hpp"

#include <algorithm>
#include <cmath>

namespace pco {

namespace {
constexpr double kSumTol = 1e-12;
constexpr int kDenseLimit = 1024;
}  // namespace

void NetworkTopology::check_params(double tau, double eps) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw ParameterError("tau must lie in (0,1), got " + std::to_string(tau));
    }
    if (!(eps > 0.0 && eps < 1.0)) {
        throw ParameterError("eps must lie in (0,1), got " + std::to_string(eps));
    }
}

void NetworkTopology::check_index(int i) const {
    if (i < 0 || i >= n_) {
        throw IndexError("oscillator index " + std::to_string(i) + " out of range [0," +
                         std::to_string(n_) + ")");
    }
}

NetworkTopology NetworkTopology::all_to_all(int n, double tau, double eps) {
    if (n < 2) {
        throw ParameterError("all_to_all requires n >= 2, got " + std::to_string(n));
    }
    check_params(tau, eps);
    NetworkTopology t;
    t.n_ = n;
    t.tau_ = tau;
    t.eps_ = eps;
    t.uniform_ = true;
    t.uniform_w_ = eps / (n - 1);
    return t;
}

NetworkTopology NetworkTopology::custom(std::vector<std::vector<double>> matrix,
                                        double tau, double eps) {
    const int n = static_cast<int>(matrix.size());
    if (n < 1) {
        throw ParameterError("topology matrix must be nonempty");
    }
    check_params(tau, eps);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(matrix[i].size()) != n) {
            throw ParameterError("topology matrix must be square");
        }
        for (int j = 0; j < n; ++j) {
            const double w = matrix[i][j];
            if (std::isnan(w) || w < 0.0) {
                throw ParameterError("coupling strengths must be nonnegative");
            }
        }
        if (matrix[i][i] != 0.0) {
            throw SelfCouplingError(i);
        }
    }
    if (n > 1) {
        for (int j = 0; j < n; ++j) {
            double sum = 0.0;
            for (int i = 0; i < n; ++i) sum += matrix[i][j];
            if (std::abs(sum - eps) > kSumTol) {
                throw NormalizationError(j, sum, eps);
            }
        }
    }
    NetworkTopology t;
    t.n_ = n;
    t.tau_ = tau;
    t.eps_ = eps;
    if (n <= kDenseLimit) {
        t.dense_.resize(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                t.dense_[static_cast<std::size_t>(i) * n + j] = matrix[i][j];
            }
        }
    } else {
        t.sparse_rows_.resize(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (matrix[i][j] > 0.0) t.sparse_rows_[i].emplace_back(j, matrix[i][j]);
            }
        }
    }
    return t;
}

double NetworkTopology::strength(int from, int to) const {
    check_index(from);
    check_index(to);
    if (uniform_) {
        return from == to ? 0.0 : uniform_w_;
    }
    if (!dense_.empty()) {
        return dense_[static_cast<std::size_t>(from) * n_ + to];
    }
    const auto& row = sparse_rows_[from];
    auto it = std::lower_bound(row.begin(), row.end(), to,
                               [](const auto& p, int v) { return p.first < v; });
    return (it != row.end() && it->first == to) ? it->second : 0.0;
}

bool NetworkTopology::symmetric_pair(int i, int j, double tol) const {
    check_index(i);
    check_index(j);
    if (i == j) {
        throw IndexError("symmetric_pair requires distinct oscillators");
    }
    if (uniform_) return true;
    if (std::abs(strength(i, j) - strength(j, i)) > tol) return false;
    for (int k = 0; k < n_; ++k) {
        if (k == i || k == j) continue;
        if (std::abs(strength(k, i) - strength(k, j)) > tol) return false;
    }
    return true;
}

std::vector<std::vector<double>> NetworkTopology::matrix() const {
    std::vector<std::vector<double>> m(n_, std::vector<double>(n_, 0.0));
    for (int i = 0; i < n_; ++i) {
        for_each_post(i, [&](int j, double w) { m[i][j] = w; });
    }
    return m;
}

}  // namespace pco
