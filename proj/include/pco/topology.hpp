#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pco/phase_map.hpp"

namespace pco {

class SelfCouplingError : public std::invalid_argument {
public:
    explicit SelfCouplingError(int osc)
        : std::invalid_argument("nonzero self-coupling on oscillator " + std::to_string(osc)),
          oscillator(osc) {}
    int oscillator;
};

class NormalizationError : public std::invalid_argument {
public:
    NormalizationError(int osc, double sum, double eps)
        : std::invalid_argument("in-strengths of oscillator " + std::to_string(osc) +
                                " sum to " + std::to_string(sum) + ", expected " +
                                std::to_string(eps)),
          oscillator(osc) {}
    int oscillator;
};

class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Directed coupling topology with a single global delay. Strengths are in
/// f-domain units; every oscillator's in-strengths sum to eps (the n=1
/// uncoupled oscillator is the one admitted exception). Immutable after
/// validation.
class NetworkTopology {
public:
    static NetworkTopology all_to_all(int n, double tau, double eps);
    static NetworkTopology custom(std::vector<std::vector<double>> matrix,
                                  double tau, double eps);

    int size() const { return n_; }
    double tau() const { return tau_; }
    double eps() const { return eps_; }
    bool is_uniform() const { return uniform_; }

    /// Coupling strength from oscillator `from` to oscillator `to`.
    double strength(int from, int to) const;

    /// Visits every postsynaptic target of `from` with its strength.
    template <typename Fn>
    void for_each_post(int from, Fn&& fn) const {
        check_index(from);
        if (uniform_) {
            for (int j = 0; j < n_; ++j) {
                if (j != from) fn(j, uniform_w_);
            }
        } else if (!dense_.empty()) {
            const double* row = dense_.data() + static_cast<std::size_t>(from) * n_;
            for (int j = 0; j < n_; ++j) {
                if (row[j] > 0.0) fn(j, row[j]);
            }
        } else {
            for (const auto& [j, w] : sparse_rows_[from]) fn(j, w);
        }
    }

    /// True iff eps_ij = eps_ji and eps_ki = eps_kj for every third k,
    /// the symmetry hypothesis of the firing-order and sync-persistence
    /// properties.
    bool symmetric_pair(int i, int j, double tol = 1e-12) const;

    std::vector<std::vector<double>> matrix() const;

private:
    NetworkTopology() = default;
    void check_index(int i) const;
    static void check_params(double tau, double eps);

    int n_ = 0;
    double tau_ = 0.0;
    double eps_ = 0.0;
    bool uniform_ = false;
    double uniform_w_ = 0.0;
    std::vector<double> dense_;  // row-major [from*n + to], used for n <= 1024
    std::vector<std::vector<std::pair<int, double>>> sparse_rows_;
};

}  // namespace pco
