#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pco/analysis.hpp"
#include "pco/engine.hpp"

namespace pco {

struct Budget {
    long max_firings = 0;  // 0 means the default 500*N
    double t_max = 200.0;

    long resolved_max_firings(int n) const {
        return max_firings > 0 ? max_firings : 500L * n;
    }
};

/// Counter-derived sub-stream seed; parallel execution stays order-independent
/// because sample k's randomness depends only on (master, a, b).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

/// i.i.d. uniform draws on (0,1], one per oscillator, deterministic in seed.
std::vector<double> sample_phases(int n, std::uint64_t seed);

enum class SampleOutcome { Synced, NotSynced, Undecided };

const char* to_string(SampleOutcome o);

struct SampleResult {
    SampleOutcome outcome = SampleOutcome::Undecided;
    RunClassification classification;
};

/// Runs one trajectory under the budget and classifies it. Periodicity is
/// probed incrementally so decided runs stop early; Undecided is reported as
/// such, never folded into either class.
SampleResult classify_sample(const NetworkTopology& topology, const PhaseMap& map,
                             const std::vector<double>& phases, const Budget& budget = {},
                             const AnalysisTolerances& tol = {});

struct EstimateCell {
    double tau = 0.0, eps = 0.0;
    int n = 0;
    long samples = 0;
    long sync_count = 0;
    long undecided = 0;
    double p_hat = 0.0;
    double ci_low = 0.0, ci_high = 0.0;  // 95% Wilson interval
    RegionClass region = RegionClass::A1;
};

/// Wilson 95% score interval for k successes out of n.
std::pair<double, double> wilson_interval(long k, long n);

/// Monte Carlo estimate of the synchronized-basin fraction for one (tau,eps)
/// cell, all-to-all coupling. p_hat = sync/samples (undecided stay in the
/// denominator, a conservative lower estimate). Worker count never changes
/// the result.
EstimateCell estimate_cell(const PhaseMap& map, double tau, double eps, int n,
                           long samples, std::uint64_t master_seed,
                           std::uint64_t cell_index, const Budget& budget = {},
                           const AnalysisTolerances& tol = {}, int workers = 1);

struct SweepSpec {
    std::vector<double> taus;
    std::vector<double> epss;
    int n = 2;
    long samples = 1;
    std::uint64_t seed = 0;
    Budget budget;
    AnalysisTolerances tolerances;
    double boundary_tol = 1e-9;
};

/// One EstimateCell per grid point, row-major over (tau, eps).
std::vector<EstimateCell> sweep(const PhaseMap& map, const SweepSpec& spec,
                                int workers = 1);

}  // namespace pco
