#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pco/engine.hpp"
#include "pco/phase_map.hpp"
#include "pco/topology.hpp"

#include <json.hpp>

namespace pco {

class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class HypothesisError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct AnalysisTolerances {
    double eta = 1e-9;           // simultaneity tolerance on firing times
    double snapshot_tol = 1e-7;  // per-component snapshot match tolerance
    double isi_slack = 1e-9;     // slack on interspike-interval comparisons
    int d_max = 64;
    int transient_skip_factor = 20;  // skip the first factor*N firings
};

enum class Outcome { Periodic, CompletelySynchronized, Undecided };

struct RunClassification {
    Outcome outcome = Outcome::Undecided;
    int period_d = 0;
    double delta_t0 = 0.0;
    int onset_index = 0;    // reference-oscillator firing index where recurrence starts
    double onset_time = 0.0;  // sync onset T (CompletelySynchronized only)
    std::string note;
};

const char* to_string(Outcome o);

struct PropertyReport {
    std::string id;           // "theorem1" | "p1" | "p2" | "p3"
    bool applicable = true;
    bool holds = false;
    nlohmann::json witness;   // first violating event tuple, when !holds
    std::string skip_reason;  // set when !applicable
};

/// t^i_{m+1} - t^i_m for all m. Throws InsufficientDataError below 2 firings.
std::vector<double> interspike_intervals(const FiringLog& log, int i);

struct IsiStats {
    int oscillator = 0;
    long count = 0;
    double min = 0.0, max = 0.0, mean = 0.0;
};
std::vector<IsiStats> isi_summary(const FiringLog& log);

/// Every interspike interval must exceed tau when (tau,eps) is in A1. Invoking
/// it on an A2 region requires override_region (the hypothesis fails there).
PropertyReport check_theorem1(const FiringLog& log, double tau, RegionClass region,
                              bool override_region = false,
                              const AnalysisTolerances& tol = {});

/// Firing-order preservation for a symmetric pair: whenever t^i_a <= t^j_b,
/// also t^i_{a+1} <= t^j_{b+1}. Checked over all index pairs past the
/// transient skip.
PropertyReport check_firing_order(const FiringLog& log, const NetworkTopology& topology,
                                  int i, int j, const AnalysisTolerances& tol = {});

/// Once a symmetric pair fires simultaneously, their phases must agree forever
/// and all later firings stay simultaneous.
PropertyReport check_sync_persistence(const FiringLog& log,
                                      std::span<const Snapshot> snapshots,
                                      const NetworkTopology& topology, int i, int j,
                                      const AnalysisTolerances& tol = {});

/// Recurrence-based period detection: the system snapshot at the reference
/// oscillator's m-th firing must match the one at its (m+d)-th firing, every
/// oscillator must fire exactly d times in between, and the firing-time shift
/// t^i_{m+d} - t^i_m = delta_t0 is then verified directly on the log.
RunClassification detect_period(const FiringLog& log, std::span<const Snapshot> snapshots,
                                const NetworkTopology& topology,
                                const AnalysisTolerances& tol = {});

/// True iff all phases coincide within tol and every oscillator is targeted by
/// the same multiset of in-flight (arrival offset, strength) pairs.
bool sync_predicate(const Snapshot& snap, const NetworkTopology& topology, double tol);

/// First snapshot from which the sync predicate holds through the end of the
/// observation window.
RunClassification detect_complete_sync(std::span<const Snapshot> snapshots,
                                       const NetworkTopology& topology,
                                       const AnalysisTolerances& tol = {});

/// Combined classification: period detection plus complete-sync onset.
RunClassification classify_run(const FiringLog& log, std::span<const Snapshot> snapshots,
                               const NetworkTopology& topology,
                               const AnalysisTolerances& tol = {});

/// A completely synchronized solution in A1 must be period-one with
/// delta_t0 = sync_isi(tau, eps).
PropertyReport check_period_one_if_synced(const RunClassification& cls, const PhaseMap& map,
                                          double tau, double eps, RegionClass region,
                                          double tol = 1e-7);

nlohmann::json classification_json(const RunClassification& cls);
nlohmann::json property_json(const PropertyReport& rep);
nlohmann::json analysis_report_json(const RunClassification& cls,
                                    const std::vector<PropertyReport>& properties,
                                    const std::vector<IsiStats>& isi);

/// Streaming complete-sync detector for budget-bound runs where storing every
/// batch snapshot would be too heavy.
class OnlineSyncMonitor : public RunObserver {
public:
    OnlineSyncMonitor(const NetworkTopology& topology, double tol)
        : topology_(topology), tol_(tol) {}

    void observe(const Snapshot& snap);
    void on_batch(const Simulator& sim, const std::vector<FiringRecord>&) override {
        observe(sim.snapshot());
    }

    bool synced() const { return onset_.has_value(); }
    double onset_time() const { return onset_.value(); }

private:
    const NetworkTopology& topology_;
    double tol_;
    std::optional<double> onset_;
};

/// Keeps snapshots taken at batches containing a firing of the reference
/// oscillator, bounded to the most recent max_keep.
class RefSnapshotCollector : public RunObserver {
public:
    explicit RefSnapshotCollector(int reference = 0, std::size_t max_keep = 4096)
        : reference_(reference), max_keep_(max_keep) {}

    void on_batch(const Simulator& sim, const std::vector<FiringRecord>& fired) override;
    const std::deque<Snapshot>& snapshots() const { return snapshots_; }
    std::vector<Snapshot> snapshot_vector() const {
        return {snapshots_.begin(), snapshots_.end()};
    }

private:
    int reference_;
    std::size_t max_keep_;
    std::deque<Snapshot> snapshots_;
};

}  // namespace pco
