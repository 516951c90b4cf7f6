#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "pco/phase_map.hpp"
#include "pco/topology.hpp"

namespace pco {

/// One spike in flight. A firing schedules exactly one Spike per source; the
/// topology expands it to all postsynaptic targets on arrival.
struct Spike {
    int source;
    double arrival;  // emission time + tau
};

struct FiringRecord {
    double time;
    int oscillator;
    int index;  // 1-based per-oscillator firing count
};

/// Ordered firing history. Globally sorted by time with ties broken by
/// oscillator id; per-oscillator times strictly increase with gapless indices.
class FiringLog {
public:
    explicit FiringLog(int n) : per_osc_(n) {}

    void append(const FiringRecord& r) {
        records_.push_back(r);
        per_osc_[r.oscillator].push_back(r.time);
    }

    const std::vector<FiringRecord>& records() const { return records_; }
    const std::vector<double>& times_of(int i) const { return per_osc_.at(i); }
    int oscillators() const { return static_cast<int>(per_osc_.size()); }
    long total() const { return static_cast<long>(records_.size()); }

private:
    std::vector<FiringRecord> records_;
    std::vector<std::vector<double>> per_osc_;
};

/// Full system state at one instant: phases plus the in-flight spikes as
/// arrival offsets relative to t. Two equal phase vectors with different
/// pending spikes evolve differently, so both parts matter for recurrence.
struct Snapshot {
    double t = 0.0;
    std::vector<double> phases;
    std::vector<Spike> inflight;  // arrival field holds the offset (arrival - t)
};

/// Resolution of the measure-zero coincidence between a spike arrival and a
/// flow-driven threshold crossing. FlowFirst resets the oscillator before the
/// jump is applied (the jump acts on phase 0); ArrivalFirst applies the jump
/// to the pre-reset phase, where the cap absorbs it.
enum class TieRule { FlowFirst, ArrivalFirst };

struct EngineOptions {
    double eta = 1e-9;  // events within eta of each other form one instant
    TieRule tie_rule = TieRule::FlowFirst;
};

struct EventBatch {
    double time = 0.0;
    std::vector<int> flow_firings;   // oscillators whose phase reaches 1 by flow
    std::vector<Spike> arrivals;     // spikes arriving at this instant
};

struct StopCondition {
    std::optional<long> max_firings;
    std::optional<double> t_max;
};

enum class StopReason { MaxFirings, TimeLimit };

class Simulator;

/// Per-batch hook; invoked after each batch has been applied.
class RunObserver {
public:
    virtual ~RunObserver() = default;
    virtual void on_batch(const Simulator& sim, const std::vector<FiringRecord>& fired) = 0;
};

/// Event-driven integrator of the hybrid dynamics: unit-rate phase flow,
/// threshold firing with reset, and delayed f-domain phase jumps, including
/// same-instant cascades. Time advances in exact increments; each oscillator's
/// next threshold crossing is stored as an absolute time and recomputed only
/// at that oscillator's own events, so free runs stay bit-exact.
class Simulator {
public:
    Simulator(const NetworkTopology& topology, const PhaseMap& map,
              std::vector<double> initial_phases, EngineOptions options = {});

    double now() const { return t_now_; }
    int size() const { return n_; }
    double phase(int i) const;
    std::vector<double> phases() const;
    const std::deque<Spike>& inflight() const { return inflight_; }
    const FiringLog& log() const { return log_; }
    const NetworkTopology& topology() const { return topology_; }
    const PhaseMap& map() const { return map_; }
    const EngineOptions& options() const { return options_; }

    Snapshot snapshot() const;

    /// Earliest upcoming instant with everything that happens at it.
    EventBatch next_event() const;

    /// Advances to the batch instant and processes it: flow firings, summed
    /// arrival jumps, and jump-to-threshold cascade firings. Returns the new
    /// firing records in log order.
    std::vector<FiringRecord> apply_batch(const EventBatch& batch);

    /// Runs until a stop criterion triggers. Resumable: the state stays valid.
    StopReason run(const StopCondition& stop, RunObserver* observer = nullptr);

private:
    void fire(int i, double t, std::vector<FiringRecord>& out);

    NetworkTopology topology_;
    PhaseMap map_;
    EngineOptions options_;
    int n_;
    double t_now_ = 0.0;
    std::vector<double> next_fire_;  // absolute time phase i reaches threshold
    std::vector<int> firing_counts_;
    std::deque<Spike> inflight_;     // sorted by arrival (FIFO: delay is global)
    FiringLog log_;
    std::vector<double> gain_;       // scratch: summed strength per target
};

/// Observer that keeps a snapshot after every batch (plus the initial state).
class SnapshotRecorder : public RunObserver {
public:
    explicit SnapshotRecorder(const Simulator& sim) { snapshots_.push_back(sim.snapshot()); }
    void on_batch(const Simulator& sim, const std::vector<FiringRecord>&) override {
        snapshots_.push_back(sim.snapshot());
    }
    const std::vector<Snapshot>& snapshots() const { return snapshots_; }

private:
    std::vector<Snapshot> snapshots_;
};

}  // namespace pco
