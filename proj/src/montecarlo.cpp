#include "pco/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

namespace pco {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s ^= a * 0xd1342543de82ef95ULL;
    h ^= splitmix64(s);
    s ^= b * 0xaf251af3b0f025b5ULL;
    h ^= splitmix64(s);
    return h;
}

std::vector<double> sample_phases(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (double& phi : out) {
        // (x >> 11) / 2^53 is uniform on [0,1); reflect to (0,1].
        const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
        phi = 1.0 - u;
    }
    return out;
}

const char* to_string(SampleOutcome o) {
    switch (o) {
        case SampleOutcome::Synced: return "synced";
        case SampleOutcome::NotSynced: return "not_synced";
        case SampleOutcome::Undecided: return "undecided";
    }
    return "?";
}

namespace {

class CompositeObserver : public RunObserver {
public:
    CompositeObserver(RunObserver* a, RunObserver* b) : a_(a), b_(b) {}
    void on_batch(const Simulator& sim, const std::vector<FiringRecord>& fired) override {
        a_->on_batch(sim, fired);
        b_->on_batch(sim, fired);
    }

private:
    RunObserver* a_;
    RunObserver* b_;
};

}  // namespace

SampleResult classify_sample(const NetworkTopology& topology, const PhaseMap& map,
                             const std::vector<double>& phases, const Budget& budget,
                             const AnalysisTolerances& tol) {
    const int n = topology.size();
    const long max_firings = budget.resolved_max_firings(n);

    Simulator sim(topology, map, phases);
    OnlineSyncMonitor sync(topology, tol.snapshot_tol);
    sync.observe(sim.snapshot());
    RefSnapshotCollector ref;
    CompositeObserver obs(&sync, &ref);

    const long chunk = std::max<long>(200, 50L * n);
    SampleResult result;
    for (long target = chunk; ; target = std::min(target + chunk, max_firings)) {
        StopCondition stop;
        stop.max_firings = std::min(target, max_firings);
        stop.t_max = budget.t_max;
        const StopReason reason = sim.run(stop, &obs);

        const auto snaps = ref.snapshot_vector();
        RunClassification period = detect_period(sim.log(), snaps, topology, tol);
        if (period.outcome == Outcome::Periodic) {
            result.classification = period;
            if (sync.synced()) {
                result.outcome = SampleOutcome::Synced;
                result.classification.outcome = Outcome::CompletelySynchronized;
                result.classification.onset_time = sync.onset_time();
            } else {
                result.outcome = SampleOutcome::NotSynced;
            }
            return result;
        }
        if (reason == StopReason::TimeLimit || sim.log().total() >= max_firings) {
            if (sync.synced()) {
                // Synchronized but period not pinned within budget; still a
                // member of the synchronized basin.
                result.outcome = SampleOutcome::Synced;
                result.classification.outcome = Outcome::CompletelySynchronized;
                result.classification.onset_time = sync.onset_time();
                result.classification.note = "period undecided within budget";
            } else {
                result.outcome = SampleOutcome::Undecided;
                result.classification.note = "budget exhausted without recurrence";
            }
            return result;
        }
    }
}

std::pair<double, double> wilson_interval(long k, long n) {
    if (n <= 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double p = static_cast<double>(k) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // boundary counts pin the matching endpoint exactly
    const double lo = k == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = k == n ? 1.0 : std::min(1.0, center + half);
    return {lo, hi};
}

EstimateCell estimate_cell(const PhaseMap& map, double tau, double eps, int n,
                           long samples, std::uint64_t master_seed,
                           std::uint64_t cell_index, const Budget& budget,
                           const AnalysisTolerances& tol, int workers) {
    EstimateCell cell;
    cell.tau = tau;
    cell.eps = eps;
    cell.n = n;
    cell.samples = samples;
    cell.region = classify_region(map, tau, eps);

    const NetworkTopology topology = n >= 2
        ? NetworkTopology::all_to_all(n, tau, eps)
        : NetworkTopology::custom({{0.0}}, tau, eps);

    std::atomic<long> next{0};
    std::atomic<long> sync_count{0};
    std::atomic<long> undecided{0};
    auto worker = [&] {
        for (;;) {
            const long k = next.fetch_add(1);
            if (k >= samples) return;
            const auto phases =
                sample_phases(n, derive_seed(master_seed, cell_index, static_cast<std::uint64_t>(k)));
            const SampleResult r = classify_sample(topology, map, phases, budget, tol);
            if (r.outcome == SampleOutcome::Synced) sync_count.fetch_add(1);
            else if (r.outcome == SampleOutcome::Undecided) undecided.fetch_add(1);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    cell.sync_count = sync_count.load();
    cell.undecided = undecided.load();
    cell.p_hat = samples > 0 ? static_cast<double>(cell.sync_count) / samples : 0.0;
    std::tie(cell.ci_low, cell.ci_high) = wilson_interval(cell.sync_count, samples);
    return cell;
}

std::vector<EstimateCell> sweep(const PhaseMap& map, const SweepSpec& spec, int workers) {
    if (spec.taus.empty() || spec.epss.empty()) {
        throw ParameterError("sweep requires nonempty tau and eps grids");
    }
    if (spec.samples < 1) {
        throw ParameterError("sweep requires samples >= 1");
    }
    for (double t : spec.taus) {
        if (!(t > 0.0 && t < 1.0)) throw ParameterError("tau grid values must lie in (0,1)");
    }
    for (double e : spec.epss) {
        if (!(e > 0.0 && e < 1.0)) throw ParameterError("eps grid values must lie in (0,1)");
    }
    std::vector<EstimateCell> cells;
    cells.reserve(spec.taus.size() * spec.epss.size());
    std::uint64_t cell_index = 0;
    for (double tau : spec.taus) {
        for (double eps : spec.epss) {
            cells.push_back(estimate_cell(map, tau, eps, spec.n, spec.samples, spec.seed,
                                          cell_index, spec.budget, spec.tolerances,
                                          workers));
            ++cell_index;
        }
    }
    return cells;
}

}  // namespace pco
