#include "pco/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pco {

namespace {
constexpr double kPhaseSlack = 1e-12;
}

Simulator::Simulator(const NetworkTopology& topology, const PhaseMap& map,
                     std::vector<double> initial_phases, EngineOptions options)
    : topology_(topology),
      map_(map),
      options_(options),
      n_(topology.size()),
      log_(topology.size()) {
    if (static_cast<int>(initial_phases.size()) != n_) {
        throw ParameterError("initial phase count does not match network size");
    }
    if (!(topology_.tau() > 10.0 * options_.eta)) {
        throw ParameterError("tie tolerance eta must be much smaller than tau");
    }
    next_fire_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        const double phi = initial_phases[i];
        if (std::isnan(phi) || phi <= kPhaseSlack || phi > 1.0 + kPhaseSlack) {
            throw ParameterError("initial phase " + std::to_string(i) +
                                 " must lie in (0,1], got " + std::to_string(phi));
        }
        next_fire_[i] = 1.0 - std::min(phi, 1.0);
    }
    firing_counts_.assign(n_, 0);
    gain_.assign(n_, 0.0);
}

double Simulator::phase(int i) const {
    const double d = next_fire_.at(i) - t_now_;
    return std::clamp(1.0 - d, 0.0, 1.0);
}

std::vector<double> Simulator::phases() const {
    std::vector<double> out(n_);
    for (int i = 0; i < n_; ++i) out[i] = phase(i);
    return out;
}

Snapshot Simulator::snapshot() const {
    Snapshot s;
    s.t = t_now_;
    s.phases = phases();
    s.inflight.reserve(inflight_.size());
    for (const Spike& sp : inflight_) {
        s.inflight.push_back({sp.source, sp.arrival - t_now_});
    }
    return s;
}

EventBatch Simulator::next_event() const {
    double t = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_; ++i) t = std::min(t, next_fire_[i]);
    if (!inflight_.empty()) t = std::min(t, inflight_.front().arrival);

    EventBatch batch;
    batch.time = t;
    for (int i = 0; i < n_; ++i) {
        if (next_fire_[i] <= t + options_.eta) batch.flow_firings.push_back(i);
    }
    for (const Spike& sp : inflight_) {
        if (sp.arrival > t + options_.eta) break;
        batch.arrivals.push_back(sp);
    }
    return batch;
}

void Simulator::fire(int i, double t, std::vector<FiringRecord>& out) {
    FiringRecord rec{t, i, ++firing_counts_[i]};
    out.push_back(rec);
    next_fire_[i] = t + 1.0;
    inflight_.push_back({i, t + topology_.tau()});
}

std::vector<FiringRecord> Simulator::apply_batch(const EventBatch& batch) {
    const double t = batch.time;
    if (t < t_now_ - options_.eta) {
        throw std::logic_error("batch time precedes current time");
    }
    t_now_ = std::max(t_now_, t);

    std::vector<FiringRecord> fired;
    std::vector<char> fired_now(static_cast<std::size_t>(n_), 0);

    auto process_flow = [&] {
        for (int i : batch.flow_firings) {
            if (!fired_now[i]) {
                fire(i, t, fired);
                fired_now[i] = 1;
            }
        }
    };

    auto process_arrivals = [&] {
        if (batch.arrivals.empty()) return;
        std::fill(gain_.begin(), gain_.end(), 0.0);
        for (const Spike& sp : batch.arrivals) {
            topology_.for_each_post(sp.source, [&](int j, double w) { gain_[j] += w; });
        }
        // Drop the consumed spikes; the deque is arrival-sorted, so they sit
        // at the front.
        inflight_.erase(inflight_.begin(), inflight_.begin() + batch.arrivals.size());
        for (int j = 0; j < n_; ++j) {
            if (gain_[j] <= 0.0) continue;
            const double v = map_.f(phase(j)) + gain_[j];
            if (v >= 1.0) {
                // Jump to threshold: fires at this same instant. The emitted
                // spike arrives tau later, so the cascade cannot re-enter.
                if (fired_now[j]) {
                    throw std::logic_error("oscillator fired twice in one instant");
                }
                fire(j, t, fired);
                fired_now[j] = 1;
            } else {
                const double phi = map_.inverse(v);
                next_fire_[j] = t + (1.0 - phi);
            }
        }
    };

    if (options_.tie_rule == TieRule::FlowFirst) {
        process_flow();
        process_arrivals();
    } else {
        process_arrivals();
        process_flow();
    }

    std::sort(fired.begin(), fired.end(), [](const FiringRecord& a, const FiringRecord& b) {
        return a.oscillator < b.oscillator;
    });
    for (const FiringRecord& r : fired) log_.append(r);
    return fired;
}

StopReason Simulator::run(const StopCondition& stop, RunObserver* observer) {
    if (!stop.max_firings && !stop.t_max) {
        throw ParameterError("run requires at least one stop criterion");
    }
    for (;;) {
        if (stop.max_firings && log_.total() >= *stop.max_firings) {
            return StopReason::MaxFirings;
        }
        EventBatch batch = next_event();
        if (stop.t_max && batch.time > *stop.t_max) {
            return StopReason::TimeLimit;
        }
        auto fired = apply_batch(batch);
        if (observer) observer->on_batch(*this, fired);
    }
}

}  // namespace pco
