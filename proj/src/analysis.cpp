#include "pco/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pco {

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Periodic: return "periodic";
        case Outcome::CompletelySynchronized: return "completely_synchronized";
        case Outcome::Undecided: return "undecided";
    }
    return "?";
}

std::vector<double> interspike_intervals(const FiringLog& log, int i) {
    const auto& t = log.times_of(i);
    if (t.size() < 2) {
        throw InsufficientDataError("oscillator " + std::to_string(i) +
                                    " fired fewer than 2 times");
    }
    std::vector<double> out(t.size() - 1);
    for (std::size_t m = 0; m + 1 < t.size(); ++m) out[m] = t[m + 1] - t[m];
    return out;
}

std::vector<IsiStats> isi_summary(const FiringLog& log) {
    std::vector<IsiStats> out;
    for (int i = 0; i < log.oscillators(); ++i) {
        IsiStats s;
        s.oscillator = i;
        const auto& t = log.times_of(i);
        if (t.size() >= 2) {
            s.count = static_cast<long>(t.size()) - 1;
            s.min = std::numeric_limits<double>::infinity();
            s.max = -std::numeric_limits<double>::infinity();
            double sum = 0.0;
            for (std::size_t m = 0; m + 1 < t.size(); ++m) {
                const double isi = t[m + 1] - t[m];
                s.min = std::min(s.min, isi);
                s.max = std::max(s.max, isi);
                sum += isi;
            }
            s.mean = sum / s.count;
        }
        out.push_back(s);
    }
    return out;
}

PropertyReport check_theorem1(const FiringLog& log, double tau, RegionClass region,
                              bool override_region, const AnalysisTolerances& tol) {
    if (region != RegionClass::A1 && !override_region) {
        throw HypothesisError("theorem 1 assumes (tau,eps) in A1; pass override to force");
    }
    PropertyReport rep;
    rep.id = "theorem1";
    rep.holds = true;
    for (int i = 0; i < log.oscillators(); ++i) {
        const auto& t = log.times_of(i);
        for (std::size_t m = 0; m + 1 < t.size(); ++m) {
            const double isi = t[m + 1] - t[m];
            if (!(isi > tau - tol.isi_slack)) {
                rep.holds = false;
                rep.witness = {{"oscillator", i},
                               {"m", m + 1},
                               {"t_m", t[m]},
                               {"t_m_plus_1", t[m + 1]},
                               {"isi", isi},
                               {"tau", tau}};
                return rep;
            }
        }
    }
    return rep;
}

PropertyReport check_firing_order(const FiringLog& log, const NetworkTopology& topology,
                                  int i, int j, const AnalysisTolerances& tol) {
    if (!topology.symmetric_pair(i, j)) {
        throw HypothesisError("firing-order property requires a symmetric pair");
    }
    PropertyReport rep;
    rep.id = "p1";
    const auto& ti = log.times_of(i);
    const auto& tj = log.times_of(j);
    if (ti.size() < 2 || tj.size() < 2) {
        rep.applicable = false;
        rep.skip_reason = "insufficient data: fewer than 2 firings on one oscillator";
        return rep;
    }
    rep.holds = true;
    auto violates = [&](const std::vector<double>& a, const std::vector<double>& b,
                        std::size_t ma, std::size_t mb) {
        return a[ma] <= b[mb] + tol.eta && a[ma + 1] > b[mb + 1] + tol.eta;
    };
    for (std::size_t a = 0; a + 1 < ti.size(); ++a) {
        for (std::size_t b = 0; b + 1 < tj.size(); ++b) {
            if (violates(ti, tj, a, b)) {
                rep.holds = false;
                rep.witness = {{"i", i},          {"j", j},
                               {"m_i", a + 1},    {"m_j", b + 1},
                               {"t_i_m", ti[a]},  {"t_j_m", tj[b]},
                               {"t_i_next", ti[a + 1]}, {"t_j_next", tj[b + 1]}};
                return rep;
            }
            if (violates(tj, ti, b, a)) {
                rep.holds = false;
                rep.witness = {{"i", j},          {"j", i},
                               {"m_i", b + 1},    {"m_j", a + 1},
                               {"t_i_m", tj[b]},  {"t_j_m", ti[a]},
                               {"t_i_next", tj[b + 1]}, {"t_j_next", ti[a + 1]}};
                return rep;
            }
        }
    }
    return rep;
}

PropertyReport check_sync_persistence(const FiringLog& log,
                                      std::span<const Snapshot> snapshots,
                                      const NetworkTopology& topology, int i, int j,
                                      const AnalysisTolerances& tol) {
    if (!topology.symmetric_pair(i, j)) {
        throw HypothesisError("sync-persistence property requires a symmetric pair");
    }
    PropertyReport rep;
    rep.id = "p2";
    const auto& ti = log.times_of(i);
    const auto& tj = log.times_of(j);

    // First simultaneous firing, if any.
    std::size_t a = 0, b = 0;
    bool found = false;
    while (a < ti.size() && b < tj.size()) {
        if (std::abs(ti[a] - tj[b]) <= tol.eta) {
            found = true;
            break;
        }
        if (ti[a] < tj[b]) ++a; else ++b;
    }
    if (!found) {
        rep.applicable = false;
        rep.skip_reason = "hypothesis not triggered: no simultaneous firing of the pair";
        return rep;
    }
    rep.holds = true;
    const double t_sync = std::min(ti[a], tj[b]);

    // All later firings must pair up simultaneously. Batches are applied
    // atomically, so an unmatched firing is a genuine divergence, not a
    // truncation artifact.
    std::size_t k = 0;
    const std::size_t ra = ti.size() - a, rb = tj.size() - b;
    for (; k < std::min(ra, rb); ++k) {
        if (std::abs(ti[a + k] - tj[b + k]) > tol.eta) {
            rep.holds = false;
            rep.witness = {{"i", i},      {"j", j},
                           {"m_i", a + k + 1}, {"m_j", b + k + 1},
                           {"t_i", ti[a + k]}, {"t_j", tj[b + k]},
                           {"sync_time", t_sync}};
            return rep;
        }
    }
    if (ra != rb) {
        const bool extra_i = ra > rb;
        rep.holds = false;
        rep.witness = {{"i", i},
                       {"j", j},
                       {"unmatched_oscillator", extra_i ? i : j},
                       {"t", extra_i ? ti[a + k] : tj[b + k]},
                       {"sync_time", t_sync}};
        return rep;
    }
    for (const Snapshot& s : snapshots) {
        if (s.t < t_sync - tol.eta) continue;
        if (std::abs(s.phases[i] - s.phases[j]) > tol.snapshot_tol) {
            rep.holds = false;
            rep.witness = {{"i", i},
                           {"j", j},
                           {"t", s.t},
                           {"phi_i", s.phases[i]},
                           {"phi_j", s.phases[j]},
                           {"sync_time", t_sync}};
            return rep;
        }
    }
    return rep;
}

namespace {

// Canonical form of the in-flight multiset for recurrence comparison.
std::vector<Spike> canonical_inflight(const Snapshot& s) {
    std::vector<Spike> v = s.inflight;
    std::sort(v.begin(), v.end(), [](const Spike& a, const Spike& b) {
        if (a.source != b.source) return a.source < b.source;
        return a.arrival < b.arrival;
    });
    return v;
}

bool snapshots_match(const Snapshot& a, const std::vector<Spike>& ca, const Snapshot& b,
                     const std::vector<Spike>& cb, double tol) {
    if (a.phases.size() != b.phases.size() || ca.size() != cb.size()) return false;
    for (std::size_t k = 0; k < a.phases.size(); ++k) {
        if (std::abs(a.phases[k] - b.phases[k]) > tol) return false;
    }
    for (std::size_t k = 0; k < ca.size(); ++k) {
        if (ca[k].source != cb[k].source) return false;
        if (std::abs(ca[k].arrival - cb[k].arrival) > tol) return false;
    }
    return true;
}

}  // namespace

RunClassification detect_period(const FiringLog& log, std::span<const Snapshot> snapshots,
                                const NetworkTopology& topology,
                                const AnalysisTolerances& tol) {
    RunClassification cls;
    const int n = topology.size();
    const int ref = 0;
    const auto& rt = log.times_of(ref);
    if (rt.size() < 2 || snapshots.empty()) {
        cls.note = "insufficient data for period detection";
        return cls;
    }

    // Transient skip in total firing records, capped at half the log so short
    // runs remain classifiable.
    const long skip = std::min<long>(static_cast<long>(tol.transient_skip_factor) * n,
                                     log.total() / 2);
    const double skip_time =
        skip > 0 ? log.records()[static_cast<std::size_t>(skip - 1)].time
                 : -std::numeric_limits<double>::infinity();

    // Align reference firing times with available snapshots (the collection
    // may be a bounded recent window).
    std::vector<const Snapshot*> snap_at(rt.size(), nullptr);
    std::vector<std::vector<Spike>> canon(rt.size());
    {
        std::size_t si = 0;
        for (std::size_t m = 0; m < rt.size(); ++m) {
            while (si < snapshots.size() && snapshots[si].t < rt[m] - tol.eta) ++si;
            if (si < snapshots.size() && std::abs(snapshots[si].t - rt[m]) <= tol.eta) {
                snap_at[m] = &snapshots[si];
                canon[m] = canonical_inflight(snapshots[si]);
            }
        }
    }

    std::size_t m0 = 0;
    while (m0 < rt.size() && (rt[m0] < skip_time - tol.eta || snap_at[m0] == nullptr)) ++m0;

    for (int d = 1; d <= tol.d_max; ++d) {
        if (m0 + d >= rt.size()) break;
        if (snap_at[m0 + d] == nullptr) continue;

        // Snapshot recurrence over the whole observed tail.
        bool ok = true;
        std::size_t compared = 0;
        for (std::size_t m = m0; m + d < rt.size(); ++m) {
            if (!snap_at[m] || !snap_at[m + d]) continue;
            if (!snapshots_match(*snap_at[m], canon[m], *snap_at[m + d], canon[m + d],
                                 tol.snapshot_tol)) {
                ok = false;
                break;
            }
            ++compared;
        }
        if (!ok || compared == 0) continue;

        const double delta_t0 = rt[m0 + d] - rt[m0];
        if (!(delta_t0 > 0.0)) continue;

        // Every oscillator must fire exactly d times per recurrence interval.
        for (int i = 0; i < n && ok; ++i) {
            const auto& t = log.times_of(i);
            const auto lo = std::upper_bound(t.begin(), t.end(), rt[m0] + tol.eta);
            const auto hi = std::upper_bound(t.begin(), t.end(), rt[m0 + d] + tol.eta);
            if (hi - lo != d) ok = false;
        }
        if (!ok) continue;

        // Direct verification on the log: t^i_{m+d} - t^i_m = delta_t0 from the
        // recurrence start onward.
        double onset_time = rt[m0];
        for (int i = 0; i < n && ok; ++i) {
            const auto& t = log.times_of(i);
            for (std::size_t m = 0; m + d < t.size(); ++m) {
                if (t[m] < rt[m0] - tol.eta) continue;
                if (std::abs(t[m + d] - t[m] - delta_t0) > tol.snapshot_tol) {
                    ok = false;
                    break;
                }
            }
        }
        if (!ok) continue;

        // Extend the onset backward as far as the log supports it.
        {
            bool extending = true;
            while (extending) {
                extending = false;
                double candidate = -1.0;
                // previous reference firing before current onset
                for (std::size_t m = rt.size(); m-- > 0;) {
                    if (rt[m] < onset_time - tol.eta) {
                        candidate = rt[m];
                        break;
                    }
                }
                if (candidate < 0.0) break;
                bool all_ok = true;
                for (int i = 0; i < n && all_ok; ++i) {
                    const auto& t = log.times_of(i);
                    for (std::size_t m = 0; m + d < t.size(); ++m) {
                        if (t[m] < candidate - tol.eta || t[m] >= onset_time - tol.eta)
                            continue;
                        if (std::abs(t[m + d] - t[m] - delta_t0) > tol.snapshot_tol) {
                            all_ok = false;
                            break;
                        }
                    }
                }
                if (all_ok) {
                    onset_time = candidate;
                    extending = true;
                }
            }
        }

        cls.outcome = Outcome::Periodic;
        cls.period_d = d;
        cls.delta_t0 = delta_t0;
        cls.onset_index = static_cast<int>(
            std::lower_bound(rt.begin(), rt.end(), onset_time - tol.eta) - rt.begin()) + 1;
        return cls;
    }
    cls.note = "no recurrence found within d_max and the observed horizon";
    return cls;
}

bool sync_predicate(const Snapshot& snap, const NetworkTopology& topology, double tol) {
    const int n = topology.size();
    double lo = 1.0, hi = 0.0;
    for (double p : snap.phases) {
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    if (hi - lo > tol) return false;
    if (snap.inflight.empty() || n == 1) return true;

    // Per-target multiset of (arrival offset, strength); all targets must see
    // the same one.
    std::vector<std::vector<std::pair<double, double>>> per_target(n);
    for (const Spike& sp : snap.inflight) {
        topology.for_each_post(sp.source, [&](int j, double w) {
            per_target[j].emplace_back(sp.arrival, w);
        });
    }
    for (auto& v : per_target) std::sort(v.begin(), v.end());
    for (int j = 1; j < n; ++j) {
        if (per_target[j].size() != per_target[0].size()) return false;
        for (std::size_t k = 0; k < per_target[j].size(); ++k) {
            if (std::abs(per_target[j][k].first - per_target[0][k].first) > tol) return false;
            if (std::abs(per_target[j][k].second - per_target[0][k].second) > 1e-12)
                return false;
        }
    }
    return true;
}

RunClassification detect_complete_sync(std::span<const Snapshot> snapshots,
                                       const NetworkTopology& topology,
                                       const AnalysisTolerances& tol) {
    RunClassification cls;
    if (snapshots.empty()) {
        cls.note = "no snapshots recorded";
        return cls;
    }
    // Onset of the trailing synchronized suffix.
    std::size_t first = snapshots.size();
    for (std::size_t k = snapshots.size(); k-- > 0;) {
        if (!sync_predicate(snapshots[k], topology, tol.snapshot_tol)) break;
        first = k;
    }
    if (first == snapshots.size()) {
        cls.note = "no synchronized suffix observed";
        return cls;
    }
    cls.outcome = Outcome::CompletelySynchronized;
    cls.onset_time = snapshots[first].t;
    return cls;
}

RunClassification classify_run(const FiringLog& log, std::span<const Snapshot> snapshots,
                               const NetworkTopology& topology,
                               const AnalysisTolerances& tol) {
    RunClassification period = detect_period(log, snapshots, topology, tol);
    RunClassification sync = detect_complete_sync(snapshots, topology, tol);
    if (sync.outcome == Outcome::CompletelySynchronized) {
        if (period.outcome == Outcome::Periodic) {
            sync.period_d = period.period_d;
            sync.delta_t0 = period.delta_t0;
            sync.onset_index = period.onset_index;
        } else {
            sync.note = "synchronized; period undecided: " + period.note;
        }
        return sync;
    }
    if (period.outcome == Outcome::Periodic) return period;
    RunClassification und;
    und.note = "period: " + period.note + "; sync: " + sync.note;
    return und;
}

PropertyReport check_period_one_if_synced(const RunClassification& cls, const PhaseMap& map,
                                          double tau, double eps, RegionClass region,
                                          double tol) {
    if (region != RegionClass::A1) {
        throw HypothesisError("property 3 assumes (tau,eps) in A1");
    }
    if (cls.outcome != Outcome::CompletelySynchronized) {
        throw HypothesisError("property 3 applies to completely synchronized solutions");
    }
    PropertyReport rep;
    rep.id = "p3";
    const double expected = sync_isi(map, tau, eps);
    rep.holds = cls.period_d == 1 && std::abs(cls.delta_t0 - expected) <= tol;
    if (!rep.holds) {
        rep.witness = {{"period_d", cls.period_d},
                       {"delta_t0", cls.delta_t0},
                       {"expected_isi", expected}};
    }
    return rep;
}

nlohmann::json classification_json(const RunClassification& cls) {
    nlohmann::json j{{"outcome", to_string(cls.outcome)}};
    if (cls.outcome == Outcome::Periodic || cls.period_d > 0) {
        j["period_d"] = cls.period_d;
        j["delta_t0"] = cls.delta_t0;
        j["onset_index"] = cls.onset_index;
    }
    if (cls.outcome == Outcome::CompletelySynchronized) {
        j["onset_time"] = cls.onset_time;
    }
    if (!cls.note.empty()) j["note"] = cls.note;
    return j;
}

nlohmann::json property_json(const PropertyReport& rep) {
    nlohmann::json j{{"id", rep.id}};
    if (!rep.applicable) {
        j["skipped"] = rep.skip_reason;
        return j;
    }
    j["holds"] = rep.holds;
    if (!rep.holds) j["witness"] = rep.witness;
    return j;
}

nlohmann::json analysis_report_json(const RunClassification& cls,
                                    const std::vector<PropertyReport>& properties,
                                    const std::vector<IsiStats>& isi) {
    nlohmann::json props = nlohmann::json::array();
    for (const auto& p : properties) props.push_back(property_json(p));
    nlohmann::json isi_j = nlohmann::json::array();
    for (const auto& s : isi) {
        nlohmann::json e{{"oscillator", s.oscillator}, {"count", s.count}};
        if (s.count > 0) {
            e["min"] = s.min;
            e["max"] = s.max;
            e["mean"] = s.mean;
        }
        isi_j.push_back(e);
    }
    return nlohmann::json{{"classification", classification_json(cls)},
                          {"properties", props},
                          {"isi_summary", isi_j}};
}

void OnlineSyncMonitor::observe(const Snapshot& snap) {
    if (sync_predicate(snap, topology_, tol_)) {
        if (!onset_) onset_ = snap.t;
    } else {
        onset_.reset();
    }
}

void RefSnapshotCollector::on_batch(const Simulator& sim,
                                    const std::vector<FiringRecord>& fired) {
    for (const FiringRecord& r : fired) {
        if (r.oscillator == reference_) {
            snapshots_.push_back(sim.snapshot());
            if (snapshots_.size() > max_keep_) snapshots_.pop_front();
            return;
        }
    }
}

}  // namespace pco
