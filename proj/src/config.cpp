#include "pco/config.hpp"

#include <cmath>

namespace pco {

namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_number()) {
        throw ConfigError(field, "expected a number");
    }
    return j[field].get<double>();
}

double number_or(const json& j, const std::string& field, double fallback) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_number()) throw ConfigError(field, "expected a number");
    return j[field].get<double>();
}

long integer_or(const json& j, const std::string& field, long fallback) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_number_integer()) throw ConfigError(field, "expected an integer");
    return j[field].get<long>();
}

AnalysisTolerances parse_tolerances(const json& j) {
    AnalysisTolerances t;
    if (!j.contains("tolerances")) return t;
    const json& tj = j["tolerances"];
    t.eta = number_or(tj, "eta", t.eta);
    t.snapshot_tol = number_or(tj, "snapshot_tol", t.snapshot_tol);
    t.isi_slack = number_or(tj, "isi_slack", t.isi_slack);
    t.d_max = static_cast<int>(integer_or(tj, "d_max", t.d_max));
    t.transient_skip_factor =
        static_cast<int>(integer_or(tj, "transient_skip_factor", t.transient_skip_factor));
    return t;
}

json dump_tolerances(const AnalysisTolerances& t) {
    return json{{"eta", t.eta},
                {"snapshot_tol", t.snapshot_tol},
                {"isi_slack", t.isi_slack},
                {"d_max", t.d_max},
                {"transient_skip_factor", t.transient_skip_factor}};
}

Budget parse_budget(const json& j) {
    Budget b;
    if (!j.contains("stop")) return b;
    const json& sj = j["stop"];
    b.max_firings = integer_or(sj, "max_firings", b.max_firings);
    b.t_max = number_or(sj, "t_max", b.t_max);
    return b;
}

std::vector<double> parse_grid(const json& j, const std::string& field) {
    if (!j.contains(field)) throw ConfigError(field, "missing grid");
    const json& g = j[field];
    std::vector<double> out;
    if (g.is_array()) {
        for (const auto& v : g) {
            if (!v.is_number()) throw ConfigError(field, "grid entries must be numbers");
            out.push_back(v.get<double>());
        }
    } else if (g.is_object()) {
        const double lo = require_number(g, "min");
        const double hi = require_number(g, "max");
        const long count = integer_or(g, "count", 0);
        if (count < 1) throw ConfigError(field + ".count", "expected count >= 1");
        for (long k = 0; k < count; ++k) {
            out.push_back(count == 1 ? lo : lo + (hi - lo) * k / (count - 1));
        }
    } else {
        throw ConfigError(field, "expected array or {min,max,count}");
    }
    if (out.empty()) throw ConfigError(field, "grid must be nonempty");
    return out;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
    RunConfig cfg;
    if (j.contains("phase_map")) {
        const json& pm = j["phase_map"];
        cfg.phase_map.kind = pm.value("kind", std::string("lif"));
        if (cfg.phase_map.kind != "lif") {
            throw ConfigError("phase_map.kind", "unknown kind '" + cfg.phase_map.kind + "'");
        }
        cfg.phase_map.current = number_or(pm, "I", cfg.phase_map.current);
    }
    cfg.tau = require_number(j, "tau");
    cfg.eps = require_number(j, "eps");

    if (!j.contains("topology")) throw ConfigError("topology", "missing");
    const json& tj = j["topology"];
    if (tj.is_string()) {
        // Compact form: {"topology": "all_to_all", "n": ...}
        cfg.topology.kind = tj.get<std::string>();
        if (cfg.topology.kind != "all_to_all") {
            throw ConfigError("topology", "unknown kind '" + cfg.topology.kind + "'");
        }
        cfg.topology.n = static_cast<int>(integer_or(j, "n", 0));
        if (cfg.topology.n < 1) throw ConfigError("n", "expected n >= 1");
    } else if (tj.is_object() && tj.contains("matrix")) {
        cfg.topology.kind = "matrix";
        const json& m = tj["matrix"];
        if (!m.is_array()) throw ConfigError("topology.matrix", "expected array of arrays");
        for (const auto& row : m) {
            if (!row.is_array()) throw ConfigError("topology.matrix", "expected array of arrays");
            cfg.topology.matrix.emplace_back();
            for (const auto& v : row) cfg.topology.matrix.back().push_back(v.get<double>());
        }
        cfg.topology.n = static_cast<int>(cfg.topology.matrix.size());
    } else {
        cfg.topology.kind = tj.is_object() ? tj.value("topology", tj.value("kind", std::string("all_to_all")))
                                           : std::string("all_to_all");
        if (cfg.topology.kind != "all_to_all") {
            throw ConfigError("topology.kind", "unknown kind '" + cfg.topology.kind + "'");
        }
        cfg.topology.n = static_cast<int>(integer_or(tj, "n", 0));
        if (cfg.topology.n < 1) throw ConfigError("topology.n", "expected n >= 1");
    }

    if (!j.contains("initial_phases")) throw ConfigError("initial_phases", "missing");
    const json& ip = j["initial_phases"];
    int modes = 0;
    if (ip.contains("values")) ++modes;
    if (ip.contains("identical")) ++modes;
    if (ip.contains("random_seed")) ++modes;
    if (modes != 1) {
        throw ConfigError("initial_phases",
                          "exactly one of values / identical / random_seed required");
    }
    if (ip.contains("values")) {
        cfg.init.mode = InitialPhases::Mode::Explicit;
        for (const auto& v : ip["values"]) cfg.init.values.push_back(v.get<double>());
    } else if (ip.contains("identical")) {
        cfg.init.mode = InitialPhases::Mode::Identical;
        cfg.init.identical_value = ip["identical"].get<double>();
    } else {
        cfg.init.mode = InitialPhases::Mode::Random;
        cfg.init.seed = ip["random_seed"].get<std::uint64_t>();
    }

    cfg.budget = parse_budget(j);
    cfg.tolerances = parse_tolerances(j);
    cfg.boundary_tol = number_or(j, "boundary_tol", cfg.boundary_tol);
    const std::string tie = j.value("tie_rule", std::string("flow_first"));
    if (tie == "flow_first") cfg.tie_rule = TieRule::FlowFirst;
    else if (tie == "arrival_first") cfg.tie_rule = TieRule::ArrivalFirst;
    else throw ConfigError("tie_rule", "expected flow_first or arrival_first");
    return cfg;
}

json dump_run_config(const RunConfig& cfg) {
    json j;
    j["phase_map"] = {{"kind", cfg.phase_map.kind}, {"I", cfg.phase_map.current}};
    j["tau"] = cfg.tau;
    j["eps"] = cfg.eps;
    if (cfg.topology.kind == "matrix") {
        j["topology"] = {{"matrix", cfg.topology.matrix}};
    } else {
        j["topology"] = {{"kind", cfg.topology.kind}, {"n", cfg.topology.n}};
    }
    switch (cfg.init.mode) {
        case InitialPhases::Mode::Explicit:
            j["initial_phases"] = {{"values", cfg.init.values}};
            break;
        case InitialPhases::Mode::Identical:
            j["initial_phases"] = {{"identical", cfg.init.identical_value}};
            break;
        case InitialPhases::Mode::Random:
            j["initial_phases"] = {{"random_seed", cfg.init.seed}};
            break;
    }
    j["stop"] = {{"max_firings", cfg.budget.max_firings}, {"t_max", cfg.budget.t_max}};
    j["tolerances"] = dump_tolerances(cfg.tolerances);
    j["boundary_tol"] = cfg.boundary_tol;
    j["tie_rule"] = cfg.tie_rule == TieRule::FlowFirst ? "flow_first" : "arrival_first";
    return j;
}

SweepSpec parse_sweep_spec(const json& j) {
    SweepSpec spec;
    spec.taus = parse_grid(j, "tau_grid");
    spec.epss = parse_grid(j, "eps_grid");
    spec.n = static_cast<int>(integer_or(j, "n", 0));
    if (spec.n < 1) throw ConfigError("n", "expected n >= 1");
    spec.samples = integer_or(j, "samples", 0);
    if (spec.samples < 1) throw ConfigError("samples", "expected samples >= 1");
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    spec.budget = parse_budget(j);
    spec.tolerances = parse_tolerances(j);
    spec.boundary_tol = number_or(j, "boundary_tol", spec.boundary_tol);
    return spec;
}

json dump_sweep_spec(const SweepSpec& spec) {
    return json{{"tau_grid", spec.taus},
                {"eps_grid", spec.epss},
                {"n", spec.n},
                {"samples", spec.samples},
                {"seed", spec.seed},
                {"stop", {{"max_firings", spec.budget.max_firings}, {"t_max", spec.budget.t_max}}},
                {"tolerances", dump_tolerances(spec.tolerances)},
                {"boundary_tol", spec.boundary_tol}};
}

PhaseMap make_phase_map(const PhaseMapConfig& cfg) {
    return PhaseMap::leaky_integrate_and_fire(cfg.current);
}

NetworkTopology make_topology(const RunConfig& cfg) {
    if (cfg.topology.kind == "matrix") {
        return NetworkTopology::custom(cfg.topology.matrix, cfg.tau, cfg.eps);
    }
    if (cfg.topology.n == 1) {
        return NetworkTopology::custom({{0.0}}, cfg.tau, cfg.eps);
    }
    return NetworkTopology::all_to_all(cfg.topology.n, cfg.tau, cfg.eps);
}

std::vector<double> make_initial_phases(const RunConfig& cfg) {
    const int n = cfg.topology.n;
    switch (cfg.init.mode) {
        case InitialPhases::Mode::Explicit:
            if (static_cast<int>(cfg.init.values.size()) != n) {
                throw ConfigError("initial_phases.values",
                                  "length must equal the oscillator count");
            }
            return cfg.init.values;
        case InitialPhases::Mode::Identical:
            return std::vector<double>(static_cast<std::size_t>(n), cfg.init.identical_value);
        case InitialPhases::Mode::Random:
            return sample_phases(n, cfg.init.seed);
    }
    throw ConfigError("initial_phases", "invalid mode");
}

}  // namespace pco
