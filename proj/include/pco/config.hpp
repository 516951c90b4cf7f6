#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pco/engine.hpp"
#include "pco/montecarlo.hpp"
#include "pco/phase_map.hpp"
#include "pco/topology.hpp"

#include <json.hpp>

namespace pco {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error("config error at '" + field + "': " + what), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct PhaseMapConfig {
    std::string kind = "lif";
    double current = 1.05;
};

struct TopologyConfig {
    std::string kind = "all_to_all";  // or "matrix"
    int n = 0;
    std::vector<std::vector<double>> matrix;
};

struct InitialPhases {
    enum class Mode { Explicit, Identical, Random } mode = Mode::Random;
    std::vector<double> values;
    double identical_value = 0.5;
    std::uint64_t seed = 0;
};

struct RunConfig {
    PhaseMapConfig phase_map;
    TopologyConfig topology;
    double tau = 0.1;
    double eps = 0.1;
    InitialPhases init;
    Budget budget;
    AnalysisTolerances tolerances;
    double boundary_tol = 1e-9;
    TieRule tie_rule = TieRule::FlowFirst;
};

RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json dump_run_config(const RunConfig& cfg);

SweepSpec parse_sweep_spec(const nlohmann::json& j);
nlohmann::json dump_sweep_spec(const SweepSpec& spec);

PhaseMap make_phase_map(const PhaseMapConfig& cfg);
NetworkTopology make_topology(const RunConfig& cfg);
std::vector<double> make_initial_phases(const RunConfig& cfg);

}  // namespace pco
