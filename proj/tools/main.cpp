// Command-line front end: single simulations, property checks, basin
// estimation, and (tau, eps) sweeps, all driven by JSON configs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pco/analysis.hpp"
#include "pco/config.hpp"
#include "pco/engine.hpp"
#include "pco/io.hpp"
#include "pco/montecarlo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitUnclassified = 3;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::string format = "csv";
    bool svg = false;
    int workers = 1;
    bool require_classified = false;
    bool override_region = false;
    bool dump_config = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file")->required();
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--format", args.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--svg", args.svg, "also emit SVG output");
    cmd->add_option("--workers", args.workers, "worker threads for sampling")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--require-classified", args.require_classified,
                  "exit 3 if the run stays unclassified within budget");
    cmd->add_flag("--override-region", args.override_region,
                  "check A1-only properties outside A1 anyway");
    cmd->add_flag("--dump-config", args.dump_config,
                  "print the normalized config and exit");
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pco::ConfigError(path, "cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw pco::ConfigError(path, e.what());
    }
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

struct RunOutput {
    pco::RunConfig cfg;
    pco::PhaseMap map;
    pco::NetworkTopology topology;
    pco::FiringLog log;
    std::vector<pco::Snapshot> snapshots;
    pco::RunClassification classification;
    pco::RegionClass region;
};

RunOutput execute_run(const CommonArgs& args) {
    pco::RunConfig cfg = pco::parse_run_config(load_json(args.config_path));
    if (args.seed && cfg.init.mode == pco::InitialPhases::Mode::Random) {
        cfg.init.seed = *args.seed;
    }
    pco::PhaseMap map = pco::make_phase_map(cfg.phase_map);
    pco::NetworkTopology topology = pco::make_topology(cfg);
    std::vector<double> phases = pco::make_initial_phases(cfg);

    pco::EngineOptions opts;
    opts.eta = cfg.tolerances.eta;
    opts.tie_rule = cfg.tie_rule;
    pco::Simulator sim(topology, map, std::move(phases), opts);
    pco::SnapshotRecorder recorder(sim);
    pco::StopCondition stop;
    stop.max_firings = cfg.budget.resolved_max_firings(topology.size());
    stop.t_max = cfg.budget.t_max;
    sim.run(stop, &recorder);

    pco::RunClassification cls =
        pco::classify_run(sim.log(), recorder.snapshots(), topology, cfg.tolerances);
    pco::RegionClass region = pco::classify_region(map, cfg.tau, cfg.eps, cfg.boundary_tol);
    return RunOutput{std::move(cfg),       std::move(map),
                     std::move(topology),  sim.log(),
                     recorder.snapshots(), std::move(cls),
                     region};
}

int cmd_simulate(const CommonArgs& args) {
    RunOutput run = execute_run(args);
    const fs::path out(args.out_dir);
    {
        std::ostringstream os;
        pco::write_firing_log_csv(os, run.log);
        write_file(out / "firing_log.csv", os.str());
    }
    const json report = pco::analysis_report_json(run.classification, {},
                                                  pco::isi_summary(run.log));
    write_file(out / "report.json", report.dump(2) + "\n");
    if (args.svg) {
        write_file(out / "raster.svg", pco::raster_svg(run.log, run.topology.size()));
    }
    std::cout << report["classification"].dump() << "\n";
    if (args.require_classified &&
        run.classification.outcome == pco::Outcome::Undecided) {
        return kExitUnclassified;
    }
    return kExitOk;
}

int cmd_check(const CommonArgs& args, const std::vector<std::string>& properties) {
    RunOutput run = execute_run(args);
    const bool in_a1 = run.region == pco::RegionClass::A1;
    std::vector<std::string> wanted = properties;
    if (wanted.empty()) wanted = {"theorem1", "p1", "p2", "p3"};
    for (const std::string& id : wanted) {
        if (id != "theorem1" && id != "p1" && id != "p2" && id != "p3") {
            throw pco::ConfigError("properties", "unknown property '" + id + "'");
        }
    }

    std::vector<pco::PropertyReport> reports;
    auto skip = [&](const std::string& id, const std::string& reason) {
        pco::PropertyReport rep;
        rep.id = id;
        rep.applicable = false;
        rep.skip_reason = reason;
        reports.push_back(rep);
    };
    const std::string region_reason = "skipped: hypothesis (tau,eps) in A1 not met";

    for (const std::string& id : wanted) {
        if (!in_a1 && !args.override_region) {
            skip(id, region_reason);
            continue;
        }
        if (id == "theorem1") {
            reports.push_back(pco::check_theorem1(run.log, run.cfg.tau, run.region,
                                                  args.override_region,
                                                  run.cfg.tolerances));
        } else if (id == "p1" || id == "p2") {
            bool any_pair = false;
            for (int i = 0; i < run.topology.size(); ++i) {
                for (int j = i + 1; j < run.topology.size(); ++j) {
                    if (!run.topology.symmetric_pair(i, j)) continue;
                    any_pair = true;
                    pco::PropertyReport rep =
                        id == "p1"
                            ? pco::check_firing_order(run.log, run.topology, i, j,
                                                      run.cfg.tolerances)
                            : pco::check_sync_persistence(run.log, run.snapshots,
                                                          run.topology, i, j,
                                                          run.cfg.tolerances);
                    if (!rep.applicable || !rep.holds) {
                        reports.push_back(rep);
                        goto next_property;
                    }
                }
            }
            if (!any_pair) {
                skip(id, "skipped: no symmetric pair in the topology");
            } else {
                pco::PropertyReport rep;
                rep.id = id;
                rep.holds = true;
                reports.push_back(rep);
            }
        next_property:;
        } else if (id == "p3") {
            if (run.classification.outcome != pco::Outcome::CompletelySynchronized) {
                skip(id, "skipped: run is not completely synchronized");
            } else {
                reports.push_back(pco::check_period_one_if_synced(
                    run.classification, run.map, run.cfg.tau, run.cfg.eps, run.region,
                    run.cfg.tolerances.snapshot_tol));
            }
        } else {
            throw pco::ConfigError("properties", "unknown property '" + id + "'");
        }
    }

    const json report = pco::analysis_report_json(run.classification, reports,
                                                  pco::isi_summary(run.log));
    write_file(fs::path(args.out_dir) / "check_report.json", report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    for (const auto& rep : reports) {
        if (rep.applicable && !rep.holds) return kExitViolation;
    }
    return kExitOk;
}

int cmd_estimate(const CommonArgs& args) {
    const json j = load_json(args.config_path);
    pco::PhaseMapConfig pm;
    if (j.contains("phase_map")) pm.current = j["phase_map"].value("I", 1.05);
    pco::PhaseMap map = pco::make_phase_map(pm);

    pco::SweepSpec spec;
    spec.taus = {j.at("tau").get<double>()};
    spec.epss = {j.at("eps").get<double>()};
    spec.n = j.at("n").get<int>();
    spec.samples = j.at("samples").get<long>();
    spec.seed = args.seed.value_or(j.value("seed", 0ULL));
    if (j.contains("stop")) {
        spec.budget.max_firings = j["stop"].value("max_firings", 0L);
        spec.budget.t_max = j["stop"].value("t_max", 200.0);
    }
    const pco::EstimateCell cell =
        pco::estimate_cell(map, spec.taus[0], spec.epss[0], spec.n, spec.samples,
                           spec.seed, 0, spec.budget, spec.tolerances, args.workers);

    std::ostringstream os;
    pco::write_sweep_csv(os, {cell});
    if (args.format == "json") {
        const json out{{"tau", cell.tau},         {"eps", cell.eps},
                       {"n", cell.n},             {"samples", cell.samples},
                       {"sync", cell.sync_count}, {"undecided", cell.undecided},
                       {"p_hat", cell.p_hat},     {"ci_low", cell.ci_low},
                       {"ci_high", cell.ci_high}, {"region", pco::to_string(cell.region)}};
        write_file(fs::path(args.out_dir) / "estimate.json", out.dump(2) + "\n");
        std::cout << out.dump(2) << "\n";
    } else {
        write_file(fs::path(args.out_dir) / "estimate.csv", os.str());
        std::cout << os.str();
    }
    return kExitOk;
}

int cmd_sweep(const CommonArgs& args) {
    pco::SweepSpec spec = pco::parse_sweep_spec(load_json(args.config_path));
    if (args.seed) spec.seed = *args.seed;
    pco::PhaseMapConfig pm;
    {
        const json j = load_json(args.config_path);
        if (j.contains("phase_map")) pm.current = j["phase_map"].value("I", 1.05);
    }
    pco::PhaseMap map = pco::make_phase_map(pm);
    const auto cells = pco::sweep(map, spec, args.workers);

    std::ostringstream os;
    pco::write_sweep_csv(os, cells);
    write_file(fs::path(args.out_dir) / "sweep.csv", os.str());
    if (args.svg) {
        write_file(fs::path(args.out_dir) / "heatmap.svg", pco::heatmap_svg(cells, map));
    }

    long a2 = 0, a2_black = 0;
    for (const auto& c : cells) {
        if (c.region != pco::RegionClass::A1) {
            ++a2;
            if (c.p_hat > 0.0) ++a2_black;
        }
    }
    std::cout << "cells=" << cells.size() << " a2_cells=" << a2
              << " a2_cells_with_sync=" << a2_black << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pulse-coupled oscillator network simulator"};
    app.require_subcommand(1);

    CommonArgs sim_args, check_args, est_args, sweep_args;
    std::vector<std::string> properties;

    CLI::App* sim = app.add_subcommand("simulate", "run one simulation");
    add_common(sim, sim_args);
    CLI::App* check = app.add_subcommand("check", "check firing properties on a run");
    add_common(check, check_args);
    check->add_option("--properties", properties,
                      "subset of theorem1,p1,p2,p3 (default: all)")
        ->delimiter(',');
    CLI::App* est = app.add_subcommand("estimate", "estimate the synchronized-basin fraction");
    add_common(est, est_args);
    CLI::App* swp = app.add_subcommand("sweep", "sweep a (tau,eps) grid");
    add_common(swp, sweep_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            if (sim_args.dump_config) {
                std::cout << pco::dump_run_config(
                                 pco::parse_run_config(load_json(sim_args.config_path)))
                                 .dump(2)
                          << "\n";
                return kExitOk;
            }
            return cmd_simulate(sim_args);
        }
        if (check->parsed()) {
            if (check_args.dump_config) {
                std::cout << pco::dump_run_config(
                                 pco::parse_run_config(load_json(check_args.config_path)))
                                 .dump(2)
                          << "\n";
                return kExitOk;
            }
            return cmd_check(check_args, properties);
        }
        if (est->parsed()) return cmd_estimate(est_args);
        if (swp->parsed()) {
            if (sweep_args.dump_config) {
                std::cout << pco::dump_sweep_spec(
                                 pco::parse_sweep_spec(load_json(sweep_args.config_path)))
                                 .dump(2)
                          << "\n";
                return kExitOk;
            }
            return cmd_sweep(sweep_args);
        }
    } catch (const pco::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
