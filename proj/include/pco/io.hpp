#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "pco/engine.hpp"
#include "pco/montecarlo.hpp"
#include "pco/topology.hpp"

namespace pco {

/// Shortest round-trippable decimal with 12 significant digits; used for every
/// CSV number so outputs are byte-stable.
std::string format_number(double x);

/// Header `time,oscillator,index`, one row per firing.
void write_firing_log_csv(std::ostream& os, const FiringLog& log);

/// Strength matrix as plain CSV for inspection.
void write_topology_csv(std::ostream& os, const NetworkTopology& topology);

/// Header `tau,eps,N,samples,sync,undecided,p_hat,ci_low,ci_high,region`.
void write_sweep_csv(std::ostream& os, const std::vector<EstimateCell>& cells);

/// Raster plot: one row per oscillator, one tick per firing.
std::string raster_svg(const FiringLog& log, int n);

/// Basin-prevalence heatmap: black cells where p_hat > 0, dashed overlay of
/// the boundary curve f(tau) + eps = 1.
std::string heatmap_svg(const std::vector<EstimateCell>& cells, const PhaseMap& map);

}  // namespace pco
