#pragma once

#include "hetsim/sim.hpp"

namespace hetsim {

// Comparison schemes. Both blank every macro synchronously on a fixed cycle
// and run proportional-fair scheduling with the same rate model as the main
// pipeline; neither uses the subband typing or the pattern optimizers.
//
// baseline1: blanking rate exactly 1/8 (one blank subframe per 8) plus
// fractional frequency reuse with factor 1/3 restricted to each macro's outer
// zone (worst `outer_zone_percentile` of served users by long-term SNR).
//
// baseline2: one network-wide blanking rate from {0/8 .. 7/8}, chosen by short
// paired pilot runs with common random numbers, then run for the full horizon;
// no frequency-reuse restriction.
struct BaselineParams {
  double outer_zone_percentile = 0.30;
  int cycle_len = 8;
  int pilot_subframes = 0;  // 0: one super-frame
};

MetricsReport run_baseline(const Scenario& scenario, Algorithm algorithm, const RunParams& params,
                           const BaselineParams& baseline = {});

// Reuse-group assignment: greedy coloring of the macro adjacency induced by
// shared users, so neighboring macros land in different subband groups.
std::vector<int> ffr_macro_groups(const TopologyGraph& graph);

// Users of each macro in the outer zone (lowest direct-link long-term SNR).
std::vector<std::uint8_t> outer_zone_users(const Scenario& scenario, double percentile);

}  // namespace hetsim
