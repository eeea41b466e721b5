#pragma once

#include <string>

#include "json.hpp"

#include "reconnect/config.hpp"

namespace reconnect {

// One experiment run: machine-readable report plus the overall pass flag.
// Reports carry no timestamps so identical config+seed gives identical bytes.
struct ExperimentResult {
  std::string name;
  bool pass = false;
  nlohmann::ordered_json report;
};

// Theorem-1 check at desk scale: watched edge multiplicities at
// T = floor(t rho n^2 / 2) against the queue-kernel mixture law, and the
// degrees-frozen measurement at t = 1.
ExperimentResult experiment_edge_scale(const Config& cfg);

// Theorem-2 check: scaled degrees at T = floor(t rho n^3) against F_t (KS),
// watched entries against the Poisson-profile law, and the long-run limit
// against Gamma(kappa, kappa/rho) and the stationary multigraphon.
ExperimentResult experiment_degree_scale(const Config& cfg);

// Two-timescale demonstration: edge laws look stationary within an n^2-sized
// window around an n^3-scale anchor but differ across anchors; a stationary
// initial profile must not trigger the across-anchor rejection.
ExperimentResult experiment_subaging(const Config& cfg);

// Per-step maximal coupling of the watched window to independent queues:
// fraction of seeds whose whole horizon T <= n^nu agrees, per n.
ExperimentResult experiment_coupling(const Config& cfg);

/// Writes <out_dir>/<name>-report.json; returns the path.
std::string write_report(const ExperimentResult& result, const std::string& out_dir);

}  // namespace reconnect
