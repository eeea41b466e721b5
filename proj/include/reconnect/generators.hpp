#pragma once

#include "reconnect/multigraph.hpp"
#include "reconnect/rng.hpp"

namespace reconnect {

// Two-block multigraph: vertices split into equal halves, every within- or
// cross-block pair carries a fixed multiplicity, no loops. Gives a two-point
// degree profile, visibly far from the stationary gamma profile.
MultigraphState two_block_multigraph(int n, int c11, int c12, int c22);

/// Complete multigraph with multiplicity c on every pair: all degrees equal.
MultigraphState near_regular_multigraph(int n, int c);

// W-random multigraph drawn from the stationary Poisson multigraphon with
// parameters (kappa, rho); degree profile approximately Gamma(kappa, kappa/rho).
MultigraphState stationary_profile_multigraph(int n, double kappa, double rho,
                                              RngStream& rng);

}  // namespace reconnect
