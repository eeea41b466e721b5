#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "reconnect/multigraph.hpp"
#include "reconnect/rng.hpp"

namespace reconnect {

struct ChainParams {
  double kappa = 1.0;        // preferential-attachment offset, > 0
  double rho_target = 1.0;   // edge density used for time scaling, > 0
  uint64_t seed = 0;

  void validate() const;
};

// One chain step: edge edges[edge_slot] = {v_old, w} was replaced by {v_new, w}.
struct StepEvent {
  Vertex v_old = 0;
  Vertex w = 0;
  Vertex v_new = 0;
  int64_t edge_slot = 0;
};

// Vertex drawn with probability (d(i) + kappa) / (2m + n kappa), realized as a
// mixture of a uniform vertex and a uniform edge-endpoint slot; O(1) per draw.
Vertex preferential_sample(const MultigraphState& state, double kappa, RngStream& rng);

/// Draw a step from the current state without applying it.
StepEvent sample_step_event(const MultigraphState& state, double kappa, RngStream& rng);

/// Draw and apply one step. Throws if m = 0.
StepEvent step(MultigraphState& state, const ChainParams& params, RngStream& rng);

struct Observer {
  int64_t every = 0;  // fire at step counts divisible by this (and at 0)
  std::function<void(int64_t, const MultigraphState&)> fn;
};

struct RunSummary {
  int64_t steps_done = 0;
};

// Apply `steps` steps; observers fire at their cadence (and at step 0).
// window_sample_every > 0 additionally records watched-vertex degrees into the
// attached window's trajectory buffers.
RunSummary run(MultigraphState& state, const ChainParams& params, int64_t steps,
               RngStream& rng, const std::vector<Observer>& observers = {},
               int64_t window_sample_every = 0);

// ---------------------------------------------------------------------------
// Exact one-step law of the watched k x k window.
//
// A step changes the window by one of: nothing ("stay"), +-1 on a single
// starred entry (diagonal counted in loop units), or a simultaneous -1/+1 on
// two distinct entries (both replaced and replacing edge inside the window).
// Deltas are lists of (i, j, +-1) with i <= j, sorted; the empty list is stay.

using WindowDelta = std::vector<std::array<int, 3>>;

struct TransitionLaw {
  int k = 0;
  std::map<WindowDelta, double> categories;

  double stay() const;
  double probability(const WindowDelta& delta) const;
  // Marginal probability that entry (i,j) moves by `sign`, regardless of the
  // rest of the window.
  double marginal(int i, int j, int sign) const;
  double total() const;
};

// Exact enumeration over (edge slot, coin, v_new); requires n <= 6, m <= 12.
TransitionLaw transition_oracle(const MultigraphState& state, double kappa, int k);

// Closed-form single-entry marginals (starred units; i == j means loop count).
double entry_increment_prob(const MultigraphState& state, double kappa, int i, int j);
double entry_decrement_prob(const MultigraphState& state, double kappa, int i, int j);

// Per-step window increment law over the atoms {stay} + {(i,j,+-1)} + {other};
// "other" is the two-entry compound mass. O(k^2) from the live state; the
// chain side of the queue coupling. Requires an attached window.
struct WindowIncrementLaw {
  int k = 0;
  double stay = 0.0;
  double other = 0.0;
  std::vector<double> up;    // indexed by entry_index(i, j)
  std::vector<double> down;

  int entry_index(int i, int j) const { return i * k - i * (i - 1) / 2 + (j - i); }
  int entry_count() const { return k * (k + 1) / 2; }
};

WindowIncrementLaw chain_window_increment_law(const MultigraphState& state, double kappa);

enum class AtomKind { Stay, Up, Down, Other };

struct WindowAtom {
  AtomKind kind = AtomKind::Stay;
  int i = 0;
  int j = 0;
};

/// Classify a realized step by its effect on the k x k window.
WindowAtom classify_step(const StepEvent& event, int k);

}  // namespace reconnect
