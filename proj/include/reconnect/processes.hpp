#pragma once

#include <cstdint>
#include <vector>

#include "reconnect/distributions.hpp"
#include "reconnect/dynamics.hpp"
#include "reconnect/multigraph.hpp"
#include "reconnect/rng.hpp"

namespace reconnect {

// M/M/infinity queue: arrivals Poisson(mu), unit service rate per customer.
struct QueueTrajectory {
  std::vector<double> times;
  std::vector<int32_t> counts;
  int32_t terminal = 0;
};

/// Event-driven exact simulation up to t_end.
QueueTrajectory queue_simulate(int32_t h, double mu, double t_end, RngStream& rng);

/// One-shot draw from the exact transition law: BIN(h, e^{-t}) + POI((1-e^{-t}) mu).
int32_t queue_transition_sample(int32_t h, double mu, double t, RngStream& rng);

// Checks |q(t,h,l,mu) - p(l,mu)| <= e^{-t} (h + mu) for every l carrying
// kernel mass above the policy tail; returns the worst offender if violated.
struct MixingCheck {
  bool ok = true;
  int64_t worst_l = -1;
  double gap = 0.0;
  double bound = 0.0;
};

MixingCheck queue_mixing_bound_check(int32_t h, double mu, double t);

/// Exact CIR transition draw: i ~ POI(z tau), then Gamma(kappa + i, tau + alpha).
double cir_sample_exact(const CirParams& params, double z, double t, RngStream& rng);

// Euler-Maruyama with full truncation at zero (negative proposals clipped);
// weak-order-one cross-check tool, never the reference law. suppress_noise
// reduces it to the explicit Euler drift ODE.
double cir_euler(const CirParams& params, double z, double t_end, double dt, RngStream& rng,
                 bool suppress_noise = false);

// ---------------------------------------------------------------------------
// Per-step maximal coupling of the watched window to independent M/M/infinity
// queues (one per starred entry, rates frozen from the anchor state; one chain
// step advances queue time by 1/m).

class CoupledWindow {
 public:
  // Freezes rates mu_ij = d(i) d(j) / (2m (1 + 1[i=j])) from the anchor state;
  // Y starts equal to the anchor's watched window (starred units).
  static CoupledWindow from_anchor(const MultigraphState& anchor);

  int k() const { return k_; }
  int32_t count(int i, int j) const;  // starred units (diagonal = loop count)
  double rate(int i, int j) const;
  double queue_dt() const { return dt_; }

  // Mass of per-queue multi-jump transitions folded into "stay", accumulated
  // over steps (the O(1/m^2) bookkeeping the embedded law drops).
  double folded_mass() const { return folded_mass_; }

  int64_t steps() const { return steps_; }
  int64_t agreed_steps() const { return agreed_; }

  /// Whether X window (starred) and Y agree entrywise right now.
  bool windows_equal(const MultigraphState& state) const;

 private:
  friend struct CoupledStepAccess;
  int k_ = 0;
  double dt_ = 0.0;
  std::vector<int32_t> counts_;  // k*k starred
  std::vector<double> rates_;    // k*k starred
  double folded_mass_ = 0.0;
  int64_t steps_ = 0;
  int64_t agreed_ = 0;
};

struct CoupledStepResult {
  StepEvent event;
  bool agreed = false;
};

// One coupled step: the chain moves by its own law; the queue side moves by
// the embedded product law, maximally coupled to the chain's window increment.
// Both marginals are exact.
CoupledStepResult coupled_step(MultigraphState& state, const ChainParams& params,
                               CoupledWindow& coupled, RngStream& rng);

// Y-side embedded one-step law (per-queue transitions over dt restricted to
// {-1,0,+1}, multi-jump mass folded into stay) over the shared atom space.
WindowIncrementLaw queue_window_increment_law(const CoupledWindow& coupled);

/// Total variation distance between the two sides' one-step increment laws.
double increment_law_tv(const WindowIncrementLaw& a, const WindowIncrementLaw& b);

}  // namespace reconnect
