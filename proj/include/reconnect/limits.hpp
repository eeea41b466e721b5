#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "reconnect/distributions.hpp"
#include "reconnect/multigraph.hpp"
#include "reconnect/rng.hpp"

namespace reconnect {

// Limit object of a convergent dense multigraph sequence: W(x, y, .) is a
// probability distribution on edge multiplicities for every pair of latent
// positions, symmetric, with even-only diagonal support. Immutable after
// construction; evaluators are safe for concurrent use.
class Multigraphon {
 public:
  enum class Kind { Step, PoissonProfile, Evolved };

  /// Step function of a finite state: W(x,y,k) = 1[B(ceil(nx), ceil(ny)) = k].
  static Multigraphon step_multigraphon(const MultigraphState& state);

  // Poisson multigraphon with degree profile `lambda`: off-diagonal entries
  // Poisson(lambda(x) lambda(y) / rho), loop counts at half rate.
  static Multigraphon poisson_profile(const QuantileDistribution& degree_law, double rho);
  static Multigraphon constant_poisson(double lambda);

  /// Edge-scale evolution W_t of a base multigraphon (t >= 0).
  static Multigraphon evolved(Multigraphon base, double t);

  /// Degree-scale evolution: Poisson profile F_t^{-1} driven by the CIR flow;
  /// refuses t = 0 (the theorem excludes it).
  static Multigraphon w_hat_t(double kappa, double rho, const QuantileDistribution& f0,
                              double t);

  /// Stationary limit: Poisson profile with Gamma(kappa, kappa/rho) quantiles.
  static Multigraphon w_hat_infty(double kappa, double rho);

  double operator()(double x, double y, int64_t k) const;
  /// Off-diagonal branch regardless of x == y (the diagonal has measure zero).
  double off_diag(double x, double y, int64_t k) const;

  double degree(double x) const;  // D(W, x)
  double rho() const;            // rho(W)
  Kind kind() const;

  /// Degree profile lambda(x) = F^{-1}(x) of Poisson-profile variants.
  double profile_at(double x) const;

  /// Cell count n when the base of this variant is a step function, else 0.
  int step_cells() const;

  // F0(z) = Leb{ y : D(W,y) <= z }; exact degree multiset for step variants,
  // a 2^14-point uniform grid otherwise.
  QuantileDistribution degree_distribution() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Theorem-style evaluators on top of the factories above.
double w_t_eval(const Multigraphon& base, double t, double x, double y, int64_t k);
double w_hat_infty_eval(double kappa, double rho, double x, double y, int64_t k);

double degree_function(const Multigraphon& w, double x);
double edge_density(const Multigraphon& w);

// W-random sample: latent i.i.d. uniforms U_1..U_k, conditionally independent
// entries drawn from W(U_i, U_j, .). Returns the adjacency matrix (row-major)
// and the latent positions.
struct WRandomSample {
  int k = 0;
  std::vector<int32_t> a;
  std::vector<double> u;
  int32_t at(int i, int j) const { return a[static_cast<std::size_t>(i) * k + j]; }
};

WRandomSample sample_w_random(const Multigraphon& w, int k, RngStream& rng);

/// Monte Carlo estimate of t_=(A, W) = P(X_W^{[k]} = A).
McEstimate motif_density_w(const FiniteMotif& motif, const Multigraphon& w,
                           int64_t samples, RngStream& rng);

// ---------------------------------------------------------------------------
// Finite reference laws used by the experiments (edge multiplicity marginals).

// Law of the watched entry X(T, 1, 2) at T = floor(t rho n^2 / 2) predicted by
// the edge-scale theorem, conditioned on the realizable initial cells: the
// mixture over ordered distinct vertex pairs (a, b) of
// q(t, B(a,b), ., d_a d_b / 2m). t = 0 reproduces the initial cell law.
std::vector<double> watched_pair_law_edge_scale(const MultigraphState& initial, double t,
                                                int kmax);

/// Same for the loop count X(T, 1, 1)/2: mixture of q(t, B(a,a)/2, ., d_a^2/4m).
std::vector<double> watched_loop_law_edge_scale(const MultigraphState& initial, double t,
                                                int lmax);

/// Marginal law of X_W(1, 2) for k = 0..kmax by an off-diagonal midpoint grid.
std::vector<double> pair_entry_law(const Multigraphon& w, int kmax, int grid = 512);

/// Marginal law of the loop count X_W(1,1)/2 on the diagonal.
std::vector<double> loop_entry_law(const Multigraphon& w, int lmax, int grid = 512);

}  // namespace reconnect
