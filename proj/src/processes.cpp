#include "reconnect/processes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reconnect {

QueueTrajectory queue_simulate(int32_t h, double mu, double t_end, RngStream& rng) {
  if (h < 0 || mu < 0.0 || t_end < 0.0) throw std::invalid_argument("queue_simulate: bad parameters");
  QueueTrajectory traj;
  traj.times.push_back(0.0);
  traj.counts.push_back(h);
  double clock = 0.0;
  int32_t count = h;
  for (;;) {
    const double rate = mu + static_cast<double>(count);
    if (rate <= 0.0) break;  // absorbed at 0 with no arrivals
    clock += rng.exponential(rate);
    if (clock >= t_end) break;
    if (rng.uniform01() * rate < mu) {
      ++count;
    } else {
      --count;
    }
    traj.times.push_back(clock);
    traj.counts.push_back(count);
  }
  traj.terminal = count;
  return traj;
}

int32_t queue_transition_sample(int32_t h, double mu, double t, RngStream& rng) {
  if (h < 0 || mu < 0.0 || t < 0.0) throw std::invalid_argument("queue_transition_sample: bad parameters");
  if (t == 0.0) return h;
  const double s = std::exp(-t);
  const double lam = -std::expm1(-t) * mu;
  return static_cast<int32_t>(binomial_draw(rng, h, s) + poisson_draw(rng, lam));
}

MixingCheck queue_mixing_bound_check(int32_t h, double mu, double t) {
  MixingCheck check;
  check.bound = std::exp(-t) * (static_cast<double>(h) + mu);
  const double tail = numeric_policy().series_tail;
  double cum = 0.0;
  for (int64_t l = 0; cum < 1.0 - tail; ++l) {
    const double q = queue_kernel(t, h, l, mu);
    cum += q;
    const double gap = std::fabs(q - poisson_pmf(l, mu));
    if (gap > check.gap) {
      check.gap = gap;
      check.worst_l = l;
    }
    if (l > 100000) break;
  }
  check.ok = check.gap <= check.bound + 1e-15;
  return check;
}

double cir_sample_exact(const CirParams& params, double z, double t, RngStream& rng) {
  if (t <= 0.0) throw std::invalid_argument("cir_sample_exact: t must be > 0");
  if (z < 0.0) throw std::invalid_argument("cir_sample_exact: z must be >= 0");
  const double tau = params.tau(t);
  const int64_t i = poisson_draw(rng, z * tau);
  return gamma_draw(rng, params.kappa + static_cast<double>(i), tau + params.alpha());
}

double cir_euler(const CirParams& params, double z, double t_end, double dt, RngStream& rng,
                 bool suppress_noise) {
  if (dt <= 0.0 || t_end < 0.0 || z < 0.0) throw std::invalid_argument("cir_euler: bad parameters");
  const double alpha = params.alpha();
  double value = z;
  double t = 0.0;
  while (t < t_end) {
    const double step_dt = std::min(dt, t_end - t);
    double next = value + (params.kappa - alpha * value) * step_dt;
    if (!suppress_noise) {
      next += std::sqrt(2.0 * value * step_dt) * rng.normal01();
    }
    value = std::max(0.0, next);  // full truncation at zero
    t += step_dt;
  }
  return value;
}

// ---------------------------------------------------------------------------
// Coupling.

CoupledWindow CoupledWindow::from_anchor(const MultigraphState& anchor) {
  if (!anchor.has_window()) {
    throw std::logic_error("CoupledWindow: anchor has no watched window");
  }
  const WatchedWindow& win = anchor.window();
  CoupledWindow cw;
  cw.k_ = win.k;
  cw.dt_ = 1.0 / static_cast<double>(anchor.m());
  cw.counts_.assign(static_cast<std::size_t>(win.k) * win.k, 0);
  cw.rates_.assign(static_cast<std::size_t>(win.k) * win.k, 0.0);
  const double two_m = 2.0 * static_cast<double>(anchor.m());
  for (int i = 0; i < win.k; ++i) {
    for (int j = 0; j < win.k; ++j) {
      int32_t starred = (i == j) ? win.at(i, i) / 2 : win.at(i, j);
      cw.counts_[static_cast<std::size_t>(i) * win.k + j] = starred;
      const double di = anchor.degree(i);
      const double dj = anchor.degree(j);
      cw.rates_[static_cast<std::size_t>(i) * win.k + j] =
          di * dj / (two_m * (i == j ? 2.0 : 1.0));
    }
  }
  return cw;
}

int32_t CoupledWindow::count(int i, int j) const {
  return counts_[static_cast<std::size_t>(i) * k_ + j];
}

double CoupledWindow::rate(int i, int j) const {
  return rates_[static_cast<std::size_t>(i) * k_ + j];
}

bool CoupledWindow::windows_equal(const MultigraphState& state) const {
  const WatchedWindow& win = state.window();
  for (int i = 0; i < k_; ++i) {
    for (int j = i; j < k_; ++j) {
      int32_t starred = (i == j) ? win.at(i, i) / 2 : win.at(i, j);
      if (starred != count(i, j)) return false;
    }
  }
  return true;
}

struct CoupledStepAccess {
  static std::vector<int32_t>& counts(CoupledWindow& cw) { return cw.counts_; }
  static void log_fold(CoupledWindow& cw, double mass) { cw.folded_mass_ += mass; }
  static void log_step(CoupledWindow& cw, bool agreed) {
    ++cw.steps_;
    if (agreed) ++cw.agreed_;
  }
};

WindowIncrementLaw queue_window_increment_law(const CoupledWindow& coupled) {
  const int k = coupled.k();
  const double dt = coupled.queue_dt();
  WindowIncrementLaw law;
  law.k = k;
  law.up.assign(static_cast<std::size_t>(law.entry_count()), 0.0);
  law.down.assign(static_cast<std::size_t>(law.entry_count()), 0.0);
  // Per-queue one-step law restricted to {-1,0,+1} (multi-jump mass folded
  // into stay); the window law is the product across independent queues.
  std::vector<double> p_up(static_cast<std::size_t>(law.entry_count()));
  std::vector<double> p_down(static_cast<std::size_t>(law.entry_count()));
  std::vector<double> p_zero(static_cast<std::size_t>(law.entry_count()));
  double stay_all = 1.0;
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      const int idx = law.entry_index(i, j);
      const int32_t h = coupled.count(i, j);
      const double mu = coupled.rate(i, j);
      const double up = queue_kernel(dt, h, h + 1, mu);
      const double down = h > 0 ? queue_kernel(dt, h, h - 1, mu) : 0.0;
      p_up[static_cast<std::size_t>(idx)] = up;
      p_down[static_cast<std::size_t>(idx)] = down;
      p_zero[static_cast<std::size_t>(idx)] = 1.0 - up - down;
      stay_all *= 1.0 - up - down;
    }
  }
  double single = 0.0;
  for (int idx = 0; idx < law.entry_count(); ++idx) {
    const double others = p_zero[static_cast<std::size_t>(idx)] > 0.0
                              ? stay_all / p_zero[static_cast<std::size_t>(idx)]
                              : 0.0;
    law.up[static_cast<std::size_t>(idx)] = p_up[static_cast<std::size_t>(idx)] * others;
    law.down[static_cast<std::size_t>(idx)] = p_down[static_cast<std::size_t>(idx)] * others;
    single += law.up[static_cast<std::size_t>(idx)] + law.down[static_cast<std::size_t>(idx)];
  }
  law.stay = stay_all;
  law.other = std::max(0.0, 1.0 - stay_all - single);
  return law;
}

double increment_law_tv(const WindowIncrementLaw& a, const WindowIncrementLaw& b) {
  double sum = std::fabs(a.stay - b.stay) + a.other + b.other;
  for (std::size_t idx = 0; idx < a.up.size(); ++idx) {
    sum += std::fabs(a.up[idx] - b.up[idx]);
    sum += std::fabs(a.down[idx] - b.down[idx]);
  }
  return 0.5 * sum;
}

namespace {

struct QueueStepLaw {
  std::vector<double> up, down, zero;
};

QueueStepLaw per_queue_law(const CoupledWindow& coupled) {
  const int k = coupled.k();
  const int entries = k * (k + 1) / 2;
  QueueStepLaw law;
  law.up.resize(static_cast<std::size_t>(entries));
  law.down.resize(static_cast<std::size_t>(entries));
  law.zero.resize(static_cast<std::size_t>(entries));
  int idx = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j, ++idx) {
      const int32_t h = coupled.count(i, j);
      const double mu = coupled.rate(i, j);
      law.up[static_cast<std::size_t>(idx)] = queue_kernel(coupled.queue_dt(), h, h + 1, mu);
      law.down[static_cast<std::size_t>(idx)] =
          h > 0 ? queue_kernel(coupled.queue_dt(), h, h - 1, mu) : 0.0;
      law.zero[static_cast<std::size_t>(idx)] =
          1.0 - law.up[static_cast<std::size_t>(idx)] - law.down[static_cast<std::size_t>(idx)];
    }
  }
  return law;
}

// Sample per-queue deltas from the product law conditioned on at least two
// queues jumping (the "other" atom); sequential conditional draws using
// suffix all-zero / exactly-one-nonzero probabilities.
std::vector<int> sample_multi_jump(const QueueStepLaw& law, RngStream& rng) {
  const int n = static_cast<int>(law.zero.size());
  std::vector<double> all_zero(static_cast<std::size_t>(n) + 1);
  std::vector<double> one_nonzero(static_cast<std::size_t>(n) + 1);
  all_zero[static_cast<std::size_t>(n)] = 1.0;
  one_nonzero[static_cast<std::size_t>(n)] = 0.0;
  for (int e = n - 1; e >= 0; --e) {
    const double pz = law.zero[static_cast<std::size_t>(e)];
    all_zero[static_cast<std::size_t>(e)] = pz * all_zero[static_cast<std::size_t>(e) + 1];
    one_nonzero[static_cast<std::size_t>(e)] =
        pz * one_nonzero[static_cast<std::size_t>(e) + 1] +
        (1.0 - pz) * all_zero[static_cast<std::size_t>(e) + 1];
  }
  auto suffix_at_least = [&](int e, int need) {
    if (need <= 0) return 1.0;
    if (need == 1) return 1.0 - all_zero[static_cast<std::size_t>(e)];
    return 1.0 - all_zero[static_cast<std::size_t>(e)] - one_nonzero[static_cast<std::size_t>(e)];
  };
  std::vector<int> deltas(static_cast<std::size_t>(n), 0);
  int need = 2;
  for (int e = 0; e < n; ++e) {
    const double pz = law.zero[static_cast<std::size_t>(e)];
    const double pnz = law.up[static_cast<std::size_t>(e)] + law.down[static_cast<std::size_t>(e)];
    const double w_zero = pz * suffix_at_least(e + 1, need);
    const double w_nonzero = pnz * suffix_at_least(e + 1, need - 1);
    const double total = w_zero + w_nonzero;
    if (total <= 0.0) continue;  // forced by earlier draws; keep zeros
    if (rng.uniform01() * total < w_nonzero) {
      const double up = law.up[static_cast<std::size_t>(e)];
      deltas[static_cast<std::size_t>(e)] = (rng.uniform01() * pnz < up) ? +1 : -1;
      --need;
    }
  }
  return deltas;
}

enum AtomId : int { kAtomStay = 0 };

// Atom ids: 0 = stay, then up/down per entry, then other.
int atom_up(int idx) { return 1 + 2 * idx; }
int atom_down(int idx) { return 2 + 2 * idx; }

}  // namespace

CoupledStepResult coupled_step(MultigraphState& state, const ChainParams& params,
                               CoupledWindow& coupled, RngStream& rng) {
  const int k = coupled.k();
  if (!state.has_window() || state.window().k != k) {
    throw std::logic_error("coupled_step: state window does not match coupling window");
  }

  const WindowIncrementLaw law_x = chain_window_increment_law(state, params.kappa);
  const WindowIncrementLaw law_y = queue_window_increment_law(coupled);
  const QueueStepLaw per_queue = per_queue_law(coupled);

  // Fold log: per-queue multi-jump mass dropped by the embedded law.
  {
    double fold = 0.0;
    int idx = 0;
    for (int i = 0; i < k; ++i) {
      for (int j = i; j < k; ++j, ++idx) {
        const int32_t h = coupled.count(i, j);
        const double stay_exact = queue_kernel(coupled.queue_dt(), h, h, coupled.rate(i, j));
        fold += std::max(0.0, per_queue.zero[static_cast<std::size_t>(idx)] - stay_exact);
      }
    }
    CoupledStepAccess::log_fold(coupled, fold);
  }

  // Advance the chain by its own mechanism; this realizes the X marginal.
  CoupledStepResult result;
  result.event = step(state, params, rng);
  const WindowAtom atom_x = classify_step(result.event, k);

  const int entries = law_x.entry_count();
  auto atom_prob = [&](const WindowIncrementLaw& law, const WindowAtom& atom) {
    switch (atom.kind) {
      case AtomKind::Stay:
        return law.stay;
      case AtomKind::Up:
        return law.up[static_cast<std::size_t>(law.entry_index(atom.i, atom.j))];
      case AtomKind::Down:
        return law.down[static_cast<std::size_t>(law.entry_index(atom.i, atom.j))];
      case AtomKind::Other:
        return law.other;
    }
    return 0.0;
  };

  // Shared-atom overlap mass (X's and Y's compound atoms never match).
  double overlap = std::min(law_x.stay, law_y.stay);
  for (int idx = 0; idx < entries; ++idx) {
    overlap += std::min(law_x.up[static_cast<std::size_t>(idx)],
                        law_y.up[static_cast<std::size_t>(idx)]);
    overlap += std::min(law_x.down[static_cast<std::size_t>(idx)],
                        law_y.down[static_cast<std::size_t>(idx)]);
  }

  // Maximal coupling given the realized X atom: copy it with probability
  // min(P_X, P_Y)/P_X, otherwise draw from Y's residual (disjoint support,
  // total mass 1 - overlap). Y's marginal comes out exact.
  const double p_x = atom_prob(law_x, atom_x);
  double shared = 0.0;
  if (atom_x.kind != AtomKind::Other) {
    shared = std::min(p_x, atom_prob(law_y, atom_x));
  }

  int chosen_atom;  // -1 = Y-other
  bool copy_x = p_x > 0.0 && rng.uniform01() * p_x < shared;
  if (copy_x) {
    switch (atom_x.kind) {
      case AtomKind::Stay:
        chosen_atom = kAtomStay;
        break;
      case AtomKind::Up:
        chosen_atom = atom_up(law_y.entry_index(atom_x.i, atom_x.j));
        break;
      case AtomKind::Down:
        chosen_atom = atom_down(law_y.entry_index(atom_x.i, atom_x.j));
        break;
      default:
        chosen_atom = kAtomStay;  // unreachable
        break;
    }
  } else {
    // Residual of Y: positive only where P_Y > P_X, plus Y's own compound atom.
    std::vector<double> weights(static_cast<std::size_t>(2 * entries + 2), 0.0);
    weights[0] = std::max(0.0, law_y.stay - law_x.stay);
    for (int idx = 0; idx < entries; ++idx) {
      weights[static_cast<std::size_t>(atom_up(idx))] =
          std::max(0.0, law_y.up[static_cast<std::size_t>(idx)] -
                            law_x.up[static_cast<std::size_t>(idx)]);
      weights[static_cast<std::size_t>(atom_down(idx))] =
          std::max(0.0, law_y.down[static_cast<std::size_t>(idx)] -
                            law_x.down[static_cast<std::size_t>(idx)]);
    }
    weights[static_cast<std::size_t>(2 * entries + 1)] = law_y.other;
    double total = 0.0;
    for (double w : weights) total += w;
    if (total > 0.0) {
      chosen_atom = static_cast<int>(categorical_draw(rng, weights));
      if (chosen_atom == 2 * entries + 1) chosen_atom = -1;
    } else {
      chosen_atom = kAtomStay;  // residual mass vanished to rounding
    }
  }

  // Apply the Y outcome.
  auto& counts = CoupledStepAccess::counts(coupled);
  auto apply_delta = [&](int idx, int delta) {
    int i = 0;
    int rem = idx;
    while (rem >= k - i) {
      rem -= k - i;
      ++i;
    }
    const int j = i + rem;
    counts[static_cast<std::size_t>(i) * k + j] += delta;
    if (i != j) counts[static_cast<std::size_t>(j) * k + i] += delta;
  };
  if (chosen_atom == -1) {
    const std::vector<int> deltas = sample_multi_jump(per_queue, rng);
    for (int idx = 0; idx < entries; ++idx) {
      if (deltas[static_cast<std::size_t>(idx)] != 0) {
        apply_delta(idx, deltas[static_cast<std::size_t>(idx)]);
      }
    }
  } else if (chosen_atom != kAtomStay) {
    const int idx = (chosen_atom - 1) / 2;
    apply_delta(idx, (chosen_atom % 2 == 1) ? +1 : -1);
  }

  // Agreement: identical atoms; compound atoms never agree across the sides.
  bool agreed = false;
  if (copy_x) {
    agreed = true;
  } else if (chosen_atom == kAtomStay && atom_x.kind == AtomKind::Stay) {
    agreed = true;
  } else if (chosen_atom > 0 && atom_x.kind != AtomKind::Stay &&
             atom_x.kind != AtomKind::Other) {
    const int idx = (chosen_atom - 1) / 2;
    const bool up = (chosen_atom % 2 == 1);
    const int x_idx = law_x.entry_index(atom_x.i, atom_x.j);
    agreed = (idx == x_idx) && (up == (atom_x.kind == AtomKind::Up));
  }
  result.agreed = agreed;
  CoupledStepAccess::log_step(coupled, agreed);
  return result;
}

}  // namespace reconnect
