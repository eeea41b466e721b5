#include "reconnect/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reconnect {

void ChainParams::validate() const {
  if (!(kappa > 0.0)) throw std::invalid_argument("ChainParams: kappa must be > 0");
  if (!(rho_target > 0.0)) throw std::invalid_argument("ChainParams: rho_target must be > 0");
}

Vertex preferential_sample(const MultigraphState& state, double kappa, RngStream& rng) {
  const double n = static_cast<double>(state.n());
  const double two_m = 2.0 * static_cast<double>(state.m());
  const double denom = two_m + n * kappa;
  if (!(denom > 0.0)) throw std::invalid_argument("preferential_sample: 2m + n kappa <= 0");
  // With probability n kappa / (2m + n kappa) a uniform vertex, otherwise a
  // uniform edge-endpoint slot; the mixture realizes (d(i)+kappa)/(2m+n kappa).
  if (rng.uniform01() * denom < n * kappa) {
    return static_cast<Vertex>(rng.uniform_below(static_cast<uint32_t>(state.n())));
  }
  const Edge& e = state.edges()[rng.uniform_below(static_cast<uint32_t>(state.m()))];
  return rng.coin() ? e.v : e.u;
}

StepEvent sample_step_event(const MultigraphState& state, double kappa, RngStream& rng) {
  if (state.m() < 1) throw std::invalid_argument("step: state has no edges");
  StepEvent ev;
  ev.edge_slot = rng.uniform_below(static_cast<uint32_t>(state.m()));
  const Edge& e = state.edges()[static_cast<std::size_t>(ev.edge_slot)];
  if (rng.coin()) {
    ev.v_old = e.u;
    ev.w = e.v;
  } else {
    ev.v_old = e.v;
    ev.w = e.u;
  }
  ev.v_new = preferential_sample(state, kappa, rng);
  return ev;
}

StepEvent step(MultigraphState& state, const ChainParams& params, RngStream& rng) {
  params.validate();
  StepEvent ev = sample_step_event(state, params.kappa, rng);
  state.replace_endpoint(ev.edge_slot, ev.v_old, ev.v_new);
  return ev;
}

RunSummary run(MultigraphState& state, const ChainParams& params, int64_t steps,
               RngStream& rng, const std::vector<Observer>& observers,
               int64_t window_sample_every) {
  params.validate();
  if (steps < 0) throw std::invalid_argument("run: steps must be >= 0");
  auto sample_window = [&](int64_t t) {
    if (window_sample_every <= 0 || !state.has_window()) return;
    if (t % window_sample_every != 0) return;
    WatchedWindow& win = state.mutable_window();
    win.sample_steps.push_back(t);
    std::vector<int32_t> degs(static_cast<std::size_t>(win.k));
    for (int i = 0; i < win.k; ++i) degs[static_cast<std::size_t>(i)] = state.degree(i);
    win.degree_samples.push_back(std::move(degs));
  };
  for (const Observer& obs : observers) {
    if (obs.every > 0 && obs.fn) obs.fn(0, state);
  }
  sample_window(0);
  for (int64_t t = 1; t <= steps; ++t) {
    step(state, params, rng);
    for (const Observer& obs : observers) {
      if (obs.every > 0 && obs.fn && t % obs.every == 0) obs.fn(t, state);
    }
    sample_window(t);
  }
  return {steps};
}

// ---------------------------------------------------------------------------
// Transition law.

double TransitionLaw::stay() const {
  auto it = categories.find(WindowDelta{});
  return it == categories.end() ? 0.0 : it->second;
}

double TransitionLaw::probability(const WindowDelta& delta) const {
  auto it = categories.find(delta);
  return it == categories.end() ? 0.0 : it->second;
}

double TransitionLaw::marginal(int i, int j, int sign) const {
  double sum = 0.0;
  for (const auto& [delta, p] : categories) {
    for (const auto& ch : delta) {
      if (ch[0] == i && ch[1] == j && ch[2] == sign) {
        sum += p;
        break;
      }
    }
  }
  return sum;
}

double TransitionLaw::total() const {
  double sum = 0.0;
  for (const auto& [delta, p] : categories) sum += p;
  return sum;
}

namespace {

WindowDelta step_delta(Vertex v_old, Vertex w, Vertex v_new, int k) {
  WindowDelta delta;
  if (v_new == v_old) return delta;
  if (v_old < k && w < k) {
    delta.push_back({std::min(v_old, w), std::max(v_old, w), -1});
  }
  if (v_new < k && w < k) {
    delta.push_back({std::min(v_new, w), std::max(v_new, w), +1});
  }
  std::sort(delta.begin(), delta.end());
  return delta;
}

}  // namespace

TransitionLaw transition_oracle(const MultigraphState& state, double kappa, int k) {
  if (state.n() > 6 || state.m() > 12) {
    throw std::invalid_argument("transition_oracle: state too large for exact enumeration");
  }
  if (k < 0 || k > state.n()) throw std::out_of_range("transition_oracle: bad k");
  const double n = static_cast<double>(state.n());
  const double two_m = 2.0 * static_cast<double>(state.m());
  const double denom = two_m + n * kappa;
  TransitionLaw law;
  law.k = k;
  const double slot_coin = 0.5 / static_cast<double>(state.m());
  for (const Edge& e : state.edges()) {
    for (int coin = 0; coin < 2; ++coin) {
      Vertex v_old = coin ? e.v : e.u;
      Vertex w = coin ? e.u : e.v;
      for (Vertex c = 0; c < state.n(); ++c) {
        double p = slot_coin * (static_cast<double>(state.degree(c)) + kappa) / denom;
        law.categories[step_delta(v_old, w, c, k)] += p;
      }
    }
  }
  return law;
}

double entry_increment_prob(const MultigraphState& state, double kappa, int i, int j) {
  if (i > j) std::swap(i, j);
  const double n = static_cast<double>(state.n());
  const double two_m = 2.0 * static_cast<double>(state.m());
  const double denom = two_m + n * kappa;
  auto pref = [&](int v) {
    return (static_cast<double>(state.degree(v)) + kappa) / denom;
  };
  const std::vector<int32_t> window = state.adjacency_window(j + 1);
  const double x = window[static_cast<std::size_t>(i) * (j + 1) + j];
  const double di = state.degree(i);
  const double dj = state.degree(j);
  if (i == j) {
    return pref(i) * (di - x) / two_m;
  }
  return pref(i) * (dj - x) / two_m + pref(j) * (di - x) / two_m;
}

double entry_decrement_prob(const MultigraphState& state, double kappa, int i, int j) {
  if (i > j) std::swap(i, j);
  const double n = static_cast<double>(state.n());
  const double two_m = 2.0 * static_cast<double>(state.m());
  const double denom = two_m + n * kappa;
  auto pref = [&](int v) {
    return (static_cast<double>(state.degree(v)) + kappa) / denom;
  };
  const std::vector<int32_t> window = state.adjacency_window(j + 1);
  const double x = window[static_cast<std::size_t>(i) * (j + 1) + j];
  if (i == j) {
    return (x / two_m) * (1.0 - pref(i));
  }
  return (x / two_m) * (1.0 - pref(i)) + (x / two_m) * (1.0 - pref(j));
}

WindowIncrementLaw chain_window_increment_law(const MultigraphState& state, double kappa) {
  if (!state.has_window()) {
    throw std::logic_error("chain_window_increment_law: no watched window attached");
  }
  const WatchedWindow& win = state.window();
  const int k = win.k;
  const double n = static_cast<double>(state.n());
  const double two_m = 2.0 * static_cast<double>(state.m());
  const double denom = two_m + n * kappa;

  WindowIncrementLaw law;
  law.k = k;
  law.up.assign(static_cast<std::size_t>(law.entry_count()), 0.0);
  law.down.assign(static_cast<std::size_t>(law.entry_count()), 0.0);

  // pref(c) for watched vertices and their total mass.
  std::vector<double> pref(static_cast<std::size_t>(k));
  double pref_window = 0.0;
  for (int c = 0; c < k; ++c) {
    pref[static_cast<std::size_t>(c)] = (static_cast<double>(state.degree(c)) + kappa) / denom;
    pref_window += pref[static_cast<std::size_t>(c)];
  }

  // Column sums of the window: edge-endpoint incidences at b staying inside.
  std::vector<double> in_col(static_cast<std::size_t>(k), 0.0);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      in_col[static_cast<std::size_t>(b)] += win.at(a, b);
    }
  }

  double moved = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      const double x = win.at(i, j);
      // P(replaced edge is a copy of {i,j}).
      const double p_old = (i == j) ? x / two_m : 2.0 * x / two_m;
      const double down = p_old * (1.0 - pref_window);
      double up;
      const double out_i = (static_cast<double>(state.degree(i)) -
                            in_col[static_cast<std::size_t>(i)]) / two_m;
      if (i == j) {
        up = out_i * pref[static_cast<std::size_t>(i)];
      } else {
        const double out_j = (static_cast<double>(state.degree(j)) -
                              in_col[static_cast<std::size_t>(j)]) / two_m;
        up = out_j * pref[static_cast<std::size_t>(i)] +
             out_i * pref[static_cast<std::size_t>(j)];
      }
      const int idx = law.entry_index(i, j);
      law.up[static_cast<std::size_t>(idx)] = up;
      law.down[static_cast<std::size_t>(idx)] = down;
      moved += up + down;
    }
  }

  // Compound mass: replaced and replacing edge both inside the window but
  // different; sum over ordered (v_old=a, w=b) pairs within the window.
  double compound = 0.0;
  for (int a = 0; a < k; ++a) {
    double row = 0.0;
    for (int b = 0; b < k; ++b) row += win.at(a, b);
    compound += (row / two_m) * (pref_window - pref[static_cast<std::size_t>(a)]);
  }
  law.other = compound;
  law.stay = 1.0 - moved - compound;
  return law;
}

WindowAtom classify_step(const StepEvent& event, int k) {
  if (event.v_new == event.v_old) return {AtomKind::Stay, 0, 0};
  const bool old_in = event.v_old < k && event.w < k;
  const bool new_in = event.v_new < k && event.w < k;
  if (old_in && new_in) return {AtomKind::Other, 0, 0};
  if (old_in) {
    return {AtomKind::Down, std::min(event.v_old, event.w), std::max(event.v_old, event.w)};
  }
  if (new_in) {
    return {AtomKind::Up, std::min(event.v_new, event.w), std::max(event.v_new, event.w)};
  }
  return {AtomKind::Stay, 0, 0};
}

}  // namespace reconnect
