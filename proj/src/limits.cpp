#include "reconnect/limits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace reconnect {

namespace {

constexpr int kProfileGrid = 1 << 14;

struct StepData {
  int n = 0;
  int64_t m = 0;
  std::vector<std::vector<std::pair<Vertex, int32_t>>> rows;  // sorted (neighbor, count)
  std::vector<int32_t> degree;

  int cell(double x) const {
    int i = static_cast<int>(std::floor(x * n));
    return std::clamp(i, 0, n - 1);
  }

  int32_t b(int i, int j) const {
    const auto& row = rows[static_cast<std::size_t>(i)];
    auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(j, INT32_MIN));
    if (it != row.end() && it->first == j) return it->second;
    return 0;
  }
};

}  // namespace

struct Multigraphon::Impl {
  Kind kind = Kind::Step;

  // Step
  std::shared_ptr<StepData> step;

  // PoissonProfile
  QuantileDistribution degree_law;
  bool has_degree_law = false;
  double profile_mean = 0.0;

  // Evolved
  std::shared_ptr<const Impl> base;
  double t = 0.0;

  double rho = 0.0;

  double profile(double x) const { return degree_law.inverse(x); }

  double degree_at(double x) const {
    switch (kind) {
      case Kind::Step:
        return static_cast<double>(step->degree[static_cast<std::size_t>(step->cell(x))]) /
               static_cast<double>(step->n);
      case Kind::PoissonProfile:
        return profile(x) * profile_mean / rho;
      case Kind::Evolved:
        return base->degree_at(x);  // edge-scale evolution preserves degrees
    }
    return 0.0;
  }

  double off_diag_value(double x, double y, int64_t k) const {
    switch (kind) {
      case Kind::Step:
        return step->b(step->cell(x), step->cell(y)) == k ? 1.0 : 0.0;
      case Kind::PoissonProfile:
        return poisson_pmf(k, profile(x) * profile(y) / rho);
      case Kind::Evolved: {
        const double mu = base->degree_at(x) * base->degree_at(y) / rho;
        // sum_h base(x,y,h) q(t,h,k,mu), truncated at the policy tail mass.
        double sum = 0.0;
        double cum = 0.0;
        const double tail = numeric_policy().series_tail;
        for (int64_t h = 0; cum < 1.0 - tail; ++h) {
          double wh = base->off_diag_value(x, y, h);
          if (wh > 0.0) {
            cum += wh;
            sum += wh * queue_kernel(t, h, k, mu);
          }
          if (h > 1000000) throw std::runtime_error("Multigraphon: base tail never closed");
        }
        return sum;
      }
    }
    return 0.0;
  }

  double diag_value(double x, int64_t k) const {
    if (k % 2 != 0) return 0.0;
    switch (kind) {
      case Kind::Step:
        return step->b(step->cell(x), step->cell(x)) == k ? 1.0 : 0.0;
      case Kind::PoissonProfile: {
        const double lam = profile(x);
        return poisson_pmf(k / 2, lam * lam / (2.0 * rho));
      }
      case Kind::Evolved: {
        const double d = base->degree_at(x);
        const double mu = d * d / (2.0 * rho);
        double sum = 0.0;
        double cum = 0.0;
        const double tail = numeric_policy().series_tail;
        for (int64_t h = 0; cum < 1.0 - tail; h += 2) {
          double wh = base->diag_value(x, h);
          if (wh > 0.0) {
            cum += wh;
            sum += wh * queue_kernel(t, h / 2, k / 2, mu);
          }
          if (h > 2000000) throw std::runtime_error("Multigraphon: base tail never closed");
        }
        return sum;
      }
    }
    return 0.0;
  }
};

Multigraphon Multigraphon::step_multigraphon(const MultigraphState& state) {
  auto data = std::make_shared<StepData>();
  data->n = state.n();
  data->m = state.m();
  data->degree = state.degrees();
  data->rows.resize(static_cast<std::size_t>(state.n()));
  for (const Edge& e : state.edges()) {
    auto add = [&](Vertex u, Vertex v) {
      for (auto& [w, c] : data->rows[static_cast<std::size_t>(u)]) {
        if (w == v) {
          c += (u == v) ? 2 : 1;
          return;
        }
      }
      data->rows[static_cast<std::size_t>(u)].emplace_back(v, (u == v) ? 2 : 1);
    };
    add(e.u, e.v);
    if (e.u != e.v) add(e.v, e.u);
  }
  for (auto& row : data->rows) std::sort(row.begin(), row.end());

  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Step;
  impl->step = std::move(data);
  impl->rho = 2.0 * static_cast<double>(state.m()) /
              (static_cast<double>(state.n()) * static_cast<double>(state.n()));
  Multigraphon w;
  w.impl_ = std::move(impl);
  return w;
}

Multigraphon Multigraphon::poisson_profile(const QuantileDistribution& degree_law,
                                           double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("poisson_profile: rho must be > 0");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::PoissonProfile;
  impl->degree_law = degree_law;
  impl->has_degree_law = true;
  impl->profile_mean = degree_law.mean();
  impl->rho = rho;
  Multigraphon w;
  w.impl_ = std::move(impl);
  return w;
}

Multigraphon Multigraphon::constant_poisson(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("constant_poisson: lambda must be > 0");
  return poisson_profile(QuantileDistribution::from_atoms({{lambda, 1.0}}), lambda);
}

Multigraphon Multigraphon::evolved(Multigraphon base, double t) {
  if (t < 0.0) throw std::invalid_argument("evolved: t must be >= 0");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Evolved;
  impl->base = base.impl_;
  impl->t = t;
  impl->rho = base.impl_->rho;
  Multigraphon w;
  w.impl_ = std::move(impl);
  return w;
}

Multigraphon Multigraphon::w_hat_t(double kappa, double rho, const QuantileDistribution& f0,
                                   double t) {
  if (!(t > 0.0)) {
    throw std::invalid_argument("w_hat_t: defined for t > 0 only");
  }
  CirParams cir{kappa, rho};
  return poisson_profile(cir_mixture_distribution(cir, f0, t), rho);
}

Multigraphon Multigraphon::w_hat_infty(double kappa, double rho) {
  CirParams cir{kappa, rho};
  return poisson_profile(cir_stationary_distribution(cir), rho);
}

double Multigraphon::operator()(double x, double y, int64_t k) const {
  if (k < 0) return 0.0;
  if (x == y) return impl_->diag_value(x, k);
  return impl_->off_diag_value(x, y, k);
}

double Multigraphon::off_diag(double x, double y, int64_t k) const {
  if (k < 0) return 0.0;
  return impl_->off_diag_value(x, y, k);
}

double Multigraphon::degree(double x) const { return impl_->degree_at(x); }
double Multigraphon::rho() const { return impl_->rho; }
Multigraphon::Kind Multigraphon::kind() const { return impl_->kind; }

double Multigraphon::profile_at(double x) const {
  if (impl_->kind != Kind::PoissonProfile) {
    throw std::logic_error("profile_at: not a Poisson-profile multigraphon");
  }
  return impl_->profile(x);
}

int Multigraphon::step_cells() const {
  const Impl* im = impl_.get();
  while (im->kind == Kind::Evolved) im = im->base.get();
  return im->kind == Kind::Step ? im->step->n : 0;
}

QuantileDistribution Multigraphon::degree_distribution() const {
  const Impl* im = impl_.get();
  while (im->kind == Kind::Evolved) im = im->base.get();
  if (im->kind == Kind::Step) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(im->step->n));
    for (int32_t d : im->step->degree) {
      values.push_back(static_cast<double>(d) / static_cast<double>(im->step->n));
    }
    return QuantileDistribution::from_values(values);
  }
  std::vector<double> values;
  values.reserve(kProfileGrid);
  for (int i = 0; i < kProfileGrid; ++i) {
    double x = (static_cast<double>(i) + 0.5) / kProfileGrid;
    values.push_back(impl_->degree_at(x));
  }
  return QuantileDistribution::from_values(values);
}

double w_t_eval(const Multigraphon& base, double t, double x, double y, int64_t k) {
  return Multigraphon::evolved(base, t)(x, y, k);
}

double w_hat_infty_eval(double kappa, double rho, double x, double y, int64_t k) {
  return Multigraphon::w_hat_infty(kappa, rho)(x, y, k);
}

double degree_function(const Multigraphon& w, double x) { return w.degree(x); }
double edge_density(const Multigraphon& w) { return w.rho(); }

namespace {

int64_t draw_from_pmf(RngStream& rng, const std::function<double(int64_t)>& pmf) {
  const double u = rng.uniform01();
  double cum = 0.0;
  for (int64_t k = 0;; ++k) {
    cum += pmf(k);
    if (cum >= u) return k;
    if (cum >= 1.0 - numeric_policy().series_tail || k > 1000000) return k;
  }
}

}  // namespace

WRandomSample sample_w_random(const Multigraphon& w, int k, RngStream& rng) {
  if (k <= 0) throw std::invalid_argument("sample_w_random: k must be > 0");
  WRandomSample sample;
  sample.k = k;
  sample.a.assign(static_cast<std::size_t>(k) * k, 0);
  sample.u.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) sample.u[static_cast<std::size_t>(i)] = rng.uniform01();

  // Poisson-profile variants admit direct Poisson draws (with the profile
  // evaluated once per latent position); others walk the inverse CDF.
  std::vector<double> lambda;
  const bool direct = w.kind() == Multigraphon::Kind::PoissonProfile;
  if (direct) {
    lambda.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      lambda[static_cast<std::size_t>(i)] = w.profile_at(sample.u[static_cast<std::size_t>(i)]);
    }
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      const double xi = sample.u[static_cast<std::size_t>(i)];
      const double xj = sample.u[static_cast<std::size_t>(j)];
      int32_t value;
      if (i == j) {
        int64_t loops;
        if (direct) {
          loops = poisson_draw(rng, lambda[static_cast<std::size_t>(i)] *
                                        lambda[static_cast<std::size_t>(i)] /
                                        (2.0 * w.rho()));
        } else {
          loops = draw_from_pmf(rng, [&](int64_t l) { return w(xi, xi, 2 * l); });
        }
        value = static_cast<int32_t>(2 * loops);
      } else {
        if (direct) {
          value = static_cast<int32_t>(poisson_draw(
              rng, lambda[static_cast<std::size_t>(i)] * lambda[static_cast<std::size_t>(j)] /
                       w.rho()));
        } else {
          value = static_cast<int32_t>(
              draw_from_pmf(rng, [&](int64_t v) { return w(xi, xj, v); }));
        }
      }
      sample.a[static_cast<std::size_t>(i) * k + j] = value;
      sample.a[static_cast<std::size_t>(j) * k + i] = value;
    }
  }
  return sample;
}

McEstimate motif_density_w(const FiniteMotif& motif, const Multigraphon& w,
                           int64_t samples, RngStream& rng) {
  if (samples < 1) throw std::invalid_argument("motif_density_w: samples must be >= 1");
  const int k = motif.k;
  std::vector<double> u(static_cast<std::size_t>(k));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int64_t s = 0; s < samples; ++s) {
    for (int i = 0; i < k; ++i) u[static_cast<std::size_t>(i)] = rng.uniform01();
    double prod = 1.0;
    for (int i = 0; i < k && prod > 0.0; ++i) {
      for (int j = i; j < k; ++j) {
        prod *= (i == j) ? w(u[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(i)],
                             motif.at(i, i))
                         : w(u[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(j)],
                             motif.at(i, j));
        if (prod == 0.0) break;
      }
    }
    sum += prod;
    sum_sq += prod * prod;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  double se = 0.0;
  if (samples > 1) {
    double var = (sum_sq - n * mean * mean) / (n - 1.0);
    se = std::sqrt(std::max(0.0, var) / n);
  }
  return {mean, se};
}

// ---------------------------------------------------------------------------
// Finite reference laws.

std::vector<double> watched_pair_law_edge_scale(const MultigraphState& initial, double t,
                                                int kmax) {
  const int n = initial.n();
  if (n < 2) throw std::invalid_argument("watched_pair_law_edge_scale: need n >= 2");
  const double two_m = 2.0 * static_cast<double>(initial.m());
  const auto& deg = initial.degrees();

  // Group ordered distinct pairs by (initial multiplicity, degree product).
  std::map<std::pair<int32_t, int64_t>, int64_t> groups;
  std::map<int32_t, int64_t> degree_count;
  for (int32_t d : deg) ++degree_count[d];
  // All ordered distinct pairs, first assuming multiplicity 0.
  for (const auto& [da, ca] : degree_count) {
    for (const auto& [db, cb] : degree_count) {
      int64_t cnt = ca * cb - (da == db ? ca : 0);
      if (cnt > 0) groups[{0, static_cast<int64_t>(da) * db}] += cnt;
    }
  }
  // Re-assign the pairs that actually carry edges.
  std::map<std::pair<Vertex, Vertex>, int32_t> mult;
  for (const Edge& e : initial.edges()) {
    if (e.u == e.v) continue;
    Vertex a = std::min(e.u, e.v);
    Vertex b = std::max(e.u, e.v);
    mult[{a, b}] += 1;
  }
  for (const auto& [pair, h] : mult) {
    int64_t dd = static_cast<int64_t>(deg[static_cast<std::size_t>(pair.first)]) *
                 deg[static_cast<std::size_t>(pair.second)];
    groups[{0, dd}] -= 2;
    groups[{h, dd}] += 2;
  }

  const double total_pairs = static_cast<double>(n) * (n - 1);
  std::vector<double> law(static_cast<std::size_t>(kmax) + 1, 0.0);
  for (const auto& [key, cnt] : groups) {
    if (cnt <= 0) continue;
    const auto& [h, dd] = key;
    const double mu = static_cast<double>(dd) / two_m;
    const double weight = static_cast<double>(cnt) / total_pairs;
    for (int k = 0; k <= kmax; ++k) {
      law[static_cast<std::size_t>(k)] += weight * queue_kernel(t, h, k, mu);
    }
  }
  return law;
}

std::vector<double> watched_loop_law_edge_scale(const MultigraphState& initial, double t,
                                                int lmax) {
  const int n = initial.n();
  const double two_m = 2.0 * static_cast<double>(initial.m());
  const auto& deg = initial.degrees();
  std::vector<int32_t> loops(static_cast<std::size_t>(n), 0);
  for (const Edge& e : initial.edges()) {
    if (e.u == e.v) loops[static_cast<std::size_t>(e.u)] += 1;
  }
  std::map<std::pair<int32_t, int32_t>, int64_t> groups;  // (loops, degree) -> count
  for (int a = 0; a < n; ++a) {
    ++groups[{loops[static_cast<std::size_t>(a)], deg[static_cast<std::size_t>(a)]}];
  }
  std::vector<double> law(static_cast<std::size_t>(lmax) + 1, 0.0);
  for (const auto& [key, cnt] : groups) {
    const auto& [h, d] = key;
    const double mu = static_cast<double>(d) * d / (2.0 * two_m);
    const double weight = static_cast<double>(cnt) / n;
    for (int l = 0; l <= lmax; ++l) {
      law[static_cast<std::size_t>(l)] += weight * queue_kernel(t, h, l, mu);
    }
  }
  return law;
}

std::vector<double> pair_entry_law(const Multigraphon& w, int kmax, int grid) {
  if (int cells = w.step_cells(); cells > 0) grid = cells;  // align with step cells
  std::vector<double> law(static_cast<std::size_t>(kmax) + 1, 0.0);
  if (w.kind() == Multigraphon::Kind::PoissonProfile) {
    // Quantile atoms are exactly the profile values at midpoint cells.
    std::vector<double> lambda(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) {
      lambda[static_cast<std::size_t>(i)] = w.profile_at((i + 0.5) / static_cast<double>(grid));
    }
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        const double mu = lambda[static_cast<std::size_t>(i)] *
                          lambda[static_cast<std::size_t>(j)] / w.rho();
        for (int k = 0; k <= kmax; ++k) {
          law[static_cast<std::size_t>(k)] += poisson_pmf(k, mu);
        }
      }
    }
  } else {
    const double cell = 1.0 / grid;
    for (int i = 0; i < grid; ++i) {
      const double x = (i + 0.5) * cell;
      for (int j = 0; j < grid; ++j) {
        const double y = (j + 0.5) * cell;
        for (int k = 0; k <= kmax; ++k) {
          law[static_cast<std::size_t>(k)] += w.off_diag(x, y, k);
        }
      }
    }
  }
  for (double& p : law) p /= static_cast<double>(grid) * grid;
  return law;
}

std::vector<double> loop_entry_law(const Multigraphon& w, int lmax, int grid) {
  if (int cells = w.step_cells(); cells > 0) grid = cells;
  std::vector<double> law(static_cast<std::size_t>(lmax) + 1, 0.0);
  const double cell = 1.0 / grid;
  for (int i = 0; i < grid; ++i) {
    const double x = (i + 0.5) * cell;
    for (int l = 0; l <= lmax; ++l) {
      law[static_cast<std::size_t>(l)] += w(x, x, 2 * l);
    }
  }
  for (double& p : law) p /= static_cast<double>(grid);
  return law;
}

}  // namespace reconnect
