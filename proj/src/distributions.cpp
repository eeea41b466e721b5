#include "reconnect/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "reconnect/special.hpp"

namespace reconnect {

const NumericPolicy& numeric_policy() {
  static const NumericPolicy policy;
  return policy;
}

double poisson_log_pmf(int64_t k, double lam) {
  if (lam < 0.0 || !std::isfinite(lam)) throw std::invalid_argument("poisson: bad lambda");
  if (k < 0) return -INFINITY;
  if (lam == 0.0) return k == 0 ? 0.0 : -INFINITY;
  long double l = static_cast<long double>(lam);
  long double kk = static_cast<long double>(k);
  return static_cast<double>(kk * logl(l) - l - lgammal(kk + 1.0L));
}

double poisson_pmf(int64_t k, double lam) {
  if (lam < 0.0 || !std::isfinite(lam)) throw std::invalid_argument("poisson: bad lambda");
  if (k < 0) return 0.0;
  if (lam == 0.0) return k == 0 ? 1.0 : 0.0;
  long double l = static_cast<long double>(lam);
  long double kk = static_cast<long double>(k);
  return static_cast<double>(expl(kk * logl(l) - l - lgammal(kk + 1.0L)));
}

double binomial_pmf(int64_t k, int64_t n, double p) {
  if (n < 0 || p < 0.0 || p > 1.0) throw std::invalid_argument("binomial: bad parameters");
  if (k < 0 || k > n) return 0.0;
  if (p == 0.0) return k == 0 ? 1.0 : 0.0;
  if (p == 1.0) return k == n ? 1.0 : 0.0;
  double lg = log_choose(static_cast<double>(n), static_cast<double>(k)) +
              static_cast<double>(k) * std::log(p) +
              static_cast<double>(n - k) * std::log1p(-p);
  return std::exp(lg);
}

double gamma_pdf(double x, double alpha, double beta) {
  if (alpha <= 0.0 || beta <= 0.0) throw std::invalid_argument("gamma_pdf: bad parameters");
  if (x <= 0.0) return 0.0;
  return std::exp((alpha - 1.0) * std::log(x) + alpha * std::log(beta) - beta * x -
                  std::lgamma(alpha));
}

double gamma_cdf(double x, double alpha, double beta) {
  if (alpha <= 0.0 || beta <= 0.0) throw std::invalid_argument("gamma_cdf: bad parameters");
  if (x <= 0.0) return 0.0;
  return gamma_p(alpha, beta * x);
}

double queue_kernel(const QueueKernelParams& params, int64_t k) {
  return queue_kernel(params.t, params.h, k, params.mu);
}

double queue_kernel(double t, int64_t h, int64_t k, double mu) {
  if (t < 0.0 || h < 0 || mu < 0.0) throw std::invalid_argument("queue_kernel: bad parameters");
  if (k < 0) return 0.0;
  if (t == 0.0) return k == h ? 1.0 : 0.0;
  const double s = std::exp(-t);            // survival probability of one initial customer
  const double lam = -std::expm1(-t) * mu;  // mean of arrivals still in service
  double sum = 0.0;
  const int64_t lmax = std::min(h, k);
  for (int64_t l = 0; l <= lmax; ++l) {
    sum += binomial_pmf(l, h, s) * poisson_pmf(k - l, lam);
  }
  return sum;
}

double CirParams::tau(double t) const {
  if (t <= 0.0) throw std::invalid_argument("CirParams::tau: t must be > 0");
  return alpha() / std::expm1(alpha() * t);
}

double cir_mean(const CirParams& params, double t, double z) {
  return params.rho + (z - params.rho) * std::exp(-params.alpha() * t);
}

double cir_transition_density(const CirParams& params, double t, double z, double y) {
  if (params.kappa <= 0.0 || params.rho <= 0.0)
    throw std::invalid_argument("cir_transition_density: bad parameters");
  if (t <= 0.0) throw std::invalid_argument("cir_transition_density: t must be > 0");
  if (z < 0.0) throw std::invalid_argument("cir_transition_density: z must be >= 0");
  if (y <= 0.0) return 0.0;

  const NumericPolicy& policy = numeric_policy();
  const double alpha = params.alpha();
  const double tau = params.tau(t);
  const double beta = tau + alpha;
  const double rate = z * tau;  // Poisson mixing mean

  if (rate > static_cast<double>(policy.cir_series_max)) {
    throw std::invalid_argument(
        "cir_transition_density: t too small for the series representation "
        "(z*tau exceeds NumericPolicy::cir_series_max)");
  }
  if (rate == 0.0) return gamma_pdf(y, params.kappa, beta);

  // Both factors obey one-step multiplicative recurrences; start below the
  // bulk of the Poisson weights and sweep until the tail mass is spent.
  int64_t i0 = 0;
  if (rate > 400.0) {
    i0 = static_cast<int64_t>(rate - 10.0 * std::sqrt(rate) - 10.0);
    if (i0 < 0) i0 = 0;
  }
  double w = poisson_pmf(i0, rate);
  double g = gamma_pdf(y, params.kappa + static_cast<double>(i0), beta);
  double cum_w = w;
  double sum = w * g;
  if (i0 > 0) {
    // Left tail below i0; negligible by construction but swept for exactness.
    double wl = w;
    double gl = g;
    for (int64_t i = i0; i > 0; --i) {
      wl *= static_cast<double>(i) / rate;
      gl *= (params.kappa + static_cast<double>(i) - 1.0) / (beta * y);
      cum_w += wl;
      sum += wl * gl;
      if (wl < policy.series_tail * 1e-4) break;
    }
  }
  const double gy = beta * y;
  for (int64_t i = i0; cum_w < 1.0 - policy.series_tail; ++i) {
    if (i - i0 > policy.cir_series_max) {
      throw std::runtime_error("cir_transition_density: series did not converge");
    }
    w *= rate / static_cast<double>(i + 1);
    g *= gy / (params.kappa + static_cast<double>(i));
    cum_w += w;
    sum += w * g;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature.

namespace {

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = simpson(fa, flm, fm, a, m);
  double right = simpson(fm, frm, fb, m, b);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  double fa = f(a);
  double fb = f(b);
  double fm = f(0.5 * (a + b));
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 48);
}

// ---------------------------------------------------------------------------
// QuantileDistribution.
//
// Smooth distributions are integrated on the substituted axis v = sqrt(y)
// (g(v) = 2 v f(v^2)), which removes the integrable y^{p} singularity at the
// origin that gamma mixtures with shape < 1 have.

struct QuantileDistribution::Impl {
  bool atomic = false;

  std::vector<std::pair<double, double>> atoms;  // (value, weight), sorted
  std::vector<double> cumw;

  std::function<double(double)> density;  // in y space
  std::vector<double> vgrid;              // uniform grid on v axis
  std::vector<double> cum;                // cum[i] = total mass below vgrid[i]
  double total = 1.0;

  double lo = 0.0, hi = 0.0;
  double mean_value = 0.0;

  double g(double v) const { return 2.0 * v * density(v * v); }

  // Unnormalized mass below v.
  double mass_below(double v) const {
    if (v <= 0.0) return 0.0;
    if (v >= vgrid.back()) return total;
    double dv = vgrid[1] - vgrid[0];
    std::size_t idx = std::min(static_cast<std::size_t>(v / dv), vgrid.size() - 2);
    double a = vgrid[idx];
    return cum[idx] + integrate([this](double x) { return g(x); }, a, v,
                                numeric_policy().quad_tol);
  }
};

QuantileDistribution QuantileDistribution::from_atoms(
    std::vector<std::pair<double, double>> atoms) {
  if (atoms.empty()) throw std::invalid_argument("QuantileDistribution: no atoms");
  std::sort(atoms.begin(), atoms.end());
  auto impl = std::make_shared<Impl>();
  impl->atomic = true;
  for (const auto& [z, w] : atoms) {
    if (w < 0.0) throw std::invalid_argument("QuantileDistribution: negative weight");
    if (!impl->atoms.empty() && impl->atoms.back().first == z) {
      impl->atoms.back().second += w;
    } else {
      impl->atoms.emplace_back(z, w);
    }
  }
  double total = 0.0;
  for (auto& [z, w] : impl->atoms) total += w;
  if (total <= 0.0) throw std::invalid_argument("QuantileDistribution: zero total weight");
  double acc = 0.0;
  double mean = 0.0;
  for (auto& [z, w] : impl->atoms) {
    w /= total;
    acc += w;
    mean += z * w;
    impl->cumw.push_back(acc);
  }
  impl->cumw.back() = 1.0;
  impl->lo = impl->atoms.front().first;
  impl->hi = impl->atoms.back().first;
  impl->mean_value = mean;
  QuantileDistribution dist;
  dist.impl_ = std::move(impl);
  return dist;
}

QuantileDistribution QuantileDistribution::from_values(const std::vector<double>& values) {
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(values.size());
  for (double v : values) atoms.emplace_back(v, 1.0);
  return from_atoms(std::move(atoms));
}

QuantileDistribution QuantileDistribution::from_density(std::function<double(double)> density,
                                                        double support_hint_hi) {
  const NumericPolicy& policy = numeric_policy();
  auto impl = std::make_shared<Impl>();
  impl->atomic = false;
  impl->density = std::move(density);
  auto g = [&impl](double v) { return impl->g(v); };

  // Find the upper end of the support on the v axis by doubling until two
  // consecutive segments carry negligible mass.
  double v_hi = support_hint_hi > 0.0 ? std::sqrt(support_hint_hi) : 1.0;
  double a = 0.0;
  double b = std::min(1.0, v_hi);
  double scanned = 0.0;
  int quiet = 0;
  for (int seg = 0; seg < 200; ++seg) {
    double mass = integrate(g, a, b, policy.quad_tol);
    scanned += mass;
    if (b >= v_hi) {
      if (std::fabs(mass) < policy.series_tail) {
        if (++quiet >= 2) {
          v_hi = b;
          break;
        }
      } else {
        quiet = 0;
      }
      v_hi = b;
    }
    a = b;
    b = (b >= v_hi) ? b * 2.0 : std::min(b * 2.0, v_hi);
    if (b > 1e7) throw std::runtime_error("QuantileDistribution: unbounded support scan");
  }

  // Dense cumulative table on a uniform v grid.
  constexpr int kPanels = 2048;
  impl->vgrid.resize(kPanels + 1);
  impl->cum.resize(kPanels + 1);
  double dv = v_hi / kPanels;
  impl->vgrid[0] = 0.0;
  impl->cum[0] = 0.0;
  double total = 0.0;
  double mean = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    double lo = i * dv;
    double hi = (i + 1) * dv;
    total += integrate(g, lo, hi, policy.quad_tol);
    mean += integrate([&g](double v) { return v * v * g(v); }, lo, hi, policy.quad_tol);
    impl->vgrid[i + 1] = hi;
    impl->cum[i + 1] = total;
  }
  if (std::fabs(total - 1.0) > policy.cdf_norm_tol) {
    throw std::runtime_error("QuantileDistribution: density does not integrate to 1");
  }
  impl->total = total;
  impl->lo = 0.0;
  impl->hi = v_hi * v_hi;
  impl->mean_value = mean / total;
  QuantileDistribution dist;
  dist.impl_ = std::move(impl);
  return dist;
}

double QuantileDistribution::cdf(double x) const {
  const Impl& im = *impl_;
  if (im.atomic) {
    auto it = std::upper_bound(
        im.atoms.begin(), im.atoms.end(),
        std::pair<double, double>(x, std::numeric_limits<double>::infinity()));
    if (it == im.atoms.begin()) return 0.0;
    return im.cumw[static_cast<std::size_t>(it - im.atoms.begin()) - 1];
  }
  if (x <= 0.0) return 0.0;
  double v = std::sqrt(x);
  if (v >= im.vgrid.back()) return 1.0;
  return std::clamp(im.mass_below(v) / im.total, 0.0, 1.0);
}

double QuantileDistribution::inverse(double u) const {
  const Impl& im = *impl_;
  if (u < 0.0 || u > 1.0) throw std::invalid_argument("inverse: u outside [0,1]");
  if (im.atomic) {
    if (u <= 0.0) return im.atoms.front().first;
    auto it = std::lower_bound(im.cumw.begin(), im.cumw.end(), u);
    if (it == im.cumw.end()) return im.atoms.back().first;
    return im.atoms[static_cast<std::size_t>(it - im.cumw.begin())].first;
  }
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return im.hi;
  const double target = u * im.total;
  // Locate the table panel, then bisect inside it. Bisection on the predicate
  // mass_below(v) >= target converges to the generalized (leftmost) inverse.
  auto it = std::lower_bound(im.cum.begin(), im.cum.end(), target);
  std::size_t idx = static_cast<std::size_t>(it - im.cum.begin());
  if (idx == 0) return 0.0;
  double lo = im.vgrid[idx - 1];
  double hi = im.vgrid[idx];
  const double xtol = numeric_policy().inverse_x_tol;
  for (int iter = 0; iter < 80; ++iter) {
    double mid = 0.5 * (lo + hi);
    double fm = im.mass_below(mid);
    if (fm >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo < 1e-14 * (1.0 + hi)) break;
    if (std::fabs(fm - target) < xtol * im.total && hi - lo < 1e-7 * (1.0 + hi)) break;
  }
  return hi * hi;
}

double QuantileDistribution::support_lo() const { return impl_->lo; }
double QuantileDistribution::support_hi() const { return impl_->hi; }
double QuantileDistribution::mean() const { return impl_->mean_value; }
bool QuantileDistribution::is_atomic() const { return impl_->atomic; }

const std::vector<std::pair<double, double>>& QuantileDistribution::atoms() const {
  if (!impl_->atomic) throw std::logic_error("QuantileDistribution: not atomic");
  return impl_->atoms;
}

std::vector<double> QuantileDistribution::quantile_atoms(int q) const {
  if (q <= 0) throw std::invalid_argument("quantile_atoms: q must be > 0");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(q));
  for (int i = 1; i <= q; ++i) {
    out.push_back(inverse((static_cast<double>(i) - 0.5) / static_cast<double>(q)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CIR mixtures.

namespace {

std::vector<std::pair<double, double>> mixture_atoms(const QuantileDistribution& f0) {
  if (f0.is_atomic()) return f0.atoms();
  // Continuous F0: quantile discretization, 1024 equally weighted atoms.
  constexpr int kAtoms = 1024;
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(kAtoms);
  for (double z : f0.quantile_atoms(kAtoms)) {
    atoms.emplace_back(z, 1.0 / kAtoms);
  }
  return atoms;
}

}  // namespace

double cir_mixture_density(const CirParams& params, const QuantileDistribution& f0,
                           double t, double y) {
  if (t <= 0.0) throw std::invalid_argument("cir_mixture_density: t must be > 0");
  double sum = 0.0;
  for (const auto& [z, w] : mixture_atoms(f0)) {
    sum += w * cir_transition_density(params, t, z, y);
  }
  return sum;
}

QuantileDistribution cir_mixture_distribution(const CirParams& params,
                                              const QuantileDistribution& f0, double t) {
  if (t <= 0.0) throw std::invalid_argument("cir_mixture_distribution: t must be > 0");
  auto atoms = mixture_atoms(f0);
  const double tau = params.tau(t);
  const double beta = tau + params.alpha();
  double hi = params.rho;
  for (const auto& [z, w] : atoms) {
    double m = cir_mean(params, t, z);
    double sd = std::sqrt((params.kappa + 2.0 * z * tau) / (beta * beta));
    hi = std::max(hi, m + 12.0 * sd + 1.0);
  }
  auto density = [params, atoms, t](double y) {
    double sum = 0.0;
    for (const auto& [z, w] : atoms) {
      sum += w * cir_transition_density(params, t, z, y);
    }
    return sum;
  };
  return QuantileDistribution::from_density(density, hi);
}

QuantileDistribution cir_stationary_distribution(const CirParams& params) {
  const double kappa = params.kappa;
  const double beta = params.alpha();
  double hi = (kappa + 12.0 * std::sqrt(kappa) + 1.0) / beta;
  return QuantileDistribution::from_density(
      [kappa, beta](double y) { return gamma_pdf(y, kappa, beta); }, hi);
}

}  // namespace reconnect
