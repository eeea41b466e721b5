#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace reconnect {

// Central numeric policy; every truncation and tolerance the kernels use
// lives here so tests can reference the same constants.
struct NumericPolicy {
  double series_tail = 1e-12;       // truncate series when remaining mass < this
  double pmf_sum_tol = 1e-10;       // pmfs must sum to 1 within this
  double pdf_integral_tol = 1e-6;   // pdfs must integrate to 1 within this
  double cdf_norm_tol = 1e-4;       // cdf construction rejects beyond this
  double inverse_x_tol = 1e-8;      // bisection tolerance for F^{-1}, in x
  double quad_tol = 1e-10;          // adaptive quadrature panel tolerance
  int64_t cir_series_max = 2000000; // refuse CIR series longer than this (tiny t)
};

const NumericPolicy& numeric_policy();

// p(k, lambda) = e^{-lambda} lambda^k / k!, evaluated in extended precision
// so it stays correct to full double accuracy for k, lambda up to 1e4+.
double poisson_pmf(int64_t k, double lam);
double poisson_log_pmf(int64_t k, double lam);

double binomial_pmf(int64_t k, int64_t n, double p);

// g(x, alpha, beta) = x^{alpha-1} beta^alpha e^{-beta x} / Gamma(alpha), x > 0.
double gamma_pdf(double x, double alpha, double beta);
double gamma_cdf(double x, double alpha, double beta);

// M/M/infinity transition kernel q(t, h, k, mu): law at time t of a queue
// started from h customers, arrival rate mu, service rate 1. Exact finite
// convolution of BIN(h, e^{-t}) and POI((1-e^{-t}) mu).
struct QueueKernelParams {
  double t = 0.0;
  int64_t h = 0;
  double mu = 0.0;
};

double queue_kernel(const QueueKernelParams& params, int64_t k);
double queue_kernel(double t, int64_t h, int64_t k, double mu);

// Cox-Ingersoll-Ross process dZ = (kappa - (kappa/rho) Z) dt + sqrt(2Z) dB.
struct CirParams {
  double kappa = 1.0;
  double rho = 1.0;

  double alpha() const { return kappa / rho; }
  // tau(t) = alpha / (e^{alpha t} - 1), the transition-density scale at lag t.
  double tau(double t) const;
};

// Transition density f(t, z, y): Poisson(z tau)-mixture of
// Gamma(kappa + i, tau + alpha) densities. Throws for t <= 0 and for t so
// small that the series would exceed the policy cap (documented stable range).
double cir_transition_density(const CirParams& params, double t, double z, double y);

// Conditional mean rho + (z - rho) e^{-alpha t}.
double cir_mean(const CirParams& params, double t, double z);

// Distribution on [0, inf) exposed through its CDF and generalized inverse
// F^{-1}(u) = min{ z : F(z) >= u }. Either a finite atom list (empirical step
// function) or a smooth distribution integrated from a density.
class QuantileDistribution {
 public:
  QuantileDistribution() = default;  // empty; assign before use

  static QuantileDistribution from_atoms(std::vector<std::pair<double, double>> atoms);
  static QuantileDistribution from_values(const std::vector<double>& values);
  static QuantileDistribution from_density(std::function<double(double)> density,
                                           double support_hint_hi = 0.0);

  double cdf(double x) const;
  double inverse(double u) const;
  double support_lo() const;
  double support_hi() const;
  double mean() const;

  bool is_atomic() const;
  // Atoms as (value, weight), sorted by value; only for atomic distributions.
  const std::vector<std::pair<double, double>>& atoms() const;

  /// q equally weighted quantile atoms F^{-1}((i - 0.5)/q), i = 1..q.
  std::vector<double> quantile_atoms(int q) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// f(t, y) = integral of f(t, z, y) dF0(z); exact finite sum for atomic F0,
// quantile-discretized at 1024 atoms otherwise.
double cir_mixture_density(const CirParams& params, const QuantileDistribution& f0,
                           double t, double y);

// F_t built from the mixture density via quadrature; the degree-profile law
// at time t when degrees start with law F0.
QuantileDistribution cir_mixture_distribution(const CirParams& params,
                                              const QuantileDistribution& f0, double t);

/// Gamma(kappa, kappa/rho), the stationary law of the CIR process.
QuantileDistribution cir_stationary_distribution(const CirParams& params);

// Adaptive Simpson quadrature (shared by tests as an independent oracle).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10);

}  // namespace reconnect
