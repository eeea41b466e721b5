#pragma once

namespace reconnect {

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Upper tail of the chi-square distribution with dof degrees of freedom.
double chi_square_sf(double x, double dof);

/// Asymptotic Kolmogorov tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

/// log C(n, k)
double log_choose(double n, double k);

}  // namespace reconnect
