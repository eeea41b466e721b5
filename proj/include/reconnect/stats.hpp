#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "reconnect/multigraph.hpp"

namespace reconnect {

// Goodness-of-fit result. `pass` is set by the caller's criterion (some
// experiments require rejection), `p_value` is always the raw tail value.
struct GofReport {
  std::string name;
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  std::vector<std::pair<std::string, double>> pooled_cells;  // label -> expected count
  bool pass = false;
};

using Histogram = std::map<int64_t, int64_t>;

// Pearson chi-square against an expected probability map (values outside the
// map share the leftover tail mass). Adjacent cells with expected count below
// pooling_min are merged; throws if fewer than 2 cells survive.
GofReport chi_square_gof(const Histogram& observed,
                         const std::vector<std::pair<int64_t, double>>& expected,
                         double pooling_min = 5.0);

/// Two-sample chi-square on pooled cells (O1+O2 >= pooling_min).
GofReport chi_square_two_sample(const Histogram& a, const Histogram& b,
                                double pooling_min = 5.0);

struct KsResult {
  double d = 0.0;
  double p = 1.0;
  int64_t n = 0;
};

/// One-sample Kolmogorov-Smirnov against a CDF; asymptotic p approximation.
KsResult ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Empirical averages of exp(lambda * B(i,j)) over off-diagonal pairs and of
// exp(lambda * B(i,i)) over the diagonal (the chain's moment condition on
// initial states).
std::pair<double, double> moment_condition_check(const MultigraphState& state, double lambda);

}  // namespace reconnect
