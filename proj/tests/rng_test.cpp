#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "reconnect/distributions.hpp"
#include "reconnect/rng.hpp"
#include "reconnect/special.hpp"
#include "reconnect/stats.hpp"

using namespace reconnect;

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  RngStream c(42, 8);
  bool all_equal_c = true;
  for (int i = 0; i < 1000; ++i) {
    uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
    if (va != c.next_u64()) all_equal_c = false;
  }
  CHECK_FALSE(all_equal_c);
}

TEST_CASE("uniform01 lies in [0,1) with the right mean") {
  RngStream rng(1, 0);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::fabs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("uniform_below is unbiased across a small range") {
  RngStream rng(2, 0);
  const uint32_t m = 7;
  std::map<int64_t, int64_t> counts;
  const int n = 700000;
  for (int i = 0; i < n; ++i) counts[rng.uniform_below(m)] += 1;
  std::vector<std::pair<int64_t, double>> expected;
  for (uint32_t v = 0; v < m; ++v) expected.emplace_back(v, 1.0 / m);
  GofReport report = chi_square_gof(counts, expected);
  CHECK(report.p_value > 0.001);
}

TEST_CASE("poisson_draw: lambda 0 always 0") {
  RngStream rng(3, 0);
  for (int i = 0; i < 100; ++i) CHECK(poisson_draw(rng, 0.0) == 0);
}

TEST_CASE("poisson_draw matches the pmf (small and PTRS regimes)") {
  for (double lam : {3.0, 50.0}) {
    RngStream rng(4, static_cast<uint64_t>(lam));
    Histogram counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i) counts[poisson_draw(rng, lam)] += 1;
    std::vector<std::pair<int64_t, double>> expected;
    for (int64_t k = 0; k < static_cast<int64_t>(lam + 12.0 * std::sqrt(lam) + 20.0); ++k) {
      expected.emplace_back(k, poisson_pmf(k, lam));
    }
    GofReport report = chi_square_gof(counts, expected);
    CAPTURE(lam);
    CHECK(report.p_value > 0.01);
  }
}

TEST_CASE("gamma_draw mean within 3 sigma, including shape < 1") {
  struct Case {
    double alpha, beta;
  };
  for (Case c : {Case{0.5, 2.0}, Case{2.0, 3.0}, Case{7.5, 1.0}}) {
    RngStream rng(5, static_cast<uint64_t>(c.alpha * 10));
    const int n = 1000000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += gamma_draw(rng, c.alpha, c.beta);
    const double mean = sum / n;
    const double want = c.alpha / c.beta;
    const double sd = std::sqrt(c.alpha) / c.beta;
    CAPTURE(c.alpha);
    CHECK(std::fabs(mean - want) < 3.0 * sd / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("gamma_draw with shape < 1 matches the gamma CDF (KS)") {
  RngStream rng(6, 0);
  std::vector<double> samples;
  for (int i = 0; i < 20000; ++i) samples.push_back(gamma_draw(rng, 0.5, 0.2));
  KsResult ks = ks_statistic(samples, [](double x) { return gamma_cdf(x, 0.5, 0.2); });
  CHECK(ks.p > 0.01);
}

TEST_CASE("binomial_draw matches the pmf in both code paths") {
  struct Case {
    int64_t n;
    double p;
  };
  for (Case c : {Case{20, 0.3}, Case{500, 0.02}, Case{300, 0.9}}) {
    RngStream rng(7, static_cast<uint64_t>(c.n));
    Histogram counts;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) counts[binomial_draw(rng, c.n, c.p)] += 1;
    std::vector<std::pair<int64_t, double>> expected;
    for (int64_t k = 0; k <= c.n; ++k) expected.emplace_back(k, binomial_pmf(k, c.n, c.p));
    GofReport report = chi_square_gof(counts, expected);
    CAPTURE(c.n);
    CHECK(report.p_value > 0.01);
  }
}

TEST_CASE("categorical_draw respects the weights") {
  RngStream rng(8, 0);
  std::vector<double> weights{0.5, 0.0, 1.5, 2.0};
  Histogram counts;
  const int n = 400000;
  for (int i = 0; i < n; ++i) counts[static_cast<int64_t>(categorical_draw(rng, weights))] += 1;
  CHECK(counts.count(1) == 0);
  std::vector<std::pair<int64_t, double>> expected{{0, 0.125}, {1, 0.0}, {2, 0.375}, {3, 0.5}};
  GofReport report = chi_square_gof(counts, expected);
  CHECK(report.p_value > 0.001);
}

TEST_CASE("normal01 moments") {
  RngStream rng(9, 0);
  const int n = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal01();
    sum += z;
    sum_sq += z * z;
  }
  CHECK(std::fabs(sum / n) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(sum_sq / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}
