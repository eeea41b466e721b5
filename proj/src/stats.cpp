#include "reconnect/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "reconnect/special.hpp"

namespace reconnect {

namespace {

std::string range_label(int64_t lo, int64_t hi, bool open_end) {
  if (open_end) return "[" + std::to_string(lo) + ",inf)";
  if (lo == hi) return std::to_string(lo);
  return "[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
}

}  // namespace

GofReport chi_square_gof(const Histogram& observed,
                         const std::vector<std::pair<int64_t, double>>& expected,
                         double pooling_min) {
  int64_t n = 0;
  for (const auto& [v, c] : observed) {
    if (c < 0) throw std::invalid_argument("chi_square_gof: negative count");
    n += c;
  }
  if (n < 1) throw std::invalid_argument("chi_square_gof: empty histogram");

  std::vector<std::pair<int64_t, double>> cells(expected.begin(), expected.end());
  std::sort(cells.begin(), cells.end());
  double p_total = 0.0;
  for (const auto& [v, p] : cells) {
    if (p < 0.0) throw std::invalid_argument("chi_square_gof: negative expected probability");
    p_total += p;
  }
  if (p_total > 1.0 + 1e-6) throw std::invalid_argument("chi_square_gof: expected mass > 1");
  const double tail_mass = std::max(0.0, 1.0 - p_total);
  const int64_t tail_start = cells.empty() ? 0 : cells.back().first + 1;

  // Observed values outside the listed support belong to the implicit tail cell.
  int64_t tail_obs = 0;
  for (const auto& [v, c] : observed) {
    bool listed = std::binary_search(
        cells.begin(), cells.end(), std::make_pair(v, 0.0),
        [](const auto& a, const auto& b) { return a.first < b.first; });
    if (!listed) tail_obs += c;
  }

  // Pool adjacent cells (ascending by value) until each group's expected
  // count reaches pooling_min; the implicit tail joins the last group.
  struct Group {
    int64_t lo, hi;
    double exp_count;
    int64_t obs_count;
    bool open_end = false;
  };
  std::vector<Group> groups;
  Group current{0, 0, 0.0, 0, false};
  bool has_current = false;
  for (const auto& [v, p] : cells) {
    int64_t obs = 0;
    auto it = observed.find(v);
    if (it != observed.end()) obs = it->second;
    if (!has_current) {
      current = {v, v, p * n, obs, false};
      has_current = true;
    } else {
      current.hi = v;
      current.exp_count += p * n;
      current.obs_count += obs;
    }
    if (current.exp_count >= pooling_min) {
      groups.push_back(current);
      has_current = false;
    }
  }
  // Tail cell.
  Group tail{tail_start, tail_start, tail_mass * n, tail_obs, true};
  if (has_current) {
    tail.lo = current.lo;
    tail.exp_count += current.exp_count;
    tail.obs_count += current.obs_count;
  }
  if (!groups.empty() && tail.exp_count < pooling_min) {
    groups.back().hi = tail.hi;
    groups.back().open_end = true;
    groups.back().exp_count += tail.exp_count;
    groups.back().obs_count += tail.obs_count;
  } else {
    groups.push_back(tail);
  }

  if (groups.size() < 2) {
    throw std::invalid_argument("chi_square_gof: fewer than 2 cells after pooling");
  }

  GofReport report;
  report.name = "chi_square_gof";
  for (const Group& g : groups) {
    const double e = g.exp_count;
    const double o = static_cast<double>(g.obs_count);
    if (e > 0.0) report.statistic += (o - e) * (o - e) / e;
    report.pooled_cells.emplace_back(range_label(g.lo, g.hi, g.open_end), e);
  }
  report.dof = static_cast<int>(groups.size()) - 1;
  report.p_value = chi_square_sf(report.statistic, report.dof);
  return report;
}

GofReport chi_square_two_sample(const Histogram& a, const Histogram& b, double pooling_min) {
  int64_t na = 0, nb = 0;
  std::map<int64_t, std::pair<int64_t, int64_t>> merged;
  for (const auto& [v, c] : a) {
    merged[v].first += c;
    na += c;
  }
  for (const auto& [v, c] : b) {
    merged[v].second += c;
    nb += c;
  }
  if (na < 1 || nb < 1) throw std::invalid_argument("chi_square_two_sample: empty sample");

  struct Group {
    int64_t lo, hi;
    int64_t oa, ob;
  };
  std::vector<Group> groups;
  Group current{0, 0, 0, 0};
  bool has_current = false;
  for (const auto& [v, counts] : merged) {
    if (!has_current) {
      current = {v, v, counts.first, counts.second};
      has_current = true;
    } else {
      current.hi = v;
      current.oa += counts.first;
      current.ob += counts.second;
    }
    if (static_cast<double>(current.oa + current.ob) >= pooling_min) {
      groups.push_back(current);
      has_current = false;
    }
  }
  if (has_current) {
    if (!groups.empty()) {
      groups.back().hi = current.hi;
      groups.back().oa += current.oa;
      groups.back().ob += current.ob;
    } else {
      groups.push_back(current);
    }
  }
  if (groups.size() < 2) {
    throw std::invalid_argument("chi_square_two_sample: fewer than 2 cells after pooling");
  }

  const double ka = std::sqrt(static_cast<double>(nb) / static_cast<double>(na));
  const double kb = 1.0 / ka;
  GofReport report;
  report.name = "chi_square_two_sample";
  for (const Group& g : groups) {
    const double oa = static_cast<double>(g.oa);
    const double ob = static_cast<double>(g.ob);
    const double num = ka * oa - kb * ob;
    report.statistic += num * num / (oa + ob);
    report.pooled_cells.emplace_back(range_label(g.lo, g.hi, false),
                                     static_cast<double>(g.oa + g.ob));
  }
  report.dof = static_cast<int>(groups.size()) - 1;
  report.p_value = chi_square_sf(report.statistic, report.dof);
  return report;
}

KsResult ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 10) throw std::invalid_argument("ks_statistic: need at least 10 samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  const double sqrt_n = std::sqrt(n);
  KsResult result;
  result.d = d;
  result.n = static_cast<int64_t>(samples.size());
  result.p = kolmogorov_q((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
  return result;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 10 || b.size() < 10) {
    throw std::invalid_argument("ks_two_sample: need at least 10 samples each");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() -
                              static_cast<double>(j) / b.size()));
  }
  const double ne = static_cast<double>(a.size()) * b.size() /
                    static_cast<double>(a.size() + b.size());
  const double sqrt_ne = std::sqrt(ne);
  KsResult result;
  result.d = d;
  result.n = static_cast<int64_t>(ne);
  result.p = kolmogorov_q((sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d);
  return result;
}

std::pair<double, double> moment_condition_check(const MultigraphState& state, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("moment_condition_check: lambda must be > 0");
  const int n = state.n();
  const std::vector<int32_t> full = state.adjacency_window(n);
  double off = 0.0;
  double diag = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      off += std::exp(lambda * full[static_cast<std::size_t>(i) * n + j]);
    }
    diag += std::exp(lambda * full[static_cast<std::size_t>(i) * n + i]);
  }
  const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
  return {pairs > 0.0 ? off / pairs : 1.0, diag / n};
}

}  // namespace reconnect
