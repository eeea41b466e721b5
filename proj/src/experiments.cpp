#include "reconnect/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "reconnect/distributions.hpp"
#include "reconnect/dynamics.hpp"
#include "reconnect/generators.hpp"
#include "reconnect/limits.hpp"
#include "reconnect/processes.hpp"
#include "reconnect/stats.hpp"

namespace reconnect {

namespace {

using nlohmann::ordered_json;

// Replica fan-out over hardware threads; results land in seed order so the
// aggregate (and the report bytes) do not depend on scheduling.
void parallel_seeds(int count, const std::function<void(int)>& fn) {
  unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(count));
  if (workers <= 1) {
    for (int s = 0; s < count; ++s) fn(s);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        int s = next.fetch_add(1);
        if (s >= count) return;
        try {
          fn(s);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<std::pair<int64_t, double>> law_to_expected(const std::vector<double>& law) {
  std::vector<std::pair<int64_t, double>> expected;
  expected.reserve(law.size());
  for (std::size_t k = 0; k < law.size(); ++k) {
    expected.emplace_back(static_cast<int64_t>(k), law[k]);
  }
  return expected;
}

/// Multiplicities of the disjoint watched pairs (0,1), (2,3), ...
Histogram disjoint_pair_histogram(const MultigraphState& state) {
  const WatchedWindow& win = state.window();
  Histogram hist;
  for (int i = 0; i + 1 < win.k; i += 2) {
    hist[win.at(i, i + 1)] += 1;
  }
  return hist;
}

Histogram loop_histogram(const MultigraphState& state) {
  const WatchedWindow& win = state.window();
  Histogram hist;
  for (int i = 0; i < win.k; ++i) {
    hist[win.at(i, i) / 2] += 1;
  }
  return hist;
}

std::vector<double> scaled_degrees(const MultigraphState& state) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(state.n()));
  for (int32_t d : state.degrees()) {
    out.push_back(static_cast<double>(d) / static_cast<double>(state.n()));
  }
  return out;
}

ordered_json gof_json(const GofReport& report) {
  return ordered_json{{"statistic", report.statistic},
                      {"dof", report.dof},
                      {"p_value", report.p_value}};
}

ordered_json config_json(const Config& cfg) {
  ordered_json j;
  for (const auto& [k, v] : cfg.entries()) j[k] = v;
  return j;
}

ordered_json histogram_json(const Histogram& hist) {
  ordered_json j = ordered_json::object();
  for (const auto& [v, c] : hist) j[std::to_string(v)] = c;
  return j;
}

int required_passes(int seeds, double fraction) {
  return static_cast<int>(std::ceil(fraction * seeds - 1e-9));
}

double graph_rho(const MultigraphState& state) {
  return 2.0 * static_cast<double>(state.m()) /
         (static_cast<double>(state.n()) * static_cast<double>(state.n()));
}

MultigraphState initial_graph(const Config& cfg, int n, RngStream& rng) {
  const std::string kind = cfg.get_string("initial", "two-block");
  if (kind == "two-block") {
    return two_block_multigraph(n, static_cast<int>(cfg.get_int("c11", 2)),
                                static_cast<int>(cfg.get_int("c12", 1)),
                                static_cast<int>(cfg.get_int("c22", 1)));
  }
  if (kind == "near-regular") {
    return near_regular_multigraph(n, static_cast<int>(cfg.get_int("c", 1)));
  }
  if (kind == "stationary-profile") {
    return stationary_profile_multigraph(n, cfg.get_double("kappa", 2.0),
                                         cfg.get_double("rho", 1.25), rng);
  }
  if (kind == "snapshot") {
    return snapshot_load(cfg.get_string("snapshot_path", "")).first;
  }
  throw std::invalid_argument("unknown initial graph kind: " + kind);
}

}  // namespace

// ---------------------------------------------------------------------------
// Edge scale (Theorem-1 regime).

ExperimentResult experiment_edge_scale(const Config& cfg) {
  const int n = static_cast<int>(cfg.get_int("n", 400));
  const double kappa = cfg.get_double("kappa", 2.0);
  const int seeds = static_cast<int>(cfg.get_int("seeds", 10));
  const int watch_k = std::min(n, static_cast<int>(cfg.get_int("watch_k", 256)));
  const double alpha = cfg.get_double("significance", 0.01);
  const double pooling_min = cfg.get_double("pooling_min", 5.0);
  const uint64_t master = static_cast<uint64_t>(cfg.get_int("seed", 20240901));
  std::vector<double> t_list = cfg.get_double_list("t_list", {0.25, 1.0, 4.0});

  RngStream gen_rng(master, 0xE0);
  const MultigraphState base = initial_graph(cfg, n, gen_rng);
  const double rho = graph_rho(base);

  // Reference laws are finite mixtures over the initial cells (t = 0 gives the
  // exact initial law); unassigned mass past kmax becomes the GOF tail cell.
  const int kmax = 24;
  std::vector<std::vector<double>> pair_laws, loop_laws;
  for (double t : t_list) {
    pair_laws.push_back(watched_pair_law_edge_scale(base, t, kmax));
    loop_laws.push_back(watched_loop_law_edge_scale(base, t, kmax));
  }

  // Checkpoints per seed: every t in t_list plus t = 1 for the frozen-degree
  // measurement.
  std::vector<double> checkpoints = t_list;
  if (std::find(checkpoints.begin(), checkpoints.end(), 1.0) == checkpoints.end()) {
    checkpoints.push_back(1.0);
  }
  std::sort(checkpoints.begin(), checkpoints.end());

  struct SeedOut {
    std::vector<GofReport> pair_gof;
    std::vector<GofReport> loop_gof;
    std::vector<Histogram> pair_hists;
    double mean_abs_degree_change = 0.0;
  };
  std::vector<SeedOut> outs(static_cast<std::size_t>(seeds));

  parallel_seeds(seeds, [&](int s) {
    RngStream rng(master, 0x100 + static_cast<uint64_t>(s));
    MultigraphState state = shuffle_labels(base, rng);
    state.attach_window(watch_k);
    ChainParams params{kappa, rho, master};
    std::vector<double> d0(static_cast<std::size_t>(watch_k));
    for (int i = 0; i < watch_k; ++i) d0[static_cast<std::size_t>(i)] = state.degree(i);

    SeedOut& out = outs[static_cast<std::size_t>(s)];
    out.pair_gof.resize(t_list.size());
    out.loop_gof.resize(t_list.size());
    out.pair_hists.resize(t_list.size());
    int64_t done = 0;
    for (double t : checkpoints) {
      const int64_t target = static_cast<int64_t>(
          std::floor(t * rho * static_cast<double>(n) * n / 2.0));
      run(state, params, target - done, rng);
      done = target;
      auto it = std::find(t_list.begin(), t_list.end(), t);
      if (it != t_list.end()) {
        const std::size_t idx = static_cast<std::size_t>(it - t_list.begin());
        out.pair_hists[idx] = disjoint_pair_histogram(state);
        out.pair_gof[idx] =
            chi_square_gof(out.pair_hists[idx], law_to_expected(pair_laws[idx]), pooling_min);
        out.loop_gof[idx] =
            chi_square_gof(loop_histogram(state), law_to_expected(loop_laws[idx]), pooling_min);
      }
      if (t == 1.0) {
        double acc = 0.0;
        for (int i = 0; i < watch_k; ++i) {
          acc += std::fabs((static_cast<double>(state.degree(i)) - d0[static_cast<std::size_t>(i)]) /
                           static_cast<double>(n));
        }
        out.mean_abs_degree_change = acc / watch_k;
      }
    }
  });

  ExperimentResult result;
  result.name = "edge-scale";
  result.report["experiment"] = result.name;
  result.report["config"] = config_json(cfg);
  result.report["master_seed"] = master;
  result.report["rho"] = rho;

  bool all_pass = true;
  ordered_json per_t = ordered_json::array();
  for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
    int passes = 0;
    ordered_json seeds_json = ordered_json::array();
    for (int s = 0; s < seeds; ++s) {
      const GofReport& g = outs[static_cast<std::size_t>(s)].pair_gof[ti];
      const bool ok = g.p_value > alpha;
      passes += ok;
      ordered_json sj = gof_json(g);
      sj["seed"] = s;
      sj["pass"] = ok;
      sj["loop_p_value"] = outs[static_cast<std::size_t>(s)].loop_gof[ti].p_value;
      sj["histogram"] = histogram_json(outs[static_cast<std::size_t>(s)].pair_hists[ti]);
      seeds_json.push_back(sj);
    }
    const bool t_pass = passes >= required_passes(seeds, 0.8);
    all_pass = all_pass && t_pass;
    ordered_json law_json = ordered_json::array();
    for (double p : pair_laws[ti]) law_json.push_back(p);
    per_t.push_back(ordered_json{{"t", t_list[ti]},
                                 {"seed_passes", passes},
                                 {"pass", t_pass},
                                 {"pair_law", law_json},
                                 {"seeds", seeds_json}});
  }
  result.report["per_t"] = per_t;

  double freeze = 0.0;
  for (const SeedOut& o : outs) freeze += o.mean_abs_degree_change;
  freeze /= seeds;
  const bool freeze_pass = freeze < cfg.get_double("degree_freeze_tol", 0.05);
  result.report["degrees_frozen"] =
      ordered_json{{"mean_abs_change", freeze}, {"pass", freeze_pass}};
  all_pass = all_pass && freeze_pass;

  result.pass = all_pass;
  result.report["pass"] = all_pass;
  return result;
}

// ---------------------------------------------------------------------------
// Degree scale (Theorem-2 regime).

ExperimentResult experiment_degree_scale(const Config& cfg) {
  const int n = static_cast<int>(cfg.get_int("n", 300));
  const double kappa = cfg.get_double("kappa", 2.0);
  const int seeds = static_cast<int>(cfg.get_int("seeds", 20));
  const int long_seeds = static_cast<int>(cfg.get_int("long_seeds", 8));
  const int watch_k = std::min(n, static_cast<int>(cfg.get_int("watch_k", 200)));
  const double alpha = cfg.get_double("significance", 0.01);
  const double pooling_min = cfg.get_double("pooling_min", 5.0);
  const double ks_mean_tol = cfg.get_double("ks_mean_tol", 0.10);
  const uint64_t master = static_cast<uint64_t>(cfg.get_int("seed", 20240902));
  std::vector<double> t_list = cfg.get_double_list("t_list", {0.5, 2.0});
  const double t_long = cfg.get_double("t_long", 20.0);

  RngStream gen_rng(master, 0xE0);
  const MultigraphState base = initial_graph(cfg, n, gen_rng);
  const double rho = graph_rho(base);
  const CirParams cir{kappa, rho};
  const QuantileDistribution f0 =
      Multigraphon::step_multigraphon(base).degree_distribution();

  const int kmax = 24;
  std::vector<QuantileDistribution> f_t;
  std::vector<std::vector<double>> pair_laws;
  for (double t : t_list) {
    f_t.push_back(cir_mixture_distribution(cir, f0, t));
    pair_laws.push_back(pair_entry_law(Multigraphon::poisson_profile(f_t.back(), rho), kmax));
  }
  const QuantileDistribution stationary = cir_stationary_distribution(cir);
  const std::vector<double> stationary_pair_law =
      pair_entry_law(Multigraphon::w_hat_infty(kappa, rho), kmax);

  struct SeedOut {
    std::vector<double> ks_d;           // per t
    std::vector<GofReport> pair_gof;    // per t
    std::vector<double> max_deg;        // per-vertex trajectory maxima (watched)
  };
  std::vector<SeedOut> outs(static_cast<std::size_t>(seeds));

  parallel_seeds(seeds, [&](int s) {
    RngStream rng(master, 0x200 + static_cast<uint64_t>(s));
    MultigraphState state = shuffle_labels(base, rng);
    state.attach_window(watch_k);
    ChainParams params{kappa, rho, master};
    SeedOut& out = outs[static_cast<std::size_t>(s)];
    out.max_deg.assign(static_cast<std::size_t>(watch_k), 0.0);
    int64_t done = 0;
    const int64_t tick = static_cast<int64_t>(n) * n;  // tail maxima cadence
    for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
      const int64_t target = static_cast<int64_t>(
          std::floor(t_list[ti] * rho * std::pow(static_cast<double>(n), 3.0)));
      while (done < target) {
        int64_t chunk = std::min(tick, target - done);
        run(state, params, chunk, rng);
        done += chunk;
        for (int i = 0; i < watch_k; ++i) {
          out.max_deg[static_cast<std::size_t>(i)] =
              std::max(out.max_deg[static_cast<std::size_t>(i)],
                       static_cast<double>(state.degree(i)) / n);
        }
      }
      out.ks_d.push_back(ks_statistic(scaled_degrees(state), [&](double x) {
                           return f_t[ti].cdf(x);
                         }).d);
      out.pair_gof.push_back(chi_square_gof(disjoint_pair_histogram(state),
                                            law_to_expected(pair_laws[ti]), pooling_min));
    }
  });

  // Long run toward the stationary profile.
  struct LongOut {
    std::vector<double> degrees;
    Histogram pairs;
  };
  std::vector<LongOut> long_outs(static_cast<std::size_t>(long_seeds));
  parallel_seeds(long_seeds, [&](int s) {
    RngStream rng(master, 0x300 + static_cast<uint64_t>(s));
    MultigraphState state = shuffle_labels(base, rng);
    state.attach_window(watch_k);
    ChainParams params{kappa, rho, master};
    const int64_t target = static_cast<int64_t>(
        std::floor(t_long * rho * std::pow(static_cast<double>(n), 3.0)));
    run(state, params, target, rng);
    long_outs[static_cast<std::size_t>(s)] = {scaled_degrees(state),
                                              disjoint_pair_histogram(state)};
  });

  ExperimentResult result;
  result.name = "degree-scale";
  result.report["experiment"] = result.name;
  result.report["config"] = config_json(cfg);
  result.report["master_seed"] = master;
  result.report["rho"] = rho;

  bool all_pass = true;
  ordered_json per_t = ordered_json::array();
  for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
    double d_sum = 0.0;
    int passes = 0;
    ordered_json seeds_json = ordered_json::array();
    for (int s = 0; s < seeds; ++s) {
      const SeedOut& o = outs[static_cast<std::size_t>(s)];
      d_sum += o.ks_d[ti];
      const bool ok = o.pair_gof[ti].p_value > alpha;
      passes += ok;
      ordered_json sj = gof_json(o.pair_gof[ti]);
      sj["seed"] = s;
      sj["ks_d"] = o.ks_d[ti];
      sj["pass"] = ok;
      seeds_json.push_back(sj);
    }
    const double d_mean = d_sum / seeds;
    const bool ks_pass = d_mean < ks_mean_tol;
    const bool chi_pass = passes >= required_passes(seeds, 0.8);
    all_pass = all_pass && ks_pass && chi_pass;
    per_t.push_back(ordered_json{{"t", t_list[ti]},
                                 {"ks_d_mean", d_mean},
                                 {"ks_pass", ks_pass},
                                 {"chi_seed_passes", passes},
                                 {"chi_pass", chi_pass},
                                 {"seeds", seeds_json}});
  }
  result.report["per_t"] = per_t;

  // Long-run limit: pooled degrees vs Gamma(kappa, kappa/rho); pooled watched
  // pairs vs the stationary multigraphon law.
  {
    std::vector<double> pooled;
    Histogram pooled_pairs;
    for (const LongOut& o : long_outs) {
      pooled.insert(pooled.end(), o.degrees.begin(), o.degrees.end());
      for (const auto& [v, c] : o.pairs) pooled_pairs[v] += c;
    }
    const KsResult ks = ks_statistic(
        pooled, [&](double x) { return gamma_cdf(x, kappa, kappa / rho); });
    const GofReport gof =
        chi_square_gof(pooled_pairs, law_to_expected(stationary_pair_law), pooling_min);
    const bool long_pass = ks.p > alpha && gof.p_value > alpha;
    all_pass = all_pass && long_pass;
    result.report["long_run"] = ordered_json{{"t", t_long},
                                             {"ks_d", ks.d},
                                             {"ks_p", ks.p},
                                             {"pair_gof", gof_json(gof)},
                                             {"pass", long_pass}};
  }

  // Degree-maximum tail diagnostic: log-survival of per-vertex trajectory
  // maxima should fall roughly linearly (exponential tail).
  {
    std::vector<double> maxima;
    for (const SeedOut& o : outs) {
      maxima.insert(maxima.end(), o.max_deg.begin(), o.max_deg.end());
    }
    std::sort(maxima.begin(), maxima.end());
    auto quantile = [&](double q) {
      return maxima[static_cast<std::size_t>(q * (maxima.size() - 1))];
    };
    const double z0 = quantile(0.50);
    const double z1 = quantile(0.99);
    ordered_json tail = ordered_json::array();
    bool monotone = true;
    double prev_log_s = 0.0;
    std::vector<double> slopes;
    const int grid_points = 4;
    for (int g = 0; g < grid_points; ++g) {
      const double z = z0 + (z1 - z0) * g / (grid_points - 1);
      const double survival =
          static_cast<double>(maxima.end() - std::upper_bound(maxima.begin(), maxima.end(), z)) /
          static_cast<double>(maxima.size());
      const double log_s = std::log(std::max(survival, 1e-12));
      if (g > 0) {
        if (log_s >= prev_log_s) monotone = false;
        slopes.push_back(log_s - prev_log_s);
      }
      prev_log_s = log_s;
      tail.push_back(ordered_json{{"z", z}, {"survival", survival}});
    }
    double ratio = 1.0;
    if (slopes.size() >= 2) {
      double lo = *std::min_element(slopes.begin(), slopes.end());
      double hi = *std::max_element(slopes.begin(), slopes.end());
      ratio = (hi < 0.0) ? lo / hi : INFINITY;  // both negative: >= 1
    }
    result.report["degree_tail"] = ordered_json{
        {"grid", tail}, {"monotone_decreasing", monotone}, {"slope_ratio", ratio}};
  }

  result.pass = all_pass;
  result.report["pass"] = all_pass;
  return result;
}

// ---------------------------------------------------------------------------
// Subaging.

namespace {

struct SubagingSeedOut {
  GofReport within1, within2, across_a, across_b;
  bool pass = false;
};

SubagingSeedOut subaging_seed(const MultigraphState& base, double kappa, double t1,
                              double t2, double s_a, double s_b, int watch_k,
                              double pooling_min, double alpha, bool expect_reject,
                              RngStream rng) {
  const int n = base.n();
  const double rho = graph_rho(base);
  MultigraphState state = shuffle_labels(base, rng);
  state.attach_window(watch_k);
  ChainParams params{kappa, rho, 0};

  const double n2 = static_cast<double>(n) * n;
  const double n3 = n2 * static_cast<double>(n);
  const int64_t c1a = static_cast<int64_t>(std::floor(t1 * rho * n3 + s_a * n2));
  const int64_t c1b = static_cast<int64_t>(std::floor(t1 * rho * n3 + s_b * n2));
  const int64_t c2a = static_cast<int64_t>(std::floor(t2 * rho * n3 + s_a * n2));
  const int64_t c2b = static_cast<int64_t>(std::floor(t2 * rho * n3 + s_b * n2));

  int64_t done = 0;
  Histogram h1a, h1b, h2a, h2b;
  auto advance_and_grab = [&](int64_t target, Histogram& dest) {
    run(state, params, target - done, rng);
    done = target;
    dest = disjoint_pair_histogram(state);
  };
  advance_and_grab(c1a, h1a);
  advance_and_grab(c1b, h1b);
  advance_and_grab(c2a, h2a);
  advance_and_grab(c2b, h2b);

  SubagingSeedOut out;
  out.within1 = chi_square_two_sample(h1a, h1b, pooling_min);
  out.within2 = chi_square_two_sample(h2a, h2b, pooling_min);
  // Across anchors, compared at matching window offsets; a difference counts
  // when either offset rejects.
  out.across_a = chi_square_two_sample(h1a, h2a, pooling_min);
  out.across_b = chi_square_two_sample(h1b, h2b, pooling_min);
  const bool within_ok = out.within1.p_value > alpha && out.within2.p_value > alpha;
  const bool across_rejects =
      std::min(out.across_a.p_value, out.across_b.p_value) < alpha;
  out.pass = expect_reject ? (within_ok && across_rejects) : (within_ok && !across_rejects);
  return out;
}

}  // namespace

ExperimentResult experiment_subaging(const Config& cfg) {
  const int n = static_cast<int>(cfg.get_int("n", 300));
  const double kappa = cfg.get_double("kappa", 0.5);
  const int seeds = static_cast<int>(cfg.get_int("seeds", 10));
  const int watch_k = std::min(n, static_cast<int>(cfg.get_int("watch_k", 300)));
  const double alpha = cfg.get_double("significance", 0.01);
  const double pooling_min = cfg.get_double("pooling_min", 5.0);
  const double t1 = cfg.get_double("t1", 0.5);
  const double t2 = cfg.get_double("t2", 4.0);
  const double s_a = cfg.get_double("s_a", 0.2);
  const double s_b = cfg.get_double("s_b", 0.8);
  const uint64_t master = static_cast<uint64_t>(cfg.get_int("seed", 20240903));

  RngStream gen_rng(master, 0xE0);
  Config main_cfg = cfg;
  if (!main_cfg.has("c11")) main_cfg.set("c11", "4");
  if (!main_cfg.has("c12")) main_cfg.set("c12", "2");
  if (!main_cfg.has("c22")) main_cfg.set("c22", "2");
  const MultigraphState base = initial_graph(main_cfg, n, gen_rng);
  const double rho = graph_rho(base);

  std::vector<SubagingSeedOut> main_outs(static_cast<std::size_t>(seeds));
  parallel_seeds(seeds, [&](int s) {
    main_outs[static_cast<std::size_t>(s)] =
        subaging_seed(base, kappa, t1, t2, s_a, s_b, watch_k, pooling_min, alpha, true,
                      RngStream(master, 0x400 + static_cast<uint64_t>(s)));
  });

  // Null configuration: the initial profile is already (approximately)
  // stationary, so the across-anchor test must not reject.
  std::vector<SubagingSeedOut> null_outs(static_cast<std::size_t>(seeds));
  parallel_seeds(seeds, [&](int s) {
    RngStream rng(master, 0x500 + static_cast<uint64_t>(s));
    MultigraphState null_base = stationary_profile_multigraph(n, kappa, rho, rng);
    null_outs[static_cast<std::size_t>(s)] =
        subaging_seed(null_base, kappa, t1, t2, s_a, s_b, watch_k, pooling_min, alpha, false,
                      std::move(rng));
  });

  ExperimentResult result;
  result.name = "subaging";
  result.report["experiment"] = result.name;
  result.report["config"] = config_json(cfg);
  result.report["master_seed"] = master;
  result.report["rho"] = rho;

  auto summarize = [&](const std::vector<SubagingSeedOut>& outs) {
    int passes = 0;
    ordered_json arr = ordered_json::array();
    for (std::size_t s = 0; s < outs.size(); ++s) {
      const SubagingSeedOut& o = outs[s];
      passes += o.pass;
      arr.push_back(ordered_json{{"seed", s},
                                 {"within1_p", o.within1.p_value},
                                 {"within2_p", o.within2.p_value},
                                 {"across_p", std::min(o.across_a.p_value, o.across_b.p_value)},
                                 {"across_p_a", o.across_a.p_value},
                                 {"across_p_b", o.across_b.p_value},
                                 {"pass", o.pass}});
    }
    return std::make_pair(passes, arr);
  };

  auto [main_passes, main_json] = summarize(main_outs);
  auto [null_passes, null_json] = summarize(null_outs);
  const bool main_pass = main_passes >= required_passes(seeds, 0.8);
  const bool null_pass = null_passes >= required_passes(seeds, 0.8);
  result.report["main"] = ordered_json{
      {"seed_passes", main_passes}, {"pass", main_pass}, {"seeds", main_json}};
  result.report["null"] = ordered_json{
      {"seed_passes", null_passes}, {"pass", null_pass}, {"seeds", null_json}};

  result.pass = main_pass && null_pass;
  result.report["pass"] = result.pass;
  return result;
}

// ---------------------------------------------------------------------------
// Coupling trend.

ExperimentResult experiment_coupling(const Config& cfg) {
  std::vector<double> n_list = cfg.get_double_list("n_list", {125, 250, 500});
  const int seeds = static_cast<int>(cfg.get_int("seeds", 20));
  const double kappa = cfg.get_double("kappa", 2.0);
  const double nu = cfg.get_double("nu", 2.2);
  const int watch_k = static_cast<int>(cfg.get_int("watch_k", 2));
  const uint64_t master = static_cast<uint64_t>(cfg.get_int("seed", 20240904));
  if (nu <= 2.0 || nu >= 2.5) {
    throw std::invalid_argument("experiment_coupling: nu must lie in (2, 2.5)");
  }

  ExperimentResult result;
  result.name = "coupling";
  result.report["experiment"] = result.name;
  result.report["config"] = config_json(cfg);
  result.report["master_seed"] = master;

  std::vector<double> fractions;
  ordered_json per_n = ordered_json::array();
  for (double n_value : n_list) {
    const int n = static_cast<int>(n_value);
    // n must be even for the two-block generator.
    RngStream gen_rng(master, 0xE0 + static_cast<uint64_t>(n));
    Config block_cfg = cfg;
    const MultigraphState base = initial_graph(block_cfg, n, gen_rng);
    const double rho = graph_rho(base);
    const int64_t horizon =
        static_cast<int64_t>(std::floor(std::pow(static_cast<double>(n), nu)));

    std::vector<int> full_agree(static_cast<std::size_t>(seeds), 0);
    std::vector<int64_t> first_divergence(static_cast<std::size_t>(seeds), -1);
    parallel_seeds(seeds, [&](int s) {
      RngStream rng(master, (static_cast<uint64_t>(n) << 20) + static_cast<uint64_t>(s));
      MultigraphState state = shuffle_labels(base, rng);
      state.attach_window(watch_k);
      CoupledWindow coupled = CoupledWindow::from_anchor(state);
      ChainParams params{kappa, rho, master};
      bool ok = true;
      for (int64_t t = 0; t < horizon; ++t) {
        CoupledStepResult step_result = coupled_step(state, params, coupled, rng);
        if (!step_result.agreed) {
          ok = false;
          first_divergence[static_cast<std::size_t>(s)] = t;
          break;
        }
      }
      full_agree[static_cast<std::size_t>(s)] = ok ? 1 : 0;
    });

    int agree_count = 0;
    for (int v : full_agree) agree_count += v;
    const double fraction = static_cast<double>(agree_count) / seeds;
    fractions.push_back(fraction);
    ordered_json div = ordered_json::array();
    for (int64_t d : first_divergence) div.push_back(d);
    per_n.push_back(ordered_json{{"n", n},
                                 {"horizon", horizon},
                                 {"rho", rho},
                                 {"full_agreement_fraction", fraction},
                                 {"first_divergence_step", div}});
  }
  result.report["per_n"] = per_n;

  bool increasing = true;
  for (std::size_t i = 1; i < fractions.size(); ++i) {
    if (fractions[i] <= fractions[i - 1]) increasing = false;
  }
  result.pass = increasing;
  result.report["pass"] = increasing;
  return result;
}

std::string write_report(const ExperimentResult& result, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/" + result.name + "-report.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report: cannot open " + path);
  out << result.report.dump(2) << "\n";
  return path;
}

}  // namespace reconnect
