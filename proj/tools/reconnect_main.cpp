#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "reconnect/config.hpp"
#include "reconnect/distributions.hpp"
#include "reconnect/dynamics.hpp"
#include "reconnect/experiments.hpp"
#include "reconnect/generators.hpp"
#include "reconnect/limits.hpp"
#include "reconnect/stats.hpp"

namespace {

using namespace reconnect;

Config load_config(const std::string& path) {
  if (path.empty()) return Config{};
  return Config::from_file(path);
}

MultigraphState build_initial(const Config& cfg, RngStream& rng) {
  const int n = static_cast<int>(cfg.get_int("n", 100));
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
  if (kind == "edge-list") {
    std::ifstream in(cfg.get_string("edge_list_path", ""));
    if (!in) throw std::runtime_error("cannot open edge list file");
    return read_edge_list(in, n);
  }
  throw std::runtime_error("unknown initial kind: " + kind);
}

int run_simulate(const Config& cfg) {
  const double kappa = cfg.get_double("kappa", 2.0);
  const uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 1));
  const int64_t steps = cfg.get_int("steps", 10000);
  const int watch_k = static_cast<int>(cfg.get_int("watch_k", 4));
  const int64_t sample_every = cfg.get_int("sample_every", 1000);
  const int64_t snapshot_every = cfg.get_int("snapshot_every", 0);
  const std::string traj_path = cfg.get_string("trajectory_out", "trajectory.csv");
  const std::string snapshot_prefix = cfg.get_string("snapshot_prefix", "state");

  RngStream rng(seed, 1);
  MultigraphState state = build_initial(cfg, rng);
  if (cfg.get_int("shuffle", 1) != 0) state = shuffle_labels(state, rng);
  state.attach_window(watch_k);
  const double rho = 2.0 * static_cast<double>(state.m()) /
                     (static_cast<double>(state.n()) * state.n());
  ChainParams params{kappa, rho, seed};

  std::ofstream traj(traj_path);
  if (!traj) throw std::runtime_error("cannot open " + traj_path);
  traj << "step";
  for (int i = 0; i < watch_k; ++i) {
    for (int j = i; j < watch_k; ++j) traj << ",x_" << (i + 1) << "_" << (j + 1);
  }
  for (int i = 0; i < watch_k; ++i) traj << ",d_" << (i + 1);
  traj << "\n";

  std::vector<Observer> observers;
  observers.push_back(Observer{
      sample_every, [&](int64_t t, const MultigraphState& st) {
        traj << t;
        const WatchedWindow& win = st.window();
        for (int i = 0; i < watch_k; ++i) {
          for (int j = i; j < watch_k; ++j) traj << ',' << win.at(i, j);
        }
        for (int i = 0; i < watch_k; ++i) traj << ',' << st.degree(i);
        traj << "\n";
      }});
  if (snapshot_every > 0) {
    observers.push_back(Observer{snapshot_every, [&](int64_t t, const MultigraphState& st) {
                                   snapshot_save(st, snapshot_prefix + "-" +
                                                         std::to_string(t) + ".snap",
                                                 {kappa, seed, t});
                                 }});
  }
  run(state, params, steps, rng, observers);
  snapshot_save(state, snapshot_prefix + "-final.snap", {kappa, seed, steps});
  std::cout << "simulated " << steps << " steps (n=" << state.n() << ", m=" << state.m()
            << ", rho=" << rho << ")\n";
  std::cout << "trajectory: " << traj_path << "\n";
  return 0;
}

int run_limits_eval(const Config& cfg) {
  const std::string variant = cfg.get_string("variant", "w-hat-inf");
  const double kappa = cfg.get_double("kappa", 2.0);
  const double rho = cfg.get_double("rho", 1.25);
  const double t = cfg.get_double("t", 1.0);
  const int kmax = static_cast<int>(cfg.get_int("k_max", 8));
  const int grid = static_cast<int>(cfg.get_int("grid", 16));
  const std::string out_path = cfg.get_string("out", "limits.csv");

  Multigraphon w = [&]() {
    if (variant == "w-hat-inf") return Multigraphon::w_hat_infty(kappa, rho);
    if (variant == "step" || variant == "w-t") {
      auto [state, meta] = snapshot_load(cfg.get_string("snapshot_path", ""));
      Multigraphon base = Multigraphon::step_multigraphon(state);
      return variant == "step" ? base : Multigraphon::evolved(base, t);
    }
    if (variant == "w-hat-t") {
      auto [state, meta] = snapshot_load(cfg.get_string("snapshot_path", ""));
      QuantileDistribution f0 = Multigraphon::step_multigraphon(state).degree_distribution();
      return Multigraphon::w_hat_t(kappa, rho, f0, t);
    }
    throw std::runtime_error("unknown variant: " + variant);
  }();

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  out << "x,y";
  for (int k = 0; k <= kmax; ++k) out << ",w_" << k;
  out << "\n";
  for (int i = 0; i < grid; ++i) {
    const double x = (i + 0.5) / grid;
    for (int j = 0; j < grid; ++j) {
      const double y = (j + 0.5) / grid;
      out << x << ',' << y;
      for (int k = 0; k <= kmax; ++k) out << ',' << w(x, y, k);
      out << "\n";
    }
  }
  std::cout << "wrote " << out_path << " (rho(W)=" << w.rho() << ")\n";
  return 0;
}

int run_gof(const Config& cfg) {
  const std::string observed_path = cfg.get_string("observed", "");
  const std::string expected_path = cfg.get_string("expected", "");
  const double pooling_min = cfg.get_double("pooling_min", 5.0);
  const double alpha = cfg.get_double("significance", 0.01);

  Histogram observed;
  {
    std::ifstream in(observed_path);
    if (!in) throw std::runtime_error("cannot open " + observed_path);
    int64_t value, count;
    char comma;
    while (in >> value >> comma >> count) observed[value] += count;
  }
  std::vector<std::pair<int64_t, double>> expected;
  {
    std::ifstream in(expected_path);
    if (!in) throw std::runtime_error("cannot open " + expected_path);
    int64_t value;
    double prob;
    char comma;
    while (in >> value >> comma >> prob) expected.emplace_back(value, prob);
  }
  GofReport report = chi_square_gof(observed, expected, pooling_min);
  std::cout << "statistic=" << report.statistic << " dof=" << report.dof
            << " p=" << report.p_value << "\n";
  return report.p_value > alpha ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edge reconnecting model: simulation, limit objects, experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value configuration file");
    sub->add_option("--set", overrides,
                    "override a config entry, e.g. --set n=200 (repeatable)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run the chain, export trajectories");
  add_common(simulate);
  CLI::App* limits_eval = app.add_subcommand("limits-eval", "export W(x,y,k) grids as CSV");
  add_common(limits_eval);
  CLI::App* experiment = app.add_subcommand("experiment", "run a statistical experiment");
  add_common(experiment);
  std::string experiment_name;
  std::string out_dir = "reports";
  experiment->add_option("name", experiment_name,
                         "edge-scale | degree-scale | subaging | coupling")
      ->required();
  experiment->add_option("--out", out_dir, "report output directory");
  CLI::App* gof = app.add_subcommand("gof", "chi-square GOF of a histogram CSV vs a pmf CSV");
  add_common(gof);

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg = load_config(config_path);
    for (const std::string& kv : overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::runtime_error("--set expects key=value");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }

    if (simulate->parsed()) return run_simulate(cfg);
    if (limits_eval->parsed()) return run_limits_eval(cfg);
    if (gof->parsed()) return run_gof(cfg);
    if (experiment->parsed()) {
      ExperimentResult result;
      if (experiment_name == "edge-scale") {
        result = experiment_edge_scale(cfg);
      } else if (experiment_name == "degree-scale") {
        result = experiment_degree_scale(cfg);
      } else if (experiment_name == "subaging") {
        result = experiment_subaging(cfg);
      } else if (experiment_name == "coupling") {
        result = experiment_coupling(cfg);
      } else {
        throw std::runtime_error("unknown experiment: " + experiment_name);
      }
      const std::string path = write_report(result, out_dir);
      std::cout << result.name << ": " << (result.pass ? "PASS" : "FAIL") << " (" << path
                << ")\n";
      return result.pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
