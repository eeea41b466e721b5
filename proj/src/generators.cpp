#include "reconnect/generators.hpp"

#include <stdexcept>

#include "reconnect/limits.hpp"

namespace reconnect {

MultigraphState two_block_multigraph(int n, int c11, int c12, int c22) {
  if (n < 2) throw std::invalid_argument("two_block: n must be >= 2");
  if (c11 < 0 || c12 < 0 || c22 < 0) throw std::invalid_argument("two_block: negative count");
  const int half = n / 2;  // block sizes floor(n/2) and ceil(n/2)
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int c = (i < half) ? (j < half ? c11 : c12) : c22;
      for (int r = 0; r < c; ++r) edges.push_back({i, j});
    }
  }
  if (edges.empty()) throw std::invalid_argument("two_block: graph has no edges");
  return MultigraphState::from_edge_list(n, edges);
}

MultigraphState near_regular_multigraph(int n, int c) {
  if (n < 2 || c < 1) throw std::invalid_argument("near_regular: need n >= 2, c >= 1");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int r = 0; r < c; ++r) edges.push_back({i, j});
    }
  }
  return MultigraphState::from_edge_list(n, edges);
}

MultigraphState stationary_profile_multigraph(int n, double kappa, double rho,
                                              RngStream& rng) {
  if (n < 2) throw std::invalid_argument("stationary_profile: need n >= 2");
  Multigraphon w = Multigraphon::w_hat_infty(kappa, rho);
  WRandomSample sample = sample_w_random(w, n, rng);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const int32_t val = sample.at(i, j);
      const int copies = (i == j) ? val / 2 : val;
      for (int r = 0; r < copies; ++r) edges.push_back({i, j});
    }
  }
  if (edges.empty()) edges.push_back({0, 1});  // chain needs m >= 1
  return MultigraphState::from_edge_list(n, edges);
}

}  // namespace reconnect
