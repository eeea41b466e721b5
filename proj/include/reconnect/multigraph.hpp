#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "reconnect/rng.hpp"

namespace reconnect {

using Vertex = int32_t;

// Unordered vertex pair; u == v is a loop. Vertices are 0-based internally,
// 1-based in all file formats.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;
};

// Incrementally maintained k x k corner of the adjacency matrix, plus
// degree-trajectory samples for the watched vertices. Diagonal entries hold
// twice the loop count and so stay even.
struct WatchedWindow {
  int k = 0;
  std::vector<int32_t> counts;  // k*k, symmetric

  std::vector<int64_t> sample_steps;
  std::vector<std::vector<int32_t>> degree_samples;

  int32_t at(int i, int j) const { return counts[static_cast<std::size_t>(i) * k + j]; }
};

// Dense multigraph: the edge list is ground truth, the degree vector and the
// watched window are incremental caches. Degrees count loops twice, so
// sum(degree) == 2m always.
class MultigraphState {
 public:
  static MultigraphState from_edge_list(int n, const std::vector<Edge>& pairs);

  int n() const { return n_; }
  int64_t m() const { return static_cast<int64_t>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int32_t>& degrees() const { return degree_; }
  int32_t degree(Vertex v) const { return degree_[static_cast<std::size_t>(v)]; }

  /// Recounted k x k adjacency corner (entry (i,i) = 2 * loops at i).
  std::vector<int32_t> adjacency_window(int k) const;

  void attach_window(int k);
  bool has_window() const { return window_.k > 0; }
  const WatchedWindow& window() const { return window_; }
  WatchedWindow& mutable_window() { return window_; }

  // Replace endpoint v_old of edges[slot] by v_new; updates degree and window.
  void replace_endpoint(int64_t slot, Vertex v_old, Vertex v_new);

  /// Largest multiplicity over all vertex pairs (loops counted in adjacency units).
  int32_t max_multiplicity() const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int32_t> degree_;
  WatchedWindow window_;
};

/// Relabel by a uniform random permutation; isomorphism class is unchanged.
MultigraphState shuffle_labels(const MultigraphState& state, RngStream& rng);

// Motif: adjacency matrix in A_k (symmetric, even diagonal).
struct FiniteMotif {
  int k = 0;
  std::vector<int32_t> a;  // k*k

  static FiniteMotif from_matrix(int k, std::vector<int32_t> entries);
  int32_t at(int i, int j) const { return a[static_cast<std::size_t>(i) * k + j]; }
};

// Induced homomorphism density t_=(A, G): the fraction of ALL maps
// phi : [k] -> [n] (injective or not) under which every pair multiplicity
// matches exactly. Throws when n^k exceeds the enumeration budget (1e8).
double induced_density_exact(const FiniteMotif& motif, const MultigraphState& state);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

McEstimate induced_density_mc(const FiniteMotif& motif, const MultigraphState& state,
                              int64_t samples, RngStream& rng);

// Snapshot file: plain-text header (n, m, kappa, seed, step, degrees,
// checksum) followed by one canonically ordered edge per line, 1-based.
struct SnapshotMeta {
  double kappa = 0.0;
  uint64_t seed = 0;
  int64_t step = 0;
};

void snapshot_save(const MultigraphState& state, const std::string& path,
                   const SnapshotMeta& meta);
std::pair<MultigraphState, SnapshotMeta> snapshot_load(const std::string& path);

/// Whitespace-separated "u v" lines, 1-based. n defaults to the max index seen.
MultigraphState read_edge_list(std::istream& in, int n = 0);

}  // namespace reconnect
