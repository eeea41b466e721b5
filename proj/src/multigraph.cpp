#include "reconnect/multigraph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace reconnect {

namespace {

uint64_t fnv1a(const std::string& data) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<Edge> canonical_edges(const std::vector<Edge>& edges) {
  std::vector<Edge> out(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out[i] = {std::min(edges[i].u, edges[i].v), std::max(edges[i].u, edges[i].v)};
  }
  std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  return out;
}

std::string edge_block(const std::vector<Edge>& canonical) {
  std::string s;
  char buf[32];
  for (const Edge& e : canonical) {
    std::snprintf(buf, sizeof(buf), "%d %d\n", e.u + 1, e.v + 1);
    s += buf;
  }
  return s;
}

}  // namespace

MultigraphState MultigraphState::from_edge_list(int n, const std::vector<Edge>& pairs) {
  if (n <= 0) throw std::invalid_argument("from_edge_list: n must be positive");
  MultigraphState state;
  state.n_ = n;
  state.edges_ = pairs;
  state.degree_.assign(static_cast<std::size_t>(n), 0);
  for (const Edge& e : pairs) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      throw std::out_of_range("from_edge_list: vertex index out of range");
    }
    state.degree_[static_cast<std::size_t>(e.u)] += 1;
    state.degree_[static_cast<std::size_t>(e.v)] += 1;
  }
  return state;
}

std::vector<int32_t> MultigraphState::adjacency_window(int k) const {
  if (k < 0 || k > n_) throw std::out_of_range("adjacency_window: k > n");
  std::vector<int32_t> counts(static_cast<std::size_t>(k) * k, 0);
  for (const Edge& e : edges_) {
    if (e.u < k && e.v < k) {
      counts[static_cast<std::size_t>(e.u) * k + e.v] += 1;
      counts[static_cast<std::size_t>(e.v) * k + e.u] += 1;
    }
  }
  return counts;
}

void MultigraphState::attach_window(int k) {
  if (k < 0 || k > n_) throw std::out_of_range("attach_window: k > n");
  window_.k = k;
  window_.counts = adjacency_window(k);
  window_.sample_steps.clear();
  window_.degree_samples.clear();
}

void MultigraphState::replace_endpoint(int64_t slot, Vertex v_old, Vertex v_new) {
  Edge& e = edges_[static_cast<std::size_t>(slot)];
  const Vertex w = (e.u == v_old) ? e.v : e.u;
  const int k = window_.k;
  if (k > 0 && w < k) {
    if (v_old < k) {
      window_.counts[static_cast<std::size_t>(v_old) * k + w] -= 1;
      window_.counts[static_cast<std::size_t>(w) * k + v_old] -= 1;
    }
    if (v_new < k) {
      window_.counts[static_cast<std::size_t>(v_new) * k + w] += 1;
      window_.counts[static_cast<std::size_t>(w) * k + v_new] += 1;
    }
  }
  if (e.u == v_old) {
    e.u = v_new;
  } else {
    e.v = v_new;
  }
  degree_[static_cast<std::size_t>(v_old)] -= 1;
  degree_[static_cast<std::size_t>(v_new)] += 1;
}

int32_t MultigraphState::max_multiplicity() const {
  // Multiplicities via a sort of canonical pairs; loops in adjacency units.
  std::vector<Edge> canon = canonical_edges(edges_);
  int32_t best = 0;
  std::size_t i = 0;
  while (i < canon.size()) {
    std::size_t j = i;
    while (j < canon.size() && canon[j].u == canon[i].u && canon[j].v == canon[i].v) ++j;
    int32_t mult = static_cast<int32_t>(j - i);
    if (canon[i].u == canon[i].v) mult *= 2;
    best = std::max(best, mult);
    i = j;
  }
  return best;
}

MultigraphState shuffle_labels(const MultigraphState& state, RngStream& rng) {
  const int n = state.n();
  std::vector<Vertex> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.uniform_below(static_cast<uint32_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  std::vector<Edge> edges;
  edges.reserve(state.edges().size());
  for (const Edge& e : state.edges()) {
    edges.push_back({perm[static_cast<std::size_t>(e.u)], perm[static_cast<std::size_t>(e.v)]});
  }
  return MultigraphState::from_edge_list(n, edges);
}

FiniteMotif FiniteMotif::from_matrix(int k, std::vector<int32_t> entries) {
  if (k <= 0 || entries.size() != static_cast<std::size_t>(k) * k) {
    throw std::invalid_argument("FiniteMotif: bad dimensions");
  }
  FiniteMotif motif;
  motif.k = k;
  motif.a = std::move(entries);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (motif.at(i, j) < 0) throw std::invalid_argument("FiniteMotif: negative entry");
      if (motif.at(i, j) != motif.at(j, i)) {
        throw std::invalid_argument("FiniteMotif: matrix not symmetric");
      }
    }
    if (motif.at(i, i) % 2 != 0) throw std::invalid_argument("FiniteMotif: odd diagonal");
  }
  return motif;
}

namespace {

// Sorted neighbor-multiplicity lists; B(i,i) = 2 * loops.
struct AdjacencyIndex {
  int n;
  std::vector<std::vector<std::pair<Vertex, int32_t>>> rows;

  explicit AdjacencyIndex(const MultigraphState& state) : n(state.n()), rows(state.n()) {
    for (const Edge& e : state.edges()) {
      add(e.u, e.v);
      if (e.u != e.v) add(e.v, e.u);
    }
    for (auto& row : rows) std::sort(row.begin(), row.end());
  }

  void add(Vertex u, Vertex v) {
    // Rows are small; linear probe then sort once at the end.
    for (auto& [w, c] : rows[static_cast<std::size_t>(u)]) {
      if (w == v) {
        c += (u == v) ? 2 : 1;
        return;
      }
    }
    rows[static_cast<std::size_t>(u)].emplace_back(v, (u == v) ? 2 : 1);
  }

  int32_t at(Vertex u, Vertex v) const {
    const auto& row = rows[static_cast<std::size_t>(u)];
    auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(v, INT32_MIN));
    if (it != row.end() && it->first == v) return it->second;
    return 0;
  }
};

bool motif_matches(const FiniteMotif& motif, const AdjacencyIndex& adj,
                   const std::vector<Vertex>& phi) {
  const int k = motif.k;
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      if (motif.at(i, j) != adj.at(phi[static_cast<std::size_t>(i)],
                                   phi[static_cast<std::size_t>(j)])) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

double induced_density_exact(const FiniteMotif& motif, const MultigraphState& state) {
  const int k = motif.k;
  const int n = state.n();
  // Refuse when n^k > 1e8 (equivalently k log n > log 1e8).
  if (static_cast<double>(k) * std::log(static_cast<double>(n)) > std::log(1e8)) {
    throw std::invalid_argument("induced_density_exact: enumeration budget exceeded");
  }
  AdjacencyIndex adj(state);
  std::vector<Vertex> phi(static_cast<std::size_t>(k), 0);
  int64_t matches = 0;
  int64_t total = 1;
  for (int i = 0; i < k; ++i) total *= n;
  for (int64_t code = 0; code < total; ++code) {
    int64_t c = code;
    for (int i = 0; i < k; ++i) {
      phi[static_cast<std::size_t>(i)] = static_cast<Vertex>(c % n);
      c /= n;
    }
    if (motif_matches(motif, adj, phi)) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(total);
}

McEstimate induced_density_mc(const FiniteMotif& motif, const MultigraphState& state,
                              int64_t samples, RngStream& rng) {
  if (samples < 1) throw std::invalid_argument("induced_density_mc: samples must be >= 1");
  AdjacencyIndex adj(state);
  const int k = motif.k;
  const uint32_t n = static_cast<uint32_t>(state.n());
  std::vector<Vertex> phi(static_cast<std::size_t>(k), 0);
  int64_t matches = 0;
  for (int64_t s = 0; s < samples; ++s) {
    for (int i = 0; i < k; ++i) {
      phi[static_cast<std::size_t>(i)] = static_cast<Vertex>(rng.uniform_below(n));
    }
    if (motif_matches(motif, adj, phi)) ++matches;
  }
  double p = static_cast<double>(matches) / static_cast<double>(samples);
  double se = 0.0;
  if (samples > 1) {
    double var = p * (1.0 - p) * static_cast<double>(samples) /
                 static_cast<double>(samples - 1);
    se = std::sqrt(var / static_cast<double>(samples));
  }
  return {p, se};
}

void snapshot_save(const MultigraphState& state, const std::string& path,
                   const SnapshotMeta& meta) {
  std::vector<Edge> canon = canonical_edges(state.edges());
  std::string block = edge_block(canon);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("snapshot_save: cannot open " + path);
  out << "reconnect-snapshot v1\n";
  out << "n " << state.n() << "\n";
  out << "m " << state.m() << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", meta.kappa);
  out << "kappa " << buf << "\n";
  out << "seed " << meta.seed << "\n";
  out << "step " << meta.step << "\n";
  out << "degrees";
  for (int32_t d : state.degrees()) out << ' ' << d;
  out << "\n";
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(block)));
  out << "checksum " << buf << "\n";
  out << "edges\n";
  out << block;
  if (!out) throw std::runtime_error("snapshot_save: write failed");
}

std::pair<MultigraphState, SnapshotMeta> snapshot_load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("snapshot_load: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "reconnect-snapshot v1") {
    throw std::runtime_error("snapshot_load: bad magic line");
  }
  int n = -1;
  int64_t m = -1;
  SnapshotMeta meta;
  std::vector<int64_t> declared_degrees;
  std::string declared_checksum;
  while (std::getline(in, line)) {
    if (line == "edges") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "n") {
      ls >> n;
    } else if (key == "m") {
      ls >> m;
    } else if (key == "kappa") {
      ls >> meta.kappa;
    } else if (key == "seed") {
      ls >> meta.seed;
    } else if (key == "step") {
      ls >> meta.step;
    } else if (key == "degrees") {
      int64_t d;
      while (ls >> d) declared_degrees.push_back(d);
    } else if (key == "checksum") {
      ls >> declared_checksum;
    } else {
      throw std::runtime_error("snapshot_load: unknown header key: " + key);
    }
  }
  if (n <= 0 || m < 0) throw std::runtime_error("snapshot_load: missing n or m");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int64_t u, v;
    if (!(ls >> u >> v)) throw std::runtime_error("snapshot_load: malformed edge line");
    if (u < 1 || u > n || v < 1 || v > n) {
      throw std::runtime_error("snapshot_load: vertex index out of range");
    }
    edges.push_back({static_cast<Vertex>(u - 1), static_cast<Vertex>(v - 1)});
  }
  if (static_cast<int64_t>(edges.size()) != m) {
    throw std::runtime_error("snapshot_load: edge count does not match header");
  }
  std::string block = edge_block(canonical_edges(edges));
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(block)));
  if (!declared_checksum.empty() && declared_checksum != buf) {
    throw std::runtime_error("snapshot_load: checksum mismatch");
  }
  MultigraphState state = MultigraphState::from_edge_list(n, edges);
  if (!declared_degrees.empty()) {
    if (declared_degrees.size() != static_cast<std::size_t>(n)) {
      throw std::runtime_error("snapshot_load: degree vector length mismatch");
    }
    for (int i = 0; i < n; ++i) {
      if (declared_degrees[static_cast<std::size_t>(i)] !=
          state.degrees()[static_cast<std::size_t>(i)]) {
        throw std::runtime_error(
            "snapshot_load: declared degrees inconsistent with edge list");
      }
    }
  }
  return {std::move(state), meta};
}

MultigraphState read_edge_list(std::istream& in, int n) {
  std::vector<Edge> edges;
  int64_t u, v;
  int max_seen = 0;
  while (in >> u >> v) {
    if (u < 1 || v < 1) throw std::runtime_error("read_edge_list: indices are 1-based");
    max_seen = static_cast<int>(std::max<int64_t>(max_seen, std::max(u, v)));
    edges.push_back({static_cast<Vertex>(u - 1), static_cast<Vertex>(v - 1)});
  }
  if (n == 0) n = max_seen;
  return MultigraphState::from_edge_list(n, edges);
}

}  // namespace reconnect
