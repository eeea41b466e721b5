#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "reconnect/multigraph.hpp"
#include "reconnect/rng.hpp"

using namespace reconnect;

namespace {

MultigraphState make(int n, std::vector<Edge> edges) {
  return MultigraphState::from_edge_list(n, edges);
}

std::string temp_path(const char* tag) {
  return std::string("mg_test_") + tag + ".snap";
}

}  // namespace

TEST_CASE("from_edge_list computes degrees, loops count twice") {
  MultigraphState a = make(2, {{0, 1}});
  CHECK(a.m() == 1);
  CHECK(a.degree(0) == 1);
  CHECK(a.degree(1) == 1);

  MultigraphState b = make(1, {{0, 0}});
  CHECK(b.m() == 1);
  CHECK(b.degree(0) == 2);

  MultigraphState c = make(3, {{0, 1}, {0, 1}, {2, 2}});
  CHECK(c.m() == 3);
  CHECK(c.degree(0) == 2);
  CHECK(c.degree(1) == 2);
  CHECK(c.degree(2) == 2);

  CHECK_THROWS(make(2, {{0, 2}}));
  CHECK_THROWS(make(2, {{-1, 0}}));
}

TEST_CASE("adjacency_window follows the loop convention") {
  MultigraphState a = make(2, {{0, 1}});
  CHECK(a.adjacency_window(2) == std::vector<int32_t>{0, 1, 1, 0});

  MultigraphState b = make(1, {{0, 0}});
  CHECK(b.adjacency_window(1) == std::vector<int32_t>{2});

  MultigraphState c = make(3, {{0, 1}, {0, 1}, {2, 2}});
  CHECK(c.adjacency_window(3) == std::vector<int32_t>{0, 2, 0, 2, 0, 0, 0, 0, 2});
  CHECK_THROWS(c.adjacency_window(4));
}

TEST_CASE("incremental window matches recount after endpoint replacement") {
  MultigraphState state = make(4, {{0, 1}, {1, 2}, {3, 3}, {0, 0}});
  state.attach_window(3);
  state.replace_endpoint(0, 0, 2);  // {0,1} -> {2,1}
  state.replace_endpoint(2, 3, 1);  // loop {3,3} -> {1,3}
  state.replace_endpoint(3, 0, 0);  // loop {0,0} -> {0,0}, no-op in effect
  CHECK(state.window().counts == state.adjacency_window(3));
  const auto& deg = state.degrees();
  int64_t sum = std::accumulate(deg.begin(), deg.end(), int64_t{0});
  CHECK(sum == 2 * state.m());
}

TEST_CASE("shuffle_labels: n=1 fixed; degree multiset preserved") {
  RngStream rng(21, 0);
  MultigraphState single = make(1, {{0, 0}});
  MultigraphState shuffled = shuffle_labels(single, rng);
  CHECK(shuffled.adjacency_window(1) == std::vector<int32_t>{2});

  MultigraphState g = make(5, {{0, 1}, {0, 1}, {0, 2}, {3, 3}});
  std::multiset<int32_t> before(g.degrees().begin(), g.degrees().end());
  for (int rep = 0; rep < 20; ++rep) {
    MultigraphState s = shuffle_labels(g, rng);
    std::multiset<int32_t> after(s.degrees().begin(), s.degrees().end());
    CHECK(before == after);
    CHECK(s.m() == g.m());
  }
}

TEST_CASE("shuffle_labels matches the exchangeable law from full enumeration (n=4)") {
  // Asymmetric graph; compare the 2x2 window law over shuffles with the exact
  // law from all 4! permutations.
  MultigraphState g = make(4, {{0, 1}, {0, 1}, {0, 2}, {2, 3}, {3, 3}});
  std::map<std::vector<int32_t>, double> exact;
  std::vector<int> perm{0, 1, 2, 3};
  int perms = 0;
  std::sort(perm.begin(), perm.end());
  do {
    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) {
      edges.push_back({static_cast<Vertex>(perm[static_cast<std::size_t>(e.u)]),
                       static_cast<Vertex>(perm[static_cast<std::size_t>(e.v)])});
    }
    exact[MultigraphState::from_edge_list(4, edges).adjacency_window(2)] += 1.0;
    ++perms;
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(perms == 24);
  for (auto& [key, value] : exact) value /= perms;

  RngStream rng(22, 0);
  std::map<std::vector<int32_t>, double> empirical;
  const int reps = 200000;
  for (int rep = 0; rep < reps; ++rep) {
    empirical[shuffle_labels(g, rng).adjacency_window(2)] += 1.0;
  }
  double tv = 0.0;
  for (const auto& [key, p] : exact) {
    const double q = empirical.count(key) ? empirical[key] / reps : 0.0;
    tv += std::fabs(p - q);
  }
  for (const auto& [key, q] : empirical) {
    if (!exact.count(key)) tv += q / reps;
  }
  CHECK(tv / 2.0 < 0.01);
}

TEST_CASE("induced_density_exact: hand examples") {
  // One loop-free vertex in a loop-free graph: always matches.
  MultigraphState g = make(3, {{0, 1}, {1, 2}});
  FiniteMotif vertex = FiniteMotif::from_matrix(1, {0});
  CHECK(induced_density_exact(vertex, g) == 1.0);

  // Single edge on n=2: 2 of 4 maps match.
  MultigraphState e = make(2, {{0, 1}});
  FiniteMotif edge_motif = FiniteMotif::from_matrix(2, {0, 1, 1, 0});
  CHECK(induced_density_exact(edge_motif, e) == 0.5);

  // Hand count: G = double edge {1,2} plus loop at 3.
  MultigraphState h = make(3, {{0, 1}, {0, 1}, {2, 2}});
  FiniteMotif double_edge = FiniteMotif::from_matrix(2, {0, 2, 2, 0});
  CHECK(induced_density_exact(double_edge, h) == doctest::Approx(2.0 / 9.0));
}

TEST_CASE("induced densities over all motifs partition the maps") {
  RngStream rng(23, 0);
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 3 + static_cast<int>(rng.uniform_below(3));
    std::vector<Edge> edges;
    const int m = 2 + static_cast<int>(rng.uniform_below(5));
    for (int i = 0; i < m; ++i) {
      edges.push_back({static_cast<Vertex>(rng.uniform_below(static_cast<uint32_t>(n))),
                       static_cast<Vertex>(rng.uniform_below(static_cast<uint32_t>(n)))});
    }
    MultigraphState g = MultigraphState::from_edge_list(n, edges);
    const int32_t cap = g.max_multiplicity() + 1;
    double total = 0.0;
    for (int32_t offdiag = 0; offdiag <= cap; ++offdiag) {
      for (int32_t d1 = 0; d1 <= cap + 1; d1 += 2) {
        for (int32_t d2 = 0; d2 <= cap + 1; d2 += 2) {
          FiniteMotif a = FiniteMotif::from_matrix(2, {d1, offdiag, offdiag, d2});
          total += induced_density_exact(a, g);
        }
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("induced_density_exact refuses an oversized enumeration") {
  MultigraphState g = make(200, {{0, 1}});
  FiniteMotif motif = FiniteMotif::from_matrix(4, std::vector<int32_t>(16, 0));
  CHECK_THROWS(induced_density_exact(motif, g));
}

TEST_CASE("induced_density_mc agrees with exact and handles edge cases") {
  RngStream rng(24, 0);
  MultigraphState g = make(6, {{0, 1}, {0, 1}, {1, 2}, {3, 4}, {5, 5}, {2, 4}});
  FiniteMotif motif = FiniteMotif::from_matrix(2, {0, 1, 1, 0});
  const double exact = induced_density_exact(motif, g);
  McEstimate mc = induced_density_mc(motif, g, 100000, rng);
  CHECK(std::fabs(mc.estimate - exact) <= 4.0 * mc.std_error);

  // Motif with an entry above the max multiplicity: estimate 0.
  FiniteMotif heavy = FiniteMotif::from_matrix(2, {0, 9, 9, 0});
  McEstimate zero = induced_density_mc(heavy, g, 1000, rng);
  CHECK(zero.estimate == 0.0);

  McEstimate one_sample = induced_density_mc(motif, g, 1, rng);
  CHECK((one_sample.estimate == 0.0 || one_sample.estimate == 1.0));
}

TEST_CASE("finite motif validation") {
  CHECK_THROWS(FiniteMotif::from_matrix(2, {0, 1, 2, 0}));  // asymmetric
  CHECK_THROWS(FiniteMotif::from_matrix(1, {1}));           // odd diagonal
  CHECK_THROWS(FiniteMotif::from_matrix(2, {0, -1, -1, 0}));
}

TEST_CASE("snapshot round trip is byte-stable and validated") {
  RngStream rng(25, 0);
  MultigraphState g = make(5, {{0, 1}, {3, 2}, {4, 4}, {0, 1}});
  const std::string path1 = temp_path("a");
  const std::string path2 = temp_path("b");
  snapshot_save(g, path1, {2.0, 77, 123});
  auto [loaded, meta] = snapshot_load(path1);
  CHECK(meta.kappa == 2.0);
  CHECK(meta.seed == 77);
  CHECK(meta.step == 123);
  CHECK(loaded.n() == g.n());
  CHECK(loaded.m() == g.m());
  CHECK(loaded.degrees() == g.degrees());
  snapshot_save(loaded, path2, meta);
  std::ifstream f1(path1), f2(path2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  std::remove(path1.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("snapshot round trip survives a large random state") {
  RngStream rng(26, 0);
  const int n = 2000;
  std::vector<Edge> edges;
  for (int i = 0; i < 100000; ++i) {
    edges.push_back({static_cast<Vertex>(rng.uniform_below(n)),
                     static_cast<Vertex>(rng.uniform_below(n))});
  }
  MultigraphState g = MultigraphState::from_edge_list(n, edges);
  const std::string path = temp_path("big");
  snapshot_save(g, path, {1.0, 1, 0});
  auto [loaded, meta] = snapshot_load(path);
  CHECK(loaded.m() == g.m());
  CHECK(loaded.degrees() == g.degrees());
  std::remove(path.c_str());
}

TEST_CASE("snapshot load rejects inconsistent files") {
  MultigraphState g = make(3, {{0, 0}, {1, 2}});
  const std::string path = temp_path("bad");
  snapshot_save(g, path, {1.0, 5, 0});

  // Degrees line claims an odd count at the loop vertex.
  {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    auto pos = text.find("degrees 2 1 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 13, "degrees 1 1 1");
    std::ofstream out(path);
    out << text;
  }
  CHECK_THROWS(snapshot_load(path));

  // Tampered edge line breaks the checksum.
  snapshot_save(g, path, {1.0, 5, 0});
  {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    auto pos = text.find("2 3\n");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 4, "3 3\n");
    std::ofstream out(path);
    out << text;
  }
  CHECK_THROWS(snapshot_load(path));
  std::remove(path.c_str());
}

TEST_CASE("read_edge_list parses 1-based pairs") {
  std::istringstream in("1 2\n2 3\n3 3\n");
  MultigraphState g = read_edge_list(in);
  CHECK(g.n() == 3);
  CHECK(g.m() == 3);
  CHECK(g.degree(2) == 3);
}
