#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "hitlab/gasket.hpp"

using namespace hitlab;
using namespace hitlab::gasket;

namespace {

// Independent construction: the unit up-triangle with lattice corner (i, j)
// belongs to generation n iff i & j == 0 (Pascal's triangle mod 2).
std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> pascal_edges(int n) {
  const int side = 1 << (n - 1);
  std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> out;
  auto add = [&](std::pair<int, int> a, std::pair<int, int> b) {
    if (b < a) std::swap(a, b);
    out.insert({a, b});
  };
  for (int i = 0; i < side; ++i) {
    for (int j = 0; i + j < side; ++j) {
      if ((i & j) != 0) continue;
      add({i, j}, {i + 1, j});
      add({i, j}, {i, j + 1});
      add({i + 1, j}, {i, j + 1});
    }
  }
  return out;
}

std::pair<int, int> lattice_of(Point2 p) {
  const double b = p.y / (std::sqrt(3.0) / 2.0);
  const double a = p.x - b / 2.0;
  return {static_cast<int>(std::lround(a)), static_cast<int>(std::lround(b))};
}

std::size_t reachable(const GasketGraph& g) {
  std::vector<bool> seen(g.vertex_count(), false);
  std::queue<VertexId> q;
  q.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!q.empty()) {
    const VertexId v = q.front();
    q.pop();
    for (VertexId u : g.adjacency[v]) {
      if (!seen[u]) {
        seen[u] = true;
        ++count;
        q.push(u);
      }
    }
  }
  return count;
}

}  // namespace

TEST_CASE("vertex counts, degrees and sides") {
  CHECK_THROWS(build_gasket(0));
  CHECK_THROWS(build_gasket(13));
  for (int n = 1; n <= 9; ++n) {
    CAPTURE(n);
    const auto g = build_gasket(n);
    CHECK(g.vertex_count() == expected_vertex_count(n));
    std::size_t edges = 3;
    for (int k = 1; k < n; ++k) edges *= 3;
    CHECK(g.edges.size() == edges);
    int corners = 0;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      const auto d = g.degree(v);
      CHECK((d == 2 || d == 4));
      if (d == 2) ++corners;
    }
    CHECK(corners == 3);
    const std::size_t side = (std::size_t{1} << (n - 1)) + 1;
    CHECK(g.bottom_side.size() == side);
    CHECK(g.left_side.size() == side);
    CHECK(g.right_side.size() == side);
    CHECK(g.boundary().size() == 3 * side - 3);
    CHECK(g.roles[g.top] == VertexRole::top);
    CHECK(g.left_side.back() == g.top);
    CHECK(g.right_side.back() == g.top);
    CHECK(reachable(g) == g.vertex_count());
    CHECK(std::is_sorted(g.edges.begin(), g.edges.end()));
  }
  CHECK(build_gasket(3).vertex_count() == 15);
}

TEST_CASE("edge sets match the Pascal-triangle construction") {
  for (int n = 1; n <= 7; ++n) {
    CAPTURE(n);
    const auto g = build_gasket(n);
    std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> got;
    for (auto [u, v] : g.edges) {
      auto a = lattice_of(g.vertices[u]);
      auto b = lattice_of(g.vertices[v]);
      if (b < a) std::swap(a, b);
      got.insert({a, b});
    }
    CHECK(got == pascal_edges(n));
  }
}

TEST_CASE("vertices are numbered by (x, y)") {
  const auto g = build_gasket(4);
  for (std::size_t i = 1; i < g.vertex_count(); ++i) {
    const auto& p = g.vertices[i - 1];
    const auto& q = g.vertices[i];
    CHECK((p.x < q.x - 1e-9 || (std::abs(p.x - q.x) < 1e-9 && p.y < q.y)));
  }
  CHECK(g.vertices[0].x == 0.0);
  CHECK(g.vertices[0].y == 0.0);
}

TEST_CASE("exact hitting laws on small gaskets") {
  SUBCASE("generation 1") {
    const auto g = build_gasket(1);
    const auto law = hitting_distribution(g, g.top, g.bottom_side);
    REQUIRE(law.probs.size() == 2);
    CHECK(law.probs[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(law.probs[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(entropy_bits(law) == doctest::Approx(1.0));
  }
  SUBCASE("generation 2, solved by hand") {
    // Middle row m1, m2 (degree 4): h(top) = (h(m1) + h(m2)) / 2,
    // h(m1) = (h(top) + h(m2) + [b0] + [b1]) / 4 and symmetrically.
    const auto g = build_gasket(2);
    for (Solver s : {Solver::conjugate_gradient, Solver::dense_lu}) {
      const auto law = hitting_distribution(g, g.top, g.bottom_side, {s, 1e-12, 1});
      REQUIRE(law.probs.size() == 3);
      CHECK(law.probs[0] == doctest::Approx(0.25).epsilon(1e-13));
      CHECK(law.probs[1] == doctest::Approx(0.5).epsilon(1e-13));
      CHECK(law.probs[2] == doctest::Approx(0.25).epsilon(1e-13));
      CHECK(entropy_bits(law) == doctest::Approx(1.5));
    }
  }
}

TEST_CASE("hitting law invariants") {
  for (int n = 1; n <= 6; ++n) {
    CAPTURE(n);
    const auto g = build_gasket(n);
    for (const auto& target : {g.bottom_side, g.boundary()}) {
      std::vector<VertexId> absorbing = target;
      absorbing.erase(std::remove(absorbing.begin(), absorbing.end(), g.top), absorbing.end());
      const auto cg = hitting_distribution(g, g.top, absorbing);
      double total = 0.0;
      for (double p : cg.probs) {
        CHECK(p >= 0.0);
        total += p;
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
      CHECK(cg.max_residual <= 1e-10);
      if (n <= 4) {
        const auto lu = hitting_distribution(g, g.top, absorbing, {Solver::dense_lu, 1e-12, 1});
        for (std::size_t k = 0; k < lu.probs.size(); ++k) {
          CHECK(std::abs(lu.probs[k] - cg.probs[k]) <= 1e-10);
        }
      }
    }
    // Mirror symmetry on the bottom side.
    const auto law = hitting_distribution(g, g.top, g.bottom_side, {Solver::conjugate_gradient, 1e-12, 2});
    const std::size_t m = law.probs.size();
    for (std::size_t k = 0; k < m; ++k) CHECK(std::abs(law.probs[k] - law.probs[m - 1 - k]) <= 1e-10);
    CHECK(entropy_bits(law) <= std::log2(static_cast<double>(m)) + 1e-12);
  }
}

TEST_CASE("hitting law edge cases") {
  const auto g = build_gasket(3);
  const std::vector<VertexId> none;
  CHECK_THROWS_AS(hitting_distribution(g, g.top, none), std::invalid_argument);
  const std::vector<VertexId> with_top{g.top, g.bottom_side[0]};
  const auto law = hitting_distribution(g, g.top, with_top);
  CHECK(law.probs[0] == 1.0);
  CHECK(law.probs[1] == 0.0);
  CHECK(entropy_bits(law) == 0.0);
  const std::vector<VertexId> bad{static_cast<VertexId>(g.vertex_count())};
  CHECK_THROWS_AS(hitting_distribution(g, g.top, bad), std::invalid_argument);
}

TEST_CASE("Monte Carlo walks agree with the exact law") {
  const auto g = build_gasket(1);
  const auto mc = mc_srw_hitting(g, g.top, g.bottom_side, 100000, RngStream{21});
  CHECK(mc.samples == 100000);
  const double se = std::sqrt(0.25 / 100000.0);
  CHECK(std::abs(mc.probs[0] - 0.5) < 4 * se);

  const auto g2 = build_gasket(2);
  const auto a = mc_srw_hitting(g2, g2.top, g2.bottom_side, 20000, RngStream{22}, 1);
  const auto b = mc_srw_hitting(g2, g2.top, g2.bottom_side, 20000, RngStream{22}, 3);
  CHECK(a.probs == b.probs);
  const auto exact = hitting_distribution(g2, g2.top, g2.bottom_side);
  CHECK(total_variation(a, exact) < 4.0 * std::sqrt(3.0 / 20000.0));
}

TEST_CASE("conjecture scan") {
  CHECK_THROWS(conjecture_scan(10, {}, RngStream{}));
  const auto scan = conjecture_scan(4, {}, RngStream{23});
  CHECK(scan.violations.empty());
  CHECK(scan.bottom_side_is_max.size() == 4);
  for (const auto& row : scan.rows) {
    CHECK(row.entropy <= row.bound);
    CHECK(row.pass);
    if (row.subset == "bottom_side") {
      CHECK(row.entropy <= std::log2(static_cast<double>(row.size)) + 1e-12);
    }
  }
  CHECK(scan.rows.front().n == 1);
  CHECK(scan.rows.front().subset == "bottom_side");
  CHECK(scan.rows.front().entropy == doctest::Approx(1.0));
  const auto again = conjecture_scan(4, {}, RngStream{23});
  REQUIRE(again.rows.size() == scan.rows.size());
  for (std::size_t i = 0; i < scan.rows.size(); ++i) CHECK(again.rows[i].entropy == scan.rows[i].entropy);
}

TEST_CASE("CSV exports") {
  const auto g = build_gasket(1);
  std::ostringstream edges, verts;
  write_edges_csv(g, edges);
  CHECK(edges.str() == "u,v\n0,1\n0,2\n1,2\n");
  write_vertices_csv(g, verts);
  CHECK(verts.str().rfind("id,x,y,role\n0,0,0,bottom\n", 0) == 0);
  CHECK(verts.str().find(",top\n") != std::string::npos);
}
