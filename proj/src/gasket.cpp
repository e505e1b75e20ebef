#include "hitlab/gasket.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "hitlab/parallel.hpp"
#include "hitlab/stats.hpp"

namespace hitlab::gasket {

const char* to_string(VertexRole role) {
  switch (role) {
    case VertexRole::top: return "top";
    case VertexRole::bottom: return "bottom";
    case VertexRole::side: return "side";
    case VertexRole::interior: return "interior";
  }
  return "?";
}

std::vector<VertexId> GasketGraph::boundary() const {
  std::vector<VertexId> b = bottom_side;
  b.insert(b.end(), left_side.begin(), left_side.end());
  b.insert(b.end(), right_side.begin(), right_side.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

std::size_t expected_vertex_count(int generation) {
  std::size_t p = 1;
  for (int i = 1; i < generation; ++i) p *= 3;
  return 3 * (p + 1) / 2;
}

GasketGraph build_gasket(int generation) {
  if (generation < 1 || generation > 12) {
    throw std::invalid_argument("build_gasket: generation must be in [1, 12] (got " +
                                std::to_string(generation) + ")");
  }
  // Lattice coordinates (a, b) stand for a (1, 0) + b (1/2, sqrt(3)/2).
  using Lattice = std::pair<std::int64_t, std::int64_t>;
  std::vector<Lattice> pts{{0, 0}, {1, 0}, {0, 1}};
  std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 1}, {0, 2}, {1, 2}};
  std::int64_t side = 1;
  for (int gen = 1; gen < generation; ++gen) {
    std::map<Lattice, std::size_t> index;
    std::vector<Lattice> next_pts;
    std::vector<std::pair<std::size_t, std::size_t>> next_edges;
    next_edges.reserve(edges.size() * 3);
    const std::array<Lattice, 3> offsets{{{0, 0}, {side, 0}, {0, side}}};
    for (const auto& [da, db] : offsets) {
      std::vector<std::size_t> remap(pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const Lattice p{pts[i].first + da, pts[i].second + db};
        auto [it, inserted] = index.try_emplace(p, next_pts.size());
        if (inserted) next_pts.push_back(p);
        remap[i] = it->second;
      }
      for (const auto& [u, v] : edges) next_edges.emplace_back(remap[u], remap[v]);
    }
    pts = std::move(next_pts);
    edges = std::move(next_edges);
    side *= 2;
  }

  // Canonical order: lexicographic in (x, y), i.e. in (2a + b, b).
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) {
    return std::pair{2 * pts[i].first + pts[i].second, pts[i].second};
  };
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return key(l) < key(r); });
  std::vector<VertexId> id_of(pts.size());
  for (std::size_t k = 0; k < order.size(); ++k) id_of[order[k]] = static_cast<VertexId>(k);

  GasketGraph g;
  g.generation = generation;
  g.vertices.resize(pts.size());
  g.roles.resize(pts.size());
  g.adjacency.resize(pts.size());
  const double h = std::sqrt(3.0) / 2.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto [a, b] = pts[i];
    const VertexId v = id_of[i];
    g.vertices[v] = {static_cast<double>(a) + 0.5 * static_cast<double>(b),
                     h * static_cast<double>(b)};
    VertexRole role = VertexRole::interior;
    if (a == 0 && b == side) {
      role = VertexRole::top;
      g.top = v;
    } else if (b == 0) {
      role = VertexRole::bottom;
    } else if (a == 0 || a + b == side) {
      role = VertexRole::side;
    }
    g.roles[v] = role;
  }
  for (const auto& [u, v] : edges) {
    VertexId a = id_of[u], b = id_of[v];
    if (a > b) std::swap(a, b);
    g.edges.emplace_back(a, b);
    g.adjacency[a].push_back(b);
    g.adjacency[b].push_back(a);
  }
  std::sort(g.edges.begin(), g.edges.end());
  for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());

  std::vector<std::pair<std::int64_t, VertexId>> bottom, left, right;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto [a, b] = pts[i];
    if (b == 0) bottom.emplace_back(a, id_of[i]);
    if (a == 0) left.emplace_back(b, id_of[i]);
    if (a + b == side) right.emplace_back(b, id_of[i]);
  }
  for (auto* s : {&bottom, &left, &right}) std::sort(s->begin(), s->end());
  for (const auto& [k, v] : bottom) g.bottom_side.push_back(v);
  for (const auto& [k, v] : left) g.left_side.push_back(v);
  for (const auto& [k, v] : right) g.right_side.push_back(v);
  return g;
}

// ------------------------------------------------------------------ solves

namespace {

void check_inputs(const GasketGraph& g, VertexId start, std::span<const VertexId> absorbing) {
  if (absorbing.empty()) throw std::invalid_argument("hitting: absorbing set is empty");
  if (start >= g.vertex_count()) throw std::invalid_argument("hitting: start not in graph");
  std::vector<char> seen(g.vertex_count(), 0);
  for (VertexId v : absorbing) {
    if (v >= g.vertex_count()) throw std::invalid_argument("hitting: absorbing vertex not in graph");
    if (seen[v]) throw std::invalid_argument("hitting: absorbing set has duplicates");
    seen[v] = 1;
  }
}

constexpr std::size_t kDenseLimit = 4000;

}  // namespace

HittingLaw hitting_distribution(const GasketGraph& g, VertexId start,
                                std::span<const VertexId> absorbing,
                                const SolveOptions& options) {
  check_inputs(g, start, absorbing);
  HittingLaw law;
  law.targets.assign(absorbing.begin(), absorbing.end());
  law.probs.assign(absorbing.size(), 0.0);
  if (const auto it = std::find(absorbing.begin(), absorbing.end(), start); it != absorbing.end()) {
    law.probs[static_cast<std::size_t>(it - absorbing.begin())] = 1.0;
    return law;
  }

  const std::size_t nv = g.vertex_count();
  std::vector<char> is_target(nv, 0);
  for (VertexId v : absorbing) is_target[v] = 1;
  std::vector<std::ptrdiff_t> slot(nv, -1);
  std::vector<VertexId> transient;
  for (VertexId v = 0; v < nv; ++v) {
    if (!is_target[v]) {
      slot[v] = static_cast<std::ptrdiff_t>(transient.size());
      transient.push_back(v);
    }
  }
  const auto m = static_cast<Eigen::Index>(transient.size());

  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index i = 0; i < m; ++i) {
    const VertexId v = transient[static_cast<std::size_t>(i)];
    trip.emplace_back(i, i, static_cast<double>(g.degree(v)));
    for (VertexId u : g.adjacency[v]) {
      if (slot[u] >= 0) trip.emplace_back(i, slot[u], -1.0);
    }
  }
  Eigen::SparseMatrix<double> lap(m, m);
  lap.setFromTriplets(trip.begin(), trip.end());
  lap.makeCompressed();

  if (options.solver == Solver::dense_lu && transient.size() > kDenseLimit) {
    throw std::invalid_argument("hitting: dense LU limited to " + std::to_string(kDenseLimit) +
                                " transient vertices");
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  if (options.solver == Solver::dense_lu) lu.compute(Eigen::MatrixXd(lap));

  const auto start_slot = static_cast<Eigen::Index>(slot[start]);
  std::vector<double> residual(absorbing.size(), 0.0);
  const std::size_t chunk = 16;
  parallel_chunks(absorbing.size(), chunk, options.workers, [&](std::size_t lo, std::size_t hi) {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    if (options.solver == Solver::conjugate_gradient) {
      cg.setTolerance(options.tolerance);
      cg.setMaxIterations(std::max<Eigen::Index>(10 * m, 1000));
      cg.compute(lap);
    }
    for (std::size_t j = lo; j < hi; ++j) {
      const VertexId target = absorbing[j];
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
      for (VertexId u : g.adjacency[target]) {
        if (slot[u] >= 0) rhs[slot[u]] += 1.0;
      }
      Eigen::VectorXd h;
      if (options.solver == Solver::conjugate_gradient) {
        h = cg.solve(rhs);
        if (cg.info() != Eigen::Success) {
          throw std::runtime_error("hitting: conjugate gradient did not converge");
        }
      } else {
        h = lu.solve(rhs);
      }
      const Eigen::VectorXd res = lap * h - rhs;
      double worst = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double deg = static_cast<double>(g.degree(transient[static_cast<std::size_t>(i)]));
        worst = std::max(worst, std::abs(res[i]) / deg);
      }
      residual[j] = worst;
      // Targets shielded by other targets come out as -1e-17 or so.
      law.probs[j] = std::max(h[start_slot], 0.0);
    }
  });
  law.max_residual = *std::max_element(residual.begin(), residual.end());
  return law;
}

HittingLaw mc_srw_hitting(const GasketGraph& g, VertexId start,
                          std::span<const VertexId> absorbing, std::size_t replicates,
                          const RngStream& rng, unsigned workers) {
  check_inputs(g, start, absorbing);
  const std::size_t nv = g.vertex_count();
  std::vector<std::ptrdiff_t> target_slot(nv, -1);
  for (std::size_t j = 0; j < absorbing.size(); ++j) {
    target_slot[absorbing[j]] = static_cast<std::ptrdiff_t>(j);
  }
  const std::size_t chunk = 4096;
  const std::size_t chunks = (replicates + chunk - 1) / chunk;
  std::vector<std::vector<std::size_t>> partial(chunks, std::vector<std::size_t>(absorbing.size(), 0));
  parallel_chunks(replicates, chunk, workers, [&](std::size_t lo, std::size_t hi) {
    auto& counts = partial[lo / chunk];
    for (std::size_t i = lo; i < hi; ++i) {
      RandomSource src(rng.replicate(i));
      VertexId v = start;
      while (target_slot[v] < 0) {
        const auto& adj = g.adjacency[v];
        v = adj[src.below(static_cast<std::uint32_t>(adj.size()))];
      }
      ++counts[static_cast<std::size_t>(target_slot[v])];
    }
  });
  HittingLaw law;
  law.targets.assign(absorbing.begin(), absorbing.end());
  law.probs.assign(absorbing.size(), 0.0);
  law.samples = replicates;
  for (std::size_t j = 0; j < absorbing.size(); ++j) {
    std::size_t total = 0;
    for (const auto& c : partial) total += c[j];
    law.probs[j] = replicates == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(replicates);
  }
  return law;
}

double entropy_bits(const HittingLaw& law) { return stats::entropy_base2(law.probs); }

double total_variation(const HittingLaw& a, const HittingLaw& b) {
  if (a.targets != b.targets) throw std::invalid_argument("total_variation: target lists differ");
  double tv = 0.0;
  for (std::size_t i = 0; i < a.probs.size(); ++i) tv += std::abs(a.probs[i] - b.probs[i]);
  return 0.5 * tv;
}

// -------------------------------------------------------------------- scan

ScanResult conjecture_scan(int n_max, const SubsetFamily& family, const RngStream& rng,
                           const SolveOptions& options) {
  if (n_max < 1 || n_max > 9) {
    throw std::invalid_argument("conjecture_scan: n_max must be in [1, 9] (got " +
                                std::to_string(n_max) + ")");
  }
  ScanResult out;
  for (int n = 1; n <= n_max; ++n) {
    const GasketGraph g = build_gasket(n);
    std::vector<std::pair<std::string, std::vector<VertexId>>> subsets;
    if (family.bottom_side) subsets.emplace_back("bottom_side", g.bottom_side);
    if (family.all_boundary) subsets.emplace_back("all_boundary", g.boundary());
    const std::size_t k = g.bottom_side.size();
    for (std::size_t r = 0; r < family.random_subsets; ++r) {
      std::vector<VertexId> pool;
      for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (v != g.top) pool.push_back(v);
      }
      RandomSource src(rng.replicate(static_cast<std::uint64_t>(n) * 1000 + r));
      for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + src.below(static_cast<std::uint32_t>(pool.size() - i));
        std::swap(pool[i], pool[j]);
      }
      pool.resize(k);
      std::sort(pool.begin(), pool.end());
      subsets.emplace_back("random_k" + std::to_string(k) + "_" + std::to_string(r), std::move(pool));
    }

    std::vector<ScanRow> rows;
    for (const auto& [name, set] : subsets) {
      const HittingLaw law = hitting_distribution(g, g.top, set, options);
      ScanRow row;
      row.n = n;
      row.subset = name;
      row.size = set.size();
      row.entropy = entropy_bits(law);
      row.bound = n;
      row.pass = row.entropy <= row.bound + 1e-12;
      row.max_residual = law.max_residual;
      rows.push_back(row);
    }
    double best = 0.0;
    for (const auto& r : rows) best = std::max(best, r.entropy);
    bool bottom_max = false;
    for (auto& r : rows) {
      r.max_subset = r.entropy >= best - 1e-12;
      if (r.subset == "bottom_side" && r.max_subset) bottom_max = true;
      if (!r.pass) out.violations.push_back(r);
    }
    if (family.bottom_side) out.bottom_side_is_max.emplace_back(n, bottom_max);
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  return out;
}

void write_edges_csv(const GasketGraph& g, std::ostream& out) {
  out << "u,v\n";
  for (const auto& [u, v] : g.edges) out << u << ',' << v << '\n';
}

void write_vertices_csv(const GasketGraph& g, std::ostream& out) {
  out << "id,x,y,role\n";
  out.precision(17);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    out << v << ',' << g.vertices[v].x << ',' << g.vertices[v].y << ',' << to_string(g.roles[v]) << '\n';
  }
}

void write_scan_csv(const ScanResult& scan, std::ostream& out) {
  out << "n,subset,size,entropy_bits,bound,max_subset_flag\n";
  out.precision(17);
  for (const auto& r : scan.rows) {
    out << r.n << ',' << r.subset << ',' << r.size << ',' << r.entropy << ',' << r.bound << ','
        << (r.max_subset ? 1 : 0) << '\n';
  }
}

}  // namespace hitlab::gasket
