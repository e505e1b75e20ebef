#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hitlab/geometry.hpp"
#include "hitlab/rng.hpp"

namespace hitlab::gasket {

using VertexId = std::uint32_t;

enum class VertexRole { top, bottom, side, interior };

const char* to_string(VertexRole role);

/// Generation-n Sierpinski gasket graph. Generation 1 is a single triangle;
/// generation n+1 glues three copies of generation n at shared corners.
///
/// Vertices are numbered lexicographically by (x, y) with unit edge length,
/// the bottom-left corner at the origin and the top corner above the middle.
struct GasketGraph {
  int generation = 0;
  std::vector<Point2> vertices;
  std::vector<std::pair<VertexId, VertexId>> edges;  // u < v, sorted
  std::vector<std::vector<VertexId>> adjacency;
  std::vector<VertexRole> roles;
  VertexId top = 0;
  /// Ordered left to right.
  std::vector<VertexId> bottom_side;
  /// Ordered from the bottom corner up to the top.
  std::vector<VertexId> left_side;
  std::vector<VertexId> right_side;

  [[nodiscard]] std::size_t vertex_count() const { return vertices.size(); }
  [[nodiscard]] std::size_t degree(VertexId v) const { return adjacency[v].size(); }
  /// Union of the three sides, sorted by id.
  [[nodiscard]] std::vector<VertexId> boundary() const;
};

/// 3 (3^(n-1) + 1) / 2.
std::size_t expected_vertex_count(int generation);

/// Builds generation n, 1 <= n <= 12.
GasketGraph build_gasket(int generation);

/// Absorption law of a random walk on a finite target set.
struct HittingLaw {
  std::vector<VertexId> targets;
  std::vector<double> probs;
  /// Max over solves of ||(I - Q) h - r||_inf; 0 for Monte Carlo laws.
  double max_residual = 0.0;
  /// Number of walks behind a Monte Carlo law; 0 for exact laws.
  std::size_t samples = 0;
};

enum class Solver { conjugate_gradient, dense_lu };

struct SolveOptions {
  Solver solver = Solver::conjugate_gradient;
  /// Relative residual target for conjugate gradients.
  double tolerance = 1e-12;
  unsigned workers = 1;
};

/// Exact harmonic measure of simple random walk from `start` on `absorbing`.
///
/// One linear solve (I - Q) h = r per target, with Q the transient block of
/// the walk. The system is solved in the symmetric form (D - A) h = A e_j.
/// dense_lu is limited to at most 4000 transient vertices.
HittingLaw hitting_distribution(const GasketGraph& g, VertexId start,
                                std::span<const VertexId> absorbing,
                                const SolveOptions& options = {});

/// Empirical absorption frequencies of `replicates` independent walks.
HittingLaw mc_srw_hitting(const GasketGraph& g, VertexId start,
                          std::span<const VertexId> absorbing, std::size_t replicates,
                          const RngStream& rng, unsigned workers = 1);

/// Base-2 entropy of a hitting law.
double entropy_bits(const HittingLaw& law);

/// Total variation distance between two laws over the same target list.
double total_variation(const HittingLaw& a, const HittingLaw& b);

struct SubsetFamily {
  bool bottom_side = true;
  bool all_boundary = true;
  /// Number of random subsets per generation, each of size |bottom_side|,
  /// drawn from the vertices other than the top.
  std::size_t random_subsets = 2;
};

struct ScanRow {
  int n = 0;
  std::string subset;
  std::size_t size = 0;
  double entropy = 0.0;
  double bound = 0.0;
  bool pass = false;
  /// Entropy equals the maximum over the subsets scanned at this n.
  bool max_subset = false;
  double max_residual = 0.0;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  /// Per generation: whether bottom_side attains the maximum entropy.
  std::vector<std::pair<int, bool>> bottom_side_is_max;
  /// Rows with entropy > n. Reported as findings.
  std::vector<ScanRow> violations;
};

/// Walks from the top vertex onto each named subset for n = 1..n_max
/// (n_max <= 9) and compares the entropy against n.
ScanResult conjecture_scan(int n_max, const SubsetFamily& family, const RngStream& rng,
                           const SolveOptions& options = {});

/// "u,v" rows.
void write_edges_csv(const GasketGraph& g, std::ostream& out);
/// "id,x,y,role" rows.
void write_vertices_csv(const GasketGraph& g, std::ostream& out);
/// "n,subset,size,entropy_bits,bound,max_subset_flag" rows.
void write_scan_csv(const ScanResult& scan, std::ostream& out);

}  // namespace hitlab::gasket
