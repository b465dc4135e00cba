#pragma once

// Cherry-vine structures and pair-copula models.
//
// A cherry-vine over V = {1..d} is a stack of trees. Tree 1 joins the
// singleton nodes {v} along a spanning tree of V. For k >= 2, tree k is a
// k-th order cherry tree whose clusters are the unions of the node pairs
// linked in tree k-1, and whose separators are nodes of tree k-1. Every link
// of tree k carries a pair label (a, b | S) with |S| = k-1 and one bivariate
// copula; the copula density of the model is the product of all link
// densities evaluated at conditional distributions F(a | S), F(b | S).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cherryvine/bicop.hpp"
#include "cherryvine/graph.hpp"
#include "cherryvine/matrix.hpp"

namespace cherryvine {

/// Conditioned pair (a, b) with conditioning set `given`; a < b.
struct PairLabel {
  Vertex a = 0;
  Vertex b = 0;
  Hyperedge given;

  PairLabel() = default;
  PairLabel(Vertex x, Vertex y, Hyperedge s);

  /// Tree level carrying this label: |given| + 1.
  int level() const noexcept { return static_cast<int>(given.size()) + 1; }

  /// {a, b} united with `given`.
  Hyperedge support() const;

  /// "1,3|2" style text.
  std::string to_string() const;

  auto operator<=>(const PairLabel&) const = default;
  bool operator==(const PairLabel&) const = default;
};

/// One tree of the vine: nodes and the links between them. For level 1 the
/// nodes are singletons and the link separators are empty.
struct VineTree {
  std::vector<Hyperedge> nodes;
  std::vector<TreeEdge> links;
};

using VertexPair = std::pair<Vertex, Vertex>;

class CherryVineStructure {
 public:
  /// `first_tree` holds the d-1 edges of a spanning tree on `vertices`;
  /// `cherry_trees` holds trees 2..d-1 (orders 2..d-1). Throws DomainError
  /// when the stack is not a cherry-vine: tree 2's clusters differ from tree
  /// 1's edges, a cluster is not the union of two linked clusters of the tree
  /// below, or a link's separator is not a node of the tree below.
  CherryVineStructure(VertexSet vertices, std::vector<VertexPair> first_tree,
                      std::vector<CherryTree> cherry_trees);

  const VertexSet& vertices() const noexcept { return vertices_; }
  int dimension() const noexcept { return static_cast<int>(vertices_.size()); }

  /// Number of trees, d - 1.
  int level_count() const noexcept { return static_cast<int>(trees_.size()); }

  /// Tree at `level` in 1..d-1.
  const VineTree& tree(int level) const;

  /// Pair labels of the links of tree `level`, in link order.
  std::span<const PairLabel> labels(int level) const;

  std::vector<PairLabel> all_labels() const;

  /// Position (level, link index) of a label. Throws InputError if absent.
  std::pair<int, std::size_t> locate(const PairLabel& label) const;

  std::span<const VertexPair> first_tree() const noexcept { return first_tree_; }

  /// The cherry tree of order k for 2 <= k <= d. Order k <= d-1 is tree k of
  /// the vine; order d is the single cluster V.
  CherryTree cherry_tree(int order) const;

  /// True when `set` is a node of some tree, or V itself.
  bool is_node_set(const Hyperedge& set) const;

  // Recursion bookkeeping used by the evaluators.

  /// Where a link argument F(x | S) comes from: for level 1 the vertex
  /// position in u, otherwise the link of the level below and which of its
  /// two conditional outputs (first = output for that link's `a`).
  struct ArgumentSource {
    std::size_t index = 0;
    bool first = true;
  };

  struct LinkPlan {
    PairLabel label;
    ArgumentSource source_a;
    ArgumentSource source_b;
  };

  std::span<const LinkPlan> plan(int level) const;

  /// Inverse-Rosenblatt order: variables in the order they are drawn, and for
  /// each drawn variable (except the first) the links conditioning it, from
  /// the highest level down to level 1, flagged by whether the variable is
  /// the link's `a`.
  struct SamplingStep {
    Vertex vertex = 0;
    struct Hop {
      int level = 0;
      std::size_t link = 0;
      bool vertex_is_a = true;
    };
    std::vector<Hop> chain;
  };

  std::span<const SamplingStep> sampling_plan() const noexcept { return sampling_plan_; }

 private:
  void build_plans();
  void build_sampling_plan();

  VertexSet vertices_;
  std::vector<VertexPair> first_tree_;
  std::vector<CherryTree> cherry_trees_;
  std::vector<VineTree> trees_;
  std::vector<std::vector<PairLabel>> labels_;
  std::vector<std::vector<LinkPlan>> plans_;
  std::vector<SamplingStep> sampling_plan_;
};

class JunctionTreeCopulaModel;

class VineModel {
 public:
  /// `copulas[level-1][i]` is the copula of link i of tree `level`.
  VineModel(CherryVineStructure structure, std::vector<std::vector<BivariateCopula>> copulas);

  /// Every pair copula set to Independence.
  static VineModel independence(CherryVineStructure structure);

  const CherryVineStructure& structure() const noexcept { return structure_; }
  int dimension() const noexcept { return structure_.dimension(); }

  const BivariateCopula& copula(int level, std::size_t link) const;
  const BivariateCopula& copula(const PairLabel& label) const;

  /// Copy with one pair copula replaced.
  VineModel with_copula(const PairLabel& label, BivariateCopula copula) const;

  /// Number of non-Independence pair copulas.
  int dependent_link_count() const noexcept;

  /// Total number of copula parameters.
  int parameter_count() const noexcept;

  /// Log copula density at a point of (0,1)^d (clamped). Throws
  /// NumericalError on a non-finite intermediate.
  double log_density(std::span<const double> u) const;

  /// F(j | given) at u through the h-function recursion. `given` must be
  /// realised by the structure: empty, or such that given + {j} is a node of
  /// tree |given|+1 (or V) produced by a link whose conditioned pair
  /// contains j. Throws DomainError otherwise.
  double conditional_cdf(Vertex j, const Hyperedge& given, std::span<const double> u) const;

  /// Log density of the marginal copula of the variables in `set`, a node of
  /// some tree (or V). Only the coordinates of u in `set` are read.
  double sub_vine_log_density(const Hyperedge& set, std::span<const double> u) const;

  /// n draws by inverse Rosenblatt transform. Row i uses its own generator
  /// seeded from (seed, i), so any partition of the rows reproduces the same
  /// output.
  PointMatrix sample(std::size_t n, std::uint64_t seed) const;

 private:
  struct Workspace;
  void forward(std::span<const double> u, Workspace& ws) const;

  CherryVineStructure structure_;
  std::vector<std::vector<BivariateCopula>> copulas_;
};

/// Sets every pair copula whose conditioning set has at least k elements to
/// Independence. Requires 1 <= k <= d-1.
VineModel truncate(const VineModel& model, int k);

/// The (k+1)-th order cherry-tree copula equal to the model truncated at
/// level k: the clusters of tree k+1 (or V when k = d-1), each evaluated by
/// its sub-vine density.
JunctionTreeCopulaModel to_cherry_tree_copula(const VineModel& model, int k);

/// D-vine structure on 1..d: tree 1 is the path 1-2-...-d.
CherryVineStructure d_vine_structure(int d);

/// C-vine structure on 1..d: vertex 1 is the root of tree 1, vertex 2 of
/// tree 2, and so on.
CherryVineStructure c_vine_structure(int d);

}  // namespace cherryvine
