#pragma once

// Hypergraphs, junction trees and cherry trees.
//
// A junction tree is a tree whose nodes (clusters) are subsets of a vertex
// set V such that, for every vertex v, the clusters containing v form a
// connected subtree. Adjacent clusters are joined through their intersection,
// the separator. A k-th order cherry tree is a junction tree in which every
// cluster has k vertices and every separator k-1.

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cherryvine {

using Vertex = int;

class VertexSet {
 public:
  /// Labels must be positive and distinct; they are kept in ascending order.
  explicit VertexSet(std::vector<Vertex> labels);

  /// The set {1, ..., d}.
  static VertexSet range(int d);

  std::size_t size() const noexcept { return labels_.size(); }
  std::span<const Vertex> labels() const noexcept { return labels_; }
  bool contains(Vertex v) const noexcept;

  /// Position of `v` in the ascending label list. Throws InputError.
  std::size_t index_of(Vertex v) const;

  bool operator==(const VertexSet&) const = default;

 private:
  std::vector<Vertex> labels_;
};

/// A set of vertices stored sorted and without duplicates.
class Hyperedge {
 public:
  Hyperedge() = default;
  Hyperedge(std::initializer_list<Vertex> members);
  explicit Hyperedge(std::vector<Vertex> members);

  std::span<const Vertex> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }
  Vertex operator[](std::size_t i) const { return members_[i]; }

  bool contains(Vertex v) const noexcept;
  bool is_subset_of(const Hyperedge& other) const noexcept;

  Hyperedge intersect(const Hyperedge& other) const;
  Hyperedge unite(const Hyperedge& other) const;
  Hyperedge minus(const Hyperedge& other) const;
  Hyperedge with(Vertex v) const;
  Hyperedge without(Vertex v) const;

  /// "{1,2,3}"
  std::string to_string() const;

  auto operator<=>(const Hyperedge&) const = default;
  bool operator==(const Hyperedge&) const = default;

 private:
  std::vector<Vertex> members_;
};

struct Violation {
  std::string rule;  // "no-subset", "cover" or "rip"
  std::string description;
  std::vector<Hyperedge> offending;
};

struct ValidationReport {
  bool valid = false;
  std::vector<Violation> violations;
  /// Hyperedge indices in an order satisfying the running intersection
  /// property; present exactly when `valid`.
  std::optional<std::vector<std::size_t>> witness_ordering;
};

/// Checks the running intersection property for the given ordering: every
/// hyperedge meets the union of its predecessors inside a single predecessor.
bool satisfies_running_intersection(std::span<const Hyperedge> hyperedges,
                                    std::span<const std::size_t> ordering);

/// Checks the pairwise formulation: for i < s < j, K_i and K_j intersect
/// inside K_s. Strictly stronger than the running intersection property (it
/// forces a path-shaped junction tree).
bool satisfies_sequential_intersection(std::span<const Hyperedge> hyperedges,
                                       std::span<const std::size_t> ordering);

/// Greedy maximum-cardinality ordering, falling back to exhaustive search over
/// permutations for at most 8 hyperedges.
std::optional<std::vector<std::size_t>> find_rip_ordering(
    std::span<const Hyperedge> hyperedges);

/// Validates an acyclic hypergraph. Throws InputError for an empty hyperedge
/// list, an empty hyperedge or a member outside `vertices`; every other defect
/// is reported as a violation.
ValidationReport validate_hypergraph(const VertexSet& vertices,
                                     std::span<const Hyperedge> hyperedges);

struct TreeEdge {
  std::size_t first = 0;
  std::size_t second = 0;
  Hyperedge separator;

  bool operator==(const TreeEdge&) const = default;
};

struct SeparatorMultiplicity {
  Hyperedge separator;
  /// Number of tree edges carrying this separator plus one; the separator's
  /// density enters the junction-tree factorization with exponent
  /// multiplicity - 1.
  int multiplicity = 0;
};

class JunctionTree {
 public:
  /// Builds a junction tree from clusters joined by explicit tree edges
  /// (pairs of cluster indices). Throws DomainError when the clusters and
  /// edges do not form a junction tree over `vertices`.
  JunctionTree(VertexSet vertices, std::vector<Hyperedge> clusters,
               std::span<const std::pair<std::size_t, std::size_t>> edges);

  const VertexSet& vertices() const noexcept { return vertices_; }
  std::span<const Hyperedge> clusters() const noexcept { return clusters_; }
  std::span<const TreeEdge> edges() const noexcept { return edges_; }
  std::span<const SeparatorMultiplicity> separator_multiplicities() const noexcept {
    return multiplicities_;
  }

  /// Multiplicity of a separator set; 0 when `separator` is not one.
  int multiplicity(const Hyperedge& separator) const;

  /// Size of the largest cluster.
  std::size_t width() const noexcept;

  /// Edge list as index pairs.
  std::vector<std::pair<std::size_t, std::size_t>> edge_pairs() const;

  /// Index of the first cluster equal to `c`, if any.
  std::optional<std::size_t> find_cluster(const Hyperedge& c) const;

 private:
  VertexSet vertices_;
  std::vector<Hyperedge> clusters_;
  std::vector<TreeEdge> edges_;
  std::vector<SeparatorMultiplicity> multiplicities_;
};

/// Junction tree over a validated hypergraph: maximum-weight spanning tree on
/// intersection sizes, ties broken by lexicographic cluster index pairs.
/// Throws DomainError when the hypergraph is not acyclic.
JunctionTree build_junction_tree(const VertexSet& vertices,
                                 std::vector<Hyperedge> hyperedges);

struct ContainmentCounts {
  int clusters = 0;
  int separator_edges = 0;

  bool operator==(const ContainmentCounts&) const = default;
};

/// Number of clusters containing `v` and number of tree edges whose separator
/// contains `v`. The first always exceeds the second by exactly one; a
/// violation throws InvariantError.
ContainmentCounts containment_counts(const JunctionTree& jt, Vertex v);

bool is_cherry_tree(const JunctionTree& jt, int k);

class CherryTree {
 public:
  /// Throws DomainError unless `base` is a cherry tree of order `order`.
  CherryTree(int order, JunctionTree base);

  int order() const noexcept { return order_; }
  const JunctionTree& tree() const noexcept { return tree_; }
  const VertexSet& vertices() const noexcept { return tree_.vertices(); }
  std::span<const Hyperedge> clusters() const noexcept { return tree_.clusters(); }
  std::span<const TreeEdge> edges() const noexcept { return tree_.edges(); }

 private:
  int order_;
  JunctionTree tree_;
};

/// Unions of linked clusters and a tree joining them.
struct LinkedUnions {
  std::vector<Hyperedge> clusters;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  /// For each new cluster, the index of the input edge it was merged from.
  std::vector<std::size_t> source_edge;
};

/// Merges the endpoints of every edge of a tree of clusters into one new
/// cluster, visiting edges breadth-first from cluster 0 (neighbours in index
/// order). A new cluster is linked to the union formed from its parent's
/// edge; unions formed at the root are linked to the first of them. Every
/// link's separator is therefore a cluster of the input.
LinkedUnions merge_linked_clusters(std::span<const Hyperedge> clusters,
                                   std::span<const TreeEdge> edges);

/// Lifts a k-th order cherry tree to order k+1 by merging linked clusters.
/// Throws DomainError for a single-cluster tree.
CherryTree expand_cherry_tree(const CherryTree& ct);

}  // namespace cherryvine
