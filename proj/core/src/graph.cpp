#include "cherryvine/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

#include "cherryvine/error.hpp"

namespace cherryvine {

namespace {

constexpr std::size_t kExhaustiveLimit = 8;

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

Hyperedge union_of(std::span<const Hyperedge> edges) {
  std::vector<Vertex> all;
  for (const auto& e : edges) all.insert(all.end(), e.begin(), e.end());
  return Hyperedge(std::move(all));
}

void check_members(const VertexSet& vertices, std::span<const Hyperedge> hyperedges) {
  if (hyperedges.empty()) throw InputError("hyperedge list is empty");
  for (const auto& e : hyperedges) {
    if (e.empty()) throw InputError("hyperedge is empty");
    for (Vertex v : e) {
      if (!vertices.contains(v)) {
        throw InputError("hyperedge " + e.to_string() + " references unknown vertex " +
                         std::to_string(v));
      }
    }
  }
}

std::optional<std::vector<std::size_t>> greedy_ordering(std::span<const Hyperedge> edges) {
  const std::size_t m = edges.size();
  std::vector<bool> used(m, false);
  std::vector<std::size_t> order;
  order.reserve(m);
  order.push_back(0);
  used[0] = true;
  Hyperedge covered = edges[0];
  while (order.size() < m) {
    std::size_t best = m;
    std::size_t best_weight = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (used[j]) continue;
      const std::size_t w = edges[j].intersect(covered).size();
      if (best == m || w > best_weight) {
        best = j;
        best_weight = w;
      }
    }
    const Hyperedge sep = edges[best].intersect(covered);
    const bool held = std::any_of(order.begin(), order.end(), [&](std::size_t i) {
      return sep.is_subset_of(edges[i]);
    });
    if (!held) return std::nullopt;
    used[best] = true;
    order.push_back(best);
    covered = covered.unite(edges[best]);
  }
  return order;
}

std::string describe(std::span<const Hyperedge> edges) {
  std::string out;
  for (const auto& e : edges) {
    if (!out.empty()) out += ' ';
    out += e.to_string();
  }
  return out;
}

}  // namespace

// --- VertexSet -------------------------------------------------------------

VertexSet::VertexSet(std::vector<Vertex> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw InputError("vertex set is empty");
  std::sort(labels_.begin(), labels_.end());
  if (std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end()) {
    throw InputError("vertex set contains duplicate labels");
  }
  if (labels_.front() < 1) throw InputError("vertex labels must be positive");
}

VertexSet VertexSet::range(int d) {
  if (d < 1) throw InputError("dimension must be at least 1");
  std::vector<Vertex> labels(static_cast<std::size_t>(d));
  std::iota(labels.begin(), labels.end(), 1);
  return VertexSet(std::move(labels));
}

bool VertexSet::contains(Vertex v) const noexcept {
  return std::binary_search(labels_.begin(), labels_.end(), v);
}

std::size_t VertexSet::index_of(Vertex v) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), v);
  if (it == labels_.end() || *it != v) {
    throw InputError("unknown vertex " + std::to_string(v));
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

// --- Hyperedge -------------------------------------------------------------

Hyperedge::Hyperedge(std::initializer_list<Vertex> members)
    : Hyperedge(std::vector<Vertex>(members)) {}

Hyperedge::Hyperedge(std::vector<Vertex> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool Hyperedge::contains(Vertex v) const noexcept {
  return std::binary_search(members_.begin(), members_.end(), v);
}

bool Hyperedge::is_subset_of(const Hyperedge& other) const noexcept {
  return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                       members_.end());
}

Hyperedge Hyperedge::intersect(const Hyperedge& other) const {
  Hyperedge out;
  std::set_intersection(members_.begin(), members_.end(), other.members_.begin(),
                        other.members_.end(), std::back_inserter(out.members_));
  return out;
}

Hyperedge Hyperedge::unite(const Hyperedge& other) const {
  Hyperedge out;
  std::set_union(members_.begin(), members_.end(), other.members_.begin(),
                 other.members_.end(), std::back_inserter(out.members_));
  return out;
}

Hyperedge Hyperedge::minus(const Hyperedge& other) const {
  Hyperedge out;
  std::set_difference(members_.begin(), members_.end(), other.members_.begin(),
                      other.members_.end(), std::back_inserter(out.members_));
  return out;
}

Hyperedge Hyperedge::with(Vertex v) const { return unite(Hyperedge{v}); }

Hyperedge Hyperedge::without(Vertex v) const { return minus(Hyperedge{v}); }

std::string Hyperedge::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) os << ',';
    os << members_[i];
  }
  os << '}';
  return os.str();
}

// --- Running intersection --------------------------------------------------

bool satisfies_running_intersection(std::span<const Hyperedge> hyperedges,
                                    std::span<const std::size_t> ordering) {
  if (ordering.size() != hyperedges.size()) return false;
  Hyperedge covered;
  for (std::size_t j = 0; j < ordering.size(); ++j) {
    const Hyperedge& current = hyperedges[ordering[j]];
    if (j > 0) {
      const Hyperedge sep = current.intersect(covered);
      bool held = false;
      for (std::size_t i = 0; i < j && !held; ++i) {
        held = sep.is_subset_of(hyperedges[ordering[i]]);
      }
      if (!held) return false;
    }
    covered = covered.unite(current);
  }
  return true;
}

bool satisfies_sequential_intersection(std::span<const Hyperedge> hyperedges,
                                       std::span<const std::size_t> ordering) {
  if (ordering.size() != hyperedges.size()) return false;
  for (std::size_t i = 0; i < ordering.size(); ++i) {
    for (std::size_t j = i + 2; j < ordering.size(); ++j) {
      const Hyperedge common = hyperedges[ordering[i]].intersect(hyperedges[ordering[j]]);
      for (std::size_t s = i + 1; s < j; ++s) {
        if (!common.is_subset_of(hyperedges[ordering[s]])) return false;
      }
    }
  }
  return true;
}

std::optional<std::vector<std::size_t>> find_rip_ordering(
    std::span<const Hyperedge> hyperedges) {
  if (hyperedges.empty()) return std::vector<std::size_t>{};
  if (auto greedy = greedy_ordering(hyperedges)) return greedy;
  if (hyperedges.size() > kExhaustiveLimit) return std::nullopt;
  std::vector<std::size_t> perm(hyperedges.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do {
    if (satisfies_running_intersection(hyperedges, perm)) return perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

ValidationReport validate_hypergraph(const VertexSet& vertices,
                                     std::span<const Hyperedge> hyperedges) {
  check_members(vertices, hyperedges);
  ValidationReport report;

  for (std::size_t i = 0; i < hyperedges.size(); ++i) {
    for (std::size_t j = 0; j < hyperedges.size(); ++j) {
      if (i == j) continue;
      const bool equal = hyperedges[i] == hyperedges[j];
      if (equal && j < i) continue;
      if (hyperedges[i].is_subset_of(hyperedges[j])) {
        report.violations.push_back(
            {"no-subset",
             "hyperedge " + hyperedges[i].to_string() + " is contained in " +
                 hyperedges[j].to_string(),
             {hyperedges[i], hyperedges[j]}});
      }
    }
  }

  const Hyperedge covered = union_of(hyperedges);
  const Hyperedge missing =
      Hyperedge(std::vector<Vertex>(vertices.labels().begin(), vertices.labels().end()))
          .minus(covered);
  if (!missing.empty()) {
    report.violations.push_back(
        {"cover", "vertices " + missing.to_string() + " lie in no hyperedge", {missing}});
  }

  auto ordering = find_rip_ordering(hyperedges);
  if (!ordering) {
    report.violations.push_back(
        {"rip",
         "no ordering of the hyperedges satisfies the running intersection property: " +
             describe(hyperedges),
         std::vector<Hyperedge>(hyperedges.begin(), hyperedges.end())});
  }

  report.valid = report.violations.empty();
  if (report.valid) report.witness_ordering = std::move(ordering);
  return report;
}

// --- JunctionTree ----------------------------------------------------------

JunctionTree::JunctionTree(VertexSet vertices, std::vector<Hyperedge> clusters,
                           std::span<const std::pair<std::size_t, std::size_t>> edges)
    : vertices_(std::move(vertices)), clusters_(std::move(clusters)) {
  check_members(vertices_, clusters_);
  const std::size_t m = clusters_.size();

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j && clusters_[i].is_subset_of(clusters_[j])) {
        throw DomainError("cluster " + clusters_[i].to_string() + " is contained in " +
                          clusters_[j].to_string());
      }
    }
  }
  if (union_of(clusters_).size() != vertices_.size()) {
    throw DomainError("clusters do not cover the vertex set");
  }
  if (edges.size() + 1 != m) {
    throw DomainError("a junction tree over " + std::to_string(m) + " clusters needs " +
                      std::to_string(m - 1) + " edges, got " + std::to_string(edges.size()));
  }

  DisjointSets components(m);
  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a >= m || b >= m || a == b) {
      throw DomainError("tree edge (" + std::to_string(a) + "," + std::to_string(b) +
                        ") does not join two distinct clusters");
    }
    if (!components.unite(a, b)) throw DomainError("tree edges contain a cycle");
    edges_.push_back({a, b, clusters_[a].intersect(clusters_[b])});
  }

  // Along a tree, clusters containing v are connected exactly when they
  // outnumber the edges whose separator contains v by one.
  for (Vertex v : vertices_.labels()) {
    int in_clusters = 0;
    int in_separators = 0;
    for (const auto& c : clusters_) in_clusters += c.contains(v) ? 1 : 0;
    for (const auto& e : edges_) in_separators += e.separator.contains(v) ? 1 : 0;
    if (in_clusters != in_separators + 1) {
      throw DomainError("clusters containing vertex " + std::to_string(v) +
                        " are not connected in the tree (running intersection violated)");
    }
  }

  std::map<Hyperedge, int> counts;
  for (const auto& e : edges_) {
    if (!e.separator.empty()) ++counts[e.separator];
  }
  for (auto& [sep, count] : counts) multiplicities_.push_back({sep, count + 1});
}

int JunctionTree::multiplicity(const Hyperedge& separator) const {
  for (const auto& s : multiplicities_) {
    if (s.separator == separator) return s.multiplicity;
  }
  return 0;
}

std::size_t JunctionTree::width() const noexcept {
  std::size_t w = 0;
  for (const auto& c : clusters_) w = std::max(w, c.size());
  return w;
}

std::vector<std::pair<std::size_t, std::size_t>> JunctionTree::edge_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(edges_.size());
  for (const auto& e : edges_) out.emplace_back(e.first, e.second);
  return out;
}

std::optional<std::size_t> JunctionTree::find_cluster(const Hyperedge& c) const {
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    if (clusters_[i] == c) return i;
  }
  return std::nullopt;
}

JunctionTree build_junction_tree(const VertexSet& vertices,
                                 std::vector<Hyperedge> hyperedges) {
  const ValidationReport report = validate_hypergraph(vertices, hyperedges);
  if (!report.valid) {
    std::string msg = "hypergraph is not acyclic:";
    for (const auto& v : report.violations) msg += " [" + v.rule + "] " + v.description + ";";
    throw DomainError(msg);
  }

  struct Candidate {
    std::size_t weight, i, j;
  };
  std::vector<Candidate> candidates;
  const std::size_t m = hyperedges.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      candidates.push_back({hyperedges[i].intersect(hyperedges[j]).size(), i, j});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.weight > b.weight; });

  DisjointSets components(m);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& c : candidates) {
    if (components.unite(c.i, c.j)) edges.emplace_back(c.i, c.j);
    if (edges.size() + 1 == m) break;
  }
  return JunctionTree(vertices, std::move(hyperedges), edges);
}

ContainmentCounts containment_counts(const JunctionTree& jt, Vertex v) {
  if (!jt.vertices().contains(v)) throw InputError("unknown vertex " + std::to_string(v));
  ContainmentCounts counts;
  for (const auto& c : jt.clusters()) counts.clusters += c.contains(v) ? 1 : 0;
  for (const auto& e : jt.edges()) counts.separator_edges += e.separator.contains(v) ? 1 : 0;
  if (counts.clusters != counts.separator_edges + 1) {
    throw InvariantError("containment law broken at vertex " + std::to_string(v));
  }
  return counts;
}

// --- Cherry trees ----------------------------------------------------------

bool is_cherry_tree(const JunctionTree& jt, int k) {
  if (k < 2) return false;
  const auto order = static_cast<std::size_t>(k);
  return std::all_of(jt.clusters().begin(), jt.clusters().end(),
                     [&](const Hyperedge& c) { return c.size() == order; }) &&
         std::all_of(jt.edges().begin(), jt.edges().end(),
                     [&](const TreeEdge& e) { return e.separator.size() == order - 1; });
}

CherryTree::CherryTree(int order, JunctionTree base) : order_(order), tree_(std::move(base)) {
  if (!is_cherry_tree(tree_, order_)) {
    throw DomainError("junction tree is not a cherry tree of order " + std::to_string(order_));
  }
}

LinkedUnions merge_linked_clusters(std::span<const Hyperedge> clusters,
                                   std::span<const TreeEdge> edges) {
  const std::size_t m = clusters.size();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency(m);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    adjacency[edges[e].first].emplace_back(edges[e].second, e);
    adjacency[edges[e].second].emplace_back(edges[e].first, e);
  }
  for (auto& nbrs : adjacency) std::sort(nbrs.begin(), nbrs.end());

  LinkedUnions out;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  // Union formed from the edge through which each cluster was reached.
  std::vector<std::size_t> arrival_union(m, kNone);
  std::vector<bool> seen(m, false);
  std::size_t first_root_union = kNone;
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  while (!frontier.empty()) {
    const std::size_t parent = frontier.front();
    frontier.pop();
    for (auto [child, edge] : adjacency[parent]) {
      if (seen[child]) continue;
      seen[child] = true;
      const std::size_t id = out.clusters.size();
      out.clusters.push_back(clusters[parent].unite(clusters[child]));
      out.source_edge.push_back(edge);
      arrival_union[child] = id;
      if (arrival_union[parent] != kNone) {
        out.edges.emplace_back(arrival_union[parent], id);
      } else if (first_root_union == kNone) {
        first_root_union = id;
      } else {
        out.edges.emplace_back(first_root_union, id);
      }
      frontier.push(child);
    }
  }
  return out;
}

CherryTree expand_cherry_tree(const CherryTree& ct) {
  if (ct.clusters().size() < 2) {
    throw DomainError("cherry tree with a single cluster has no linked pair to merge");
  }
  LinkedUnions merged = merge_linked_clusters(ct.clusters(), ct.edges());
  JunctionTree lifted(ct.vertices(), std::move(merged.clusters), merged.edges);
  return CherryTree(ct.order() + 1, std::move(lifted));
}

}  // namespace cherryvine
