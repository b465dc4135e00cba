#include "cherryvine/junction_copula.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "cherryvine/error.hpp"

namespace cherryvine {

namespace {

std::vector<double> restrict_to(const VertexSet& vertices, const Hyperedge& set,
                                std::span<const double> u) {
  std::vector<double> sub;
  sub.reserve(set.size());
  for (Vertex v : set) sub.push_back(u[vertices.index_of(v)]);
  return sub;
}

}  // namespace

JunctionTreeCopulaModel::JunctionTreeCopulaModel(JunctionTree tree,
                                                 std::map<Hyperedge, ClusterDensity> densities)
    : tree_(std::move(tree)) {
  auto take = [&](const Hyperedge& set) {
    auto it = densities.find(set);
    if (it == densities.end() || !it->second) {
      throw InputError("no density evaluator for " + set.to_string());
    }
    densities_.emplace(set, it->second);
  };
  for (const auto& c : tree_.clusters()) take(c);
  for (const auto& e : tree_.edges()) {
    if (!e.separator.empty()) take(e.separator);
  }
}

const ClusterDensity& JunctionTreeCopulaModel::density(const Hyperedge& set) const {
  auto it = densities_.find(set);
  if (it == densities_.end()) throw InputError("no density evaluator for " + set.to_string());
  return it->second;
}

double JunctionTreeCopulaModel::log_density_of(const Hyperedge& set,
                                               std::span<const double> u) const {
  if (set.empty()) return 0.0;
  const auto sub = restrict_to(tree_.vertices(), set, u);
  const double value = density(set)(sub);
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError("density of " + set.to_string() + " is not positive and finite");
  }
  return std::log(value);
}

double JunctionTreeCopulaModel::log_density(std::span<const double> u) const {
  if (u.size() != tree_.vertices().size()) {
    throw InputError("point has " + std::to_string(u.size()) + " coordinates, model has " +
                     std::to_string(tree_.vertices().size()));
  }
  double total = 0.0;
  for (const auto& c : tree_.clusters()) total += log_density_of(c, u);
  for (const auto& s : tree_.separator_multiplicities()) {
    if (s.separator.empty()) continue;
    total -= (s.multiplicity - 1) * log_density_of(s.separator, u);
  }
  return total;
}

JunctionTreeCopulaModel lift_cherry_tree_copula(const JunctionTreeCopulaModel& model) {
  const JunctionTree& jt = model.tree();
  const std::size_t k = jt.clusters().empty() ? 0 : jt.clusters()[0].size();
  if (k < 2 || !is_cherry_tree(jt, static_cast<int>(k))) {
    throw DomainError("lift requires a cherry tree of order at least 2");
  }
  const CherryTree lifted = expand_cherry_tree(CherryTree(static_cast<int>(k), jt));
  const LinkedUnions unions = merge_linked_clusters(jt.clusters(), jt.edges());
  auto source = std::make_shared<const JunctionTreeCopulaModel>(model);

  std::map<Hyperedge, ClusterDensity> densities;
  for (std::size_t i = 0; i < unions.clusters.size(); ++i) {
    const TreeEdge& e = jt.edges()[unions.source_edge[i]];
    const Hyperedge k1 = jt.clusters()[e.first];
    const Hyperedge k2 = jt.clusters()[e.second];
    const Hyperedge s = e.separator;
    const Hyperedge joint = unions.clusters[i];
    auto positions = [&joint](const Hyperedge& part) {
      std::vector<std::size_t> pos;
      for (Vertex v : part) {
        pos.push_back(static_cast<std::size_t>(
            std::lower_bound(joint.begin(), joint.end(), v) - joint.begin()));
      }
      return pos;
    };
    densities.emplace(joint, [source, k1, k2, s, p1 = positions(k1), p2 = positions(k2),
                              ps = positions(s)](std::span<const double> sub) {
      auto pick = [&](const std::vector<std::size_t>& pos) {
        std::vector<double> out;
        out.reserve(pos.size());
        for (auto p : pos) out.push_back(sub[p]);
        return out;
      };
      double value = source->density(k1)(pick(p1)) * source->density(k2)(pick(p2));
      if (!s.empty()) value /= source->density(s)(pick(ps));
      return value;
    });
  }
  for (const auto& c : jt.clusters()) {
    densities.emplace(c, [source, c](std::span<const double> sub) {
      return source->density(c)(sub);
    });
  }
  return JunctionTreeCopulaModel(lifted.tree(), std::move(densities));
}

}  // namespace cherryvine
