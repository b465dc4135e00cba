#include "cherryvine/vine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

#include "cherryvine/error.hpp"
#include "cherryvine/junction_copula.hpp"
#include "streams.hpp"

namespace cherryvine {

// --- PairLabel -------------------------------------------------------------

PairLabel::PairLabel(Vertex x, Vertex y, Hyperedge s)
    : a(std::min(x, y)), b(std::max(x, y)), given(std::move(s)) {
  if (x == y) throw InputError("pair label needs two distinct vertices");
  if (given.contains(x) || given.contains(y)) {
    throw InputError("conditioned vertex appears in its own conditioning set");
  }
}

Hyperedge PairLabel::support() const { return given.with(a).with(b); }

std::string PairLabel::to_string() const {
  std::ostringstream os;
  os << a << ',' << b;
  if (!given.empty()) {
    os << '|';
    for (std::size_t i = 0; i < given.size(); ++i) {
      if (i) os << ',';
      os << given[i];
    }
  }
  return os.str();
}

// --- CherryVineStructure -----------------------------------------------------

CherryVineStructure::CherryVineStructure(VertexSet vertices, std::vector<VertexPair> first_tree,
                                         std::vector<CherryTree> cherry_trees)
    : vertices_(std::move(vertices)),
      first_tree_(std::move(first_tree)),
      cherry_trees_(std::move(cherry_trees)) {
  const std::size_t d = vertices_.size();
  if (d < 2) throw DomainError("a vine needs at least two variables");
  if (first_tree_.size() != d - 1) {
    throw DomainError("tree 1 must have d-1 = " + std::to_string(d - 1) + " edges");
  }

  VineTree level1;
  for (Vertex v : vertices_.labels()) level1.nodes.push_back(Hyperedge{v});
  std::vector<std::size_t> component(d);
  std::iota(component.begin(), component.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (component[x] != x) x = component[x] = component[component[x]];
    return x;
  };
  for (auto [x, y] : first_tree_) {
    const std::size_t i = vertices_.index_of(x);
    const std::size_t j = vertices_.index_of(y);
    if (i == j) throw DomainError("tree 1 has a self loop at vertex " + std::to_string(x));
    const std::size_t ri = find(i);
    const std::size_t rj = find(j);
    if (ri == rj) throw DomainError("tree 1 contains a cycle");
    component[std::max(ri, rj)] = std::min(ri, rj);
    level1.links.push_back({i, j, Hyperedge{}});
  }
  trees_.push_back(std::move(level1));

  if (cherry_trees_.size() != d - 2) {
    throw DomainError("a vine on " + std::to_string(d) + " variables needs " +
                      std::to_string(d - 2) + " cherry trees above tree 1");
  }
  for (std::size_t i = 0; i < cherry_trees_.size(); ++i) {
    const CherryTree& ct = cherry_trees_[i];
    const int order = static_cast<int>(i) + 2;
    if (ct.order() != order) {
      throw DomainError("tree " + std::to_string(order) + " must be a cherry tree of order " +
                        std::to_string(order));
    }
    if (!(ct.vertices() == vertices_)) {
      throw DomainError("tree " + std::to_string(order) + " has a different vertex set");
    }
    VineTree level;
    level.nodes.assign(ct.clusters().begin(), ct.clusters().end());
    level.links.assign(ct.edges().begin(), ct.edges().end());
    trees_.push_back(std::move(level));
  }

  build_plans();
  build_sampling_plan();
}

void CherryVineStructure::build_plans() {
  const int levels = level_count();
  labels_.assign(static_cast<std::size_t>(levels), {});
  plans_.assign(static_cast<std::size_t>(levels), {});

  // Level 1.
  for (const auto& link : trees_[0].links) {
    const Vertex x = trees_[0].nodes[link.first][0];
    const Vertex y = trees_[0].nodes[link.second][0];
    PairLabel label(x, y, Hyperedge{});
    LinkPlan plan{label, {vertices_.index_of(label.a), true}, {vertices_.index_of(label.b), true}};
    labels_[0].push_back(label);
    plans_[0].push_back(std::move(plan));
  }

  for (int level = 2; level <= levels; ++level) {
    const VineTree& below = trees_[static_cast<std::size_t>(level - 2)];
    const VineTree& here = trees_[static_cast<std::size_t>(level - 1)];
    const auto& below_labels = labels_[static_cast<std::size_t>(level - 2)];
    const std::string name = "tree " + std::to_string(level);

    if (here.nodes.size() != below.links.size()) {
      throw DomainError(name + " must have " + std::to_string(below.links.size()) + " clusters");
    }
    std::map<Hyperedge, std::size_t> union_to_link;
    for (std::size_t l = 0; l < below.links.size(); ++l) {
      union_to_link[below.nodes[below.links[l].first].unite(below.nodes[below.links[l].second])] =
          l;
    }
    std::vector<std::size_t> source_link(here.nodes.size());
    std::vector<bool> used(below.links.size(), false);
    for (std::size_t n = 0; n < here.nodes.size(); ++n) {
      auto it = union_to_link.find(here.nodes[n]);
      if (it == union_to_link.end()) {
        throw DomainError(name + ": cluster " + here.nodes[n].to_string() +
                          " is not the union of two linked clusters of tree " +
                          std::to_string(level - 1));
      }
      if (used[it->second]) {
        throw DomainError(name + ": cluster " + here.nodes[n].to_string() + " appears twice");
      }
      used[it->second] = true;
      source_link[n] = it->second;
    }

    for (const auto& link : here.links) {
      const bool proximal =
          std::find(below.nodes.begin(), below.nodes.end(), link.separator) != below.nodes.end();
      if (!proximal) {
        throw DomainError(name + ": link separator " + link.separator.to_string() +
                          " is not a cluster of tree " + std::to_string(level - 1));
      }
      const Hyperedge left = here.nodes[link.first].minus(link.separator);
      const Hyperedge right = here.nodes[link.second].minus(link.separator);
      if (left.size() != 1 || right.size() != 1) {
        throw DomainError(name + ": link does not condition exactly one vertex per side");
      }
      auto source_of = [&](Vertex v, std::size_t node) -> ArgumentSource {
        const std::size_t l = source_link[node];
        const PairLabel& src = below_labels[l];
        if (src.a == v) return {l, true};
        if (src.b == v) return {l, false};
        throw InvariantError(name + ": conditional distribution of " + std::to_string(v) +
                             " is not produced by the tree below");
      };
      const Vertex x = left[0];
      const Vertex y = right[0];
      PairLabel label(x, y, link.separator);
      const ArgumentSource sx = source_of(x, link.first);
      const ArgumentSource sy = source_of(y, link.second);
      LinkPlan plan{label, x < y ? sx : sy, x < y ? sy : sx};
      labels_[static_cast<std::size_t>(level - 1)].push_back(label);
      plans_[static_cast<std::size_t>(level - 1)].push_back(std::move(plan));
    }
  }
}

void CherryVineStructure::build_sampling_plan() {
  const int levels = level_count();
  std::vector<std::vector<bool>> active(static_cast<std::size_t>(levels));
  for (int l = 1; l <= levels; ++l) {
    active[static_cast<std::size_t>(l - 1)].assign(labels(l).size(), true);
  }
  Hyperedge remaining(std::vector<Vertex>(vertices_.labels().begin(), vertices_.labels().end()));
  std::vector<SamplingStep> reversed;

  for (int top = levels; top >= 1; --top) {
    const auto& top_active = active[static_cast<std::size_t>(top - 1)];
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < top_active.size(); ++i) {
      if (top_active[i]) live.push_back(i);
    }
    if (live.size() != 1 || labels(top)[live[0]].support() != remaining) {
      throw InvariantError("vine cannot be peeled at level " + std::to_string(top));
    }
    const PairLabel& top_label = labels(top)[live[0]];

    auto try_peel = [&](Vertex v) -> std::optional<SamplingStep> {
      SamplingStep step;
      step.vertex = v;
      std::size_t link = live[0];
      for (int level = top; level >= 1; --level) {
        const LinkPlan& p = plan(level)[link];
        const bool is_a = p.label.a == v;
        if (!is_a && p.label.b != v) return std::nullopt;
        step.chain.push_back({level, link, is_a});
        if (level > 1) link = (is_a ? p.source_a : p.source_b).index;
      }
      // No other live link may involve v.
      for (int level = 1; level <= top; ++level) {
        const auto& flags = active[static_cast<std::size_t>(level - 1)];
        for (std::size_t i = 0; i < flags.size(); ++i) {
          if (!flags[i]) continue;
          const bool in_chain = std::any_of(step.chain.begin(), step.chain.end(), [&](auto& h) {
            return h.level == level && h.link == i;
          });
          if (!in_chain && labels(level)[i].support().contains(v)) return std::nullopt;
        }
      }
      return step;
    };

    std::optional<SamplingStep> step = try_peel(top_label.b);
    if (!step) step = try_peel(top_label.a);
    if (!step) throw InvariantError("no conditioned vertex of the top link can be peeled");
    for (const auto& hop : step->chain) {
      active[static_cast<std::size_t>(hop.level - 1)][hop.link] = false;
    }
    remaining = remaining.without(step->vertex);
    reversed.push_back(std::move(*step));
  }
  SamplingStep first;
  first.vertex = remaining[0];
  reversed.push_back(std::move(first));
  sampling_plan_.assign(reversed.rbegin(), reversed.rend());
}

const VineTree& CherryVineStructure::tree(int level) const {
  if (level < 1 || level > level_count()) {
    throw InputError("tree level " + std::to_string(level) + " out of range");
  }
  return trees_[static_cast<std::size_t>(level - 1)];
}

std::span<const PairLabel> CherryVineStructure::labels(int level) const {
  tree(level);
  return labels_[static_cast<std::size_t>(level - 1)];
}

std::span<const CherryVineStructure::LinkPlan> CherryVineStructure::plan(int level) const {
  tree(level);
  return plans_[static_cast<std::size_t>(level - 1)];
}

std::vector<PairLabel> CherryVineStructure::all_labels() const {
  std::vector<PairLabel> out;
  for (const auto& level : labels_) out.insert(out.end(), level.begin(), level.end());
  return out;
}

std::pair<int, std::size_t> CherryVineStructure::locate(const PairLabel& label) const {
  const int level = label.level();
  if (level >= 1 && level <= level_count()) {
    const auto& ls = labels_[static_cast<std::size_t>(level - 1)];
    for (std::size_t i = 0; i < ls.size(); ++i) {
      if (ls[i] == label) return {level, i};
    }
  }
  throw InputError("pair " + label.to_string() + " is not a link of the vine");
}

CherryTree CherryVineStructure::cherry_tree(int order) const {
  const int d = dimension();
  if (order < 2 || order > d) {
    throw InputError("cherry tree order must lie in 2.." + std::to_string(d));
  }
  if (order == d) {
    Hyperedge all(std::vector<Vertex>(vertices_.labels().begin(), vertices_.labels().end()));
    return CherryTree(d, JunctionTree(vertices_, {all}, {}));
  }
  return cherry_trees_[static_cast<std::size_t>(order - 2)];
}

bool CherryVineStructure::is_node_set(const Hyperedge& set) const {
  const std::size_t k = set.size();
  if (k == 0) return false;
  if (k == vertices_.size()) {
    return std::equal(set.begin(), set.end(), vertices_.labels().begin(),
                      vertices_.labels().end());
  }
  if (k > vertices_.size()) return false;
  const auto& nodes = trees_[k - 1].nodes;
  return std::find(nodes.begin(), nodes.end(), set) != nodes.end();
}

// --- VineModel ---------------------------------------------------------------

struct VineModel::Workspace {
  std::vector<double> u;
  std::vector<std::vector<double>> log_c;
  std::vector<std::vector<double>> out_a;
  std::vector<std::vector<double>> out_b;
  bool with_density = true;

  explicit Workspace(const CherryVineStructure& s) {
    const auto levels = static_cast<std::size_t>(s.level_count());
    log_c.resize(levels);
    out_a.resize(levels);
    out_b.resize(levels);
    for (std::size_t l = 0; l < levels; ++l) {
      const std::size_t n = s.labels(static_cast<int>(l) + 1).size();
      log_c[l].assign(n, 0.0);
      out_a[l].assign(n, 0.0);
      out_b[l].assign(n, 0.0);
    }
  }

  double fetch(std::size_t level, const CherryVineStructure::ArgumentSource& src) const {
    if (level == 0) return u[src.index];
    return src.first ? out_a[level - 1][src.index] : out_b[level - 1][src.index];
  }
};

VineModel::VineModel(CherryVineStructure structure,
                     std::vector<std::vector<BivariateCopula>> copulas)
    : structure_(std::move(structure)), copulas_(std::move(copulas)) {
  if (copulas_.size() != static_cast<std::size_t>(structure_.level_count())) {
    throw InputError("expected copulas for " + std::to_string(structure_.level_count()) +
                     " tree levels");
  }
  for (int level = 1; level <= structure_.level_count(); ++level) {
    if (copulas_[static_cast<std::size_t>(level - 1)].size() != structure_.labels(level).size()) {
      throw InputError("tree " + std::to_string(level) + " needs one copula per link");
    }
  }
}

VineModel VineModel::independence(CherryVineStructure structure) {
  std::vector<std::vector<BivariateCopula>> copulas;
  for (int level = 1; level <= structure.level_count(); ++level) {
    copulas.emplace_back(structure.labels(level).size(), BivariateCopula::independence());
  }
  return VineModel(std::move(structure), std::move(copulas));
}

const BivariateCopula& VineModel::copula(int level, std::size_t link) const {
  structure_.tree(level);
  const auto& row = copulas_[static_cast<std::size_t>(level - 1)];
  if (link >= row.size()) throw InputError("link index out of range");
  return row[link];
}

const BivariateCopula& VineModel::copula(const PairLabel& label) const {
  const auto [level, link] = structure_.locate(label);
  return copulas_[static_cast<std::size_t>(level - 1)][link];
}

VineModel VineModel::with_copula(const PairLabel& label, BivariateCopula copula) const {
  VineModel out = *this;
  const auto [level, link] = structure_.locate(label);
  out.copulas_[static_cast<std::size_t>(level - 1)][link] = copula;
  return out;
}

int VineModel::dependent_link_count() const noexcept {
  int count = 0;
  for (const auto& level : copulas_) {
    for (const auto& c : level) count += c.is_independence() ? 0 : 1;
  }
  return count;
}

int VineModel::parameter_count() const noexcept {
  int count = 0;
  for (const auto& level : copulas_) {
    for (const auto& c : level) count += cherryvine::parameter_count(c.family());
  }
  return count;
}

void VineModel::forward(std::span<const double> u, Workspace& ws) const {
  const auto d = static_cast<std::size_t>(dimension());
  if (u.size() != d) {
    throw InputError("point has " + std::to_string(u.size()) + " coordinates, model has " +
                     std::to_string(d));
  }
  ws.u.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(u[i])) throw NumericalError("point coordinate is not finite");
    ws.u[i] = clamp_unit(u[i]);
  }
  for (int level = 1; level <= structure_.level_count(); ++level) {
    const auto l = static_cast<std::size_t>(level - 1);
    const auto plans = structure_.plan(level);
    for (std::size_t i = 0; i < plans.size(); ++i) {
      const BivariateCopula& c = copulas_[l][i];
      const double x = ws.fetch(l, plans[i].source_a);
      const double y = ws.fetch(l, plans[i].source_b);
      if (ws.with_density) ws.log_c[l][i] = c.log_density(x, y);
      ws.out_a[l][i] = c.h(x, y);
      ws.out_b[l][i] = c.h(y, x);
    }
  }
}

double VineModel::log_density(std::span<const double> u) const {
  Workspace ws(structure_);
  forward(u, ws);
  double total = 0.0;
  for (const auto& level : ws.log_c) {
    for (double v : level) total += v;
  }
  if (!std::isfinite(total)) throw NumericalError("log density is not finite");
  return total;
}

double VineModel::conditional_cdf(Vertex j, const Hyperedge& given,
                                  std::span<const double> u) const {
  const std::size_t j_index = structure_.vertices().index_of(j);
  if (given.contains(j)) throw DomainError("conditioning set contains the target vertex");
  Workspace ws(structure_);
  ws.with_density = false;
  forward(u, ws);
  if (given.empty()) return ws.u[j_index];

  const auto level = static_cast<int>(given.size());
  if (level <= structure_.level_count()) {
    const Hyperedge target = given.with(j);
    const auto labels = structure_.labels(level);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i].support() != target) continue;
      const auto l = static_cast<std::size_t>(level - 1);
      if (labels[i].a == j) return ws.out_a[l][i];
      if (labels[i].b == j) return ws.out_b[l][i];
    }
  }
  throw DomainError("F(" + std::to_string(j) + " | " + given.to_string() +
                    ") is not realised by the vine structure");
}

double VineModel::sub_vine_log_density(const Hyperedge& set, std::span<const double> u) const {
  if (!structure_.is_node_set(set)) {
    throw DomainError("set " + set.to_string() + " is not a node of the vine");
  }
  if (set.size() == 1) return 0.0;
  const auto d = static_cast<std::size_t>(dimension());
  if (u.size() != d) throw InputError("point dimension does not match the model");
  std::vector<double> point(d, 0.5);
  for (Vertex v : set) {
    const std::size_t i = structure_.vertices().index_of(v);
    point[i] = u[i];
  }
  Workspace ws(structure_);
  forward(point, ws);
  double total = 0.0;
  for (int level = 1; level <= static_cast<int>(set.size()) - 1; ++level) {
    const auto labels = structure_.labels(level);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i].support().is_subset_of(set)) {
        total += ws.log_c[static_cast<std::size_t>(level - 1)][i];
      }
    }
  }
  if (!std::isfinite(total)) throw NumericalError("sub-vine log density is not finite");
  return total;
}

PointMatrix VineModel::sample(std::size_t n, std::uint64_t seed) const {
  const auto d = static_cast<std::size_t>(dimension());
  if (n == 0) throw InputError("sample size must be at least 1");
  PointMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Workspace ws(structure_);
  ws.with_density = false;
  const auto& steps = structure_.sampling_plan();
  std::vector<double> point(d);
  std::vector<double> w(d);

  for (std::size_t row = 0; row < n; ++row) {
    auto rng = detail::row_stream(seed, row);
    for (double& x : w) x = detail::open_uniform(rng);
    std::fill(point.begin(), point.end(), 0.5);
    for (std::size_t t = 0; t < steps.size(); ++t) {
      const auto& step = steps[t];
      const std::size_t target = structure_.vertices().index_of(step.vertex);
      double value = w[t];
      if (!step.chain.empty()) {
        forward(point, ws);
        for (const auto& hop : step.chain) {
          const auto l = static_cast<std::size_t>(hop.level - 1);
          const auto& p = structure_.plan(hop.level)[hop.link];
          const double other = ws.fetch(l, hop.vertex_is_a ? p.source_b : p.source_a);
          value = copulas_[l][hop.link].h_inverse(value, other);
        }
      }
      point[target] = value;
    }
    for (std::size_t j = 0; j < d; ++j) {
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) = point[j];
    }
  }
  return out;
}

VineModel truncate(const VineModel& model, int k) {
  const int levels = model.structure().level_count();
  if (k < 1 || k > levels) {
    throw DomainError("truncation level must lie in 1.." + std::to_string(levels));
  }
  VineModel out = model;
  for (int level = k + 1; level <= levels; ++level) {
    for (const auto& label : model.structure().labels(level)) {
      out = out.with_copula(label, BivariateCopula::independence());
    }
  }
  return out;
}

JunctionTreeCopulaModel to_cherry_tree_copula(const VineModel& model, int k) {
  const int levels = model.structure().level_count();
  if (k < 1 || k > levels) {
    throw DomainError("truncation level must lie in 1.." + std::to_string(levels));
  }
  auto truncated = std::make_shared<const VineModel>(truncate(model, k));
  CherryTree ct = truncated->structure().cherry_tree(k + 1);
  const VertexSet& vertices = truncated->structure().vertices();

  auto evaluator = [truncated, &vertices](const Hyperedge& set) -> ClusterDensity {
    std::vector<std::size_t> positions;
    for (Vertex v : set) positions.push_back(vertices.index_of(v));
    const std::size_t d = vertices.size();
    return [truncated, set, positions, d](std::span<const double> sub) {
      std::vector<double> full(d, 0.5);
      for (std::size_t i = 0; i < positions.size(); ++i) full[positions[i]] = sub[i];
      return std::exp(truncated->sub_vine_log_density(set, full));
    };
  };

  std::map<Hyperedge, ClusterDensity> densities;
  for (const auto& c : ct.clusters()) densities.emplace(c, evaluator(c));
  for (const auto& e : ct.edges()) {
    if (!e.separator.empty()) densities.emplace(e.separator, evaluator(e.separator));
  }
  return JunctionTreeCopulaModel(ct.tree(), std::move(densities));
}

namespace {

CherryVineStructure complete_from_first_tree(const VertexSet& vertices,
                                             std::vector<VertexPair> first_tree) {
  const int d = static_cast<int>(vertices.size());
  std::vector<CherryTree> trees;
  if (d >= 3) {
    std::vector<Hyperedge> singletons;
    for (Vertex v : vertices.labels()) singletons.push_back(Hyperedge{v});
    std::vector<TreeEdge> links;
    for (auto [x, y] : first_tree) {
      links.push_back({vertices.index_of(x), vertices.index_of(y), Hyperedge{}});
    }
    LinkedUnions second = merge_linked_clusters(singletons, links);
    trees.emplace_back(2, JunctionTree(vertices, std::move(second.clusters), second.edges));
    while (static_cast<int>(trees.size()) < d - 2) trees.push_back(expand_cherry_tree(trees.back()));
  }
  return CherryVineStructure(vertices, std::move(first_tree), std::move(trees));
}

}  // namespace

CherryVineStructure d_vine_structure(int d) {
  std::vector<VertexPair> path;
  for (int v = 1; v < d; ++v) path.emplace_back(v, v + 1);
  return complete_from_first_tree(VertexSet::range(d), std::move(path));
}

CherryVineStructure c_vine_structure(int d) {
  std::vector<VertexPair> star;
  for (int v = 2; v <= d; ++v) star.emplace_back(1, v);
  return complete_from_first_tree(VertexSet::range(d), std::move(star));
}

}  // namespace cherryvine
