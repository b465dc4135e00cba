#include "cherryvine/learn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <tuple>

#include "bivariate_normal.hpp"
#include "cherryvine/error.hpp"
#include "streams.hpp"

namespace cherryvine {

std::vector<double> PseudoObservations::column(std::size_t j) const {
  std::vector<double> out(n());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return out;
}

PseudoObservations pseudo_observations(const PointMatrix& raw, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(raw.rows());
  const auto d = static_cast<std::size_t>(raw.cols());
  if (n < 2) throw InputError("pseudo-observations need at least two rows");
  if (d < 1) throw InputError("pseudo-observations need at least one column");
  PointMatrix out(raw.rows(), raw.cols());
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < d; ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(raw(static_cast<Eigen::Index>(i), c))) {
        throw InputError("non-finite value at row " + std::to_string(i + 1) + ", column " +
                         std::to_string(j + 1));
      }
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return raw(static_cast<Eigen::Index>(a), c) < raw(static_cast<Eigen::Index>(b), c);
    });
    if (raw(static_cast<Eigen::Index>(order.front()), c) ==
        raw(static_cast<Eigen::Index>(order.back()), c)) {
      throw InputError("column " + std::to_string(j + 1) + " is constant");
    }
    auto rng = detail::row_stream(seed, j);
    for (std::size_t start = 0; start < n;) {
      std::size_t stop = start + 1;
      const double value = raw(static_cast<Eigen::Index>(order[start]), c);
      while (stop < n && raw(static_cast<Eigen::Index>(order[stop]), c) == value) ++stop;
      for (std::size_t t = stop - 1; t > start; --t) {
        const std::size_t span = t - start + 1;
        std::swap(order[t], order[start + static_cast<std::size_t>(rng() % span)]);
      }
      start = stop;
    }
    for (std::size_t r = 0; r < n; ++r) {
      out(static_cast<Eigen::Index>(order[r]), c) =
          static_cast<double>(r + 1) / static_cast<double>(n + 1);
    }
  }
  return PseudoObservations{std::move(out)};
}

PseudoObservations as_pseudo_observations(PointMatrix u) {
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      const double x = u(i, j);
      if (!(x > 0.0 && x < 1.0)) {
        throw InputError("value at row " + std::to_string(i + 1) + ", column " +
                         std::to_string(j + 1) + " is outside (0, 1)");
      }
    }
  }
  return PseudoObservations{std::move(u)};
}

DependenceMatrix empirical_tau_matrix(const PseudoObservations& po) {
  const std::size_t d = po.d();
  Eigen::MatrixXd tau = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d),
                                                  static_cast<Eigen::Index>(d));
  std::vector<std::vector<double>> columns;
  for (std::size_t j = 0; j < d; ++j) columns.push_back(po.column(j));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double t = kendall_tau(columns[i], columns[j]);
      tau(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t;
      tau(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = t;
    }
  }
  return DependenceMatrix{std::move(tau)};
}

namespace {

struct WeightedEdge {
  std::size_t i;
  std::size_t j;
  double weight;
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Kruskal on edges listed in lexicographic (i, j) order.
std::vector<WeightedEdge> maximum_spanning_tree(std::size_t nodes,
                                                std::vector<WeightedEdge> edges) {
  std::stable_sort(edges.begin(), edges.end(),
                   [](const WeightedEdge& x, const WeightedEdge& y) { return x.weight > y.weight; });
  DisjointSets sets(nodes);
  std::vector<WeightedEdge> tree;
  for (const auto& e : edges) {
    if (sets.join(e.i, e.j)) tree.push_back(e);
    if (tree.size() + 1 == nodes) break;
  }
  if (tree.size() + 1 != nodes) throw InvariantError("candidate graph is not connected");
  return tree;
}

std::vector<UnitPair> zip_pairs(std::span<const double> x, std::span<const double> y) {
  std::vector<UnitPair> pairs(x.size());
  for (std::size_t r = 0; r < x.size(); ++r) pairs[r] = {clamp_unit(x[r]), clamp_unit(y[r])};
  return pairs;
}

// Fits one link and stores F(x | y-side) and F(y | x-side).
void fit_link(FittedLevel& level, PairLabel label, std::span<const double> x,
              std::span<const double> y, const FitOptions& options) {
  const auto pairs = zip_pairs(x, y);
  const BivariateCopula c = select_bicop(pairs, options);
  std::vector<double> ha(pairs.size());
  std::vector<double> hb(pairs.size());
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    ha[r] = clamp_unit(c.h(pairs[r].u, pairs[r].v));
    hb[r] = clamp_unit(c.h(pairs[r].v, pairs[r].u));
  }
  level.labels.push_back(std::move(label));
  level.copulas.push_back(c);
  level.residual_a.push_back(std::move(ha));
  level.residual_b.push_back(std::move(hb));
}

// Conditional distribution of vertex v produced by link l of a level.
const std::vector<double>& residual_of(const FittedLevel& level, std::size_t l, Vertex v) {
  const PairLabel& label = level.labels[l];
  if (label.a == v) return level.residual_a[l];
  if (label.b == v) return level.residual_b[l];
  throw InvariantError("vertex " + std::to_string(v) + " is not conditioned by link " +
                       label.to_string());
}

Hyperedge link_union(const FittedLevel& level, std::size_t l) {
  const TreeEdge& e = level.tree.links[l];
  return level.tree.nodes[e.first].unite(level.tree.nodes[e.second]);
}

}  // namespace

std::vector<VertexPair> fit_first_tree(const DependenceMatrix& dm) {
  const std::size_t d = dm.d();
  if (d < 2) throw DomainError("a first tree needs at least two variables");
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      edges.push_back({i, j,
                       std::abs(dm.tau(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))});
    }
  }
  std::vector<VertexPair> out;
  for (const auto& e : maximum_spanning_tree(d, std::move(edges))) {
    out.emplace_back(static_cast<Vertex>(e.i + 1), static_cast<Vertex>(e.j + 1));
  }
  return out;
}

bool independence_filter(double tau, std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (n < 10) throw InputError("independence filter needs at least 10 observations");
  const double nn = static_cast<double>(n);
  const double statistic = std::abs(tau) * std::sqrt(9.0 * nn * (nn - 1.0) / (2.0 * (2.0 * nn + 5.0)));
  return statistic < detail::normal_quantile(1.0 - alpha / 2.0);
}

bool independence_filter(std::span<const UnitPair> pairs, double alpha) {
  std::vector<double> u(pairs.size());
  std::vector<double> v(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    u[i] = pairs[i].u;
    v[i] = pairs[i].v;
  }
  if (pairs.size() < 10) throw InputError("independence filter needs at least 10 observations");
  return independence_filter(kendall_tau(u, v), pairs.size(), alpha);
}

BivariateCopula select_bicop(std::span<const UnitPair> pairs, const FitOptions& options) {
  if (options.families.empty()) throw InputError("family pool is empty");
  if (options.alpha > 0.0 && independence_filter(pairs, options.alpha)) {
    return BivariateCopula::independence();
  }
  BivariateCopula best;
  double best_loglik = 0.0;
  bool have = false;
  for (Family family : options.families) {
    BivariateCopula candidate;
    try {
      candidate = fit_bicop(pairs, family, options.method);
    } catch (const DomainError&) {
      continue;
    }
    const double loglik = pair_log_likelihood(candidate, pairs);
    if (!std::isfinite(loglik)) continue;
    bool better = !have || loglik > best_loglik;
    if (have && loglik == best_loglik) {
      const auto rank = [](const BivariateCopula& c) {
        return c.is_independence() ? -1 : parameter_count(c.family());
      };
      better = rank(candidate) < rank(best);
    }
    if (better) {
      best = candidate;
      best_loglik = loglik;
      have = true;
    }
  }
  return best;
}

FittedLevel fit_first_level(const PseudoObservations& po, std::span<const VertexPair> edges,
                            const FitOptions& options) {
  const std::size_t d = po.d();
  FittedLevel level;
  level.level = 1;
  for (std::size_t j = 0; j < d; ++j) level.tree.nodes.push_back(Hyperedge{static_cast<Vertex>(j + 1)});
  for (auto [x, y] : edges) {
    if (x < 1 || y < 1 || static_cast<std::size_t>(std::max(x, y)) > d || x == y) {
      throw DomainError("tree 1 edge outside the data dimension");
    }
    const auto i = static_cast<std::size_t>(x - 1);
    const auto j = static_cast<std::size_t>(y - 1);
    level.tree.links.push_back({i, j, Hyperedge{}});
    PairLabel label(x, y, Hyperedge{});
    const auto first = po.column(static_cast<std::size_t>(label.a - 1));
    const auto second = po.column(static_cast<std::size_t>(label.b - 1));
    fit_link(level, std::move(label), first, second, options);
  }
  return level;
}

FittedLevel fit_next_level(const FittedLevel& prev, const CherryTree& tree,
                           const FitOptions& options) {
  FittedLevel level;
  level.level = prev.level + 1;
  if (tree.order() != level.level) {
    throw DomainError("tree " + std::to_string(level.level) + " must be a cherry tree of order " +
                      std::to_string(level.level));
  }
  std::map<Hyperedge, std::size_t> source;
  for (std::size_t l = 0; l < prev.tree.links.size(); ++l) source[link_union(prev, l)] = l;
  if (tree.clusters().size() != source.size()) {
    throw DomainError("tree " + std::to_string(level.level) +
                      " does not stack on the tree below");
  }
  level.tree.nodes.assign(tree.clusters().begin(), tree.clusters().end());
  level.tree.links.assign(tree.edges().begin(), tree.edges().end());
  std::vector<std::size_t> node_source;
  for (const auto& c : level.tree.nodes) {
    auto it = source.find(c);
    if (it == source.end()) {
      throw DomainError("cluster " + c.to_string() + " is not the union of two linked clusters");
    }
    node_source.push_back(it->second);
  }
  for (const auto& link : level.tree.links) {
    if (std::find(prev.tree.nodes.begin(), prev.tree.nodes.end(), link.separator) ==
        prev.tree.nodes.end()) {
      throw DomainError("link separator " + link.separator.to_string() +
                        " is not a cluster of the tree below");
    }
    const Vertex x = level.tree.nodes[link.first].minus(link.separator)[0];
    const Vertex y = level.tree.nodes[link.second].minus(link.separator)[0];
    const auto& rx = residual_of(prev, node_source[link.first], x);
    const auto& ry = residual_of(prev, node_source[link.second], y);
    PairLabel label(x, y, link.separator);
    if (x < y) fit_link(level, std::move(label), rx, ry, options);
    else fit_link(level, std::move(label), ry, rx, options);
  }
  return level;
}

CherryTree greedy_cherry_tree(const FittedLevel& prev) {
  const std::size_t m = prev.tree.links.size();
  if (m == 0) throw DomainError("greedy growth needs at least one link in the tree below");
  std::vector<Hyperedge> clusters;
  for (std::size_t l = 0; l < m; ++l) clusters.push_back(link_union(prev, l));

  std::vector<std::vector<std::size_t>> incident(prev.tree.nodes.size());
  for (std::size_t l = 0; l < m; ++l) {
    incident[prev.tree.links[l].first].push_back(l);
    incident[prev.tree.links[l].second].push_back(l);
  }
  std::vector<WeightedEdge> candidates;
  for (std::size_t node = 0; node < incident.size(); ++node) {
    const Hyperedge& shared = prev.tree.nodes[node];
    const auto& links = incident[node];
    for (std::size_t p = 0; p < links.size(); ++p) {
      for (std::size_t q = p + 1; q < links.size(); ++q) {
        const std::size_t i = std::min(links[p], links[q]);
        const std::size_t j = std::max(links[p], links[q]);
        const Vertex a = clusters[i].minus(shared)[0];
        const Vertex b = clusters[j].minus(shared)[0];
        const double weight =
            std::abs(kendall_tau(residual_of(prev, i, a), residual_of(prev, j, b)));
        candidates.push_back({i, j, weight});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const WeightedEdge& x, const WeightedEdge& y) {
    return std::tie(x.i, x.j) < std::tie(y.i, y.j);
  });
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& e : maximum_spanning_tree(m, std::move(candidates))) edges.emplace_back(e.i, e.j);

  std::vector<Vertex> labels;
  for (const auto& node : prev.tree.nodes) labels.insert(labels.end(), node.begin(), node.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return CherryTree(prev.level + 1, JunctionTree(VertexSet(std::move(labels)), std::move(clusters), edges));
}

VineModel fit_truncated_vine(const PseudoObservations& po, int k, const FitOptions& options) {
  const int d = static_cast<int>(po.d());
  if (d < 2) throw DomainError("a vine needs at least two variables");
  if (k < 1 || k > d - 1) {
    throw DomainError("truncation level must lie in 1.." + std::to_string(d - 1));
  }
  if (po.n() < 10) throw InputError("fitting needs at least 10 observations");
  if (options.families.empty()) throw InputError("family pool is empty");

  const VertexSet vertices = VertexSet::range(d);
  const auto first_tree = fit_first_tree(empirical_tau_matrix(po));
  std::vector<FittedLevel> fitted;
  fitted.push_back(fit_first_level(po, first_tree, options));
  std::vector<CherryTree> cherry_trees;
  for (int level = 2; level <= k; ++level) {
    cherry_trees.push_back(greedy_cherry_tree(fitted.back()));
    fitted.push_back(fit_next_level(fitted.back(), cherry_trees.back(), options));
  }
  if (d >= 3 && k == 1) {
    std::vector<Hyperedge> singletons(fitted[0].tree.nodes);
    LinkedUnions second = merge_linked_clusters(singletons, fitted[0].tree.links);
    cherry_trees.emplace_back(2, JunctionTree(vertices, std::move(second.clusters), second.edges));
  }
  while (static_cast<int>(cherry_trees.size()) < d - 2) {
    cherry_trees.push_back(expand_cherry_tree(cherry_trees.back()));
  }

  CherryVineStructure structure(vertices, first_tree, std::move(cherry_trees));
  std::vector<std::vector<BivariateCopula>> copulas;
  for (int level = 1; level <= structure.level_count(); ++level) {
    const auto labels = structure.labels(level);
    if (level <= k) {
      const FittedLevel& f = fitted[static_cast<std::size_t>(level - 1)];
      if (!std::equal(labels.begin(), labels.end(), f.labels.begin(), f.labels.end())) {
        throw InvariantError("fitted links do not match the assembled structure");
      }
      copulas.push_back(f.copulas);
    } else {
      copulas.emplace_back(labels.size(), BivariateCopula::independence());
    }
  }
  return VineModel(std::move(structure), std::move(copulas));
}

CherryTree junction_tree_to_cherry_tree(const JunctionTree& jt, int k) {
  if (k < 2) throw DomainError("cherry tree order must be at least 2");
  const auto order = static_cast<std::size_t>(k);
  if (jt.width() > order) {
    throw DomainError("a cluster has more than " + std::to_string(k) + " vertices");
  }
  const std::size_t d = jt.vertices().size();
  if (d < order) {
    throw DomainError("cannot build an order-" + std::to_string(k) + " cherry tree on " +
                      std::to_string(d) + " vertices");
  }
  if (is_cherry_tree(jt, k)) return CherryTree(k, jt);

  const auto rip = find_rip_ordering(jt.clusters());
  if (!rip) throw InvariantError("junction tree clusters admit no running-intersection ordering");

  // Vertices in placement order with the index of the cluster introducing them.
  std::vector<std::pair<Vertex, std::size_t>> placement;
  std::vector<bool> placed_flag(d, false);
  for (std::size_t idx : *rip) {
    for (Vertex v : jt.clusters()[idx]) {
      const std::size_t pos = jt.vertices().index_of(v);
      if (placed_flag[pos]) continue;
      placed_flag[pos] = true;
      placement.emplace_back(v, idx);
    }
  }

  std::vector<Hyperedge> clusters;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  Hyperedge placed;
  for (std::size_t t = 0; t < order; ++t) placed = placed.with(placement[t].first);
  clusters.push_back(placed);
  for (std::size_t t = order; t < placement.size(); ++t) {
    const auto [v, idx] = placement[t];
    const Hyperedge need = jt.clusters()[idx].intersect(placed);
    std::size_t host = clusters.size();
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (need.is_subset_of(clusters[c])) {
        host = c;
        break;
      }
    }
    if (host == clusters.size()) throw InvariantError("no output cluster holds " + need.to_string());
    Hyperedge separator = need;
    for (Vertex w : clusters[host]) {
      if (separator.size() + 1 == order) break;
      if (!separator.contains(w)) separator = separator.with(w);
    }
    clusters.push_back(separator.with(v));
    edges.emplace_back(host, clusters.size() - 1);
    placed = placed.with(v);
  }
  return CherryTree(k, JunctionTree(jt.vertices(), std::move(clusters), edges));
}

}  // namespace cherryvine
