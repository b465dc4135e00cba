#pragma once

// Junction-tree copulas: a copula density written as the product of cluster
// copula densities divided by separator copula densities, each separator
// raised to its multiplicity minus one.

#include <functional>
#include <map>
#include <span>

#include <Eigen/Core>

#include "cherryvine/graph.hpp"

namespace cherryvine {

/// Copula density of a vertex subset. Receives the coordinates of that
/// subset in ascending vertex order and returns a density value.
using ClusterDensity = std::function<double(std::span<const double>)>;

class JunctionTreeCopulaModel {
 public:
  /// `densities` must hold an entry for every cluster and every nonempty
  /// separator of `tree`; extra entries are ignored. Throws InputError when
  /// one is missing.
  JunctionTreeCopulaModel(JunctionTree tree, std::map<Hyperedge, ClusterDensity> densities);

  const JunctionTree& tree() const noexcept { return tree_; }
  const ClusterDensity& density(const Hyperedge& set) const;

  /// Evaluates the density of `set` at the full point u (coordinates in
  /// vertex order). Throws DomainError on a nonpositive or non-finite value.
  double log_density_of(const Hyperedge& set, std::span<const double> u) const;

  /// sum_K log c_K(u_K) - sum_S (multiplicity(S) - 1) log c_S(u_S).
  double log_density(std::span<const double> u) const;

 private:
  JunctionTree tree_;
  std::map<Hyperedge, ClusterDensity> densities_;
};

inline double junction_tree_log_density(const JunctionTreeCopulaModel& model,
                                        std::span<const double> u) {
  return model.log_density(u);
}

/// Lifts a k-th order cherry-tree copula to order k+1 (see
/// expand_cherry_tree). Each new cluster K1 u K2 gets the density
/// c_K1 c_K2 / c_(K1 n K2), i.e. the added conditional pair copula is the
/// independence copula; the lifted density equals the original one. Throws
/// DomainError unless the tree is a cherry tree with at least two clusters.
JunctionTreeCopulaModel lift_cherry_tree_copula(const JunctionTreeCopulaModel& model);

/// Multivariate Gaussian copula with a given correlation matrix.
class GaussianCopula {
 public:
  /// Throws DomainError unless `correlation` is symmetric positive definite
  /// with unit diagonal.
  explicit GaussianCopula(Eigen::MatrixXd correlation);

  Eigen::Index dimension() const noexcept { return correlation_.rows(); }
  const Eigen::MatrixXd& correlation() const noexcept { return correlation_; }

  double log_density(std::span<const double> u) const;

  /// Gaussian copula of the sub-vector indexed by `positions`.
  GaussianCopula marginal(std::span<const Eigen::Index> positions) const;

 private:
  Eigen::MatrixXd correlation_;
  Eigen::MatrixXd precision_minus_identity_;
  double log_det_ = 0.0;
};

/// Cluster evaluators for every cluster and separator of `tree` taken from
/// the Gaussian copula with `correlation` over the tree's vertices.
std::map<Hyperedge, ClusterDensity> gaussian_cluster_densities(const JunctionTree& tree,
                                                               const Eigen::MatrixXd& correlation);

}  // namespace cherryvine
