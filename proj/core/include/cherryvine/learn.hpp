#pragma once

// Structure and parameter learning on the copula scale.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cherryvine/bicop.hpp"
#include "cherryvine/graph.hpp"
#include "cherryvine/matrix.hpp"
#include "cherryvine/vine.hpp"

namespace cherryvine {

inline constexpr std::uint64_t kDefaultSeed = 12345;

/// Copula-scale data: n rows, d columns, every value in (0, 1). Column j holds
/// variable j+1.
struct PseudoObservations {
  PointMatrix values;

  std::size_t n() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(values.cols()); }
  std::vector<double> column(std::size_t j) const;
};

/// Rank transform: value(i, j) = rank of raw(i, j) in column j over n + 1.
/// Tied values receive the ranks of their group in an order drawn from a
/// generator seeded by (seed, j), so every column is a permutation of
/// 1/(n+1), ..., n/(n+1). Throws InputError for fewer than two rows, a
/// non-finite value or a constant column.
PseudoObservations pseudo_observations(const PointMatrix& raw,
                                       std::uint64_t seed = kDefaultSeed);

/// Wraps data already on the copula scale. Throws InputError unless every
/// value lies strictly inside (0, 1).
PseudoObservations as_pseudo_observations(PointMatrix u);

/// Symmetric matrix of empirical Kendall taus with unit diagonal.
struct DependenceMatrix {
  Eigen::MatrixXd tau;

  std::size_t d() const noexcept { return static_cast<std::size_t>(tau.rows()); }
};

DependenceMatrix empirical_tau_matrix(const PseudoObservations& po);

/// Maximum spanning tree on 1..d under |tau|. Ties keep lexicographic edge
/// order. Edges are returned in the order they were accepted.
std::vector<VertexPair> fit_first_tree(const DependenceMatrix& dm);

/// Asymptotic test of tau = 0: true when
/// |tau| sqrt(9n(n-1) / (2(2n+5))) is below the 1 - alpha/2 standard normal
/// quantile. Throws DomainError unless 0 < alpha < 1 and InputError for
/// n < 10.
bool independence_filter(double tau, std::size_t n, double alpha);
bool independence_filter(std::span<const UnitPair> pairs, double alpha);

struct FitOptions {
  /// Candidate families; the one with the highest log-likelihood wins, ties
  /// going to Independence and then to fewer parameters.
  std::vector<Family> families{Family::Independence, Family::Gaussian, Family::Clayton,
                               Family::Gumbel, Family::Frank};
  FitMethod method = FitMethod::TauInversion;
  /// Significance level of the independence filter; 0 disables it.
  double alpha = 0.0;
};

/// Fits every family of the pool and keeps the best. Families that cannot
/// reach the empirical tau are skipped; when none can, the result is
/// Independence. Throws InputError for an empty pool.
BivariateCopula select_bicop(std::span<const UnitPair> pairs, const FitOptions& options);

/// One fitted tree level together with the conditional distributions its
/// links produce: residual_a[i][r] = F(a_i | S_i) and residual_b[i][r] =
/// F(b_i | S_i) at row r.
struct FittedLevel {
  int level = 1;
  VineTree tree;
  std::vector<PairLabel> labels;
  std::vector<BivariateCopula> copulas;
  std::vector<std::vector<double>> residual_a;
  std::vector<std::vector<double>> residual_b;
};

/// Fits the copulas of tree 1 along `edges`.
FittedLevel fit_first_level(const PseudoObservations& po, std::span<const VertexPair> edges,
                            const FitOptions& options);

/// Fits the copulas of the cherry tree `tree`, which must stack on `prev`
/// (its clusters are the unions of prev's linked nodes and its separators
/// are nodes of prev). Throws DomainError otherwise.
FittedLevel fit_next_level(const FittedLevel& prev, const CherryTree& tree,
                           const FitOptions& options);

/// Greedy choice of tree prev.level + 1. Its clusters are forced to be the
/// unions of prev's linked nodes; the links are a maximum spanning tree over
/// the pairs of clusters sharing a node of prev, weighted by |tau| between
/// the two conditional distributions prev produces for the pair's
/// conditioned vertices. Ties keep lexicographic cluster-index order. A
/// single link of prev yields the single cluster V. Throws DomainError when
/// prev has no links.
CherryTree greedy_cherry_tree(const FittedLevel& prev);

/// Truncated vine at level k: tree 1 by fit_first_tree, trees 2..k by
/// greedy_cherry_tree, one selected copula per link of those trees, every
/// higher link Independence on trees completed by expand_cherry_tree.
/// Throws DomainError when k is outside 1..d-1 and InputError for fewer
/// than 10 rows or an empty pool.
VineModel fit_truncated_vine(const PseudoObservations& po, int k,
                             const FitOptions& options = {});

/// A k-th order cherry tree such that every cluster of jt lies inside one of
/// its clusters. A k-th order cherry tree input is returned unchanged.
/// Vertices are placed in running-intersection order; each new vertex joins
/// the already placed part of its cluster, padded from the first output
/// cluster containing that part. Throws DomainError when a cluster of jt
/// has more than k vertices or d < k.
CherryTree junction_tree_to_cherry_tree(const JunctionTree& jt, int k);

}  // namespace cherryvine
