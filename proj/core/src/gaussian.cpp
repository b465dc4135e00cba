#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "bivariate_normal.hpp"
#include "cherryvine/bicop.hpp"
#include "cherryvine/error.hpp"
#include "cherryvine/junction_copula.hpp"

namespace cherryvine {

GaussianCopula::GaussianCopula(Eigen::MatrixXd correlation) : correlation_(std::move(correlation)) {
  const Eigen::Index d = correlation_.rows();
  if (d == 0 || correlation_.cols() != d) throw DomainError("correlation matrix must be square");
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(correlation_(i, i) - 1.0) > 1e-12) {
      throw DomainError("correlation matrix must have a unit diagonal");
    }
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(correlation_(i, j) - correlation_(j, i)) > 1e-12) {
        throw DomainError("correlation matrix must be symmetric");
      }
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(correlation_);
  if (llt.info() != Eigen::Success) throw DomainError("correlation matrix is not positive definite");
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);
  precision_minus_identity_ = llt.solve(identity) - identity;
  log_det_ = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double GaussianCopula::log_density(std::span<const double> u) const {
  const Eigen::Index d = dimension();
  if (static_cast<Eigen::Index>(u.size()) != d) {
    throw InputError("point dimension does not match the Gaussian copula");
  }
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    z(i) = detail::normal_quantile(clamp_unit(u[static_cast<std::size_t>(i)]));
  }
  return -0.5 * log_det_ - 0.5 * z.dot(precision_minus_identity_ * z);
}

GaussianCopula GaussianCopula::marginal(std::span<const Eigen::Index> positions) const {
  const auto m = static_cast<Eigen::Index>(positions.size());
  Eigen::MatrixXd sub(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      sub(i, j) = correlation_(positions[static_cast<std::size_t>(i)],
                               positions[static_cast<std::size_t>(j)]);
    }
  }
  return GaussianCopula(std::move(sub));
}

std::map<Hyperedge, ClusterDensity> gaussian_cluster_densities(const JunctionTree& tree,
                                                               const Eigen::MatrixXd& correlation) {
  const GaussianCopula full(correlation);
  if (full.dimension() != static_cast<Eigen::Index>(tree.vertices().size())) {
    throw InputError("correlation matrix dimension does not match the tree");
  }
  std::map<Hyperedge, ClusterDensity> out;
  auto add = [&](const Hyperedge& set) {
    if (set.empty() || out.contains(set)) return;
    std::vector<Eigen::Index> pos;
    for (Vertex v : set) pos.push_back(static_cast<Eigen::Index>(tree.vertices().index_of(v)));
    out.emplace(set, [g = full.marginal(pos)](std::span<const double> sub) {
      return std::exp(g.log_density(sub));
    });
  };
  for (const auto& c : tree.clusters()) add(c);
  for (const auto& e : tree.edges()) add(e.separator);
  return out;
}

}  // namespace cherryvine
