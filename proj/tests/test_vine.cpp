#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "cherryvine/error.hpp"
#include "cherryvine/junction_copula.hpp"
#include "cherryvine/vine.hpp"
#include "oracles.hpp"

using namespace cherryvine;

namespace {

const std::vector<Family> kAllFamilies{Family::Independence, Family::Gaussian, Family::Clayton,
                                       Family::Gumbel, Family::Frank};
const std::vector<Family> kGaussianOnly{Family::Gaussian};

CherryVineStructure path3() {
  const CherryTree t2(2, JunctionTree(VertexSet::range(3), {{1, 2}, {2, 3}},
                                      std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}}));
  return CherryVineStructure(VertexSet::range(3), {{1, 2}, {2, 3}}, {t2});
}

Eigen::MatrixXd sub_correlation(const Eigen::MatrixXd& r, const Hyperedge& set) {
  const auto m = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      out(i, j) = r(set[static_cast<std::size_t>(i)] - 1, set[static_cast<std::size_t>(j)] - 1);
    }
  }
  return out;
}

// Cluster and separator densities evaluated by the oracle's Gaussian formula.
std::map<Hyperedge, ClusterDensity> oracle_gaussian_densities(const JunctionTree& jt,
                                                              const Eigen::MatrixXd& r) {
  std::map<Hyperedge, ClusterDensity> out;
  auto add = [&](const Hyperedge& set) {
    const Eigen::MatrixXd sub = sub_correlation(r, set);
    out[set] = [sub](std::span<const double> u) {
      return std::exp(oracle::gaussian_copula_log_density(sub, u));
    };
  };
  for (const auto& c : jt.clusters()) add(c);
  for (const auto& e : jt.edges()) {
    if (!e.separator.empty()) add(e.separator);
  }
  return out;
}

std::vector<PairLabel> labels_of(const CherryVineStructure& s, int level) {
  const auto span = s.labels(level);
  return {span.begin(), span.end()};
}

}  // namespace

TEST(BuildCherryVine, ThreeVariablePath) {
  const auto s = path3();
  EXPECT_EQ(s.level_count(), 2);
  ASSERT_EQ(s.labels(2).size(), 1u);
  EXPECT_EQ(s.labels(2)[0], PairLabel(1, 3, Hyperedge{2}));
  EXPECT_EQ(s.labels(1)[0], PairLabel(1, 2, Hyperedge{}));
}

TEST(BuildCherryVine, FourVariableDVine) {
  const auto s = d_vine_structure(4);
  EXPECT_EQ(labels_of(s, 2),
            (std::vector<PairLabel>{PairLabel(1, 3, Hyperedge{2}), PairLabel(2, 4, Hyperedge{3})}));
  EXPECT_EQ(labels_of(s, 3), (std::vector<PairLabel>{PairLabel(1, 4, Hyperedge{2, 3})}));
}

TEST(BuildCherryVine, CVineLabels) {
  const auto s = c_vine_structure(4);
  for (const auto& l : s.labels(1)) EXPECT_EQ(l.a, 1);
  for (const auto& l : s.labels(2)) EXPECT_EQ(l.given, Hyperedge{1});
  EXPECT_EQ(labels_of(s, 3), (std::vector<PairLabel>{PairLabel(3, 4, Hyperedge{1, 2})}));
}

TEST(BuildCherryVine, SecondTreeMustMatchFirstTreeEdges) {
  const CherryTree t2(2, JunctionTree(VertexSet::range(3), {{1, 2}, {1, 3}},
                                      std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}}));
  EXPECT_THROW(CherryVineStructure(VertexSet::range(3), {{1, 2}, {2, 3}}, {t2}), DomainError);
}

TEST(BuildCherryVine, ClustersMustBeUnionsOfLinkedClusters) {
  // Tree 2 is the path {1,2}-{2,3}-{3,4}; {1,2,4} is not a union of linked clusters.
  const auto vertices = VertexSet::range(4);
  const CherryTree t2(2, JunctionTree(vertices, {{1, 2}, {2, 3}, {3, 4}},
                                      std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}}));
  const CherryTree bad(3, JunctionTree(vertices, {{1, 2, 4}, {2, 3, 4}},
                                       std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}}));
  EXPECT_THROW(CherryVineStructure(vertices, {{1, 2}, {2, 3}, {3, 4}}, {t2, bad}), DomainError);
}

TEST(BuildCherryVine, RejectsWrongTreeCounts) {
  EXPECT_THROW(CherryVineStructure(VertexSet::range(3), {{1, 2}, {2, 3}}, {}), DomainError);
  EXPECT_THROW(CherryVineStructure(VertexSet::range(3), {{1, 2}}, {}), DomainError);
  EXPECT_THROW(CherryVineStructure(VertexSet::range(1), {}, {}), DomainError);
}

TEST(BuildCherryVine, RandomStructuresHaveAllLinks) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 7;
    const auto s = oracle::random_vine_structure(rng, d);
    EXPECT_EQ(static_cast<int>(s.all_labels().size()), d * (d - 1) / 2);
    for (int level = 1; level <= s.level_count(); ++level) {
      EXPECT_EQ(static_cast<int>(s.labels(level).size()), d - level);
      for (const auto& l : s.labels(level)) {
        EXPECT_EQ(l.level(), level);
        EXPECT_LT(l.a, l.b);
      }
    }
  }
}

TEST(LogDensity, IndependenceIsZero) {
  std::mt19937_64 rng(1);
  for (int d = 2; d <= 6; ++d) {
    const auto m = VineModel::independence(oracle::random_vine_structure(rng, d));
    for (int i = 0; i < 10; ++i) {
      EXPECT_EQ(m.log_density(oracle::random_point(rng, static_cast<std::size_t>(d))), 0.0);
    }
  }
}

TEST(LogDensity, TwoVariablesIsPairCopula) {
  const BivariateCopula c(Family::Clayton, 1.7);
  const VineModel m(d_vine_structure(2), {{c}});
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto u = oracle::random_point(rng, 2);
    EXPECT_NEAR(m.log_density(u), c.log_density(u[0], u[1]), 1e-14);
  }
}

TEST(LogDensity, ThreeVariableGaussianMatchesOracle) {
  const VineModel m(path3(), {{BivariateCopula(Family::Gaussian, 0.5),
                               BivariateCopula(Family::Gaussian, 0.5)},
                              {BivariateCopula(Family::Gaussian, 0.0)}});
  Eigen::MatrixXd r(3, 3);
  r << 1, 0.5, 0.25, 0.5, 1, 0.5, 0.25, 0.5, 1;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto u = oracle::random_point(rng, 3);
    EXPECT_NEAR(m.log_density(u), oracle::gaussian_copula_log_density(r, u), 1e-6);
  }
}

TEST(LogDensity, GaussianClosureOnRandomStructures) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + trial % 4;
    const auto m = oracle::random_model(rng, oracle::random_vine_structure(rng, d), kGaussianOnly);
    const Eigen::MatrixXd r = oracle::implied_correlation(m);
    // Points drawn from the model: uniform points in the cube reach
    // conditional tails beyond double precision.
    const PointMatrix points = m.sample(20, static_cast<std::uint64_t>(trial));
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const std::vector<double> u(points.row(i).begin(), points.row(i).end());
      EXPECT_NEAR(m.log_density(u), oracle::gaussian_copula_log_density(r, u), 1e-6);
    }
  }
}

TEST(LogDensity, RejectsWrongDimension) {
  const auto m = VineModel::independence(d_vine_structure(3));
  EXPECT_THROW(m.log_density(std::vector<double>{0.5, 0.5}), InputError);
}

TEST(ConditionalCdf, Examples) {
  std::mt19937_64 rng(5);
  const auto structure = d_vine_structure(4);
  const auto indep = VineModel::independence(structure);
  const auto gauss = oracle::random_model(rng, structure, kGaussianOnly);
  const auto u = oracle::random_point(rng, 4);
  for (Vertex j = 1; j <= 4; ++j) EXPECT_EQ(gauss.conditional_cdf(j, {}, u), u[j - 1]);
  EXPECT_EQ(indep.conditional_cdf(1, {2}, u), u[0]);
  EXPECT_EQ(indep.conditional_cdf(1, {2, 3}, u), u[0]);
  EXPECT_EQ(indep.conditional_cdf(4, {2, 3}, u), u[3]);
  EXPECT_NEAR(gauss.conditional_cdf(1, {2}, u), gauss.copula(PairLabel(1, 2, {})).h(u[0], u[1]),
              1e-15);
  EXPECT_NEAR(gauss.conditional_cdf(2, {1}, u), gauss.copula(PairLabel(1, 2, {})).h(u[1], u[0]),
              1e-15);
  const auto& c13 = gauss.copula(PairLabel(1, 3, {2}));
  EXPECT_NEAR(gauss.conditional_cdf(1, {2, 3}, u),
              c13.h(gauss.conditional_cdf(1, {2}, u), gauss.conditional_cdf(3, {2}, u)), 1e-15);
  EXPECT_THROW(gauss.conditional_cdf(1, {3}, u), DomainError);
  EXPECT_THROW(gauss.conditional_cdf(1, {1}, u), DomainError);
}

TEST(ConditionalCdf, GaussianMatchesConditionalNormal) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 3 + trial % 3;
    const auto m = oracle::random_model(rng, oracle::random_vine_structure(rng, d), kGaussianOnly);
    const Eigen::MatrixXd r = oracle::implied_correlation(m);
    const auto u = oracle::random_point(rng, static_cast<std::size_t>(d));
    for (int level = 2; level <= m.structure().level_count(); ++level) {
      for (const auto& l : m.structure().labels(level)) {
        // F(a | S) for the Gaussian law is Phi((z_a - mu) / sigma).
        const Hyperedge& s = l.given;
        const auto n = static_cast<Eigen::Index>(s.size());
        Eigen::MatrixXd rss = sub_correlation(r, s);
        Eigen::VectorXd ras(n);
        Eigen::VectorXd zs(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          ras(i) = r(l.a - 1, s[static_cast<std::size_t>(i)] - 1);
          zs(i) = oracle::normal_quantile(u[static_cast<std::size_t>(s[static_cast<std::size_t>(i)] - 1)]);
        }
        const Eigen::VectorXd w = rss.fullPivLu().solve(ras);
        const double mu = w.dot(zs);
        const double sigma = std::sqrt(1.0 - ras.dot(w));
        const double za = oracle::normal_quantile(u[static_cast<std::size_t>(l.a - 1)]);
        EXPECT_NEAR(m.conditional_cdf(l.a, s, u), oracle::normal_cdf((za - mu) / sigma), 1e-8);
      }
    }
  }
}

TEST(JunctionTreeDensity, UnitEvaluatorsGiveZero) {
  const auto jt = build_junction_tree(VertexSet::range(5), {{1, 2, 3}, {2, 3, 4}, {2, 3, 5}});
  std::map<Hyperedge, ClusterDensity> ones;
  for (const auto& c : jt.clusters()) ones[c] = [](std::span<const double>) { return 1.0; };
  ones[Hyperedge{2, 3}] = [](std::span<const double>) { return 1.0; };
  const JunctionTreeCopulaModel model(jt, ones);
  EXPECT_EQ(junction_tree_log_density(model, std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5}), 0.0);
}

TEST(JunctionTreeDensity, MissingEvaluatorRejected) {
  const auto jt = build_junction_tree(VertexSet::range(3), {{1, 2}, {2, 3}});
  std::map<Hyperedge, ClusterDensity> partial;
  for (const auto& c : jt.clusters()) partial[c] = [](std::span<const double>) { return 1.0; };
  EXPECT_THROW(JunctionTreeCopulaModel(jt, partial), InputError);
}

TEST(JunctionTreeDensity, NonpositiveEvaluatorRejected) {
  const auto jt = build_junction_tree(VertexSet::range(2), {{1, 2}});
  std::map<Hyperedge, ClusterDensity> zero{
      {Hyperedge{1, 2}, [](std::span<const double>) { return 0.0; }}};
  const JunctionTreeCopulaModel model(jt, zero);
  EXPECT_THROW(model.log_density(std::vector<double>{0.5, 0.5}), DomainError);
}

TEST(JunctionTreeDensity, GaussianClustersMatchFullGaussian) {
  const auto jt = build_junction_tree(VertexSet::range(4), {{1, 2, 3}, {2, 3, 4}});
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd r = oracle::random_markov_correlation(jt, rng);
  EXPECT_NEAR(r.inverse()(0, 3), 0.0, 1e-12);
  const JunctionTreeCopulaModel oracle_model(jt, oracle_gaussian_densities(jt, r));
  const JunctionTreeCopulaModel library_model(jt, gaussian_cluster_densities(jt, r));
  for (int i = 0; i < 20; ++i) {
    const auto u = oracle::random_point(rng, 4);
    const double expected = oracle::gaussian_copula_log_density(r, u);
    EXPECT_NEAR(oracle_model.log_density(u), expected, 1e-6);
    EXPECT_NEAR(library_model.log_density(u), expected, 1e-6);
  }
}

TEST(JunctionTreeDensity, RandomMarkovGaussians) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto jt = oracle::random_junction_tree(rng, 7, 3);
    const Eigen::MatrixXd r = oracle::random_markov_correlation(jt, rng);
    const JunctionTreeCopulaModel model(jt, gaussian_cluster_densities(jt, r));
    for (int i = 0; i < 10; ++i) {
      const auto u = oracle::random_point(rng, jt.vertices().size());
      EXPECT_NEAR(model.log_density(u), oracle::gaussian_copula_log_density(r, u), 1e-6);
    }
  }
}

TEST(JunctionTreeDensity, SingleClusterIsItsDensity) {
  const auto jt = build_junction_tree(VertexSet::range(3), {{1, 2, 3}});
  Eigen::MatrixXd r(3, 3);
  r << 1, 0.3, -0.2, 0.3, 1, 0.4, -0.2, 0.4, 1;
  const JunctionTreeCopulaModel model(jt, oracle_gaussian_densities(jt, r));
  const std::vector<double> u{0.2, 0.6, 0.9};
  EXPECT_NEAR(model.log_density(u), oracle::gaussian_copula_log_density(r, u), 1e-12);
}

TEST(GaussianCopula, RejectsInvalidCorrelation) {
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 1.5, 1.5, 1;
  EXPECT_THROW(GaussianCopula{bad}, DomainError);
  Eigen::MatrixXd diag(2, 2);
  diag << 2, 0, 0, 1;
  EXPECT_THROW(GaussianCopula{diag}, DomainError);
}

TEST(Truncate, FullLevelLeavesModelUnchanged) {
  std::mt19937_64 rng(9);
  const auto m = oracle::random_model(rng, d_vine_structure(4), kAllFamilies);
  const auto t = truncate(m, 3);
  for (const auto& l : m.structure().all_labels()) EXPECT_EQ(t.copula(l), m.copula(l));
  EXPECT_THROW(truncate(m, 0), DomainError);
  EXPECT_THROW(truncate(m, 4), DomainError);
}

TEST(Truncate, LevelOneIsMarkovTree) {
  std::mt19937_64 rng(10);
  const auto m = oracle::random_model(rng, oracle::random_vine_structure(rng, 5), kAllFamilies);
  const auto t = truncate(m, 1);
  for (int i = 0; i < 20; ++i) {
    const auto u = oracle::random_point(rng, 5);
    double expected = 0.0;
    for (const auto& l : m.structure().labels(1)) {
      expected += m.copula(l).log_density(u[static_cast<std::size_t>(l.a - 1)],
                                           u[static_cast<std::size_t>(l.b - 1)]);
    }
    EXPECT_NEAR(t.log_density(u), expected, 1e-12);
  }
  for (int level = 2; level <= 4; ++level) {
    for (const auto& l : t.structure().labels(level)) EXPECT_TRUE(t.copula(l).is_independence());
  }
}

TEST(Truncate, DVineMatchesThirdOrderCherryTree) {
  std::mt19937_64 rng(11);
  const std::vector<Family> dependent{Family::Gaussian, Family::Clayton, Family::Gumbel,
                                      Family::Frank};
  const auto m = oracle::random_model(rng, d_vine_structure(4), dependent);
  const auto t = truncate(m, 2);
  const auto& c12 = m.copula(PairLabel(1, 2, {}));
  const auto& c23 = m.copula(PairLabel(2, 3, {}));
  const auto& c34 = m.copula(PairLabel(3, 4, {}));
  const auto& c13 = m.copula(PairLabel(1, 3, {2}));
  const auto& c24 = m.copula(PairLabel(2, 4, {3}));
  // c_123 c_234 / c_23, each written out from the pair copulas.
  auto c123 = [&](double u1, double u2, double u3) {
    return c12.density(u1, u2) * c23.density(u2, u3) * c13.density(c12.h(u1, u2), c23.h(u3, u2));
  };
  auto c234 = [&](double u2, double u3, double u4) {
    return c23.density(u2, u3) * c34.density(u3, u4) * c24.density(c23.h(u2, u3), c34.h(u4, u3));
  };
  const auto cherry = to_cherry_tree_copula(t, 2);
  ASSERT_EQ(cherry.tree().clusters().size(), 2u);
  EXPECT_EQ(cherry.tree().clusters()[0], (Hyperedge{1, 2, 3}));
  EXPECT_EQ(cherry.tree().clusters()[1], (Hyperedge{2, 3, 4}));
  EXPECT_EQ(cherry.tree().edges()[0].separator, (Hyperedge{2, 3}));
  for (int i = 0; i < 20; ++i) {
    const auto u = oracle::random_point(rng, 4);
    const double expected = std::log(c123(u[0], u[1], u[2])) + std::log(c234(u[1], u[2], u[3])) -
                            std::log(c23.density(u[1], u[2]));
    EXPECT_NEAR(t.log_density(u), expected, 1e-9);
    EXPECT_NEAR(cherry.log_density(u), expected, 1e-9);
  }
}

TEST(ToCherryTreeCopula, LevelOneOnPathUsesEdgeCopulas) {
  std::mt19937_64 rng(12);
  const auto m = oracle::random_model(rng, d_vine_structure(4), kAllFamilies);
  const auto cherry = to_cherry_tree_copula(truncate(m, 1), 1);
  ASSERT_EQ(cherry.tree().clusters().size(), 3u);
  EXPECT_TRUE(is_cherry_tree(cherry.tree(), 2));
  const auto u = oracle::random_point(rng, 4);
  for (const auto& l : m.structure().labels(1)) {
    const Hyperedge edge{l.a, l.b};
    ASSERT_TRUE(cherry.tree().find_cluster(edge));
    EXPECT_NEAR(cherry.log_density_of(edge, u),
                m.copula(l).log_density(u[static_cast<std::size_t>(l.a - 1)],
                                        u[static_cast<std::size_t>(l.b - 1)]),
                1e-12);
  }
}

TEST(ToCherryTreeCopula, FullLevelIsSingleCluster) {
  std::mt19937_64 rng(13);
  const auto m = oracle::random_model(rng, oracle::random_vine_structure(rng, 4), kAllFamilies);
  const auto cherry = to_cherry_tree_copula(m, 3);
  ASSERT_EQ(cherry.tree().clusters().size(), 1u);
  EXPECT_EQ(cherry.tree().clusters()[0], (Hyperedge{1, 2, 3, 4}));
  for (int i = 0; i < 20; ++i) {
    const auto u = oracle::random_point(rng, 4);
    EXPECT_NEAR(cherry.log_density(u), m.log_density(u), 1e-12);
  }
  EXPECT_THROW(to_cherry_tree_copula(m, 4), DomainError);
}

TEST(ToCherryTreeCopula, TruncationEquivalence) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 12; ++trial) {
    const int d = 3 + trial % 3;
    const auto m = oracle::random_model(rng, oracle::random_vine_structure(rng, d), kAllFamilies);
    for (int k = 1; k <= d - 1; ++k) {
      const auto t = truncate(m, k);
      const auto cherry = to_cherry_tree_copula(t, k);
      if (k + 1 < d) EXPECT_TRUE(is_cherry_tree(cherry.tree(), k + 1));
      for (int i = 0; i < 100; ++i) {
        const auto u = oracle::random_point(rng, static_cast<std::size_t>(d));
        EXPECT_NEAR(t.log_density(u), cherry.log_density(u), 1e-9) << "d=" << d << " k=" << k;
      }
    }
  }
}

TEST(SubVineDensity, GaussianMarginals) {
  std::mt19937_64 rng(15);
  const auto m = oracle::random_model(rng, oracle::random_vine_structure(rng, 5), kGaussianOnly);
  const Eigen::MatrixXd r = oracle::implied_correlation(m);
  const auto u = oracle::random_point(rng, 5);
  for (int level = 1; level <= m.structure().level_count(); ++level) {
    for (const auto& node : m.structure().tree(level).nodes) {
      const Eigen::MatrixXd sub = sub_correlation(r, node);
      std::vector<double> coords;
      for (Vertex v : node) coords.push_back(u[static_cast<std::size_t>(v - 1)]);
      const double expected =
          node.size() == 1 ? 0.0 : oracle::gaussian_copula_log_density(sub, coords);
      EXPECT_NEAR(m.sub_vine_log_density(node, u), expected, 1e-8) << node.to_string();
    }
  }
  EXPECT_THROW(m.sub_vine_log_density(Hyperedge{1, 2, 3, 4, 5, 6}, u), DomainError);
}

TEST(LiftCherryTreeCopula, AgreesPointwise) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + trial % 3;
    const int d = k + 2 + trial % 3;
    const CherryTree ct = oracle::random_cherry_tree(rng, d, k);
    const Eigen::MatrixXd r = oracle::random_markov_correlation(ct.tree(), rng);
    const JunctionTreeCopulaModel model(ct.tree(), gaussian_cluster_densities(ct.tree(), r));
    const auto lifted = lift_cherry_tree_copula(model);
    EXPECT_TRUE(is_cherry_tree(lifted.tree(), k + 1));
    for (int i = 0; i < 100; ++i) {
      const auto u = oracle::random_point(rng, static_cast<std::size_t>(d));
      EXPECT_NEAR(lifted.log_density(u), model.log_density(u), 1e-9);
    }
  }
}

TEST(LiftCherryTreeCopula, RejectsSingleCluster) {
  const auto jt = build_junction_tree(VertexSet::range(2), {{1, 2}});
  std::map<Hyperedge, ClusterDensity> dens{
      {Hyperedge{1, 2}, [](std::span<const double>) { return 1.0; }}};
  EXPECT_THROW(lift_cherry_tree_copula(JunctionTreeCopulaModel(jt, dens)), DomainError);
}

TEST(Normalization, TwoVariables) {
  std::mt19937_64 rng(17);
  for (Family f : {Family::Gaussian, Family::Clayton, Family::Gumbel, Family::Frank}) {
    const VineModel m(d_vine_structure(2), {{oracle::random_copula(rng, f, 0.6)}});
    const double mass = oracle::trapezoid_2d(
        [&](double x, double y) {
          const std::vector<double> u{oracle::normal_cdf(x), oracle::normal_cdf(y)};
          return std::exp(m.log_density(u)) * oracle::normal_pdf(x) * oracle::normal_pdf(y);
        },
        -8.5, 8.5, 201);
    EXPECT_NEAR(mass, 1.0, 1e-2) << family_name(f);
  }
}

TEST(Sample, IndependenceModel) {
  const auto m = VineModel::independence(d_vine_structure(4));
  const std::size_t n = 10000;
  const PointMatrix x = m.sample(n, 1);
  ASSERT_EQ(x.rows(), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < 4; ++i) {
    const Eigen::VectorXd ci = x.col(i);
    EXPECT_NEAR(ci.mean(), 0.5, 0.015);
    for (Eigen::Index j = i + 1; j < 4; ++j) {
      const Eigen::VectorXd cj = x.col(j);
      EXPECT_LE(std::abs(kendall_tau(std::span<const double>(ci.data(), n),
                                     std::span<const double>(cj.data(), n))),
                3.0 / std::sqrt(static_cast<double>(n)));
    }
  }
}

TEST(Sample, GaussianPairTau) {
  const VineModel m(d_vine_structure(2), {{BivariateCopula(Family::Gaussian, 0.8)}});
  const PointMatrix x = m.sample(10000, 2);
  const Eigen::VectorXd a = x.col(0);
  const Eigen::VectorXd b = x.col(1);
  EXPECT_NEAR(kendall_tau(std::span<const double>(a.data(), 10000),
                          std::span<const double>(b.data(), 10000)),
              2.0 / std::numbers::pi * std::asin(0.8), 0.03);
}

TEST(Sample, DeterministicAndPartitionable) {
  std::mt19937_64 rng(18);
  const auto m = oracle::random_model(rng, oracle::random_vine_structure(rng, 5), kAllFamilies);
  const PointMatrix a = m.sample(200, 42);
  const PointMatrix b = m.sample(200, 42);
  EXPECT_EQ(a, b);
  const PointMatrix head = m.sample(50, 42);
  EXPECT_EQ(PointMatrix(a.topRows(50)), head);
  EXPECT_NE(m.sample(200, 43), a);
  EXPECT_THROW(m.sample(0, 1), InputError);
  EXPECT_TRUE((a.array() > 0.0).all() && (a.array() < 1.0).all());
}

TEST(Sample, ReproducesPairDependence) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = oracle::random_model(rng, oracle::random_vine_structure(rng, 4), kAllFamilies);
    const std::size_t n = 5000;
    const PointMatrix x = m.sample(n, 7 + static_cast<std::uint64_t>(trial));
    for (const auto& l : m.structure().labels(1)) {
      const Eigen::VectorXd a = x.col(l.a - 1);
      const Eigen::VectorXd b = x.col(l.b - 1);
      EXPECT_NEAR(kendall_tau(std::span<const double>(a.data(), n),
                              std::span<const double>(b.data(), n)),
                  m.copula(l).tau(), 0.04)
          << m.copula(l).to_string();
    }
  }
}

TEST(Sample, DensityAverageAgreesAcrossRuns) {
  std::mt19937_64 rng(20);
  const auto m = oracle::random_model(rng, oracle::random_vine_structure(rng, 4), kAllFamilies);
  auto mean_and_se = [&](std::uint64_t seed) {
    const PointMatrix x = m.sample(10000, seed);
    std::vector<double> values(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      values[static_cast<std::size_t>(i)] =
          m.log_density(std::span<const double>(x.row(i).data(), 4));
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::pair{mean, std::sqrt(ss / (values.size() - 1) / values.size())};
  };
  const auto [m1, s1] = mean_and_se(1);
  const auto [m2, s2] = mean_and_se(2);
  EXPECT_LE(std::abs(m1 - m2), 3.0 * std::hypot(s1, s2));
  EXPECT_GE(m1, -3.0 * s1);  // Expected log density is a KL divergence to independence.
}
