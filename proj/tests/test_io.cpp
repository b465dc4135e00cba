#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cherryvine/error.hpp"
#include "cherryvine/io.hpp"
#include "oracles.hpp"

using namespace cherryvine;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(StructureIo, ParsesWithAndWithoutEdges) {
  std::istringstream plain(R"({"vertices":[1,2,3],"clusters":[[1,2],[2,3]]})");
  const auto a = parse_structure(plain);
  EXPECT_EQ(a.clusters.size(), 2u);
  EXPECT_FALSE(a.edges);
  EXPECT_EQ(to_junction_tree(a).edges().size(), 1u);
  std::istringstream with(R"({"vertices":[1,2,3],"clusters":[[1,2],[2,3]],"edges":[[0,1]]})");
  const auto b = parse_structure(with);
  ASSERT_TRUE(b.edges);
  EXPECT_EQ(b.edges->front(), (std::pair<std::size_t, std::size_t>{0, 1}));
}

TEST(StructureIo, RoundTrip) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto jt = oracle::random_junction_tree(rng, 9, 4);
    std::stringstream buffer;
    write_structure(buffer, jt);
    const auto back = to_junction_tree(parse_structure(buffer));
    EXPECT_EQ(back.vertices(), jt.vertices());
    EXPECT_EQ(std::vector<Hyperedge>(back.clusters().begin(), back.clusters().end()),
              std::vector<Hyperedge>(jt.clusters().begin(), jt.clusters().end()));
    EXPECT_EQ(back.edge_pairs(), jt.edge_pairs());
  }
}

TEST(StructureIo, Errors) {
  const std::string syntax =
      error_of([] {
        std::istringstream in("{\"vertices\": [1, 2],\n \"clusters\": [[1, 2]");
        parse_structure(in);
      });
  EXPECT_NE(syntax.find("line 2"), std::string::npos) << syntax;
  EXPECT_NE(syntax.find("column"), std::string::npos);
  EXPECT_NE(error_of([] {
              std::istringstream in(R"({"vertices":[1,2]})");
              parse_structure(in);
            }).find("clusters"),
            std::string::npos);
  EXPECT_THROW(
      {
        std::istringstream in(R"({"vertices":[1,2],"clusters":[[1,2]],"edges":[[0,3]]})");
        parse_structure(in);
      },
      InputError);
  EXPECT_THROW(
      {
        std::istringstream in(R"({"vertices":[1,1],"clusters":[[1]]})");
        parse_structure(in);
      },
      InputError);
  EXPECT_THROW(read_structure("/nonexistent/structure.json"), InputError);
}

TEST(ModelIo, RoundTripPreservesEveryCopula) {
  std::mt19937_64 rng(2);
  const std::vector<Family> families{Family::Independence, Family::Gaussian, Family::Clayton,
                                     Family::Gumbel, Family::Frank};
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = oracle::random_model(rng, oracle::random_vine_structure(rng, 2 + trial % 5),
                                        families);
    std::stringstream buffer;
    write_model(buffer, m);
    const auto back = parse_model(buffer);
    EXPECT_EQ(back.structure().all_labels(), m.structure().all_labels());
    for (const auto& l : m.structure().all_labels()) EXPECT_EQ(back.copula(l), m.copula(l));
    std::stringstream again;
    write_model(again, back);
    EXPECT_EQ(again.str(), buffer.str());
  }
}

TEST(ModelIo, Errors) {
  std::stringstream buffer;
  write_model(buffer, VineModel::independence(d_vine_structure(3)));
  const std::string text = buffer.str();
  std::string bad_family = text;
  bad_family.replace(bad_family.find("independence"), 12, "student");
  std::istringstream in(bad_family);
  EXPECT_THROW(parse_model(in), InputError);
  std::istringstream missing(R"({"vertices":[1,2],"trees":[{"clusters":[[1],[2]],"edges":[[0,1]]}],"pair_copulas":[]})");
  EXPECT_NE(error_of([&] { parse_model(missing); }).find("no copula"), std::string::npos);
}

TEST(CsvIo, RoundTripIsExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointMatrix values(25, 3);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) values(i, j) = unit(rng) * std::pow(10.0, j * 3 - 3);
  }
  std::stringstream buffer;
  write_csv(buffer, {"a", "b", "c"}, values);
  const auto table = parse_csv(buffer);
  EXPECT_EQ(table.header, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(table.values, values);
}

TEST(CsvIo, ErrorsNameRowAndColumn) {
  const std::string message = error_of([] {
    std::istringstream in("x,y\n1,2\n3,abc\n");
    parse_csv(in);
  });
  EXPECT_NE(message.find("row 2"), std::string::npos) << message;
  EXPECT_NE(message.find("column 2"), std::string::npos) << message;
  EXPECT_THROW(
      {
        std::istringstream in("x,y\n1,2,3\n");
        parse_csv(in);
      },
      InputError);
  EXPECT_THROW(
      {
        std::istringstream in("");
        parse_csv(in);
      },
      InputError);
  EXPECT_THROW(
      {
        std::istringstream in("x,y\n");
        parse_csv(in);
      },
      InputError);
}

TEST(CsvIo, ReadsFixture) {
  const auto table = read_csv(std::string(CHERRYVINE_TEST_DATA) + "/fixture.csv");
  EXPECT_EQ(table.values.rows(), 300);
  EXPECT_EQ(table.values.cols(), 4);
}
