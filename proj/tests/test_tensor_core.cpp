#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <vector>

#include "ntc/io.hpp"
#include "ntc/observed.hpp"
#include "ntc/shape.hpp"
#include "ntc/vertex.hpp"
#include "test_util.hpp"

using namespace ntc;

TEST(Shape, Basics) {
  Shape s({4, 3, 2});
  EXPECT_EQ(s.order(), 3);
  EXPECT_EQ(s.rho(), 9);
  EXPECT_EQ(s.pi(), 24);
  EXPECT_EQ(s.to_string(), "4x3x2");
  EXPECT_THROW(Shape(std::vector<int>{}), std::invalid_argument);
  EXPECT_THROW(Shape({3, 0}), std::invalid_argument);
}

TEST(Shape, LinearIndexRoundTrip) {
  Shape s({4, 3, 2});
  std::vector<int> coords(3);
  for (long long lin = 0; lin < s.pi(); ++lin) {
    s.decode(lin, coords);
    EXPECT_EQ(s.linear_index(coords), lin);
  }
}

TEST(ObservedData, MultiplicityAndFirstAppearanceOrder) {
  Shape shape({2, 2});
  std::vector<Observation> samples = {
      {{0, 0}, 1.0}, {{0, 1}, 2.0}, {{0, 0}, 3.0}, {{1, 0}, 4.0}};
  ObservedData data(shape, samples);
  EXPECT_EQ(data.n(), 4);
  EXPECT_EQ(data.u(), 3);
  EXPECT_EQ(data.multiplicity(0), 2);
  EXPECT_EQ(data.multiplicity(1), 1);
  EXPECT_EQ(data.multiplicity(2), 1);
  // First appearance order.
  EXPECT_EQ(data.coord(0, 0), 0);
  EXPECT_EQ(data.coord(0, 1), 0);
  EXPECT_EQ(data.coord(1, 1), 1);
  EXPECT_EQ(data.coord(2, 0), 1);
  long long total = 0;
  for (int t = 0; t < data.u(); ++t) total += data.multiplicity(t);
  EXPECT_EQ(total, data.n());
}

TEST(ObservedData, RejectsBadSamples) {
  Shape shape({2, 2});
  EXPECT_THROW(ObservedData(shape, {{{0, 2}, 1.0}}), std::out_of_range);
  EXPECT_THROW(ObservedData(shape, {{{-1, 0}, 1.0}}), std::out_of_range);
  EXPECT_THROW(ObservedData(shape, {{{0}, 1.0}}), std::invalid_argument);
}

// U = {(1,1),(1,2),(2,1)} in 1-based terms; mode-1 lists are value 1 ->
// [0, 1] and value 2 -> [2].
TEST(PatternIndex, DirectGrouping) {
  Shape shape({2, 2});
  ObservedData data(shape, {{{0, 0}, 1.0}, {{0, 1}, 1.0}, {{1, 0}, 1.0}});
  PatternIndex idx = build_pattern_index(data);
  ASSERT_EQ(idx.order(), 2);
  EXPECT_EQ((std::vector<int>(idx.positions(0, 0).begin(),
                              idx.positions(0, 0).end())),
            (std::vector<int>{0, 1}));
  EXPECT_EQ((std::vector<int>(idx.positions(0, 1).begin(),
                              idx.positions(0, 1).end())),
            (std::vector<int>{2}));
  EXPECT_EQ((std::vector<int>(idx.positions(1, 0).begin(),
                              idx.positions(1, 0).end())),
            (std::vector<int>{0, 2}));
}

TEST(PatternIndex, EmptyData) {
  Shape shape({3, 2});
  ObservedData data(shape, {});
  PatternIndex idx = build_pattern_index(data);
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < shape.dim(k); ++j) {
      EXPECT_TRUE(idx.positions(k, j).empty());
    }
  }
}

// Brute-force grouping oracle: for every (k, j) scan U directly.
TEST(PatternIndex, MatchesBruteForceScan) {
  std::mt19937_64 rng(7);
  Shape shape({4, 3, 2});
  ObservedData data = ntc_test::random_data(shape, 10, rng);
  PatternIndex idx = build_pattern_index(data);
  for (int k = 0; k < shape.order(); ++k) {
    for (int j = 0; j < shape.dim(k); ++j) {
      std::vector<int> expected;
      for (int t = 0; t < data.u(); ++t) {
        if (data.coord(t, k) == j) expected.push_back(t);
      }
      EXPECT_EQ((std::vector<int>(idx.positions(k, j).begin(),
                                  idx.positions(k, j).end())),
                expected);
    }
  }
}

// Round-trip property: t in list(k, j) iff (U_t)_k == j, and the lists
// partition [u] per mode.
TEST(PatternIndex, RoundTripPartitionProperty) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    Shape shape({1 + static_cast<int>(uniform_below(rng, 5)),
                 1 + static_cast<int>(uniform_below(rng, 4)),
                 1 + static_cast<int>(uniform_below(rng, 3))});
    ObservedData data = ntc_test::random_data(
        shape, 1 + static_cast<int>(uniform_below(rng, 30)), rng);
    PatternIndex idx = build_pattern_index(data);
    for (int k = 0; k < shape.order(); ++k) {
      std::vector<int> seen(static_cast<std::size_t>(data.u()), 0);
      for (int j = 0; j < shape.dim(k); ++j) {
        for (int t : idx.positions(k, j)) {
          EXPECT_EQ(data.coord(t, k), j);
          ++seen[static_cast<std::size_t>(t)];
        }
      }
      for (int t = 0; t < data.u(); ++t) {
        EXPECT_EQ(seen[static_cast<std::size_t>(t)], 1);
      }
      for (int t = 0; t < data.u(); ++t) {
        EXPECT_EQ(idx.coord(k, t), data.coord(t, k));
      }
    }
  }
}

TEST(VertexValues, AllOnesGivesOnes) {
  Shape shape({3, 2});
  std::mt19937_64 rng(3);
  ObservedData data = ntc_test::random_data(shape, 5, rng);
  const auto values = vertex_values_on_u(all_ones_thetas(shape), data);
  for (double v : values) EXPECT_EQ(v, 1.0);
}

TEST(VertexValues, AnyZeroModeGivesZeros) {
  Shape shape({3, 2});
  std::mt19937_64 rng(4);
  ObservedData data = ntc_test::random_data(shape, 5, rng);
  ThetaSet thetas = all_ones_thetas(shape);
  thetas[1].assign(2, 0);
  for (double v : vertex_values_on_u(thetas, data)) EXPECT_EQ(v, 0.0);
}

// thetas = ([1,0],[0,1]) on 1-based U = {(1,1),(1,2),(2,2)} -> (0,1,0).
TEST(VertexValues, HandEnumeratedProducts) {
  Shape shape({2, 2});
  ObservedData data(shape, {{{0, 0}, 0.0}, {{0, 1}, 0.0}, {{1, 1}, 0.0}});
  ThetaSet thetas = {{1, 0}, {0, 1}};
  const auto values = vertex_values_on_u(thetas, data);
  EXPECT_EQ(values, (std::vector<double>{0.0, 1.0, 0.0}));
}

TEST(VertexValues, DimensionMismatchThrows) {
  Shape shape({2, 2});
  ObservedData data(shape, {{{0, 0}, 0.0}});
  ThetaSet bad = {{1, 0, 1}, {0, 1}};
  EXPECT_THROW(vertex_values_on_u(bad, data), std::invalid_argument);
}

// Vertex consistency: values recomputed from thetas are identical, and all
// entries are 0 or 1.
TEST(VertexValues, RandomConsistency) {
  std::mt19937_64 rng(11);
  Shape shape({4, 3, 2});
  for (int trial = 0; trial < 50; ++trial) {
    ObservedData data = ntc_test::random_data(shape, 20, rng);
    ThetaSet thetas = ntc_test::random_thetas(shape, rng);
    Vertex v = make_vertex(thetas, data);
    for (double x : v.values_on_u) {
      EXPECT_TRUE(x == 0.0 || x == 1.0);
    }
    EXPECT_EQ(v.values_on_u, vertex_values_on_u(v.thetas, data));
  }
}

TEST(ActiveSet, DenseAndSparseAgree) {
  std::mt19937_64 rng(13);
  Shape shape({4, 3, 2});
  ObservedData data = ntc_test::random_data(shape, 25, rng);
  ActiveSet dense(false, data.u());
  ActiveSet sparse(true, data.u());
  for (int j = 0; j < 5; ++j) {
    Vertex v = make_vertex(ntc_test::random_thetas(shape, rng), data);
    dense.add(v, 0.2);
    sparse.add(v, 0.2);
  }
  const auto w =
      ntc_test::random_vector(static_cast<std::size_t>(data.u()), rng, -1, 1);
  std::vector<double> pro_dense, pro_sparse;
  dense.pro(w, pro_dense);
  sparse.pro(w, pro_sparse);
  ASSERT_EQ(pro_dense.size(), pro_sparse.size());
  for (std::size_t j = 0; j < pro_dense.size(); ++j) {
    EXPECT_NEAR(pro_dense[j], pro_sparse[j], 1e-12);
  }
  const std::vector<double> coef = {0.1, 0.3, 0.2, 0.25, 0.15};
  std::vector<double> x_dense, x_sparse;
  dense.combine(coef, x_dense);
  sparse.combine(coef, x_sparse);
  for (std::size_t t = 0; t < x_dense.size(); ++t) {
    EXPECT_NEAR(x_dense[t], x_sparse[t], 1e-12);
  }
  const int found = dense.find(dense.vertex(3).thetas);
  EXPECT_EQ(found, 3);
  dense.remove(2);
  EXPECT_EQ(dense.size(), 4);
}

TEST(InstanceIo, RoundTripOneBased) {
  Shape shape({2, 3});
  std::vector<Observation> samples = {{{0, 2}, 1.5}, {{1, 0}, -2.0}};
  nlohmann::json j = instance_to_json(shape, samples);
  EXPECT_EQ(j["samples"][0]["x"], (std::vector<int>{1, 3}));
  LoadedInstance loaded = instance_from_json(j);
  EXPECT_EQ(loaded.shape.dims(), shape.dims());
  ASSERT_EQ(loaded.samples.size(), 2u);
  EXPECT_EQ(loaded.samples[0].index, (std::vector<int>{0, 2}));
  EXPECT_DOUBLE_EQ(loaded.samples[1].value, -2.0);
}

TEST(InstanceIo, RejectsOutOfRangeIndices) {
  nlohmann::json j;
  j["dims"] = {2, 2};
  j["samples"] = {{{"x", {1, 3}}, {"y", 0.5}}};
  EXPECT_THROW(instance_from_json(j), std::out_of_range);
  j["samples"] = {{{"x", {0, 1}}, {"y", 0.5}}};
  EXPECT_THROW(instance_from_json(j), std::out_of_range);
}
