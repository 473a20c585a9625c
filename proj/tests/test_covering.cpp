#include "lipext/covering.hpp"
#include "lipext/harness.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace lipext;

namespace {

PointSet line(std::initializer_list<double> xs) {
  Matrix m(1, static_cast<Index>(xs.size()));
  Index k = 0;
  for (double x : xs) m(0, k++) = x;
  return PointSet(AmbientSpace(1), m);
}

PointSet cloud(Index d, Index n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(d, n);
  for (Index i = 0; i < n; ++i) m.col(i) = rng.uniform_vector(d, 0.0, 1.0);
  return PointSet(AmbientSpace(d), m);
}

Vector scalar(double v) {
  Vector y(1);
  y << v;
  return y;
}

// All cells with positive gauge by scanning every center of every net with the reference gauge.
std::vector<CellGauge> brute_cells(const Vector& y, const CellComplex& complex) {
  std::vector<CellGauge> out;
  for (int n = complex.range().n_min; n <= complex.range().n_max; ++n) {
    for (Index c : complex.net(n).center_indices) {
      const double g = cell_gauge(y, complex.cell(n, c), complex.points());
      if (g > 0.0) out.push_back({n, c, g});
    }
  }
  return out;
}

}  // namespace

TEST(GreedyNet, Examples) {
  EXPECT_EQ(greedy_net(line({0.4}), 0.1).center_indices, std::vector<Index>{0});
  const PointSet X = line({0.0, 0.5, 1.0, 1.5, 2.0});
  const Net net = greedy_net(X, 0.6);
  EXPECT_EQ(net.center_indices, (std::vector<Index>{0, 3}));
  EXPECT_TRUE(is_valid_net(X, net));
  const Net dyadic = greedy_net(X, -1);
  EXPECT_EQ(dyadic.scale, -1);
  EXPECT_EQ(dyadic.radius, 0.5);
}

TEST(GreedyNet, DisjointAndCoveringOnRandomSets) {
  Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const PointSet X = cloud(1 + static_cast<Index>(t % 3), 5 + static_cast<Index>(rng.below(60)), 1000 + t);
    const double r = rng.uniform(0.01, 0.5);
    const Net net = greedy_net(X, r);
    // Independent check of both properties.
    for (std::size_t a = 0; a < net.center_indices.size(); ++a)
      for (std::size_t b = a + 1; b < net.center_indices.size(); ++b)
        EXPECT_GE(dist(X, net.center_indices[a], net.center_indices[b]), 2.0 * r);
    for (Index z = 0; z < X.size(); ++z) {
      double best = std::numeric_limits<double>::infinity();
      for (Index c : net.center_indices) best = std::min(best, dist(X, c, z));
      EXPECT_LT(best, 2.0 * r);
    }
    EXPECT_TRUE(is_valid_net(X, net));
  }
}

TEST(GreedyNet, InvalidNetIsRejected) {
  const PointSet X = line({0.0, 0.5, 1.0, 1.5, 2.0});
  Net net{0, 0.6, {0, 1}};
  EXPECT_FALSE(is_valid_net(X, net));
  net.center_indices = {0};
  EXPECT_FALSE(is_valid_net(X, net));
}

TEST(ScaleRange, Examples) {
  const PointSet X = line({0.0});
  const std::vector<Vector> at_one{scalar(1.0), scalar(-1.0)};
  const ScaleRange r = scale_range(X, at_one);
  EXPECT_LE(r.n_min, -2);
  EXPECT_GE(r.n_max, 2);
  const std::vector<Vector> on_set{scalar(0.0)};
  EXPECT_TRUE(scale_range(X, on_set).empty());
  const ScaleRange wide = scale_range_for(0.1, 10.0);
  EXPECT_LE(wide.n_min, -6);
  EXPECT_GE(wide.n_max, 6);
}

TEST(ScaleRange, WindowsContainTheActiveScales) {
  for (double D : {1e-3, 0.3, 1.0, 7.5}) {
    const ScaleRange lip = lip_scales(D);
    for (int n = lip.n_min; n <= lip.n_max; ++n) {
      EXPECT_LT(std::ldexp(1.0, n - 1), D);
      EXPECT_LT(D, 2.5 * std::ldexp(1.0, n));
    }
    const ScaleRange c1 = c1_scales(D);
    EXPECT_LE(std::ldexp(1.0, c1.n_min - 1), D);
    EXPECT_LE(D, 24.0 * std::ldexp(1.0, c1.n_min));
    EXPECT_GT(std::ldexp(1.0, c1.n_max), D / 24.0);
  }
}

TEST(CellGauge, Examples) {
  const PointSet X = line({0.0, 5.0});
  const int n = 0;
  const WhitneyCell cell{n, 0, {}};
  // dist(y,X) = 2^n with x_0 the unique nearest center: every min-term is at least 2^{n−1}.
  EXPECT_DOUBLE_EQ(cell_gauge(scalar(1.0), cell, X), 0.5);
  EXPECT_EQ(cell_gauge(scalar(0.5), cell, X), 0.0);
  EXPECT_EQ(cell_gauge(scalar(0.25), cell, X), 0.0);
}

TEST(CellGauge, IsOneLipschitz) {
  const PointSet X = cloud(2, 30, 7);
  const std::vector<Vector> probe{Vector::Constant(2, 2.0), Vector::Constant(2, -1.0)};
  const CellComplex complex(X, scale_range(X, probe));
  Rng rng(8);
  for (int t = 0; t < 10000; ++t) {
    const Vector y = rng.uniform_vector(2, -0.5, 1.5);
    const Vector y2 = y + rng.uniform(0.0, 0.05) * rng.direction(2, 2.0);
    const int n = complex.range().n_min + static_cast<int>(rng.below(static_cast<std::uint64_t>(
                                               complex.range().n_max - complex.range().n_min + 1)));
    const auto& centers = complex.net(n).center_indices;
    const WhitneyCell cell = complex.cell(n, centers[rng.below(centers.size())]);
    EXPECT_LE(std::abs(cell_gauge(y, cell, X) - cell_gauge(y2, cell, X)), dist(X.space(), y, y2) * (1 + 1e-12) + 1e-15);
  }
}

TEST(LocateCells, MatchesReferenceScan) {
  const PointSet X = cloud(2, 40, 31);
  Rng rng(32);
  std::vector<Vector> queries;
  for (int t = 0; t < 300; ++t) queries.push_back(rng.uniform_vector(2, -0.25, 1.25));
  const CellComplex complex(X, scale_range(X, queries));
  for (const Vector& y : queries) {
    const CellLookup look = locate_cells(y, complex);
    const auto brute = brute_cells(y, complex);
    ASSERT_EQ(look.cells.size(), brute.size());
    for (std::size_t k = 0; k < brute.size(); ++k) {
      const auto it = std::find_if(look.cells.begin(), look.cells.end(), [&](const CellGauge& c) {
        return c.scale == brute[k].scale && c.center == brute[k].center;
      });
      ASSERT_NE(it, look.cells.end());
      EXPECT_NEAR(it->gauge, brute[k].gauge, 1e-14);
    }
  }
}

TEST(LocateCells, OnSetMarker) {
  const PointSet X = line({0.0, 1.0});
  const std::vector<Vector> probe{scalar(0.5)};
  const CellComplex complex(X, scale_range(X, probe));
  const CellLookup look = locate_cells(scalar(1.0), complex);
  EXPECT_TRUE(look.on_set);
  EXPECT_EQ(look.set_index, 1);
  EXPECT_TRUE(look.cells.empty());
}

TEST(LocateCells, CoveringLowerBound) {
  for (Index d = 1; d <= 3; ++d) {
    const PointSet X = generate_space({Family::Grid, d, 5, 0, 2.0});
    Rng rng(40 + static_cast<std::uint64_t>(d));
    const auto queries = sample_queries(X, 10000 / static_cast<std::size_t>(d), rng);
    const CellComplex complex(X, scale_range(X, queries));
    for (const Vector& y : queries) {
      const CellLookup look = locate_cells(y, complex);
      double gmax = 0.0;
      for (const auto& c : look.cells) gmax = std::max(gmax, c.gauge);
      ASSERT_GE(gmax, look.dist_to_set / 4.0);
    }
  }
}

TEST(LocateCells, PositiveGaugeStaysNearTheQuery) {
  const PointSet X = cloud(2, 60, 41);
  Rng rng(42);
  const auto queries = sample_queries(X, 2000, rng);
  const CellComplex complex(X, scale_range(X, queries));
  for (const Vector& y : queries) {
    const CellLookup look = locate_cells(y, complex);
    for (const auto& c : look.cells) EXPECT_LT(dist(X.space(), y, X.point(c.center)), 16.0 * look.dist_to_set);
  }
}

TEST(LocateCells, OutOfRangeThrows) {
  const PointSet X = line({0.0, 1.0});
  const CellComplex complex(X, ScaleRange{-2, 0});
  EXPECT_THROW(locate_cells(scalar(40.0), complex), RangeError);
}

TEST(LocateCells, MultiplicityStaysBoundedUnderRefinement) {
  std::vector<std::size_t> worst;
  for (Index n : {4, 8, 16, 32}) {
    const PointSet X = generate_space({Family::Grid, 1, n, 0, 2.0});
    Rng rng(50);
    const auto queries = sample_queries(X, 3000, rng);
    const CellComplex complex(X, scale_range(X, queries));
    std::size_t m = 0;
    for (const Vector& y : queries) m = std::max(m, locate_cells(y, complex).cells.size());
    worst.push_back(m);
  }
  // Multiplicity depends on λ, not on |X|.
  for (std::size_t k = 1; k < worst.size(); ++k) EXPECT_LE(worst[k], worst.front() + 2);
}

TEST(CellComplex, NetsAreNestedScalesOfValidNets) {
  const PointSet X = cloud(2, 50, 61);
  const CellComplex complex(X, ScaleRange{-6, 1});
  for (int n = -6; n <= 1; ++n) EXPECT_TRUE(is_valid_net(X, complex.net(n)));
  EXPECT_THROW(complex.net(5), RangeError);
  EXPECT_THROW(complex.require(ScaleRange{-7, 0}), RangeError);
  const std::string js = nets_to_json(complex);
  EXPECT_NE(js.find("\"scale\":-6"), std::string::npos);
}
