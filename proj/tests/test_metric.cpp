#include "lipext/metric.hpp"
#include "lipext/random.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace lipext;

namespace {

PointSet line(std::initializer_list<double> xs) {
  Matrix m(1, static_cast<Index>(xs.size()));
  Index k = 0;
  for (double x : xs) m(0, k++) = x;
  return PointSet(AmbientSpace(1), m);
}

PointSet random_cloud(Index d, Index n, std::uint64_t seed, double p = 2.0) {
  Rng rng(seed);
  Matrix m(d, n);
  for (Index i = 0; i < n; ++i) m.col(i) = rng.uniform_vector(d, 0.0, 1.0);
  return PointSet(AmbientSpace(d, p), m);
}

// Smallest number of open r-balls centered at points of X covering S, by subset enumeration.
int brute_min_cover(const PointSet& X, const std::vector<Index>& S, double r) {
  const Index n = X.size();
  int best = static_cast<int>(S.size());
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const int size = std::popcount(mask);
    if (size >= best) continue;
    bool covers = true;
    for (Index z : S) {
      bool hit = false;
      for (Index c = 0; c < n && !hit; ++c) hit = ((mask >> c) & 1u) && dist(X, c, z) < r;
      covers = covers && hit;
    }
    if (covers) best = size;
  }
  return best;
}

// Candidate radii: every breakpoint of the combinatorics plus midpoints between them.
std::vector<double> dense_radii(std::vector<double> breaks) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> out = breaks;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) out.push_back(0.5 * (breaks[k] + breaks[k + 1]));
  out.push_back(2.0 * breaks.back());
  out.push_back(0.5 * breaks.front());
  return out;
}

int brute_doubling(const PointSet& X) {
  std::vector<double> breaks;
  for (Index a = 0; a < X.size(); ++a)
    for (Index b = a + 1; b < X.size(); ++b) {
      breaks.push_back(dist(X, a, b));
      breaks.push_back(dist(X, a, b) / 2.0);
    }
  int lambda = 1;
  for (Index x = 0; x < X.size(); ++x) {
    for (double r : dense_radii(breaks)) {
      std::vector<Index> ball;
      for (Index z = 0; z < X.size(); ++z)
        if (dist(X, x, z) < 2.0 * r) ball.push_back(z);
      lambda = std::max(lambda, brute_min_cover(X, ball, r));
    }
  }
  return lambda;
}

// Largest family of pairwise disjoint X-balls B(c, εr) contained in B(x0, r), by subset enumeration.
int brute_capacity(const PointSet& X, double eps) {
  std::vector<double> breaks;
  for (Index a = 0; a < X.size(); ++a)
    for (Index b = a + 1; b < X.size(); ++b) {
      breaks.push_back(dist(X, a, b));
      breaks.push_back(dist(X, a, b) / eps);
    }
  int kappa = 1;
  const Index n = X.size();
  for (Index x0 = 0; x0 < n; ++x0) {
    for (double r : dense_radii(breaks)) {
      for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        const int size = std::popcount(mask);
        if (size <= kappa) continue;
        bool ok = true;
        for (Index z = 0; z < n && ok; ++z) {
          int owners = 0;
          for (Index c = 0; c < n; ++c) {
            if (!((mask >> c) & 1u) || !(dist(X, c, z) < eps * r)) continue;
            ++owners;
            ok = ok && dist(X, x0, z) < r;
          }
          ok = ok && owners <= 1;
        }
        if (ok) kappa = size;
      }
    }
  }
  return kappa;
}

}  // namespace

TEST(Distance, Examples) {
  const AmbientSpace line1(1), plane(2);
  Vector a(1), b(1);
  a << 0.0;
  b << 3.0;
  EXPECT_EQ(dist(line1, a, a), 0.0);
  EXPECT_EQ(dist(line1, a, b), 3.0);
  Vector u(2), v(2);
  u << 0.0, 0.0;
  v << 3.0, 4.0;
  EXPECT_DOUBLE_EQ(dist(plane, u, v), 5.0);
  EXPECT_NEAR(dist(AmbientSpace(2, 1.0 + 1e-12), u, v), 7.0, 1e-9);
  EXPECT_THROW(dist(plane, a, v), DataError);
}

TEST(Distance, PNormMatchesDefinition) {
  Rng rng(3);
  for (double p : {1.5, 2.0, 3.0, 7.0}) {
    for (int t = 0; t < 50; ++t) {
      const Vector v = rng.uniform_vector(4, -2.0, 2.0);
      const double direct = std::pow(v.cwiseAbs().array().pow(p).sum(), 1.0 / p);
      EXPECT_NEAR(p_norm(v, p), direct, 1e-13 * direct);
    }
  }
}

TEST(Distance, TriangleInequality) {
  Rng rng(4);
  const AmbientSpace space(3, 3.0);
  for (int t = 0; t < 1000; ++t) {
    const Vector a = rng.uniform_vector(3, -1, 1), b = rng.uniform_vector(3, -1, 1), c = rng.uniform_vector(3, -1, 1);
    EXPECT_LE(dist(space, a, c), dist(space, a, b) + dist(space, b, c) + 1e-15);
  }
}

TEST(Distance, DualNormPairing) {
  // |c·v| ≤ ‖c‖_q ‖v‖_p, with equality at v = ∇‖·‖_p direction of the dual.
  Rng rng(5);
  for (double p : {1.5, 2.0, 4.0}) {
    for (int t = 0; t < 200; ++t) {
      const Vector c = rng.uniform_vector(3, -1, 1), v = rng.uniform_vector(3, -1, 1);
      EXPECT_LE(std::abs(c.dot(v)), dual_norm(c, p) * p_norm(v, p) * (1 + 1e-13));
      const Vector g = p_norm_gradient(v, p);
      EXPECT_NEAR(g.dot(v), p_norm(v, p), 1e-12);
      EXPECT_NEAR(dual_norm(g, p), 1.0, 1e-12);
    }
  }
}

TEST(DistToSet, Examples) {
  const PointSet X = line({0.0, 1.0});
  Vector y(1);
  y << 1.0;
  EXPECT_EQ(dist_to_set(y, X).distance, 0.0);
  EXPECT_EQ(dist_to_set(y, X).index, 1);
  y << 0.25;
  EXPECT_DOUBLE_EQ(dist_to_set(y, X).distance, 0.25);
  EXPECT_EQ(dist_to_set(y, X).index, 0);
  y << 0.5;
  EXPECT_DOUBLE_EQ(dist_to_set(y, X).distance, 0.5);
  EXPECT_EQ(dist_to_set(y, X).index, 0);
}

TEST(PointIndex, AgreesWithBruteForce) {
  for (double p : {1.5, 2.0, 5.0}) {
    const PointSet X = random_cloud(3, 300, 11, p);
    const PointIndex index(X);
    Rng rng(12);
    for (int t = 0; t < 500; ++t) {
      const Vector y = rng.uniform_vector(3, -0.5, 1.5);
      const Nearest a = dist_to_set(y, X), b = index.nearest(y);
      EXPECT_EQ(a.index, b.index);
      EXPECT_EQ(a.distance, b.distance);
      const double r = rng.uniform(0.0, 0.6);
      std::vector<Index> brute;
      for (Index i = 0; i < X.size(); ++i)
        if (dist(X.space(), y, X.point(i)) < r) brute.push_back(i);
      const auto within = index.within(y, r);
      ASSERT_EQ(within.size(), brute.size());
      for (std::size_t k = 0; k < brute.size(); ++k) EXPECT_EQ(within[k].first, brute[k]);
    }
  }
}

TEST(PointIndex, TiesGoToLowestIndex) {
  const PointSet X = line({2.0, 0.0, 1.0});
  const PointIndex index(X);
  Vector y(1);
  y << 0.5;
  EXPECT_EQ(index.nearest(y).index, 1);
  y << 1.5;
  EXPECT_EQ(index.nearest(y).index, 0);
  EXPECT_THROW(line({0.0, 1.0, 0.0}), DataError);
}

TEST(Separation, Basics) {
  EXPECT_TRUE(std::isinf(min_separation(line({4.0}))));
  EXPECT_DOUBLE_EQ(min_separation(line({0.0, 1.0, 1.25, 3.0})), 0.25);
  const auto d = pairwise_distances(line({0.0, 1.0, 2.0}));
  EXPECT_EQ(d, (std::vector<double>{1.0, 2.0}));
}

TEST(Doubling, Examples) {
  EXPECT_EQ(estimate_doubling(line({0.3})).lambda_hat, 1);
  EXPECT_LE(estimate_doubling(line({0.0, 1.0})).lambda_hat, 2);
  DoublingOptions exact;
  exact.exhaustive = true;
  EXPECT_LE(estimate_doubling(line({0.0, 1.0}), exact).lambda_hat, 2);
}

TEST(Doubling, ExhaustiveMatchesSubsetOracle) {
  PointSet grid8 = line({0, 1.0 / 7, 2.0 / 7, 3.0 / 7, 4.0 / 7, 5.0 / 7, 6.0 / 7, 1});
  DoublingOptions exact;
  exact.exhaustive = true;
  const DoublingEstimate est = estimate_doubling(grid8, exact);
  EXPECT_TRUE(est.exact);
  EXPECT_EQ(est.lambda_hat, brute_doubling(grid8));
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const PointSet X = random_cloud(1 + static_cast<Index>(seed % 3), 3 + static_cast<Index>(seed % 5), 100 + seed);
    EXPECT_EQ(estimate_doubling(X, exact).lambda_hat, brute_doubling(X)) << "seed " << seed;
  }
}

TEST(Doubling, SampledIsALowerBoundOfExact) {
  DoublingOptions exact;
  exact.exhaustive = true;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const PointSet X = random_cloud(2, 8, 200 + seed);
    EXPECT_LE(estimate_doubling(X).lambda_hat, estimate_doubling(X, exact).lambda_hat + 1);
  }
}

TEST(Capacity, Examples) {
  EXPECT_EQ(estimate_capacity(line({1.0}), 0.2).kappa_hat, 1);
  CapacityOptions exact;
  exact.exhaustive = true;
  const PointSet X = line({0.0, 1.0, 2.0});
  const CapacityEstimate est = estimate_capacity(X, 0.2, exact);
  EXPECT_EQ(est.kappa_hat, brute_capacity(X, 0.2));
  EXPECT_TRUE(est.exact);
  EXPECT_TRUE(is_valid_packing(X, est.witness_center, est.witness_radius, 0.2, est.witness_packing));
  EXPECT_EQ(static_cast<int>(est.witness_packing.size()), est.kappa_hat);
  EXPECT_THROW(estimate_capacity(X, 0.0), DataError);
  EXPECT_THROW(estimate_capacity(X, 1.5), DataError);
}

TEST(Capacity, ExhaustiveMatchesSubsetOracle) {
  CapacityOptions exact;
  exact.exhaustive = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PointSet X = random_cloud(1 + static_cast<Index>(seed % 2), 3 + static_cast<Index>(seed % 4), 300 + seed);
    for (double eps : {1.0, 0.5, 0.2}) {
      const CapacityEstimate est = estimate_capacity(X, eps, exact);
      EXPECT_EQ(est.kappa_hat, brute_capacity(X, eps)) << "seed " << seed << " eps " << eps;
      EXPECT_TRUE(is_valid_packing(X, est.witness_center, est.witness_radius, eps, est.witness_packing));
    }
  }
}

TEST(Capacity, DoublingBoundedByCapacityAtOneFifth) {
  DoublingOptions dex;
  dex.exhaustive = true;
  CapacityOptions cex;
  cex.exhaustive = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PointSet X = random_cloud(2, 6, 400 + seed);
    EXPECT_LE(estimate_doubling(X, dex).lambda_hat, estimate_capacity(X, 0.2, cex).kappa_hat);
  }
}

TEST(Capacity, BudgetExhaustionIsFlaggedPartial) {
  CapacityOptions tiny;
  tiny.node_budget = 1;
  const CapacityEstimate est = estimate_capacity(random_cloud(2, 40, 9), 0.2, tiny);
  EXPECT_TRUE(est.partial);
  EXPECT_FALSE(est.exact);
  EXPECT_GE(est.kappa_hat, 1);
}

TEST(Slope, Examples) {
  const AmbientSpace space(1);
  const std::vector<double> radii{1e-3, 1e-5, 1e-7};
  const std::vector<Vector> dirs{Vector::Ones(1)};
  Vector y(1);
  y << 0.7;
  EXPECT_EQ(slope_estimate([](const Vector&) { return std::optional<double>(2.0); }, space, y, radii, dirs).value, 0.0);
  // F(y) = 3y: the difference-quotient oracle gives 3 up to rounding.
  const SlopeReport lin = slope_estimate([](const Vector& z) { return std::optional<double>(3.0 * z(0)); }, space, y,
                                         radii, dirs);
  EXPECT_NEAR(lin.value, 3.0, 1e-7);
  const AmbientSpace plane(2);
  Vector q(2);
  q << 0.3, -0.4;
  const SlopeReport norm = slope_estimate([](const Vector& z) { return std::optional<double>(z.norm()); }, plane, q,
                                          radii, std::vector<Vector>{q, Vector::Unit(2, 0)});
  EXPECT_NEAR(norm.value, 1.0, 1e-6);
  const SlopeReport holes = slope_estimate(
      [](const Vector& z) { return z(0) > 0.7 ? std::nullopt : std::optional<double>(z(0)); }, space, y, radii, dirs);
  EXPECT_EQ(holes.skipped, radii.size());
}
