#include "lipext/harness.hpp"
#include "lipext/partitions.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace lipext;

namespace {

PointSet line(std::initializer_list<double> xs) {
  Matrix m(1, static_cast<Index>(xs.size()));
  Index k = 0;
  for (double x : xs) m(0, k++) = x;
  return PointSet(AmbientSpace(1), m);
}

Vector scalar(double v) {
  Vector y(1);
  y << v;
  return y;
}

std::shared_ptr<const CellComplex> complex_for(const PointSet& X, std::span<const Vector> queries) {
  return std::make_shared<const CellComplex>(X, scale_range(X, queries));
}

// Independent re-implementation of the Lipschitz weights on the line, nets built by hand.
std::map<std::pair<int, Index>, double> line_lip_oracle(const std::vector<double>& xs, double y, double m,
                                                        int n_min, int n_max) {
  std::map<std::pair<int, Index>, double> g;
  double D = std::numeric_limits<double>::infinity();
  for (double x : xs) D = std::min(D, std::abs(y - x));
  double total = 0.0;
  for (int n = n_min; n <= n_max; ++n) {
    const double r = std::ldexp(1.0, n), h = r / 2;
    std::vector<Index> net;
    for (Index i = 0; i < static_cast<Index>(xs.size()); ++i) {
      bool far = true;
      for (Index c : net) far = far && std::abs(xs[c] - xs[i]) >= 2 * r;
      if (far) net.push_back(i);
    }
    for (Index i : net) {
      const double di = std::abs(y - xs[i]);
      double v = std::min({h, D - h, 5 * h - D, 9 * h - di});
      for (Index j : net)
        if (j != i && std::abs(xs[j] - xs[i]) <= 18 * r) v = std::min(v, h + 0.5 * (std::abs(y - xs[j]) - di));
      if (v > 0) {
        g[{n, i}] = std::pow(v, m);
        total += g[{n, i}];
      }
    }
  }
  for (auto& [key, v] : g) v /= total;
  return g;
}

}  // namespace

TEST(Exponents, Defaults) {
  EXPECT_DOUBLE_EQ(lip_exponent(1), 1.01);
  EXPECT_DOUBLE_EQ(lip_exponent(8), 3.0);
  EXPECT_DOUBLE_EQ(c1_exponent(1), std::log(4.0));
  EXPECT_NEAR(c1_exponent(2), std::log(4.0) + 6 * std::log(2.0), 1e-14);
}

TEST(LipPartition, MatchesLineOracle) {
  const std::vector<double> xs{0.0, 1.0, 1.3, 3.0};
  const PointSet X = line({0.0, 1.0, 1.3, 3.0});
  const std::vector<Vector> probes{scalar(-2.0), scalar(6.0), scalar(0.5)};
  const auto complex = complex_for(X, probes);
  for (double m : {1.01, 2.0, 3.5}) {
    const LipPartition P(complex, m);
    for (double y : {0.5, 0.25, -0.7, 2.2, 1.12, 4.5}) {
      const auto oracle = line_lip_oracle(xs, y, m, complex->range().n_min, complex->range().n_max);
      const auto got = eval_lip_partition(P, scalar(y));
      ASSERT_EQ(got.size(), oracle.size()) << "y = " << y;
      for (const auto& w : got) EXPECT_NEAR(w.weight, oracle.at({w.scale, w.center}), 1e-14);
    }
  }
}

TEST(LipPartition, SingleAndSymmetricCells) {
  const PointSet X = line({0.0});
  const std::vector<Vector> probes{scalar(1.0)};
  const LipPartition P(complex_for(X, probes), 1.01);
  // y = 1 is at distance 2^0: only the scale-0 and scale-(−1) cells of the lone center can be positive.
  double total = 0.0;
  for (const auto& w : eval_lip_partition(P, scalar(1.0))) total += w.weight;
  EXPECT_NEAR(total, 1.0, 1e-15);

  const PointSet two = line({0.0, 1.0});
  const std::vector<Vector> mid{scalar(0.5)};
  const LipPartition Q(complex_for(two, mid), 2.0);
  std::map<Index, double> by_center;
  for (const auto& w : eval_lip_partition(Q, scalar(0.5))) by_center[w.center] += w.weight;
  EXPECT_NEAR(by_center[0], 0.5, 1e-15);
  EXPECT_NEAR(by_center[1], 0.5, 1e-15);
}

TEST(LipPartition, SumsToOneOnRandomQueries) {
  const PointSet X = generate_space({Family::Grid, 2, 6, 0, 2.0});
  Rng rng(3);
  const auto queries = sample_queries(X, 5000, rng);
  const LipPartition P(complex_for(X, queries), 2.0);
  for (const Vector& y : queries) {
    double s = 0.0;
    for (const auto& w : eval_lip_partition(P, y)) {
      EXPECT_GT(w.weight, 0.0);
      s += w.weight;
    }
    ASSERT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(LipPartition, MissingScalesThrow) {
  const PointSet X = line({0.0, 1.0});
  const LipPartition P(std::make_shared<const CellComplex>(X, ScaleRange{-3, -1}), 2.0);
  EXPECT_THROW(eval_lip_partition(P, scalar(50.0)), RangeError);
}

TEST(CutoffXi, EqualityBranchAnchors) {
  const CutoffXi xi(5.5, 0.5, XiShape::EqualityBranch);
  const double t1 = xi.branch_point();
  EXPECT_EQ(xi(0.0), 0.0);
  EXPECT_EQ(xi(0.5), 1.0);
  EXPECT_NEAR(xi(t1), 0.5, 1e-15);
  EXPECT_NEAR(xi.derivative(std::nextafter(t1, 0.0)), xi.bound(0.5), 1e-9 * xi.bound(0.5));
  EXPECT_NEAR(xi.derivative(std::nextafter(t1, 1.0)), xi.bound(0.5), 1e-9 * xi.bound(0.5));
  EXPECT_LE(xi.check_margin(), 0.0);
}

TEST(CutoffXi, AdmissibleOnDenseGrid) {
  for (XiShape shape : {XiShape::QuadraticRamp, XiShape::EqualityBranch}) {
    for (double m : {1.0, 1.01, 1.386, 5.5, 8.0, 14.6, 40.0}) {
      const CutoffXi xi(m, 0.5, shape);
      EXPECT_LE(xi.check_margin(), 1e-12 * xi.bound(1.0));
      double prev = 0.0;
      for (int k = 0; k <= 200000; ++k) {
        const double t = -0.01 + 0.52 * k / 200000.0;
        const double v = xi(t);
        ASSERT_GE(v, prev);
        ASSERT_LE(xi.derivative(t), xi.bound(v) * (1 + 1e-12) + 1e-300) << "m " << m << " t " << t;
        prev = v;
      }
      EXPECT_EQ(xi(-1.0), 0.0);
      EXPECT_EQ(xi(0.6), 1.0);
    }
  }
}

TEST(CutoffXi, DerivativeMatchesFiniteDifferences) {
  for (XiShape shape : {XiShape::QuadraticRamp, XiShape::EqualityBranch}) {
    const CutoffXi xi(5.5, 0.5, shape);
    for (int k = 1; k < 100; ++k) {
      const double t = 0.5 * k / 100.0, h = 1e-7;
      const double fd = (xi(t + h) - xi(t - h)) / (2 * h);
      EXPECT_NEAR(xi.derivative(t), fd, 1e-5 * std::max(1.0, std::abs(fd)));
      if (xi(t) > 0.0) EXPECT_NEAR(xi.log_derivative(t), xi.derivative(t) / xi(t), 1e-10 * xi.log_derivative(t));
    }
  }
}

TEST(CutoffXi, RejectsBadParameters) {
  EXPECT_THROW(CutoffXi(0.5, 0.5), DataError);
  EXPECT_THROW(CutoffXi(2.0, 0.0), DataError);
  EXPECT_THROW(CutoffXi(std::numeric_limits<double>::infinity(), 0.5), DataError);
}

class C1PartitionTest : public ::testing::Test {
 protected:
  void SetUp() override {
    X_ = std::make_unique<PointSet>(generate_space({Family::Cantor, 1, 3, 0, 2.0}));
    Rng rng(9);
    queries_ = sample_queries(*X_, 1000, rng);
    complex_ = complex_for(*X_, queries_);
  }
  std::unique_ptr<PointSet> X_;
  std::vector<Vector> queries_;
  std::shared_ptr<const CellComplex> complex_;
};

TEST_F(C1PartitionTest, RawWeightsMatchReferenceProduct) {
  const C1Partition P(complex_, c1_exponent(3));
  for (std::size_t q = 0; q < 300; ++q) {
    const C1Evaluation e = eval_c1_partition(P, queries_[q]);
    for (const auto& w : e.weights) EXPECT_NEAR(w.raw, c1_raw_weight(P, queries_[q], w.scale, w.center), 1e-13);
    // Cells the fast path dropped have zero reference weight.
    const ScaleRange sc = c1_scales(e.dist_to_set);
    for (int n = sc.n_min; n <= sc.n_max; ++n) {
      for (Index c : complex_->net(n).center_indices) {
        const bool listed = std::any_of(e.weights.begin(), e.weights.end(),
                                        [&](const C1Weight& w) { return w.scale == n && w.center == c; });
        if (!listed) EXPECT_EQ(c1_raw_weight(P, queries_[q], n, c), 0.0);
      }
    }
  }
}

TEST_F(C1PartitionTest, PartitionOfUnityAndGradientSum) {
  const C1Partition P(complex_, c1_exponent(3));
  for (const Vector& y : queries_) {
    const C1Evaluation e = eval_c1_partition(P, y);
    double s = 0.0, max_raw = 0.0;
    Vector g = Vector::Zero(1);
    for (const auto& w : e.weights) {
      s += w.weight;
      g += w.gradient;
      max_raw = std::max(max_raw, w.raw);
    }
    ASSERT_NEAR(s, 1.0, 1e-12);
    ASSERT_NEAR(g.norm() * e.dist_to_set, 0.0, 1e-10);
    // Some scale puts y in the window where the raw weight is exactly 1.
    EXPECT_EQ(max_raw, 1.0);
    EXPECT_GE(e.raw_sum, 1.0);
  }
}

TEST_F(C1PartitionTest, GradientsMatchFiniteDifferences) {
  // The construction is equivariant under dyadic rescaling, so the step is taken relative to dist(y,X):
  // h = 1e-6 at unit distance.
  const C1Partition P(complex_, c1_exponent(3));
  std::size_t checked = 0;
  for (const Vector& y : queries_) {
    const C1Evaluation e = eval_c1_partition(P, y);
    const double h = 1e-6 * e.dist_to_set;
    const C1Evaluation up = eval_c1_partition(P, y + Vector::Constant(1, h));
    const C1Evaluation dn = eval_c1_partition(P, y - Vector::Constant(1, h));
    auto weight_of = [](const C1Evaluation& ev, int n, Index c) {
      for (const auto& w : ev.weights)
        if (w.scale == n && w.center == c) return w.weight;
      return 0.0;
    };
    for (const auto& w : e.weights) {
      const double fd = (weight_of(up, w.scale, w.center) - weight_of(dn, w.scale, w.center)) / (2 * h);
      const double scale = std::max(std::abs(w.gradient(0)), 1.0 / e.dist_to_set);
      EXPECT_LE(std::abs(fd - w.gradient(0)) / scale, 1e-5) << "y " << y(0);
    }
    ++checked;
  }
  EXPECT_EQ(checked, queries_.size());
}

TEST(C1Partition, GradientsMatchFiniteDifferencesInThePlane) {
  const PointSet X = generate_space({Family::Grid, 2, 3, 0, 2.0});
  Rng rng(10);
  const auto queries = sample_queries(X, 200, rng);
  const C1Partition P(complex_for(X, queries), c1_exponent(4));
  for (const Vector& y : queries) {
    const C1Evaluation e = eval_c1_partition(P, y);
    const double h = 1e-6 * e.dist_to_set;
    for (Index c = 0; c < 2; ++c) {
      const Vector dy = Vector::Unit(2, c) * h;
      const C1Evaluation up = eval_c1_partition(P, y + dy), dn = eval_c1_partition(P, y - dy);
      for (const auto& w : e.weights) {
        double a = 0.0, b = 0.0;
        for (const auto& u : up.weights)
          if (u.scale == w.scale && u.center == w.center) a = u.weight;
        for (const auto& u : dn.weights)
          if (u.scale == w.scale && u.center == w.center) b = u.weight;
        const double scale = std::max(std::abs(w.gradient(c)), 1.0 / e.dist_to_set);
        EXPECT_LE(std::abs((a - b) / (2 * h) - w.gradient(c)) / scale, 1e-5);
      }
    }
  }
}

TEST(C1Partition, UndefinedOnX) {
  const PointSet X = line({0.0, 1.0});
  const std::vector<Vector> probes{scalar(0.5)};
  const C1Partition P(complex_for(X, probes), 2.0);
  EXPECT_THROW(eval_c1_partition(P, scalar(1.0)), DataError);
}

TEST(SlopeAudit, SingletonIsScaleInvariant) {
  const PointSet X = line({0.0});
  std::vector<Vector> queries;
  for (int k = -4; k <= 4; ++k) queries.push_back(scalar(std::ldexp(0.7, k)));
  const auto complex = complex_for(X, queries);
  const C1Partition c1(complex, c1_exponent(1));
  const LipPartition lip(complex, lip_exponent(1));
  std::vector<double> c1v, lipv;
  for (const Vector& y : queries) {
    const std::vector<Vector> one{y};
    c1v.push_back(slope_sum_audit(c1, one).max_value);
    lipv.push_back(slope_sum_audit(lip, one, {}).max_value);
  }
  for (std::size_t k = 1; k < queries.size(); ++k) {
    EXPECT_TRUE(std::isfinite(c1v[k]));
    EXPECT_NEAR(c1v[k], c1v[0], 1e-9 * c1v[0]);
    EXPECT_NEAR(lipv[k], lipv[0], 1e-4 * std::max(lipv[0], 1.0));
  }
}

TEST(SlopeAudit, GridGrowthIsAtMostLinearInDimension) {
  std::vector<double> c1v, lipv;
  for (Index d = 1; d <= 3; ++d) {
    const PointSet X = generate_space({Family::Grid, d, 4, 0, 2.0});
    Rng rng(20 + static_cast<std::uint64_t>(d));
    const auto queries = sample_queries(X, 300, rng);
    const auto complex = complex_for(X, queries);
    const int lambda = estimate_doubling(X).lambda_hat;
    const SlopeAudit a = slope_sum_audit(C1Partition(complex, c1_exponent(lambda)), queries);
    const SlopeAudit b = slope_sum_audit(LipPartition(complex, lip_exponent(lambda)), queries, {});
    EXPECT_TRUE(std::isfinite(a.max_value));
    c1v.push_back(a.max_value);
    lipv.push_back(b.max_value);
  }
  for (std::size_t k = 1; k < 3; ++k) {
    EXPECT_LE(c1v[k], static_cast<double>(k + 1) * c1v[0] * 1.5);
    EXPECT_LE(lipv[k], static_cast<double>(k + 1) * lipv[0] * 1.5);
  }
}
