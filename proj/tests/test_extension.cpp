#include "lipext/extension.hpp"
#include "lipext/harness.hpp"

#include <gtest/gtest.h>

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

ScalarField field(std::initializer_list<double> vs) {
  ScalarField f;
  f.values.resize(1, static_cast<Index>(vs.size()));
  Index k = 0;
  for (double v : vs) f.values(0, k++) = v;
  return f;
}

}  // namespace

TEST(ExtendLip, KernelHandExamples) {
  const PointSet X = line({0.0, 1.0});
  const KernelProjector proj(X, KernelProfile{1.0});
  const ScalarField f = field({0.0, 1.0});
  EXPECT_DOUBLE_EQ(extend_lip(f, proj, scalar(0.5))(0), 0.5);
  EXPECT_EQ(extend_lip(f, proj, scalar(0.25))(0), 0.0);
  EXPECT_EQ(extend_lip(f, proj, scalar(1.0))(0), 1.0);
}

TEST(ExtendLip, RestrictsAndReproducesConstants) {
  const PointSet X = generate_space({Family::RandomCloud, 2, 40, 3, 2.0});
  Rng rng(1);
  const auto queries = sample_queries(X, 300, rng);
  const CellProjector cells(LipPartition(complex_for(X, queries), 1.5));
  const KernelProjector kernel(X, KernelProfile{1.5});
  const ScalarField f = mcshane_function(X, 6, 2);
  ScalarField c;
  c.values = Matrix::Constant(2, X.size(), 0.75);
  for (Index i = 0; i < X.size(); ++i) {
    EXPECT_EQ(extend_lip(f, cells, X.point(i))(0), f.values(0, i));
    EXPECT_EQ(extend_lip(f, kernel, X.point(i))(0), f.values(0, i));
  }
  for (const Vector& y : queries) {
    EXPECT_NEAR(extend_lip(c, cells, y).cwiseAbs().maxCoeff(), 0.75, 1e-14);
    EXPECT_NEAR(extend_lip(c, kernel, y).cwiseAbs().maxCoeff(), 0.75, 1e-14);
  }
}

TEST(ExtendLip, StaysWithinTheRangeOfValues) {
  const PointSet X = generate_space({Family::Grid, 2, 5, 0, 2.0});
  Rng rng(2);
  const auto queries = sample_queries(X, 500, rng);
  const CellProjector cells(LipPartition(complex_for(X, queries), 2.0));
  const ScalarField f = mcshane_function(X, 5, 9);
  const double lo = f.values.minCoeff(), hi = f.values.maxCoeff();
  for (const Vector& y : queries) {
    const double v = extend_lip(f, cells, y)(0);
    EXPECT_GE(v, lo - 1e-14);
    EXPECT_LE(v, hi + 1e-14);
  }
}

TEST(ExtendC1, RestrictsValueAndDifferentialOnX) {
  const PointSet X = generate_space({Family::Grid, 2, 4, 0, 2.0});
  Rng rng(3);
  const auto queries = sample_queries(X, 100, rng);
  const RegularProjector proj(C1Partition(complex_for(X, queries), c1_exponent(4)));
  const Jet jet = random_jet(X, 2, 5);
  for (Index i = 0; i < X.size(); ++i) {
    EXPECT_EQ(extend_c1(jet, proj, X.point(i)), Vector(jet.values.col(i)));
    EXPECT_EQ(differential_c1(jet, proj, X.point(i)), jet.differentials[static_cast<std::size_t>(i)]);
  }
}

TEST(ExtendC1, ReproducesAffineMaps) {
  const PointSet X = generate_space({Family::RandomCloud, 2, 30, 4, 2.0});
  Rng rng(4);
  const auto queries = sample_queries(X, 500, rng);
  const RegularProjector proj(C1Partition(complex_for(X, queries), c1_exponent(6)));
  Matrix A(2, 2);
  A << 1.5, -2.0, 0.25, 3.0;
  Vector b(2);
  b << -1.0, 0.5;
  const Jet jet = affine_jet(X, A, b);
  for (const Vector& y : queries) {
    const C1Value v = evaluate_c1(jet, proj, y);
    EXPECT_LE((v.value - (A * y + b)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((v.differential - A).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((extend_c1(jet, proj, y) - v.value).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(ExtendC1, DifferentialMatchesFiniteDifferences) {
  const PointSet X = generate_space({Family::Grid, 1, 6, 0, 2.0});
  Rng rng(5);
  const auto queries = sample_queries(X, 200, rng);
  const RegularProjector proj(C1Partition(complex_for(X, queries), c1_exponent(2)));
  const Jet jet = smooth_jet(X);
  for (const Vector& y : queries) {
    const double D = dist_to_set(y, X).distance;
    const double h = 1e-6 * D;
    const double fd = (extend_c1(jet, proj, y + scalar(h)) - extend_c1(jet, proj, y - scalar(h)))(0) / (2 * h);
    const double J = differential_c1(jet, proj, y)(0, 0);
    EXPECT_NEAR(fd, J, 1e-5 * std::max(1.0, std::abs(J))) << "y = " << y(0);
  }
}

TEST(Remainder, SquareOnTheLine) {
  const PointSet X = line({0.0, 0.25, 0.5, 0.75, 1.0});
  const Jet jet = square_jet(X);
  for (Index a = 0; a < X.size(); ++a) {
    for (Index b = 0; b < X.size(); ++b) {
      if (a == b) continue;
      const double d = X.points()(0, b) - X.points()(0, a);
      EXPECT_DOUBLE_EQ(remainder(jet, X, a, b)(0), d * d);
      // R(x,y) + R(y,x) = (L_y − L_x)(y − x)
      const double sum = remainder(jet, X, a, b)(0) + remainder(jet, X, b, a)(0);
      const double rhs = ((jet.differentials[static_cast<std::size_t>(b)] - jet.differentials[static_cast<std::size_t>(a)]) *
                          (X.point(b) - X.point(a)))(0);
      EXPECT_DOUBLE_EQ(sum, rhs);
    }
  }
  EXPECT_THROW(remainder(jet, X, 1, 1), DataError);
}

TEST(Remainder, ModulusOfSquareIsTheLargestGap) {
  const PointSet X = line({0.0, 0.25, 0.5, 0.75, 1.0});
  const std::vector<double> radii{0.1, 0.25, 0.3, 0.6, 1.0, 5.0};
  const std::vector<double> omega = remainder_modulus(square_jet(X), X, radii);
  EXPECT_EQ(omega, (std::vector<double>{0.0, 0.25, 0.25, 0.5, 1.0, 1.0}));
  Matrix A(1, 1);
  A << 3.0;
  for (double w : remainder_modulus(affine_jet(X, A, scalar(1.0)), X, radii)) EXPECT_LE(w, 1e-15);
  EXPECT_THROW(remainder_modulus(square_jet(line({1.0})), line({1.0}), radii), DataError);
}

TEST(Remainder, AuditDecaysAlongApproachSequence) {
  const PointSet X = generate_space({Family::Cantor, 1, 3, 0, 2.0});
  const Index x = 3;
  std::vector<Vector> seq;
  for (int k = 0; k < 14; ++k) seq.push_back(X.point(x) + scalar(0.01 * std::ldexp(1.0, -k)));
  const RegularProjector proj(C1Partition(complex_for(X, seq), c1_exponent(2)));
  const std::vector<DecayStep> steps = remainder_integral_audit(square_jet(X), proj, x, seq);
  ASSERT_EQ(steps.size(), seq.size());
  for (std::size_t k = 0; k < steps.size(); ++k) EXPECT_NEAR(steps[k].distance, 0.01 * std::ldexp(1.0, -static_cast<int>(k)), 1e-15);
  // Each ratio is O(|x − y|) for the square jet.
  EXPECT_LT(steps.back().ratio_mu, 1e-3 * std::max(steps.front().ratio_mu, 1e-300) + 1e-12);
  EXPECT_LT(steps.back().ratio_bar, 1e-3 * std::max(steps.front().ratio_bar, 1e-300) + 1e-12);
  EXPECT_LT(steps.back().differential_gap, 1e-3 * std::max(steps.front().differential_gap, 1e-300) + 1e-12);
}

TEST(LipschitzConstant, ExactAndSampled) {
  const PointSet X = line({0.0, 1.0, 3.0});
  Matrix v(1, 3);
  v << 0.0, 2.0, 3.0;
  EXPECT_DOUBLE_EQ(lipschitz_constant(X, v), 2.0);
  const PointSet big = generate_space({Family::RandomCloud, 2, 300, 1, 2.0});
  const ScalarField f = mcshane_function(big, 4, 3);
  const double exact = lipschitz_constant(big, f.values);
  const double sampled = lipschitz_constant(big, f.values, 100, 7);
  EXPECT_LE(exact, 1.0 + 1e-12);
  EXPECT_LE(sampled, exact);
  EXPECT_EQ(sampled, lipschitz_constant(big, f.values, 100, 7));
  EXPECT_THROW(lipschitz_constant(X, Matrix::Zero(1, 2)), DataError);
}

TEST(Jet, ValidateChecksShapes) {
  const PointSet X = line({0.0, 1.0});
  Jet jet = square_jet(X);
  EXPECT_NO_THROW(jet.validate(X));
  jet.differentials.back() = Matrix::Zero(1, 2);
  EXPECT_THROW(jet.validate(X), DataError);
  jet.differentials.pop_back();
  EXPECT_THROW(jet.validate(X), DataError);
}
