#include "lipext/extension.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lipext {

void Jet::validate(const PointSet& X) const {
  if (values.cols() != X.size()) throw DataError("jet has " + std::to_string(values.cols()) + " values for " +
                                                 std::to_string(X.size()) + " points");
  if (differentials.size() != static_cast<std::size_t>(X.size())) throw DataError("jet differential count mismatch");
  for (const Matrix& L : differentials) {
    if (L.rows() != values.rows() || L.cols() != X.dimension()) throw DataError("jet differential has the wrong shape");
  }
}

Jet affine_jet(const PointSet& X, const Matrix& A, const Vector& b) {
  Jet jet;
  jet.values = (A * X.points()).colwise() + b;
  jet.differentials.assign(static_cast<std::size_t>(X.size()), A);
  return jet;
}

C1Value evaluate_c1(const Jet& jet, const RegularProjector& proj, const Eigen::Ref<const Vector>& y) {
  return evaluate_c1(jet, proj.points(), proj(y), y);
}

C1Value evaluate_c1(const Jet& jet, const PointSet& X, const RegularProjection& r, const Eigen::Ref<const Vector>& y) {
  C1Value out;
  if (r.dist_to_set == 0.0) {
    const Index x = r.mu.support.front();
    out.value = jet.values.col(x);
    out.differential = jet.differentials[static_cast<std::size_t>(x)];
    return out;
  }
  out.value = Vector::Zero(jet.codim());
  out.differential = Matrix::Zero(jet.codim(), X.dimension());
  const std::size_t n = r.mu.support.size();
  Matrix local(jet.codim(), static_cast<Index>(n));
  Index heaviest = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const Index i = r.mu.support[k];
    local.col(static_cast<Index>(k)) = jet.values.col(i) + jet.differentials[static_cast<std::size_t>(i)] * (y - X.point(i));
    if (r.mu.weights(static_cast<Index>(k)) > r.mu.weights(heaviest)) heaviest = static_cast<Index>(k);
  }
  // Σ c_i = 0, so any reference value may be subtracted from the local values. Using one of them keeps
  // the product with large covectors near X free of cancellation error.
  const Vector ref = local.col(heaviest);
  for (std::size_t k = 0; k < n; ++k) {
    const Index i = r.mu.support[k];
    const double w = r.mu.weights(static_cast<Index>(k));
    out.value += w * local.col(static_cast<Index>(k));
    out.differential += w * jet.differentials[static_cast<std::size_t>(i)] +
                        (local.col(static_cast<Index>(k)) - ref) * r.nu.covectors.col(static_cast<Index>(k)).transpose();
  }
  return out;
}

Vector extend_c1(const Jet& jet, const RegularProjector& proj, const Eigen::Ref<const Vector>& y) {
  const PointSet& X = proj.points();
  const Nearest nearest = dist_to_set(y, X, proj.partition().complex().index());
  if (nearest.distance == 0.0) return jet.values.col(nearest.index);
  const RegularProjection r = proj(y);
  Vector out = Vector::Zero(jet.codim());
  for (std::size_t k = 0; k < r.mu.support.size(); ++k) {
    const Index i = r.mu.support[k];
    out += r.mu.weights(static_cast<Index>(k)) *
           (jet.values.col(i) + jet.differentials[static_cast<std::size_t>(i)] * (y - X.point(i)));
  }
  return out;
}

Matrix differential_c1(const Jet& jet, const RegularProjector& proj, const Eigen::Ref<const Vector>& y) {
  return evaluate_c1(jet, proj, y).differential;
}

Vector remainder(const Jet& jet, const PointSet& X, Index x, Index y) {
  if (x == y) throw DataError("remainder needs two distinct points");
  return jet.values.col(y) - jet.values.col(x) - jet.differentials[static_cast<std::size_t>(x)] * (X.point(y) - X.point(x));
}

std::vector<double> remainder_modulus(const Jet& jet, const PointSet& X, std::span<const double> radii) {
  if (X.size() < 2) throw DataError("remainder modulus needs at least two points");
  std::vector<std::pair<double, double>> pairs;  // (|x−y|, |R|/|x−y|)
  for (Index a = 0; a < X.size(); ++a) {
    for (Index b = 0; b < X.size(); ++b) {
      if (a == b) continue;
      const double d = dist(X, a, b);
      pairs.emplace_back(d, codomain_norm(remainder(jet, X, a, b)) / d);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<double> prefix(pairs.size());
  double run = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) prefix[k] = run = std::max(run, pairs[k].second);
  std::vector<double> out;
  out.reserve(radii.size());
  for (double t : radii) {
    const auto it = std::upper_bound(pairs.begin(), pairs.end(), std::make_pair(t, std::numeric_limits<double>::infinity()));
    out.push_back(it == pairs.begin() ? 0.0 : prefix[static_cast<std::size_t>(it - pairs.begin()) - 1]);
  }
  return out;
}

std::vector<DecayStep> remainder_integral_audit(const Jet& jet, const RegularProjector& proj, Index x,
                                                std::span<const Vector> sequence) {
  const PointSet& X = proj.points();
  const double p = X.space().p();
  std::vector<RegularProjection> rs;
  double C = 0.0;
  for (const Vector& y : sequence) {
    rs.push_back(proj(y));
    C = std::max(C, rs.back().dist_to_set * rs.back().nu.total_variation(p));
  }
  std::vector<DecayStep> out;
  for (std::size_t s = 0; s < sequence.size(); ++s) {
    const RegularProjection& r = rs[s];
    const double dxy = dist(X.space(), X.point(x), sequence[s]);
    double bar = 0.0;
    double plain = 0.0;
    for (std::size_t k = 0; k < r.mu.support.size(); ++k) {
      const Index z = r.mu.support[k];
      if (z == x) continue;
      const double R = codomain_norm(remainder(jet, X, z, x));
      plain += r.mu.weights(static_cast<Index>(k)) * R;
      if (C > 0.0) bar += r.dist_to_set * dual_norm(r.nu.covectors.col(static_cast<Index>(k)).eval(), p) / C * R;
    }
    const Matrix gap = evaluate_c1(jet, proj, sequence[s]).differential - jet.differentials[static_cast<std::size_t>(x)];
    out.push_back({dxy, bar / dxy, plain / dxy, gap.cwiseAbs().maxCoeff()});
  }
  return out;
}

double lipschitz_constant(const PointSet& X, const Matrix& values, Index cap, std::uint64_t seed) {
  if (values.cols() != X.size()) throw DataError("value count does not match the point count");
  double lip = 0.0;
  auto visit = [&](Index a, Index b) {
    if (a == b) return;
    lip = std::max(lip, codomain_norm(values.col(a) - values.col(b)) / dist(X, a, b));
  };
  if (X.size() <= cap) {
    for (Index a = 0; a < X.size(); ++a) {
      for (Index b = a + 1; b < X.size(); ++b) visit(a, b);
    }
    return lip;
  }
  std::mt19937_64 rng(seed);
  const auto n = static_cast<std::uint64_t>(X.size());
  const auto samples = static_cast<std::uint64_t>(cap) * static_cast<std::uint64_t>(cap) / 2;
  for (std::uint64_t s = 0; s < samples; ++s) visit(static_cast<Index>(rng() % n), static_cast<Index>(rng() % n));
  return lip;
}

}  // namespace lipext
