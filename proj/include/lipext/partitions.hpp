#ifndef LIPEXT_PARTITIONS_HPP
#define LIPEXT_PARTITIONS_HPP

#include "lipext/covering.hpp"

#include <memory>
#include <vector>

namespace lipext {

// ---------------------------------------------------------------------------
// Lipschitz partition: w = g^m / Σ g^m over positive cell gauges
// ---------------------------------------------------------------------------

struct CellWeight {
  int scale;
  Index center;
  double weight;
};

/// Default Lipschitz exponent: log2 λ̂, floored at 1.01.
double lip_exponent(int lambda_hat);
/// Default C¹ exponent: ln(4 λ̂⁶), floored at 1.01.
double c1_exponent(int lambda_hat);

class LipPartition {
 public:
  LipPartition(std::shared_ptr<const CellComplex> complex, double exponent);

  const CellComplex& complex() const { return *complex_; }
  std::shared_ptr<const CellComplex> complex_ptr() const { return complex_; }
  double exponent() const { return m_; }

 private:
  std::shared_ptr<const CellComplex> complex_;
  double m_;
};

/// Normalized weights at y ∉ X. Throws RangeError when no cell is positive or scales are missing.
std::vector<CellWeight> eval_lip_partition(const LipPartition& P, const Eigen::Ref<const Vector>& y);

// ---------------------------------------------------------------------------
// C¹ cutoff ξ
// ---------------------------------------------------------------------------

/// Shape of the cutoff on [0, δ].
///
/// QuadraticRamp: ξ = g^m with g(t) = 1 − (1 − t/δ)². Since g′ ≤ 2/δ, ξ′ = m g^{m−1} g′ ≤ f(ξ) holds
/// analytically. Among simple admissible shapes it has the smallest second and third derivatives, which
/// keeps finite-difference checks of the C¹ partition meaningful at practical step sizes.
///
/// EqualityBranch: ξ = (2t/δ)^m up to the value ½ at t₁ = (δ/2)(½)^{1/m}, then the power cap
/// ξ = 1 − ½(1 − s)^α, s = (t − t₁)/(δ − t₁), α = 2 f(½)(δ − t₁), which matches value and slope at t₁,
/// has zero slope at δ, and a decreasing slope, so ξ′ ≤ f(½) ≤ f(ξ) on the cap. This is the steepest
/// admissible start and has a curvature jump at t₁.
enum class XiShape { QuadraticRamp, EqualityBranch };

/// Increasing C¹ cutoff with ξ = 0 on (−∞, 0], ξ = 1 on [δ, ∞) and ξ′ ≤ f(ξ), f(t) = (2m/δ) t^{1−1/m}.
class CutoffXi {
 public:
  /// Builds ξ and runs the grid check ξ′ ≤ f(ξ); throws DataError when it fails.
  CutoffXi(double m, double delta, XiShape shape = XiShape::QuadraticRamp, std::size_t check_points = 10000);

  double m() const { return m_; }
  double delta() const { return delta_; }
  XiShape shape() const { return shape_; }
  /// t₁ for the equality branch; δ/2 for the quadratic ramp.
  double branch_point() const { return t1_; }
  double cap_exponent() const { return alpha_; }
  /// Largest ξ′ − f(ξ) seen by the construction-time grid check.
  double check_margin() const { return margin_; }

  double operator()(double t) const;
  double derivative(double t) const;
  /// ξ′(t)/ξ(t) for ξ(t) > 0, computed without forming the ratio of tiny numbers.
  double log_derivative(double t) const;
  double bound(double value) const;  // f

 private:
  double ramp(double t) const;        // g
  double ramp_slope(double t) const;  // g′

  double m_;
  double delta_;
  XiShape shape_;
  double t1_;
  double alpha_ = 0.0;
  double margin_ = 0.0;
};

CutoffXi build_xi(double m, double delta, XiShape shape = XiShape::QuadraticRamp);

// ---------------------------------------------------------------------------
// C¹ partition
// ---------------------------------------------------------------------------

struct C1Weight {
  int scale;
  Index center;
  double raw;
  double weight;
  Vector gradient;
};

class C1Partition {
 public:
  static constexpr double kEll = 3.0;
  static constexpr double kDelta = 0.5;

  C1Partition(std::shared_ptr<const CellComplex> complex, double exponent, XiShape shape = XiShape::QuadraticRamp);

  const CellComplex& complex() const { return *complex_; }
  double exponent() const { return xi_.m(); }
  const CutoffXi& xi() const { return xi_; }
  /// Neighbor relation |x_j − x_i| ≤ 2^n (9ℓ − δ).
  double neighbor_radius(int n) const { return std::ldexp(9.0 * kEll - kDelta, n); }

 private:
  std::shared_ptr<const CellComplex> complex_;
  CutoffXi xi_;
};

/// Raw weight of center i at scale n by its defining three-factor product, with the neighbor list
/// enumerated over the whole net. Reference path for tests.
double c1_raw_weight(const C1Partition& P, const Eigen::Ref<const Vector>& y, int n, Index center);

struct C1Evaluation {
  double dist_to_set = 0.0;
  double raw_sum = 0.0;
  std::vector<C1Weight> weights;
};

/// Normalized weights and gradients at y ∉ X (quotient rule; Σ gradients = 0).
C1Evaluation eval_c1_partition(const C1Partition& P, const Eigen::Ref<const Vector>& y);

// ---------------------------------------------------------------------------
// Slope audit
// ---------------------------------------------------------------------------

struct SlopeAudit {
  double max_value = 0.0;   // max over queries of dist(y,X)·Σ slope(φ_i)(y)
  double mean_value = 0.0;
  std::size_t queries = 0;
  std::size_t max_multiplicity = 0;
};

/// Lipschitz variant: slopes by one-sided finite differences along ± coordinate axes and the given directions.
SlopeAudit slope_sum_audit(const LipPartition& P, std::span<const Vector> queries, std::span<const Vector> directions,
                           double relative_step = 1e-6);
/// C¹ variant: slopes are dual norms of the analytic gradients.
SlopeAudit slope_sum_audit(const C1Partition& P, std::span<const Vector> queries);

}  // namespace lipext

#endif  // LIPEXT_PARTITIONS_HPP
