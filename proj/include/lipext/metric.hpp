#ifndef LIPEXT_METRIC_HPP
#define LIPEXT_METRIC_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lipext {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when input data violates a documented precondition.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a query falls outside the dyadic scale range a structure was built for.
class RangeError : public DataError {
 public:
  using DataError::DataError;
};

// ---------------------------------------------------------------------------
// p-norm primitives
// ---------------------------------------------------------------------------

template <typename Derived>
typename Derived::Scalar p_norm(const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar p) {
  using Scalar = typename Derived::Scalar;
  if (p == Scalar(2)) return v.norm();
  if (p == Scalar(1)) return v.template lpNorm<1>();
  // Scale by the max entry so large exponents do not overflow.
  const Scalar scale = v.cwiseAbs().maxCoeff();
  if (scale == Scalar(0)) return Scalar(0);
  return scale * std::pow((v.cwiseAbs() / scale).array().pow(p).sum(), Scalar(1) / p);
}

/// Gradient of ‖v‖_p at v ≠ 0: sign(v_c)|v_c|^{p-1} / ‖v‖^{p-1}.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> p_norm_gradient(
    const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar p) {
  using Scalar = typename Derived::Scalar;
  const Scalar n = p_norm(v, p);
  if (p == Scalar(2)) return v / n;
  return (v.array().sign() * (v.cwiseAbs() / n).array().pow(p - Scalar(1))).matrix();
}

/// Dual exponent q with 1/p + 1/q = 1.
template <typename Scalar>
Scalar dual_exponent(Scalar p) {
  return p / (p - Scalar(1));
}

/// Norm of a covector under the dual of the p-norm.
template <typename Derived>
typename Derived::Scalar dual_norm(const Eigen::MatrixBase<Derived>& c, typename Derived::Scalar p) {
  return p_norm(c, dual_exponent(p));
}

// ---------------------------------------------------------------------------
// Ambient space and point sets
// ---------------------------------------------------------------------------

/// R^d with the p-norm, 1 < p < ∞ so that the norm is C¹ away from 0.
class AmbientSpace {
 public:
  explicit AmbientSpace(Index dimension, double norm_exponent = 2.0);

  Index dimension() const { return dimension_; }
  double p() const { return p_; }

 private:
  Index dimension_;
  double p_;
};

/// The finite set X: one column per point, with optional positive weights.
class PointSet {
 public:
  PointSet(AmbientSpace space, Matrix points, std::optional<Vector> weights = std::nullopt);

  const AmbientSpace& space() const { return space_; }
  Index dimension() const { return space_.dimension(); }
  Index size() const { return points_.cols(); }
  const Matrix& points() const { return points_; }
  auto point(Index i) const { return points_.col(i); }
  bool has_weights() const { return weights_.has_value(); }
  /// Point weights; counting measure when none were given.
  Vector weights() const;

  /// Copy with every coordinate multiplied by `factor` (weights kept).
  PointSet scaled(double factor) const;

 private:
  AmbientSpace space_;
  Matrix points_;
  std::optional<Vector> weights_;
};

/// p-norm distance; throws DataError on dimension mismatch.
double dist(const AmbientSpace& space, const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

inline double dist(const PointSet& X, Index i, Index j) {
  return p_norm((X.point(i) - X.point(j)).eval(), X.space().p());
}

struct Nearest {
  double distance;
  Index index;
};

/// Exact nearest point of X by brute force; ties go to the lowest index.
Nearest dist_to_set(const Eigen::Ref<const Vector>& y, const PointSet& X);

/// k-d tree over a subset of X with per-node bounding boxes. Since every coordinate gap is at most the
/// p-norm distance, the p-norm of the box gaps is a lower bound and prunes exactly for any p.
/// Holds its own copy of the indexed coordinates.
class PointIndex {
 public:
  PointIndex() = default;
  /// Index over all points of X.
  explicit PointIndex(const PointSet& X);
  /// Index over the listed X indices.
  PointIndex(const PointSet& X, std::vector<Index> ids);

  /// Same answer as dist_to_set restricted to the indexed points (lowest index on ties).
  Nearest nearest(const Eigen::Ref<const Vector>& y) const;

  /// Indexed points z with dist(y, z) < radius, paired with their distance, sorted by index.
  std::vector<std::pair<Index, double>> within(const Eigen::Ref<const Vector>& y, double radius) const;

  std::size_t size() const { return ids_.size(); }
  const std::vector<Index>& ids() const { return ids_; }

 private:
  struct Node {
    Index lo, hi;  // range of tree-ordered points
    int left = -1, right = -1;
  };
  int build(Index lo, Index hi);
  double box_bound(int node, const Eigen::Ref<const Vector>& y, Vector& gap) const;

  double p_ = 2.0;
  Matrix pts_;              // columns in tree order
  std::vector<Index> ids_;  // X index of each column
  std::vector<Node> nodes_;
  Matrix box_lo_, box_hi_;  // one column per node
  static constexpr Index kLeafSize = 8;
};

/// Accelerated dist_to_set; identical result to the brute-force overload.
Nearest dist_to_set(const Eigen::Ref<const Vector>& y, const PointSet& X, const PointIndex& index);

/// Sorted distinct pairwise distances of X.
std::vector<double> pairwise_distances(const PointSet& X);

/// Smallest pairwise distance (∞ for a singleton).
double min_separation(const PointSet& X);

// ---------------------------------------------------------------------------
// Doubling constant and metric capacity (X-centered balls)
// ---------------------------------------------------------------------------

struct DoublingOptions {
  /// Exact minimum covers (subset enumeration) instead of greedy; small balls only.
  bool exhaustive = false;
  /// Caps for the sampled estimator; ignored when exhaustive.
  std::size_t max_centers = 64;
  std::size_t max_radii = 48;
  std::size_t max_ball = 256;
};

struct DoublingEstimate {
  int lambda_hat = 1;
  /// (center index, radius) pairs actually audited.
  std::vector<std::pair<Index, double>> sampled_pairs;
  /// Pairs skipped because the ball exceeded the size cap.
  std::size_t skipped = 0;
  bool exact = false;
};

/// Default radius grid: all pairwise distances and their halves.
std::vector<double> critical_radii(const PointSet& X);

/// Max over centers x∈X and radii r of the number of X-centered r-balls used
/// to cover B(x,2r)∩X (greedy max-coverage, or exact when exhaustive).
DoublingEstimate estimate_doubling(const PointSet& X, std::span<const double> radius_grid,
                                   const DoublingOptions& options = {});
DoublingEstimate estimate_doubling(const PointSet& X, const DoublingOptions& options = {});

struct CapacityOptions {
  bool exhaustive = false;
  std::size_t max_centers = 32;
  std::size_t max_radii = 48;
  /// Largest candidate count solved exactly by branch and bound.
  std::size_t exact_candidate_cap = 24;
  /// Sampled mode keeps at most this many candidate centers per (center, radius); more flags partial.
  std::size_t max_candidates = 256;
  /// Total branch-and-bound node budget; exceeding it flags the result partial.
  std::uint64_t node_budget = 50'000'000;
};

struct CapacityEstimate {
  double epsilon = 1.0;
  int kappa_hat = 1;
  /// Witness: the packing inside B(x0, r) achieving kappa_hat.
  Index witness_center = 0;
  double witness_radius = 0.0;
  std::vector<Index> witness_packing;
  /// True when every configuration was enumerated and solved exactly.
  bool exact = false;
  /// True when the node budget ran out (result is still a certified lower bound).
  bool partial = false;
};

/// Lower bound on κ_X(ε): disjoint X-balls B(x_i, εr) inside B(x0, r), balls taken as subsets of X.
CapacityEstimate estimate_capacity(const PointSet& X, double epsilon, const CapacityOptions& options = {});

/// Checks that `packing` is a valid witness: distinct centers, X-balls pairwise disjoint, all inside B(x0, r).
bool is_valid_packing(const PointSet& X, Index x0, double r, double epsilon, std::span<const Index> packing);

// ---------------------------------------------------------------------------
// Slopes
// ---------------------------------------------------------------------------

using Field = std::function<std::optional<double>(const Vector&)>;

struct SlopeReport {
  double value = 0.0;
  std::size_t probes = 0;
  std::size_t skipped = 0;
};

/// max over probes of |F(y+hv) − F(y)| / h, with directions normalized to unit p-norm.
SlopeReport slope_estimate(const Field& F, const AmbientSpace& space, const Eigen::Ref<const Vector>& y,
                           std::span<const double> probe_radii, std::span<const Vector> directions);

}  // namespace lipext

#endif  // LIPEXT_METRIC_HPP
