#ifndef LIPEXT_PROJECTION_HPP
#define LIPEXT_PROJECTION_HPP

#include "lipext/partitions.hpp"

#include <concepts>
#include <string>

namespace lipext {

/// Probability measure on points of X: distinct support indices (ascending) with nonnegative weights.
struct DiscreteMeasure {
  std::vector<Index> support;
  Vector weights;

  static DiscreteMeasure dirac(Index i);
  double mass() const { return weights.sum(); }
};

/// Vector measure on points of X; covector c_i (column i) sits at support[i].
struct VectorMeasure {
  std::vector<Index> support;
  Matrix covectors;

  Vector total() const;
  /// Σ dual norms of the covectors.
  double total_variation(double p) const;
};

/// Merges duplicate indices and sorts the support ascending.
DiscreteMeasure make_measure(std::vector<std::pair<Index, double>> atoms);

/// C¹ decreasing bump in the ratio variable: 1 on [0,2], 1 − 3u² + 2u³ (u = t − 2) on [2,3], 0 after.
struct KernelProfile {
  double exponent = 1.0;

  double bump(double t) const;
  double bump_derivative(double t) const;
  double weight(double t) const { return std::pow(bump(t), exponent); }
};

/// Kernel exponent: max(1, ln(λ̂)/3).
double kernel_exponent(int lambda_hat);

// ---------------------------------------------------------------------------
// Projections
// ---------------------------------------------------------------------------

/// μ_y = Σ φ_i(y) δ_{x_i} from the Lipschitz partition; δ_y on X.
DiscreteMeasure project_cells(const Eigen::Ref<const Vector>& y, const LipPartition& P);

/// μ_y ∝ 𝔪_x φ(|y − x| / dist(y,X))^m; δ_y on X.
DiscreteMeasure project_kernel(const Eigen::Ref<const Vector>& y, const PointSet& X, const PointIndex& index,
                               const KernelProfile& K);
DiscreteMeasure project_kernel(const Eigen::Ref<const Vector>& y, const PointSet& X, const KernelProfile& K);

struct RegularProjection {
  DiscreteMeasure mu;
  VectorMeasure nu;
  double dist_to_set = 0.0;
};

/// μ_y and ν_y = Σ d(φ_i)_y δ_{x_i} from the C¹ partition; on X, μ = δ_y and ν = 0.
RegularProjection project_regular(const Eigen::Ref<const Vector>& y, const C1Partition& P);

/// Callable wrappers so extension operators and audits can take any projection.
class CellProjector {
 public:
  explicit CellProjector(LipPartition partition) : partition_(std::move(partition)) {}
  DiscreteMeasure operator()(const Eigen::Ref<const Vector>& y) const { return project_cells(y, partition_); }
  const PointSet& points() const { return partition_.complex().points(); }
  const LipPartition& partition() const { return partition_; }

 private:
  LipPartition partition_;
};

class KernelProjector {
 public:
  KernelProjector(const PointSet& X, KernelProfile profile) : X_(X), index_(X_), profile_(profile) {}
  DiscreteMeasure operator()(const Eigen::Ref<const Vector>& y) const {
    return project_kernel(y, X_, index_, profile_);
  }
  const PointSet& points() const { return X_; }
  const KernelProfile& profile() const { return profile_; }

 private:
  PointSet X_;
  PointIndex index_;
  KernelProfile profile_;
};

class RegularProjector {
 public:
  explicit RegularProjector(C1Partition partition) : partition_(std::move(partition)) {}
  RegularProjection operator()(const Eigen::Ref<const Vector>& y) const { return project_regular(y, partition_); }
  const PointSet& points() const { return partition_.complex().points(); }
  const C1Partition& partition() const { return partition_; }

 private:
  C1Partition partition_;
};

template <typename P>
concept RandomProjection = requires(const P& proj, const Vector& y) {
  { proj(y) } -> std::convertible_to<DiscreteMeasure>;
  { proj.points() } -> std::convertible_to<const PointSet&>;
};

// ---------------------------------------------------------------------------
// Audits and serialization
// ---------------------------------------------------------------------------

struct ProjectionLipAudit {
  double max_ratio = 0.0;
  std::size_t pairs = 0;
  std::size_t worst_pair = 0;
};

/// max over pairs of W1(μ_y, μ_y′) / |y − y′|.
template <RandomProjection P>
ProjectionLipAudit projection_lip_audit(const P& proj, std::span<const std::pair<Vector, Vector>> pairs);

std::string measure_to_json(const DiscreteMeasure& mu);
std::string measure_to_json(const VectorMeasure& nu);

}  // namespace lipext

#include "lipext/wasserstein.hpp"

namespace lipext {

template <RandomProjection P>
ProjectionLipAudit projection_lip_audit(const P& proj, std::span<const std::pair<Vector, Vector>> pairs) {
  ProjectionLipAudit audit;
  const PointSet& X = proj.points();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& [y, y2] = pairs[k];
    ++audit.pairs;
    const double d = dist(X.space(), y, y2);
    if (d == 0.0) continue;
    const double ratio = w1_exact(proj(y), proj(y2), X).cost / d;
    if (ratio > audit.max_ratio) {
      audit.max_ratio = ratio;
      audit.worst_pair = k;
    }
  }
  return audit;
}

}  // namespace lipext

#endif  // LIPEXT_PROJECTION_HPP
