#ifndef LIPEXT_COVERING_HPP
#define LIPEXT_COVERING_HPP

#include "lipext/metric.hpp"

#include <map>
#include <string>
#include <vector>

namespace lipext {

/// Maximal family of X points whose open r-balls (r = 2^n) are pairwise disjoint.
struct Net {
  int scale = 0;
  double radius = 1.0;
  std::vector<Index> center_indices;
};

/// Scans X in index order and accepts a point iff it is at distance ≥ 2r from every accepted point.
Net greedy_net(const PointSet& X, double r);
Net greedy_net(const PointSet& X, int scale);

/// Checks disjointness (pairwise center distance ≥ 2r) and that the doubled balls cover X.
bool is_valid_net(const PointSet& X, const Net& net);

struct ScaleRange {
  int n_min = 0;
  int n_max = -1;
  bool empty() const { return n_max < n_min; }
};

/// Dyadic scales needed for queries; queries lying in X are ignored.
ScaleRange scale_range(const PointSet& X, std::span<const Vector> queries);

/// Scale range for a known interval of dist(y, X) values.
ScaleRange scale_range_for(double min_dist, double max_dist);

/// Scales n at which a Lipschitz gauge can be positive at distance D from X: 2^{n-1} < D < 2.5·2^n.
ScaleRange lip_scales(double D);
/// Scales n at which a C¹ raw weight can be positive: 2^{n-1} ≤ D ≤ 24·2^n.
ScaleRange c1_scales(double D);

/// A Whitney cell: net center i at scale n plus its neighbor centers within 18·2^n.
struct WhitneyCell {
  int scale = 0;
  Index center = 0;
  std::vector<Index> neighbors;
};

/// Reference gauge, evaluated with brute-force dist(y, X) and the explicit neighbor list:
///   g = max(0, min{h, D − h, 5h − D, 9h − |y − x_i|, h + ½ min_{j∼i}(|y − x_j| − |y − x_i|)}),  h = 2^{n−1}.
double cell_gauge(const Eigen::Ref<const Vector>& y, const WhitneyCell& cell, const PointSet& X);

struct CellGauge {
  int scale;
  Index center;
  double gauge;
};

struct CellLookup {
  /// True when y coincides with a point of X; `cells` is then empty.
  bool on_set = false;
  Index set_index = 0;
  double dist_to_set = 0.0;
  std::vector<CellGauge> cells;
};

/// Nets for every scale in [n_min, n_max] with a per-scale range index. Immutable after construction.
class CellComplex {
 public:
  CellComplex(const PointSet& X, ScaleRange range);

  const PointSet& points() const { return X_; }
  const PointIndex& index() const { return index_; }
  ScaleRange range() const { return range_; }
  bool has_scale(int n) const { return n >= range_.n_min && n <= range_.n_max; }
  const Net& net(int n) const;
  const PointIndex& net_index(int n) const;

  /// Cell for a center at scale n, with its neighbor list materialized.
  WhitneyCell cell(int n, Index center) const;

  /// Throws RangeError unless every scale in `needed` is built.
  void require(ScaleRange needed) const;

 private:
  PointSet X_;
  PointIndex index_;
  ScaleRange range_;
  std::vector<Net> nets_;
  std::vector<PointIndex> net_indices_;
};

/// All cells with positive gauge at y. For y ∈ X returns the on-set marker and no cells.
CellLookup locate_cells(const Eigen::Ref<const Vector>& y, const CellComplex& complex);

/// JSON dump of the nets: [{"scale": n, "center_indices": [...]}, ...].
std::string nets_to_json(const CellComplex& complex);

}  // namespace lipext

#endif  // LIPEXT_COVERING_HPP
