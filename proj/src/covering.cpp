#include "lipext/covering.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>

namespace lipext {

Net greedy_net(const PointSet& X, double r) {
  if (!(r > 0.0)) throw DataError("net radius must be positive");
  Net net;
  net.radius = r;
  net.scale = static_cast<int>(std::lround(std::log2(r)));
  const PointIndex index(X);
  std::vector<bool> accepted(static_cast<std::size_t>(X.size()), false);
  for (Index i = 0; i < X.size(); ++i) {
    bool free = true;
    for (const auto& [j, d] : index.within(X.point(i), 2.0 * r)) {
      if (j < i && accepted[static_cast<std::size_t>(j)]) {
        free = false;
        break;
      }
    }
    if (free) {
      accepted[static_cast<std::size_t>(i)] = true;
      net.center_indices.push_back(i);
    }
  }
  return net;
}

Net greedy_net(const PointSet& X, int scale) {
  Net net = greedy_net(X, std::ldexp(1.0, scale));
  net.scale = scale;
  return net;
}

bool is_valid_net(const PointSet& X, const Net& net) {
  const double r = net.radius;
  for (std::size_t a = 0; a < net.center_indices.size(); ++a) {
    for (std::size_t b = a + 1; b < net.center_indices.size(); ++b) {
      if (dist(X, net.center_indices[a], net.center_indices[b]) < 2.0 * r) return false;
    }
  }
  for (Index z = 0; z < X.size(); ++z) {
    const bool covered = std::any_of(net.center_indices.begin(), net.center_indices.end(),
                                     [&](Index c) { return dist(X, c, z) < 2.0 * r; });
    if (!covered) return false;
  }
  return true;
}

ScaleRange scale_range_for(double min_dist, double max_dist) {
  if (!(min_dist > 0.0) || !(max_dist >= min_dist)) return {0, -1};
  // Lip gauges need 2^n ∈ (D/2.5, 2D); C¹ weights need 2^n ∈ [D/24, 2D].
  return {static_cast<int>(std::floor(std::log2(min_dist))) - 5,
          static_cast<int>(std::ceil(std::log2(max_dist))) + 2};
}

ScaleRange scale_range(const PointSet& X, std::span<const Vector> queries) {
  if (queries.empty()) throw DataError("scale_range needs at least one query");
  const PointIndex index(X);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const Vector& y : queries) {
    const double D = dist_to_set(y, X, index).distance;
    if (D == 0.0) continue;
    lo = std::min(lo, D);
    hi = std::max(hi, D);
  }
  if (!(hi > 0.0)) return {0, -1};
  return scale_range_for(lo, hi);
}

ScaleRange lip_scales(double D) {
  // 2^{n-1} < D  ⇔ n < log2(D) + 1;  D < 2.5·2^n ⇔ n > log2(D/2.5).
  int lo = static_cast<int>(std::floor(std::log2(D / 2.5)));
  int hi = static_cast<int>(std::ceil(std::log2(D))) + 1;
  while (!(D < 2.5 * std::ldexp(1.0, lo))) ++lo;
  while (!(std::ldexp(1.0, hi - 1) < D)) --hi;
  return {lo, hi};
}

ScaleRange c1_scales(double D) {
  int lo = static_cast<int>(std::floor(std::log2(D / 24.0)));
  int hi = static_cast<int>(std::ceil(std::log2(D))) + 1;
  while (!(D <= 24.0 * std::ldexp(1.0, lo))) ++lo;
  while (!(std::ldexp(1.0, hi - 1) <= D)) --hi;
  return {lo, hi};
}

double cell_gauge(const Eigen::Ref<const Vector>& y, const WhitneyCell& cell, const PointSet& X) {
  const double h = std::ldexp(1.0, cell.scale - 1);
  const double D = dist_to_set(y, X).distance;
  const double p = X.space().p();
  const double di = p_norm((y - X.point(cell.center)).eval(), p);
  double gap = std::numeric_limits<double>::infinity();
  for (Index j : cell.neighbors) {
    if (j == cell.center) continue;
    gap = std::min(gap, p_norm((y - X.point(j)).eval(), p) - di);
  }
  const double g = std::min({h, D - h, 5.0 * h - D, 9.0 * h - di, h + 0.5 * gap});
  return std::max(0.0, g);
}

// ---------------------------------------------------------------------------
// CellComplex
// ---------------------------------------------------------------------------

CellComplex::CellComplex(const PointSet& X, ScaleRange range) : X_(X), index_(X_), range_(range) {
  if (range_.empty()) throw DataError("cell complex needs a nonempty scale range");
  const double sep = min_separation(X_);
  std::vector<Index> all(static_cast<std::size_t>(X_.size()));
  std::iota(all.begin(), all.end(), Index{0});
  for (int n = range_.n_min; n <= range_.n_max; ++n) {
    const double r = std::ldexp(1.0, n);
    Net net;
    if (2.0 * r <= sep) {
      // Every point is accepted when the doubled radius does not exceed the separation.
      net.scale = n;
      net.radius = r;
      net.center_indices = all;
    } else {
      net = greedy_net(X_, n);
    }
    net_indices_.emplace_back(X_, net.center_indices);
    nets_.push_back(std::move(net));
  }
}

const Net& CellComplex::net(int n) const {
  if (!has_scale(n)) throw RangeError("scale " + std::to_string(n) + " not built");
  return nets_[static_cast<std::size_t>(n - range_.n_min)];
}

const PointIndex& CellComplex::net_index(int n) const {
  if (!has_scale(n)) throw RangeError("scale " + std::to_string(n) + " not built");
  return net_indices_[static_cast<std::size_t>(n - range_.n_min)];
}

WhitneyCell CellComplex::cell(int n, Index center) const {
  WhitneyCell c;
  c.scale = n;
  c.center = center;
  for (const auto& [j, d] : net_index(n).within(X_.point(center), 18.0 * std::ldexp(1.0, n) * (1.0 + 1e-15))) {
    if (j != center && d <= 18.0 * std::ldexp(1.0, n)) c.neighbors.push_back(j);
  }
  return c;
}

void CellComplex::require(ScaleRange needed) const {
  if (needed.n_min < range_.n_min || needed.n_max > range_.n_max) {
    throw RangeError("query needs scales [" + std::to_string(needed.n_min) + ", " + std::to_string(needed.n_max) +
                     "] outside the built range [" + std::to_string(range_.n_min) + ", " +
                     std::to_string(range_.n_max) + "]");
  }
}

CellLookup locate_cells(const Eigen::Ref<const Vector>& y, const CellComplex& complex) {
  CellLookup out;
  const Nearest nearest = dist_to_set(y, complex.points(), complex.index());
  out.dist_to_set = nearest.distance;
  if (nearest.distance == 0.0) {
    out.on_set = true;
    out.set_index = nearest.index;
    return out;
  }
  const double D = nearest.distance;
  const ScaleRange scales = lip_scales(D);
  complex.require(scales);
  for (int n = scales.n_min; n <= scales.n_max; ++n) {
    const double h = std::ldexp(1.0, n - 1);
    const double common = std::min({h, D - h, 5.0 * h - D});
    if (!(common > 0.0)) continue;
    // Positive gauges need |y − x_i| < 9h; any center closer than x_i is then within 9·2^n of it,
    // hence a neighbor, so the argmin term only needs the two nearest candidates.
    const auto cand = complex.net_index(n).within(y, 9.0 * h);
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = d1;
    Index i1 = -1;
    for (const auto& [i, d] : cand) {
      if (d < d1) {
        d2 = d1;
        d1 = d;
        i1 = i;
      } else if (d < d2) {
        d2 = d;
      }
    }
    for (const auto& [i, d] : cand) {
      const double other = (i == i1) ? d2 : d1;
      const double g = std::min({common, 9.0 * h - d, h + 0.5 * (other - d)});
      if (g > 0.0) out.cells.push_back({n, i, g});
    }
  }
  return out;
}

std::string nets_to_json(const CellComplex& complex) {
  nlohmann::json arr = nlohmann::json::array();
  for (int n = complex.range().n_min; n <= complex.range().n_max; ++n) {
    arr.push_back({{"scale", n}, {"center_indices", complex.net(n).center_indices}});
  }
  return arr.dump();
}

}  // namespace lipext
