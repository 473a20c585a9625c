#include "lipext/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace lipext {

double lip_exponent(int lambda_hat) { return std::max(std::log2(static_cast<double>(lambda_hat)), 1.01); }

double c1_exponent(int lambda_hat) {
  return std::max(std::log(4.0) + 6.0 * std::log(static_cast<double>(lambda_hat)), 1.01);
}

LipPartition::LipPartition(std::shared_ptr<const CellComplex> complex, double exponent)
    : complex_(std::move(complex)), m_(exponent) {
  if (!complex_) throw DataError("partition needs a cell complex");
  if (!(m_ > 0.0)) throw DataError("partition exponent must be positive");
}

std::vector<CellWeight> eval_lip_partition(const LipPartition& P, const Eigen::Ref<const Vector>& y) {
  const CellLookup lookup = locate_cells(y, P.complex());
  if (lookup.on_set) throw DataError("Lipschitz partition is undefined on X");
  if (lookup.cells.empty()) throw RangeError("no cell with positive gauge at the query");
  double gmax = 0.0;
  for (const auto& c : lookup.cells) gmax = std::max(gmax, c.gauge);
  std::vector<CellWeight> out;
  out.reserve(lookup.cells.size());
  double total = 0.0;
  for (const auto& c : lookup.cells) {
    const double w = std::pow(c.gauge / gmax, P.exponent());
    out.push_back({c.scale, c.center, w});
    total += w;
  }
  for (auto& w : out) w.weight /= total;
  return out;
}

// ---------------------------------------------------------------------------
// ξ
// ---------------------------------------------------------------------------

CutoffXi::CutoffXi(double m, double delta, XiShape shape, std::size_t check_points)
    : m_(m), delta_(delta), shape_(shape) {
  if (!(m_ >= 1.0) || !std::isfinite(m_)) throw DataError("cutoff exponent must be at least 1");
  if (!(delta_ > 0.0)) throw DataError("cutoff width must be positive");
  if (shape_ == XiShape::EqualityBranch) {
    t1_ = 0.5 * delta_ * std::pow(0.5, 1.0 / m_);
    alpha_ = 2.0 * bound(0.5) * (delta_ - t1_);
    if (!(alpha_ > 1.0)) throw DataError("cutoff cap exponent must exceed 1");
  } else {
    t1_ = 0.5 * delta_;
  }

  // Grid check of ξ′ ≤ f(ξ), monotonicity and the [0, 1] range.
  double prev = 0.0;
  margin_ = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= check_points; ++k) {
    const double t = delta_ * (-0.05 + 1.1 * static_cast<double>(k) / static_cast<double>(check_points));
    const double v = (*this)(t);
    const double dv = derivative(t);
    const double fv = bound(v);
    margin_ = std::max(margin_, dv - fv);
    if (dv > fv * (1.0 + 1e-12) + 1e-300) {
      throw DataError("cutoff violates xi' <= f(xi) at t = " + std::to_string(t));
    }
    if (v < prev || v < 0.0 || v > 1.0 || dv < 0.0) throw DataError("cutoff is not an increasing map into [0, 1]");
    prev = v;
  }
  const double jump = std::abs(derivative(std::nextafter(t1_, 0.0)) - derivative(std::nextafter(t1_, 1.0)));
  if (jump > 1e-9 * bound(0.5)) throw DataError("cutoff derivative is discontinuous at the branch point");
}

double CutoffXi::ramp(double t) const {
  const double s = t / delta_;
  return s * (2.0 - s);
}

double CutoffXi::ramp_slope(double t) const { return 2.0 * (1.0 - t / delta_) / delta_; }

double CutoffXi::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= delta_) return 1.0;
  if (shape_ == XiShape::QuadraticRamp) return std::pow(ramp(t), m_);
  if (t <= t1_) return std::pow(2.0 * t / delta_, m_);
  const double s = (t - t1_) / (delta_ - t1_);
  return 1.0 - 0.5 * std::pow(1.0 - s, alpha_);
}

double CutoffXi::derivative(double t) const {
  if (t <= 0.0 || t >= delta_) return 0.0;
  if (shape_ == XiShape::QuadraticRamp) return m_ * std::pow(ramp(t), m_ - 1.0) * ramp_slope(t);
  if (t <= t1_) return (2.0 * m_ / delta_) * std::pow(2.0 * t / delta_, m_ - 1.0);
  const double s = (t - t1_) / (delta_ - t1_);
  return 0.5 * alpha_ / (delta_ - t1_) * std::pow(1.0 - s, alpha_ - 1.0);
}

double CutoffXi::log_derivative(double t) const {
  if (t <= 0.0) throw DataError("log-derivative of the cutoff needs xi > 0");
  if (t >= delta_) return 0.0;
  if (shape_ == XiShape::QuadraticRamp) return m_ * ramp_slope(t) / ramp(t);
  if (t <= t1_) return m_ / t;
  return derivative(t) / (*this)(t);
}

double CutoffXi::bound(double value) const {
  if (value <= 0.0) return 0.0;
  return (2.0 * m_ / delta_) * std::pow(value, 1.0 - 1.0 / m_);
}

CutoffXi build_xi(double m, double delta, XiShape shape) { return CutoffXi(m, delta, shape); }

// ---------------------------------------------------------------------------
// C¹ partition
// ---------------------------------------------------------------------------

C1Partition::C1Partition(std::shared_ptr<const CellComplex> complex, double exponent, XiShape shape)
    : complex_(std::move(complex)), xi_(exponent, kDelta, shape) {
  if (!complex_) throw DataError("partition needs a cell complex");
}

double c1_raw_weight(const C1Partition& P, const Eigen::Ref<const Vector>& y, int n, Index center) {
  const PointSet& X = P.complex().points();
  const double p = X.space().p();
  const double s = std::ldexp(1.0, n);
  const double ri = p_norm((y - X.point(center)).eval(), p) / s;
  const auto& xi = P.xi();
  double raw = xi(8.0 * C1Partition::kEll - ri) * xi(ri - C1Partition::kEll);
  for (Index j : P.complex().net(n).center_indices) {
    if (j == center || dist(X, j, center) > P.neighbor_radius(n)) continue;
    const double rj = p_norm((y - X.point(j)).eval(), p) / s;
    raw *= xi(rj - ri + C1Partition::kDelta);
  }
  return raw;
}

C1Evaluation eval_c1_partition(const C1Partition& P, const Eigen::Ref<const Vector>& y) {
  const CellComplex& complex = P.complex();
  const PointSet& X = complex.points();
  const double p = X.space().p();
  const auto& xi = P.xi();
  constexpr double ell = C1Partition::kEll;
  constexpr double delta = C1Partition::kDelta;

  C1Evaluation out;
  const Nearest nearest = dist_to_set(y, X, complex.index());
  out.dist_to_set = nearest.distance;
  if (nearest.distance == 0.0) throw DataError("C1 partition is undefined on X");
  const ScaleRange scales = c1_scales(nearest.distance);
  complex.require(scales);

  struct Candidate {
    double d;
    Index id;
  };
  for (int n = scales.n_min; n <= scales.n_max; ++n) {
    const double s = std::ldexp(1.0, n);
    std::vector<Candidate> cand;
    for (const auto& [id, d] : complex.net_index(n).within(y, 8.0 * ell * s)) cand.push_back({d, id});
    std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
      return a.d != b.d ? a.d < b.d : a.id < b.id;
    });
    std::vector<Vector> grad_r(cand.size());
    auto radial_gradient = [&](std::size_t k) -> const Vector& {
      if (grad_r[k].size() == 0) {
        const Vector v = y - X.point(cand[k].id);
        grad_r[k] = p_norm_gradient(v, p) / s;
      }
      return grad_r[k];
    };
    for (std::size_t k = 0; k < cand.size(); ++k) {
      const double rk = cand[k].d / s;
      const double a_outer = 8.0 * ell - rk;
      const double a_inner = rk - ell;
      if (!(a_outer > 0.0) || !(a_inner > 0.0)) continue;
      double raw = xi(a_outer) * xi(a_inner);
      // Σ (ξ′/ξ)(a) ∇a over all factors, built alongside the product.
      double coef_k = -xi.log_derivative(a_outer) + xi.log_derivative(a_inner);
      std::vector<std::pair<std::size_t, double>> terms;
      // Factors for neighbors j with r_j ≥ r_k equal 1, so only nearer candidates matter.
      for (std::size_t j = 0; j < k && raw > 0.0; ++j) {
        if (cand[j].d == cand[k].d) continue;
        if (dist(X, cand[j].id, cand[k].id) > P.neighbor_radius(n)) continue;
        const double a = cand[j].d / s - rk + delta;
        if (!(a > 0.0)) {
          raw = 0.0;
          break;
        }
        if (a >= delta) continue;
        raw *= xi(a);
        const double ld = xi.log_derivative(a);
        terms.emplace_back(j, ld);
        coef_k -= ld;
      }
      if (!(raw > 0.0)) continue;
      if (!(cand[k].d > 0.0)) throw std::logic_error("norm gradient requested at a center");
      Vector grad = coef_k * radial_gradient(k);
      for (const auto& [j, ld] : terms) grad += ld * radial_gradient(j);
      grad *= raw;
      out.weights.push_back({n, cand[k].id, raw, 0.0, std::move(grad)});
      out.raw_sum += raw;
    }
  }
  if (!(out.raw_sum > 0.0)) throw RangeError("no positive C1 weight at the query");
  Vector grad_sum = Vector::Zero(y.size());
  for (const auto& w : out.weights) grad_sum += w.gradient;
  for (auto& w : out.weights) {
    w.weight = w.raw / out.raw_sum;
    w.gradient = (w.gradient - w.weight * grad_sum) / out.raw_sum;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Slope audits
// ---------------------------------------------------------------------------

SlopeAudit slope_sum_audit(const LipPartition& P, std::span<const Vector> queries, std::span<const Vector> directions,
                           double relative_step) {
  SlopeAudit audit;
  const PointSet& X = P.complex().points();
  const double p = X.space().p();
  std::vector<Vector> dirs;
  for (Index c = 0; c < X.dimension(); ++c) {
    dirs.push_back(Vector::Unit(X.dimension(), c));
    dirs.push_back(-Vector::Unit(X.dimension(), c));
  }
  for (const Vector& v : directions) dirs.push_back(v / p_norm(v, p));
  double total = 0.0;
  for (const Vector& y : queries) {
    const auto base = eval_lip_partition(P, y);
    const double D = dist_to_set(y, X, P.complex().index()).distance;
    const double h = relative_step * D;
    std::map<std::pair<int, Index>, double> w0, slope;
    for (const auto& w : base) w0[{w.scale, w.center}] = w.weight;
    for (const Vector& v : dirs) {
      std::map<std::pair<int, Index>, double> w1;
      for (const auto& w : eval_lip_partition(P, y + h * v)) w1[{w.scale, w.center}] = w.weight;
      for (const auto& [key, value] : w1) {
        const auto it = w0.find(key);
        const double diff = std::abs(value - (it == w0.end() ? 0.0 : it->second));
        slope[key] = std::max(slope[key], diff / h);
      }
      for (const auto& [key, value] : w0) {
        if (!w1.count(key)) slope[key] = std::max(slope[key], value / h);
      }
    }
    double sum = 0.0;
    for (const auto& [key, value] : slope) sum += value;
    const double value = D * sum;
    audit.max_value = std::max(audit.max_value, value);
    audit.max_multiplicity = std::max(audit.max_multiplicity, base.size());
    total += value;
    ++audit.queries;
  }
  audit.mean_value = audit.queries ? total / static_cast<double>(audit.queries) : 0.0;
  return audit;
}

SlopeAudit slope_sum_audit(const C1Partition& P, std::span<const Vector> queries) {
  SlopeAudit audit;
  const double p = P.complex().points().space().p();
  double total = 0.0;
  for (const Vector& y : queries) {
    const C1Evaluation e = eval_c1_partition(P, y);
    double sum = 0.0;
    for (const auto& w : e.weights) sum += dual_norm(w.gradient, p);
    const double value = e.dist_to_set * sum;
    audit.max_value = std::max(audit.max_value, value);
    audit.max_multiplicity = std::max(audit.max_multiplicity, e.weights.size());
    total += value;
    ++audit.queries;
  }
  audit.mean_value = audit.queries ? total / static_cast<double>(audit.queries) : 0.0;
  return audit;
}

}  // namespace lipext
