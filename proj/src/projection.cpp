#include "lipext/projection.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>

namespace lipext {

DiscreteMeasure DiscreteMeasure::dirac(Index i) {
  DiscreteMeasure mu;
  mu.support = {i};
  mu.weights = Vector::Ones(1);
  return mu;
}

Vector VectorMeasure::total() const {
  if (covectors.cols() == 0) return Vector::Zero(covectors.rows());
  return covectors.rowwise().sum();
}

double VectorMeasure::total_variation(double p) const {
  double tv = 0.0;
  for (Index k = 0; k < covectors.cols(); ++k) tv += dual_norm(covectors.col(k).eval(), p);
  return tv;
}

DiscreteMeasure make_measure(std::vector<std::pair<Index, double>> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  DiscreteMeasure mu;
  std::vector<double> w;
  for (const auto& [i, value] : atoms) {
    if (!mu.support.empty() && mu.support.back() == i) {
      w.back() += value;
    } else {
      mu.support.push_back(i);
      w.push_back(value);
    }
  }
  mu.weights = Eigen::Map<const Vector>(w.data(), static_cast<Index>(w.size()));
  return mu;
}

double KernelProfile::bump(double t) const {
  if (t <= 2.0) return 1.0;
  if (t >= 3.0) return 0.0;
  const double u = t - 2.0;
  return 1.0 - 3.0 * u * u + 2.0 * u * u * u;
}

double KernelProfile::bump_derivative(double t) const {
  if (t <= 2.0 || t >= 3.0) return 0.0;
  const double u = t - 2.0;
  return -6.0 * u + 6.0 * u * u;
}

double kernel_exponent(int lambda_hat) {
  return std::max(1.0, std::log(static_cast<double>(lambda_hat)) / 3.0);
}

DiscreteMeasure project_cells(const Eigen::Ref<const Vector>& y, const LipPartition& P) {
  const Nearest nearest = dist_to_set(y, P.complex().points(), P.complex().index());
  if (nearest.distance == 0.0) return DiscreteMeasure::dirac(nearest.index);
  std::vector<std::pair<Index, double>> atoms;
  for (const auto& w : eval_lip_partition(P, y)) atoms.emplace_back(w.center, w.weight);
  return make_measure(std::move(atoms));
}

DiscreteMeasure project_kernel(const Eigen::Ref<const Vector>& y, const PointSet& X, const PointIndex& index,
                               const KernelProfile& K) {
  const Nearest nearest = dist_to_set(y, X, index);
  if (nearest.distance == 0.0) return DiscreteMeasure::dirac(nearest.index);
  const double D = nearest.distance;
  std::vector<std::pair<Index, double>> atoms;
  double total = 0.0;
  for (const auto& [i, d] : index.within(y, 3.0 * D)) {
    const double u = K.weight(d / D) * (X.has_weights() ? X.weights()(i) : 1.0);
    if (u > 0.0) {
      atoms.emplace_back(i, u);
      total += u;
    }
  }
  for (auto& a : atoms) a.second /= total;
  return make_measure(std::move(atoms));
}

DiscreteMeasure project_kernel(const Eigen::Ref<const Vector>& y, const PointSet& X, const KernelProfile& K) {
  return project_kernel(y, X, PointIndex(X), K);
}

RegularProjection project_regular(const Eigen::Ref<const Vector>& y, const C1Partition& P) {
  RegularProjection out;
  const PointSet& X = P.complex().points();
  const Nearest nearest = dist_to_set(y, X, P.complex().index());
  if (nearest.distance == 0.0) {
    out.mu = DiscreteMeasure::dirac(nearest.index);
    out.nu.support = {nearest.index};
    out.nu.covectors = Matrix::Zero(X.dimension(), 1);
    return out;
  }
  const C1Evaluation e = eval_c1_partition(P, y);
  out.dist_to_set = e.dist_to_set;

  std::vector<std::pair<Index, std::size_t>> order;
  for (std::size_t k = 0; k < e.weights.size(); ++k) order.emplace_back(e.weights[k].center, k);
  std::sort(order.begin(), order.end());
  std::vector<double> w;
  std::vector<Vector> c;
  for (const auto& [i, k] : order) {
    if (!out.mu.support.empty() && out.mu.support.back() == i) {
      w.back() += e.weights[k].weight;
      c.back() += e.weights[k].gradient;
    } else {
      out.mu.support.push_back(i);
      w.push_back(e.weights[k].weight);
      c.push_back(e.weights[k].gradient);
    }
  }
  out.mu.weights = Eigen::Map<const Vector>(w.data(), static_cast<Index>(w.size()));
  out.nu.support = out.mu.support;
  out.nu.covectors.resize(X.dimension(), static_cast<Index>(c.size()));
  for (std::size_t k = 0; k < c.size(); ++k) out.nu.covectors.col(static_cast<Index>(k)) = c[k];
  return out;
}

std::string measure_to_json(const DiscreteMeasure& mu) {
  nlohmann::json j;
  j["support"] = mu.support;
  j["weights"] = std::vector<double>(mu.weights.begin(), mu.weights.end());
  return j.dump();
}

std::string measure_to_json(const VectorMeasure& nu) {
  nlohmann::json j;
  j["support"] = nu.support;
  nlohmann::json cov = nlohmann::json::array();
  for (Index k = 0; k < nu.covectors.cols(); ++k) {
    const Vector col = nu.covectors.col(k);
    cov.push_back(std::vector<double>(col.begin(), col.end()));
  }
  j["covectors"] = cov;
  return j.dump();
}

}  // namespace lipext
