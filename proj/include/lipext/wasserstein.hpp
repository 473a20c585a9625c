#ifndef LIPEXT_WASSERSTEIN_HPP
#define LIPEXT_WASSERSTEIN_HPP

#include "lipext/metric.hpp"

#include <string>
#include <vector>

namespace lipext {

struct DiscreteMeasure;

struct TransportEntry {
  Index source;
  Index target;
  double mass;
};

struct TransportPlan {
  std::vector<TransportEntry> entries;
  double cost = 0.0;
};

/// Exact W1 between two probability measures on X by successive shortest paths on the
/// bipartite support graph. Throws DataError when the masses differ by more than 1e-10.
TransportPlan w1_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const PointSet& X);

/// ∫ f dμ − ∫ f dν for f given on every point of X.
double w1_dual_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::span<const double> f);

/// Exact Lipschitz constant of f restricted to the union of the supports.
double lipschitz_on_supports(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::span<const double> f,
                             const PointSet& X);

struct DualCheck {
  double value;
  double lipschitz;
  double w1;
  bool feasible;  // value ≤ Lip(f)·W1 + 1e-9
};

DualCheck w1_dual_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::span<const double> f,
                        const PointSet& X);

/// max ∫ f d(μ − ν) over potentials with |f_i − f_j| ≤ dist on the union of supports, by enumerating
/// spanning trees of tight constraints (Prüfer codes) and edge orientations. Union of at most 7 points.
double w1_dual_bruteforce(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const PointSet& X);

/// ∫ |F_μ − F_ν| on the line, for X ⊂ R.
double w1_line(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const PointSet& X);

std::string plan_to_json(const TransportPlan& plan);

}  // namespace lipext

#endif  // LIPEXT_WASSERSTEIN_HPP
