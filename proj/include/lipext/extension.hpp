#ifndef LIPEXT_EXTENSION_HPP
#define LIPEXT_EXTENSION_HPP

#include "lipext/projection.hpp"

#include <vector>

namespace lipext {

/// Values in R^k at the points of X, one column per point.
struct ScalarField {
  Matrix values;  // k × |X|

  Index codim() const { return values.rows(); }
  Index size() const { return values.cols(); }
};

/// Values and candidate differentials L_x (k × d) at the points of X.
struct Jet {
  Matrix values;                     // k × |X|
  std::vector<Matrix> differentials;  // |X| matrices, each k × d

  Index codim() const { return values.rows(); }
  Index size() const { return values.cols(); }
  /// Throws DataError unless the shapes agree with X.
  void validate(const PointSet& X) const;
};

/// Jet of the affine map y ↦ A y + b.
Jet affine_jet(const PointSet& X, const Matrix& A, const Vector& b);

/// Componentwise max norm used for codomain measurements.
inline double codomain_norm(const Eigen::Ref<const Vector>& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

inline Vector integrate(const Matrix& values, const DiscreteMeasure& mu) {
  Vector out = Vector::Zero(values.rows());
  for (std::size_t k = 0; k < mu.support.size(); ++k) out += mu.weights(static_cast<Index>(k)) * values.col(mu.support[k]);
  return out;
}

/// Tf(y) = Σ w_i f(x_i) for μ_y = Σ w_i δ_{x_i}.
template <RandomProjection P>
Vector extend_lip(const ScalarField& f, const P& proj, const Eigen::Ref<const Vector>& y) {
  return integrate(f.values, proj(y));
}

/// f̃(y) = Σ w_i [f(x_i) + L_i (y − x_i)]; exact restriction on X.
Vector extend_c1(const Jet& jet, const RegularProjector& proj, const Eigen::Ref<const Vector>& y);

/// df̃_y = Σ w_i L_i + Σ [f(x_i) + L_i (y − x_i)] c_iᵀ; equals L_x on X.
Matrix differential_c1(const Jet& jet, const RegularProjector& proj, const Eigen::Ref<const Vector>& y);

struct C1Value {
  Vector value;
  Matrix differential;
};

/// Value and differential from a single projection.
C1Value evaluate_c1(const Jet& jet, const RegularProjector& proj, const Eigen::Ref<const Vector>& y);
/// Same, reusing a projection already computed at y.
C1Value evaluate_c1(const Jet& jet, const PointSet& X, const RegularProjection& r, const Eigen::Ref<const Vector>& y);

// ---------------------------------------------------------------------------
// Remainder diagnostics
// ---------------------------------------------------------------------------

/// R(x, y) = f(y) − f(x) − L_x (y − x).
Vector remainder(const Jet& jet, const PointSet& X, Index x, Index y);

/// ω(t) = max over pairs with 0 < |x − y| ≤ t of |R(x,y)| / |x − y|, one value per radius.
std::vector<double> remainder_modulus(const Jet& jet, const PointSet& X, std::span<const double> radii);

struct DecayStep {
  double distance;       // |x − y_k|
  double ratio_bar;      // ∫ |R(z,x)| dμ̄_{y_k} / |x − y_k|, μ̄ = dist(y,X)|ν_y| / C
  double ratio_mu;       // ∫ |R(z,x)| dμ_{y_k} / |x − y_k|
  double differential_gap;  // ‖df̃_{y_k} − L_x‖ in the max entry norm
};

/// Audit along one sequence y_k → x_x. C is the largest dist(y,X)·‖ν_y‖_TV seen on the sequence.
std::vector<DecayStep> remainder_integral_audit(const Jet& jet, const RegularProjector& proj, Index x,
                                                std::span<const Vector> sequence);

/// Exact Lip(f) on X under the codomain max norm, over all pairs (or a seeded sample of pairs when |X| > cap).
double lipschitz_constant(const PointSet& X, const Matrix& values, Index cap = 5000, std::uint64_t seed = 0);

struct ExtensionReport {
  double lip_ratio = 0.0;
  double c1_gradient_error = 0.0;
  std::vector<double> remainder_decay;
  double affine_reproduction_error = 0.0;
};

}  // namespace lipext

#endif  // LIPEXT_EXTENSION_HPP
