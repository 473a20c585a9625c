#ifndef LIPEXT_HARNESS_HPP
#define LIPEXT_HARNESS_HPP

#include "lipext/extension.hpp"
#include "lipext/random.hpp"

#include "json.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace lipext {

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

enum class Family { Grid, SphereNet, Cantor, RandomCloud };

Family parse_family(std::string_view name);
std::string_view family_name(Family f);

/// Grid: size^d lattice in [0,1]^d. Cantor: level-`size` middle-thirds endpoints in R.
/// SphereNet: greedy net at radius 1/size of a dense sample of the unit sphere in R^d.
/// RandomCloud: `size` uniform points in [0,1]^d.
struct SpaceSpec {
  Family family = Family::Grid;
  Index dimension = 1;
  Index size = 4;
  std::uint64_t seed = 0;
  double p = 2.0;

  std::string name() const;
};

PointSet generate_space(const SpaceSpec& spec);

/// f(y) = min_j (v_j + |y − q_j|): Lip(f) ≤ 1 on any subset.
struct McShaneFunction {
  Matrix anchors;  // d × J
  Vector offsets;  // J
  double p = 2.0;

  double operator()(const Eigen::Ref<const Vector>& y) const;
  ScalarField on(const PointSet& X) const;
};

/// Anchors drawn in [−¼, 5/4]^d with offsets in [0, ½]; depends only on (d, count, seed, p).
McShaneFunction make_mcshane(Index dimension, std::size_t anchors, std::uint64_t seed, double p = 2.0);
ScalarField mcshane_function(const PointSet& X, std::size_t anchors, std::uint64_t seed);

/// Uniform in the bounding box of X grown by 25% (degenerate axes get unit width), rejecting points of X.
std::vector<Vector> sample_queries(const PointSet& X, std::size_t count, Rng& rng);

/// Pairs (y, y + ρ·dist(y,X)·v) with ρ log-uniform in [1e−3, 2] and v a random unit direction.
std::vector<std::pair<Vector, Vector>> sample_pairs(const PointSet& X, const PointIndex& index,
                                                    std::span<const Vector> base, Rng& rng);

/// Jet of f(x) = |x|² (k = 1), L_x = 2xᵀ (Euclidean form, used with p = 2).
Jet square_jet(const PointSet& X);
/// Jet of f(x) = Σ sin(a_c x_c) + ½|x|² with exact differentials.
Jet smooth_jet(const PointSet& X);
/// Values of f(x) = |x|² with random differentials: breaks the remainder hypothesis.
Jet corrupted_jet(const PointSet& X, std::uint64_t seed);
/// Random values and differentials with k components.
Jet random_jet(const PointSet& X, Index k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

/// One point set with every structure the suite evaluates on it.
struct Instance {
  std::string name;
  SpaceSpec spec;
  PointSet X;
  DoublingEstimate doubling;
  std::shared_ptr<const CellComplex> complex;
  double lip_m = 1.01;
  double c1_m = 1.01;
  double kernel_m = 1.0;
};

/// Builds nets over scales covering every point in `evaluation_points` (plus a margin).
Instance build_instance(const SpaceSpec& spec, std::span<const Vector> evaluation_points);
Instance build_instance(const SpaceSpec& spec, PointSet X, std::span<const Vector> evaluation_points);

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

struct SuiteConfig {
  std::string suite = "standard";  // standard | singleton | corrupted-jet | quick
  std::uint64_t seed = 1;
  double p = 2.0;
  unsigned jobs = 1;
  std::size_t queries = 10000;
  std::size_t lip_pairs = 10000;
  std::size_t w1_pairs = 1000;
  std::size_t fd_queries = 1000;
  std::size_t linearity_queries = 200;
  std::size_t w1_instances = 100;
  /// Frozen thresholds keyed by "<criterion>/<method>/<instance>"; empty disables the calibrated checks.
  std::map<std::string, double> calibration;
  double calibration_slack = 1.25;
};

enum class Status { Pass, Fail, NotApplicable };

struct CriterionResult {
  int id = 0;
  std::string title;
  Status status = Status::Pass;
  std::string detail;
};

struct VerifyReport {
  nlohmann::ordered_json json;
  std::vector<CriterionResult> criteria;  // ids 1..12 in order
  std::vector<std::string> warnings;
  /// Measured values eligible for calibration, keyed like SuiteConfig::calibration.
  std::map<std::string, double> measured;

  bool passed() const;
};

std::vector<SpaceSpec> suite_specs(const std::string& suite, double p);

VerifyReport run_suite(const SuiteConfig& config);

std::string_view status_name(Status s);

/// Calibration file: {"<key>": threshold, ...}.
std::map<std::string, double> read_calibration(const std::string& path);
void write_calibration(const std::string& path, const std::map<std::string, double>& values);

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct SweepRow {
  std::string name;
  Index dimension;
  Index size;
  Index points;
  int lambda_hat;
  double lip_ratio_kernel;
  double lip_ratio_cells;
  double projection_lip_cells;
};

/// λ̂ against measured Lip(Tf)/Lip(f) over grids d = 1..max_dim at fixed resolution.
std::vector<SweepRow> run_sweep(Index max_dim, Index size, std::size_t pairs, std::uint64_t seed, double p,
                                unsigned jobs);

}  // namespace lipext

#endif  // LIPEXT_HARNESS_HPP
