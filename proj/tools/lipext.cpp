// Command-line front end: estimate | extend | extend-c1 | verify | grid | sweep.
// Exit codes: 0 success, 1 usage, 2 data error, 3 verification failure.

#include "lipext/harness.hpp"
#include "lipext/io.hpp"
#include "lipext/parallel.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace lipext;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kVerify = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string points, values, jets, queries, method = "kernel", out, report, calibration, write_calibration;
  std::string suite = "standard", grid;
  double p = 2.0;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  Index max_dim = 3, size = 8;
  std::size_t pairs = 2000;
};

/// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw DataError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<Vector> read_queries(const std::string& path, Index dim) {
  const Matrix q = read_csv(path);
  if (q.cols() != dim) {
    throw DataError(path + ": queries have " + std::to_string(q.cols()) + " columns, points have " + std::to_string(dim));
  }
  std::vector<Vector> out;
  for (Index r = 0; r < q.rows(); ++r) out.push_back(q.row(r).transpose());
  return out;
}

/// Cell complex over the scales the queries need, inside a window anchored at the data's own scales.
std::shared_ptr<const CellComplex> complex_for(const PointSet& X, std::span<const Vector> queries) {
  int lo = -60, hi = 60;
  if (X.size() >= 2) {
    double diam = 0.0;
    for (double d : pairwise_distances(X)) diam = std::max(diam, d);
    lo = static_cast<int>(std::floor(std::log2(min_separation(X)))) - 40;
    hi = static_cast<int>(std::ceil(std::log2(diam))) + 40;
  }
  const PointIndex index(X);
  for (std::size_t r = 0; r < queries.size(); ++r) {
    const double D = dist_to_set(queries[r], X, index).distance;
    if (D == 0.0) continue;
    const ScaleRange need = scale_range_for(D, D);
    if (need.n_min < lo || need.n_max > hi) {
      throw RangeError("query row " + std::to_string(r + 1) + " is outside the dyadic range of the data");
    }
  }
  ScaleRange range = scale_range(X, queries);
  if (range.empty()) range = {0, 0};
  return std::make_shared<const CellComplex>(X, range);
}

int lambda_for(const PointSet& X) {
  DoublingOptions opts;
  opts.exhaustive = X.size() <= 8;
  return estimate_doubling(X, opts).lambda_hat;
}

/// Evaluates Tf at every query, in order.
Matrix extend_values(const PointSet& X, const ScalarField& f, std::span<const Vector> queries,
                     const std::string& method, unsigned jobs) {
  const int lambda = lambda_for(X);
  Matrix out(f.codim(), static_cast<Index>(queries.size()));
  if (method == "kernel") {
    const KernelProjector proj(X, KernelProfile{kernel_exponent(lambda)});
    parallel_for(queries.size(), jobs, [&](std::size_t q) { out.col(static_cast<Index>(q)) = extend_lip(f, proj, queries[q]); });
  } else {
    const CellProjector proj(LipPartition(complex_for(X, queries), lip_exponent(lambda)));
    parallel_for(queries.size(), jobs, [&](std::size_t q) { out.col(static_cast<Index>(q)) = extend_lip(f, proj, queries[q]); });
  }
  return out;
}

std::vector<C1Value> extend_jet(const PointSet& X, const Jet& jet, std::span<const Vector> queries, unsigned jobs) {
  const RegularProjector proj(C1Partition(complex_for(X, queries), c1_exponent(lambda_for(X))));
  std::vector<C1Value> out(queries.size());
  parallel_for(queries.size(), jobs, [&](std::size_t q) { out[q] = evaluate_c1(jet, proj, queries[q]); });
  return out;
}

PointSet jet_points(const Options& o, const JetFile& jf) {
  PointSet X(AmbientSpace(jf.points.rows(), o.p), jf.points);
  if (!o.points.empty()) {
    const PointSet P = read_points(o.points, o.p);
    if (P.points().rows() != jf.points.rows() || P.points().cols() != jf.points.cols() || P.points() != jf.points) {
      throw DataError("--points does not match the points stored in the jet file");
    }
  }
  jf.jet.validate(X);
  return X;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string("missing required option ") + flag);
}

// ---------------------------------------------------------------------------

int cmd_estimate(const Options& o) {
  require(o.points, "--points");
  const PointSet X = read_points(o.points, o.p);
  DoublingOptions dopt;
  dopt.exhaustive = X.size() <= 8;
  const DoublingEstimate lam = estimate_doubling(X, dopt);
  nlohmann::ordered_json j;
  j["points"] = X.size();
  j["dimension"] = X.dimension();
  j["doubling"] = {{"lambda_hat", lam.lambda_hat},
                   {"exact", lam.exact},
                   {"audited_pairs", lam.sampled_pairs.size()},
                   {"skipped", lam.skipped}};
  nlohmann::ordered_json caps = nlohmann::ordered_json::array();
  CapacityOptions copt;
  copt.exhaustive = X.size() <= 8;
  for (double eps : {0.5, 0.2, 0.1}) {
    const CapacityEstimate k = estimate_capacity(X, eps, copt);
    caps.push_back({{"epsilon", eps},
                    {"kappa_hat", k.kappa_hat},
                    {"exact", k.exact},
                    {"partial", k.partial},
                    {"witness_center", k.witness_center},
                    {"witness_radius", k.witness_radius},
                    {"witness_packing", k.witness_packing}});
  }
  j["capacity"] = caps;
  if (X.size() >= 2) {
    double diam = 0.0;
    for (double d : pairwise_distances(X)) diam = std::max(diam, d);
    const CellComplex complex(X, scale_range_for(min_separation(X), diam));
    j["nets"] = nlohmann::ordered_json::parse(nets_to_json(complex));
  }
  Output out(o.out);
  out.stream() << j.dump(2) << '\n';
  return kOk;
}

int cmd_extend(const Options& o) {
  require(o.points, "--points");
  require(o.values, "--values");
  require(o.queries, "--queries");
  const PointSet X = read_points(o.points, o.p);
  const ScalarField f = read_values(o.values, X.size());
  const auto queries = read_queries(o.queries, X.dimension());
  const Matrix v = extend_values(X, f, queries, o.method, o.jobs);
  Output out(o.out);
  std::vector<std::string> names;
  for (Index r = 0; r < f.codim(); ++r) names.push_back("f" + std::to_string(r + 1));
  write_csv_header(out.stream(), names);
  for (Index q = 0; q < v.cols(); ++q) write_csv_row(out.stream(), std::vector<double>(v.col(q).begin(), v.col(q).end()));
  return kOk;
}

int cmd_extend_c1(const Options& o) {
  require(o.jets, "--jets");
  require(o.queries, "--queries");
  const JetFile jf = read_jet_json(o.jets);
  const PointSet X = jet_points(o, jf);
  const auto queries = read_queries(o.queries, X.dimension());
  const auto values = extend_jet(X, jf.jet, queries, o.jobs);
  Output out(o.out);
  std::vector<std::string> names;
  for (Index r = 0; r < jf.jet.codim(); ++r) names.push_back("f" + std::to_string(r + 1));
  for (Index r = 0; r < jf.jet.codim(); ++r) {
    for (Index c = 0; c < X.dimension(); ++c) names.push_back("df" + std::to_string(r + 1) + "_x" + std::to_string(c + 1));
  }
  write_csv_header(out.stream(), names);
  for (const auto& v : values) {
    std::vector<double> row(v.value.begin(), v.value.end());
    for (Index r = 0; r < v.differential.rows(); ++r) {
      for (Index c = 0; c < v.differential.cols(); ++c) row.push_back(v.differential(r, c));
    }
    write_csv_row(out.stream(), row);
  }
  return kOk;
}

int cmd_verify(const Options& o) {
  SuiteConfig cfg;
  cfg.suite = o.suite;
  cfg.seed = o.seed;
  cfg.p = o.p;
  cfg.jobs = o.jobs;
  if (!o.calibration.empty()) cfg.calibration = read_calibration(o.calibration);
  spdlog::info("running suite '{}' with {} job(s)", cfg.suite, cfg.jobs);
  const VerifyReport rep = run_suite(cfg);
  for (const auto& c : rep.criteria) {
    spdlog::info("criterion {:>2} {:<15} {}: {}", c.id, status_name(c.status), c.title, c.detail);
  }
  for (const auto& w : rep.warnings) spdlog::warn("{}", w);
  if (!o.write_calibration.empty()) write_calibration(o.write_calibration, rep.measured);
  const std::string text = rep.json.dump(2) + "\n";
  if (!o.report.empty()) {
    std::ofstream f(o.report);
    if (!f) throw DataError("cannot write " + o.report);
    f << text;
  }
  if (o.report.empty() || !o.out.empty()) {
    Output out(o.out);
    out.stream() << text;
  }
  return rep.passed() ? kOk : kVerify;
}

/// "lo:hi:n" per axis, comma separated.
std::vector<std::vector<double>> parse_grid(const std::string& spec, Index dim) {
  std::vector<std::vector<double>> axes;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    double lo = 0, hi = 0;
    long n = 0;
    char c1 = 0, c2 = 0;
    std::stringstream ps(part);
    if (!(ps >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 || !(ps >> std::ws).eof()) {
      throw UsageError("grid axis '" + part + "' is not lo:hi:n");
    }
    std::vector<double> axis;
    for (long k = 0; k < n; ++k) axis.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
    axes.push_back(std::move(axis));
  }
  if (static_cast<Index>(axes.size()) != dim) throw UsageError("grid needs one axis per dimension");
  return axes;
}

int cmd_grid(const Options& o) {
  require(o.points, "--points");
  if (o.values.empty() == o.jets.empty()) throw UsageError("grid needs exactly one of --values or --jets");
  PointSet X = o.jets.empty() ? read_points(o.points, o.p) : PointSet(AmbientSpace(1), Matrix::Zero(1, 1));
  std::optional<JetFile> jf;
  if (!o.jets.empty()) {
    jf = read_jet_json(o.jets);
    X = jet_points(o, *jf);
  }
  if (X.dimension() > 2) throw UsageError("grid output supports dimension 1 or 2 only");
  std::vector<std::vector<double>> axes;
  if (o.grid.empty()) {
    for (Index c = 0; c < X.dimension(); ++c) {
      const double lo = X.points().row(c).minCoeff();
      const double hi = X.points().row(c).maxCoeff();
      const double w = hi > lo ? hi - lo : 1.0;
      std::vector<double> axis;
      for (int k = 0; k <= 100; ++k) axis.push_back(lo - 0.125 * w + 1.25 * w * k / 100.0);
      axes.push_back(std::move(axis));
    }
  } else {
    axes = parse_grid(o.grid, X.dimension());
  }
  std::vector<Vector> queries;
  if (X.dimension() == 1) {
    for (double a : axes[0]) queries.push_back(Vector::Constant(1, a));
  } else {
    for (double b : axes[1]) {
      for (double a : axes[0]) queries.push_back((Vector(2) << a, b).finished());
    }
  }
  Matrix values;
  if (jf) {
    const auto v = extend_jet(X, jf->jet, queries, o.jobs);
    values.resize(jf->jet.codim(), static_cast<Index>(v.size()));
    for (std::size_t q = 0; q < v.size(); ++q) values.col(static_cast<Index>(q)) = v[q].value;
  } else {
    values = extend_values(X, read_values(o.values, X.size()), queries, o.method, o.jobs);
  }
  Output out(o.out);
  std::vector<std::string> names;
  for (Index c = 0; c < X.dimension(); ++c) names.push_back("x" + std::to_string(c + 1));
  for (Index r = 0; r < values.rows(); ++r) names.push_back("f" + std::to_string(r + 1));
  write_csv_header(out.stream(), names);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    std::vector<double> row(queries[q].begin(), queries[q].end());
    for (Index r = 0; r < values.rows(); ++r) row.push_back(values(r, static_cast<Index>(q)));
    write_csv_row(out.stream(), row);
  }
  return kOk;
}

int cmd_sweep(const Options& o) {
  const auto rows = run_sweep(o.max_dim, o.size, o.pairs, o.seed, o.p, o.jobs);
  Output out(o.out);
  out.stream() << "name,dimension,size,points,lambda_hat,log2_lambda_hat,lip_ratio_kernel,lip_ratio_cells,"
                  "projection_lip_cells\n";
  for (const auto& r : rows) {
    out.stream() << r.name << ',' << r.dimension << ',' << r.size << ',' << r.points << ',' << r.lambda_hat << ','
                 << format_double(std::log2(static_cast<double>(r.lambda_hat))) << ','
                 << format_double(r.lip_ratio_kernel) << ',' << format_double(r.lip_ratio_cells) << ','
                 << format_double(r.projection_lip_cells) << '\n';
  }
  return kOk;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("lipext");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("EXT_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to "off"; only accept it when asked for.
    if (level != spdlog::level::off || std::string_view(env) == "off") spdlog::set_level(level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Lipschitz and C1 extension through random projections"};
  app.require_subcommand(1, 1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--p", o.p, "norm exponent, 1 < p < inf")->check(CLI::Range(1.0 + 1e-12, 1e12));
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--out", o.out, "output path (default stdout)");
    sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
  };
  auto* est = app.add_subcommand("estimate", "doubling and capacity estimates");
  est->add_option("--points", o.points, "points CSV");
  add_common(est);

  auto* ext = app.add_subcommand("extend", "Lipschitz extension at queries");
  ext->add_option("--points", o.points, "points CSV");
  ext->add_option("--values", o.values, "values CSV aligned with points");
  ext->add_option("--queries", o.queries, "queries CSV");
  ext->add_option("--method", o.method, "kernel or cells")->check(CLI::IsMember({"kernel", "cells"}));
  add_common(ext);

  auto* c1 = app.add_subcommand("extend-c1", "C1 extension and differential at queries");
  c1->add_option("--points", o.points, "points CSV (optional cross-check)");
  c1->add_option("--jets", o.jets, "jet JSON");
  c1->add_option("--queries", o.queries, "queries CSV");
  add_common(c1);

  auto* ver = app.add_subcommand("verify", "run the verification suite");
  ver->add_option("--suite", o.suite, "standard, quick, singleton or corrupted-jet")
      ->check(CLI::IsMember({"standard", "quick", "singleton", "corrupted-jet"}));
  ver->add_option("--report", o.report, "report JSON path");
  ver->add_option("--calibration", o.calibration, "frozen calibration JSON");
  ver->add_option("--write-calibration", o.write_calibration, "write measured calibration values here");
  add_common(ver);

  auto* grd = app.add_subcommand("grid", "dense plot data on a 1-d or 2-d grid");
  grd->add_option("--points", o.points, "points CSV");
  grd->add_option("--values", o.values, "values CSV");
  grd->add_option("--jets", o.jets, "jet JSON (C1 extension)");
  grd->add_option("--method", o.method, "kernel or cells")->check(CLI::IsMember({"kernel", "cells"}));
  grd->add_option("--grid", o.grid, "lo:hi:n per axis, comma separated");
  add_common(grd);

  auto* swp = app.add_subcommand("sweep", "doubling estimate against measured Lipschitz ratios on grids");
  swp->add_option("--max-dim", o.max_dim, "largest grid dimension")->check(CLI::Range(1, 4));
  swp->add_option("--size", o.size, "points per axis")->check(CLI::Range(2, 64));
  swp->add_option("--pairs", o.pairs, "sampled pairs per grid")->check(CLI::Range(1, 1000000));
  add_common(swp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*est) return cmd_estimate(o);
    if (*ext) return cmd_extend(o);
    if (*c1) return cmd_extend_c1(o);
    if (*ver) return cmd_verify(o);
    if (*grd) return cmd_grid(o);
    if (*swp) return cmd_sweep(o);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const DataError& e) {
    spdlog::error("{}", e.what());
    return kData;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kData;
  }
  return kUsage;
}
