#include "lipext/metric.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>
#include <string>

namespace lipext {

AmbientSpace::AmbientSpace(Index dimension, double norm_exponent) : dimension_(dimension), p_(norm_exponent) {
  if (dimension_ < 1) throw DataError("ambient dimension must be positive");
  if (!(p_ > 1.0) || !std::isfinite(p_)) throw DataError("norm exponent must lie in (1, inf)");
}

PointSet::PointSet(AmbientSpace space, Matrix points, std::optional<Vector> weights)
    : space_(space), points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.rows() != space_.dimension()) throw DataError("point dimension does not match ambient space");
  if (points_.cols() == 0) throw DataError("point set is empty");
  if (!points_.allFinite()) throw DataError("point coordinates must be finite");
  if (weights_) {
    if (weights_->size() != points_.cols()) throw DataError("weight count does not match point count");
    if (!(weights_->array() > 0.0).all() || !weights_->allFinite()) throw DataError("weights must be positive");
  }
  // Distinctness via a lexicographic sort of the columns.
  std::vector<Index> order(static_cast<std::size_t>(points_.cols()));
  std::iota(order.begin(), order.end(), Index{0});
  auto less = [&](Index a, Index b) {
    for (Index r = 0; r < points_.rows(); ++r) {
      if (points_(r, a) != points_(r, b)) return points_(r, a) < points_(r, b);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (!less(order[k - 1], order[k])) {
      throw DataError("points " + std::to_string(std::min(order[k - 1], order[k])) + " and " +
                      std::to_string(std::max(order[k - 1], order[k])) + " coincide");
    }
  }
}

Vector PointSet::weights() const { return weights_ ? *weights_ : Vector::Ones(points_.cols()); }

PointSet PointSet::scaled(double factor) const { return PointSet(space_, points_ * factor, weights_); }

double dist(const AmbientSpace& space, const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  if (a.size() != space.dimension() || b.size() != space.dimension()) {
    throw DataError("dimension mismatch in dist");
  }
  return p_norm((a - b).eval(), space.p());
}

Nearest dist_to_set(const Eigen::Ref<const Vector>& y, const PointSet& X) {
  if (y.size() != X.dimension()) throw DataError("dimension mismatch in dist_to_set");
  Nearest best{std::numeric_limits<double>::infinity(), 0};
  const double p = X.space().p();
  for (Index i = 0; i < X.size(); ++i) {
    const double d = p_norm((y - X.point(i)).eval(), p);
    if (d < best.distance) best = {d, i};
  }
  return best;
}

// ---------------------------------------------------------------------------
// PointIndex
// ---------------------------------------------------------------------------

PointIndex::PointIndex(const PointSet& X) : PointIndex(X, [&] {
  std::vector<Index> all(static_cast<std::size_t>(X.size()));
  std::iota(all.begin(), all.end(), Index{0});
  return all;
}()) {}

PointIndex::PointIndex(const PointSet& X, std::vector<Index> ids) : p_(X.space().p()), ids_(std::move(ids)) {
  if (ids_.empty()) return;
  pts_.resize(X.dimension(), static_cast<Index>(ids_.size()));
  for (std::size_t k = 0; k < ids_.size(); ++k) pts_.col(static_cast<Index>(k)) = X.point(ids_[k]);
  nodes_.reserve(2 * ids_.size() / kLeafSize + 2);
  build(0, static_cast<Index>(ids_.size()));
  box_lo_.resize(X.dimension(), static_cast<Index>(nodes_.size()));
  box_hi_.resize(X.dimension(), static_cast<Index>(nodes_.size()));
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    const auto block = pts_.middleCols(nodes_[n].lo, nodes_[n].hi - nodes_[n].lo);
    box_lo_.col(static_cast<Index>(n)) = block.rowwise().minCoeff();
    box_hi_.col(static_cast<Index>(n)) = block.rowwise().maxCoeff();
  }
}

int PointIndex::build(Index lo, Index hi) {
  const int node = static_cast<int>(nodes_.size());
  nodes_.push_back({lo, hi});
  if (hi - lo <= kLeafSize) return node;
  const auto block = pts_.middleCols(lo, hi - lo);
  Index axis = 0;
  (block.rowwise().maxCoeff() - block.rowwise().minCoeff()).maxCoeff(&axis);
  // Median split on the widest axis; ties broken by X index so the layout is deterministic.
  std::vector<Index> order(static_cast<std::size_t>(hi - lo));
  std::iota(order.begin(), order.end(), lo);
  const auto mid = order.begin() + static_cast<std::ptrdiff_t>(order.size() / 2);
  std::nth_element(order.begin(), mid, order.end(), [&](Index a, Index b) {
    const double ka = pts_(axis, a), kb = pts_(axis, b);
    return ka != kb ? ka < kb : ids_[static_cast<std::size_t>(a)] < ids_[static_cast<std::size_t>(b)];
  });
  const Matrix cols = pts_.middleCols(lo, hi - lo);
  const std::vector<Index> old_ids(ids_.begin() + lo, ids_.begin() + hi);
  for (std::size_t k = 0; k < order.size(); ++k) {
    pts_.col(lo + static_cast<Index>(k)) = cols.col(order[k] - lo);
    ids_[static_cast<std::size_t>(lo) + k] = old_ids[static_cast<std::size_t>(order[k] - lo)];
  }
  const Index split = lo + static_cast<Index>(order.size() / 2);
  const int left = build(lo, split);
  const int right = build(split, hi);
  nodes_[static_cast<std::size_t>(node)].left = left;
  nodes_[static_cast<std::size_t>(node)].right = right;
  return node;
}

double PointIndex::box_bound(int node, const Eigen::Ref<const Vector>& y, Vector& gap) const {
  gap = (box_lo_.col(node) - y).cwiseMax(y - box_hi_.col(node)).cwiseMax(0.0);
  // Shrunk slightly so rounding in the bound never prunes a point at exactly the pruning distance.
  return p_norm(gap, p_) * (1.0 - 1e-12);
}

namespace {

// Same arithmetic as dist(): difference evaluated into an aligned buffer, then p_norm.
double column_distance(const Eigen::Ref<const Vector>& y, const Matrix& pts, Index k, double p, Vector& buffer) {
  buffer.noalias() = y - pts.col(k);
  return p_norm(buffer, p);
}

}  // namespace

Nearest PointIndex::nearest(const Eigen::Ref<const Vector>& y) const {
  if (ids_.empty()) throw DataError("nearest on an empty index");
  Nearest best{std::numeric_limits<double>::infinity(), std::numeric_limits<Index>::max()};
  Vector buffer(y.size()), gap(y.size());
  std::vector<std::pair<double, int>> stack{{0.0, 0}};
  while (!stack.empty()) {
    const auto [bound, n] = stack.back();
    stack.pop_back();
    // Strict pruning keeps ties reachable, so the lowest index wins exactly as in brute force.
    if (bound > best.distance) continue;
    const Node& node = nodes_[static_cast<std::size_t>(n)];
    if (node.left < 0) {
      for (Index k = node.lo; k < node.hi; ++k) {
        const double d = column_distance(y, pts_, k, p_, buffer);
        const Index id = ids_[static_cast<std::size_t>(k)];
        if (d < best.distance || (d == best.distance && id < best.index)) best = {d, id};
      }
      continue;
    }
    const double bl = box_bound(node.left, y, gap);
    const double br = box_bound(node.right, y, gap);
    // Push the farther child first so the nearer one is searched first.
    if (bl <= br) {
      stack.emplace_back(br, node.right);
      stack.emplace_back(bl, node.left);
    } else {
      stack.emplace_back(bl, node.left);
      stack.emplace_back(br, node.right);
    }
  }
  return best;
}

std::vector<std::pair<Index, double>> PointIndex::within(const Eigen::Ref<const Vector>& y, double radius) const {
  std::vector<std::pair<Index, double>> out;
  if (ids_.empty() || !(radius > 0.0)) return out;
  Vector buffer(y.size()), gap(y.size());
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    if (box_bound(n, y, gap) >= radius) continue;
    const Node& node = nodes_[static_cast<std::size_t>(n)];
    if (node.left < 0) {
      for (Index k = node.lo; k < node.hi; ++k) {
        const double d = column_distance(y, pts_, k, p_, buffer);
        if (d < radius) out.emplace_back(ids_[static_cast<std::size_t>(k)], d);
      }
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Nearest dist_to_set(const Eigen::Ref<const Vector>& y, const PointSet& X, const PointIndex& index) {
  if (y.size() != X.dimension()) throw DataError("dimension mismatch in dist_to_set");
  return index.nearest(y);
}

std::vector<double> pairwise_distances(const PointSet& X) {
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(X.size() * (X.size() - 1) / 2));
  for (Index i = 0; i < X.size(); ++i) {
    for (Index j = i + 1; j < X.size(); ++j) d.push_back(dist(X, i, j));
  }
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  return d;
}

double min_separation(const PointSet& X) {
  if (X.size() < 2) return std::numeric_limits<double>::infinity();
  const PointIndex index(X);
  double best = dist(X, 0, 1);
  for (Index i = 0; i < X.size(); ++i) {
    for (const auto& [id, d] : index.within(X.point(i), best)) {
      if (id != i) best = std::min(best, d);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Sampling helpers
// ---------------------------------------------------------------------------

namespace {

std::vector<Index> stride_sample(Index n, std::size_t cap) {
  std::vector<Index> out;
  if (static_cast<std::size_t>(n) <= cap) {
    out.resize(static_cast<std::size_t>(n));
    std::iota(out.begin(), out.end(), Index{0});
    return out;
  }
  for (std::size_t k = 0; k < cap; ++k) out.push_back(static_cast<Index>(k * static_cast<std::size_t>(n) / cap));
  return out;
}

/// Log-spaced picks from a sorted list of positive values; all values when below the cap.
std::vector<double> log_sample(std::vector<double> values, std::size_t cap) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !(v > 0.0); }), values.end());
  if (values.size() <= cap || cap < 2) return values;
  const double lo = std::log(values.front());
  const double hi = std::log(values.back());
  std::vector<double> out;
  for (std::size_t k = 0; k < cap; ++k) {
    const double target = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(cap - 1);
    auto it = std::lower_bound(values.begin(), values.end(), std::exp(target));
    if (it == values.end()) --it;
    if (it != values.begin() && std::abs(std::log(*(it - 1)) - target) < std::abs(std::log(*it) - target)) --it;
    out.push_back(*it);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Greedy max-coverage set cover. `covers[c]` lists ball positions covered by candidate c.
int greedy_cover(std::size_t ball_size, const std::vector<std::vector<std::size_t>>& covers) {
  std::vector<std::vector<std::size_t>> covered_by(ball_size);
  for (std::size_t c = 0; c < covers.size(); ++c) {
    for (std::size_t b : covers[c]) covered_by[b].push_back(c);
  }
  std::vector<std::size_t> gain(covers.size());
  for (std::size_t c = 0; c < covers.size(); ++c) gain[c] = covers[c].size();
  std::vector<bool> done(ball_size, false);
  std::size_t remaining = ball_size;
  int count = 0;
  while (remaining > 0) {
    const auto best = static_cast<std::size_t>(std::max_element(gain.begin(), gain.end()) - gain.begin());
    if (gain[best] == 0) throw std::logic_error("greedy cover stalled");
    ++count;
    for (std::size_t b : covers[best]) {
      if (done[b]) continue;
      done[b] = true;
      --remaining;
      for (std::size_t c : covered_by[b]) --gain[c];
    }
  }
  return count;
}

/// Exact minimum set cover by enumerating subsets of increasing size (bitmask over ≤ 64 ball points).
int exact_cover(std::size_t ball_size, const std::vector<std::vector<std::size_t>>& covers) {
  if (ball_size > 64) throw DataError("exhaustive cover limited to 64 ball points");
  std::vector<std::uint64_t> masks;
  for (const auto& c : covers) {
    std::uint64_t m = 0;
    for (std::size_t b : c) m |= std::uint64_t{1} << b;
    if (m) masks.push_back(m);
  }
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  const std::uint64_t full = ball_size == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << ball_size) - 1;
  const int n = static_cast<int>(masks.size());
  // Depth-limited search: can `k` more masks complete `have`?
  std::function<bool(std::uint64_t, int)> search = [&](std::uint64_t have, int k) {
    if (have == full) return true;
    if (k == 0) return false;
    // Branch on the lowest uncovered point: some chosen mask must contain it.
    const int target = std::countr_zero(~have & full);
    for (int i = 0; i < n; ++i) {
      if ((masks[static_cast<std::size_t>(i)] >> target) & 1U) {
        if (search(have | masks[static_cast<std::size_t>(i)], k - 1)) return true;
      }
    }
    return false;
  };
  for (int k = 1; k <= static_cast<int>(ball_size); ++k) {
    if (search(0, k)) return k;
  }
  return static_cast<int>(ball_size);
}

}  // namespace

std::vector<double> critical_radii(const PointSet& X) {
  std::vector<double> d = pairwise_distances(X);
  std::vector<double> out = d;
  for (double v : d) out.push_back(v / 2.0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DoublingEstimate estimate_doubling(const PointSet& X, std::span<const double> radius_grid,
                                   const DoublingOptions& options) {
  DoublingEstimate est;
  est.lambda_hat = 1;
  if (X.size() == 1) {
    est.exact = true;
    return est;
  }
  const PointIndex index(X);
  const std::vector<Index> centers =
      options.exhaustive ? stride_sample(X.size(), static_cast<std::size_t>(X.size()))
                         : stride_sample(X.size(), options.max_centers);
  const std::vector<double> radii = options.exhaustive
                                        ? log_sample({radius_grid.begin(), radius_grid.end()},
                                                     std::numeric_limits<std::size_t>::max())
                                        : log_sample({radius_grid.begin(), radius_grid.end()}, options.max_radii);
  bool all_exact = options.exhaustive;
  for (Index x : centers) {
    for (double r : radii) {
      const auto ball = index.within(X.point(x), 2.0 * r);
      if (!options.exhaustive && ball.size() > options.max_ball) {
        ++est.skipped;
        continue;
      }
      const auto candidates = index.within(X.point(x), 3.0 * r);
      std::vector<std::vector<std::size_t>> covers;
      covers.reserve(candidates.size());
      for (const auto& [c, dc] : candidates) {
        std::vector<std::size_t> cov;
        for (std::size_t b = 0; b < ball.size(); ++b) {
          if (dist(X, c, ball[b].first) < r) cov.push_back(b);
        }
        covers.push_back(std::move(cov));
      }
      int count = 0;
      if (options.exhaustive && ball.size() <= 64) {
        count = exact_cover(ball.size(), covers);
      } else {
        count = greedy_cover(ball.size(), covers);
        all_exact = false;
      }
      est.lambda_hat = std::max(est.lambda_hat, count);
      est.sampled_pairs.emplace_back(x, r);
    }
  }
  est.exact = all_exact;
  return est;
}

DoublingEstimate estimate_doubling(const PointSet& X, const DoublingOptions& options) {
  const std::vector<double> grid = critical_radii(X);
  return estimate_doubling(X, grid, options);
}

// ---------------------------------------------------------------------------
// Capacity
// ---------------------------------------------------------------------------

namespace {

struct PackingSolver {
  const std::vector<std::uint64_t>* conflicts;  // bit j set when candidates conflict (exact path, ≤ 64)
  std::uint64_t budget;
  std::uint64_t nodes = 0;
  bool exhausted = false;
  int best = 0;
  std::uint64_t best_set = 0;

  void run(std::uint64_t chosen, int size, std::uint64_t allowed) {
    if (++nodes > budget) {
      exhausted = true;
      return;
    }
    if (size > best) {
      best = size;
      best_set = chosen;
    }
    if (size + std::popcount(allowed) <= best) return;
    while (allowed) {
      if (size + std::popcount(allowed) <= best || exhausted) return;
      const int v = std::countr_zero(allowed);
      allowed &= allowed - 1;
      run(chosen | (std::uint64_t{1} << v), size + 1, allowed & ~(*conflicts)[static_cast<std::size_t>(v)]);
    }
  }
};

/// Greedy min-degree independent set followed by (1 → 2) swap improvements.
std::vector<std::size_t> greedy_packing(const std::vector<std::vector<bool>>& conflict) {
  const std::size_t n = conflict.size();
  std::vector<bool> in(n, false), blocked(n, false);
  std::vector<std::size_t> degree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) degree[i] += (i != j && conflict[i][j]) ? 1 : 0;
  }
  while (true) {
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!blocked[i] && (pick == n || degree[i] < degree[pick])) pick = i;
    }
    if (pick == n) break;
    in[pick] = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (conflict[pick][j] || j == pick) blocked[j] = true;
    }
  }
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t v = 0; v < n && !improved; ++v) {
      if (!in[v]) continue;
      // Free vertices whose only solution conflict is v.
      std::vector<std::size_t> free;
      for (std::size_t u = 0; u < n; ++u) {
        if (in[u] || u == v) continue;
        bool ok = true;
        for (std::size_t w = 0; w < n && ok; ++w) {
          if (in[w] && w != v && conflict[u][w]) ok = false;
        }
        if (ok) free.push_back(u);
      }
      for (std::size_t a = 0; a < free.size() && !improved; ++a) {
        for (std::size_t b = a + 1; b < free.size() && !improved; ++b) {
          if (!conflict[free[a]][free[b]]) {
            in[v] = false;
            in[free[a]] = in[free[b]] = true;
            improved = true;
          }
        }
      }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (in[i]) out.push_back(i);
  }
  return out;
}

}  // namespace

bool is_valid_packing(const PointSet& X, Index x0, double r, double epsilon, std::span<const Index> packing) {
  std::set<Index> seen(packing.begin(), packing.end());
  if (seen.size() != packing.size()) return false;
  const double s = epsilon * r;
  for (Index c : packing) {
    for (Index z = 0; z < X.size(); ++z) {
      if (dist(X, c, z) < s && !(dist(X, x0, z) < r)) return false;
    }
  }
  for (std::size_t a = 0; a < packing.size(); ++a) {
    for (std::size_t b = a + 1; b < packing.size(); ++b) {
      for (Index z = 0; z < X.size(); ++z) {
        if (dist(X, packing[a], z) < s && dist(X, packing[b], z) < s) return false;
      }
    }
  }
  return true;
}

CapacityEstimate estimate_capacity(const PointSet& X, double epsilon, const CapacityOptions& options) {
  if (!(epsilon > 0.0) || epsilon > 1.0) throw DataError("capacity epsilon must lie in (0, 1]");
  CapacityEstimate est;
  est.epsilon = epsilon;
  est.kappa_hat = 1;
  est.witness_center = 0;
  est.witness_radius = 1.0;
  est.witness_packing = {0};
  if (X.size() == 1) {
    est.exact = true;
    return est;
  }
  const PointIndex index(X);
  const std::vector<double> d = pairwise_distances(X);
  std::vector<double> radii = d;
  for (double v : d) radii.push_back(v / epsilon);
  radii.push_back(2.0 * d.back() / epsilon);
  const std::size_t radius_cap = options.exhaustive ? std::numeric_limits<std::size_t>::max() : options.max_radii;
  radii = log_sample(std::move(radii), radius_cap);
  const std::vector<Index> centers =
      options.exhaustive ? stride_sample(X.size(), static_cast<std::size_t>(X.size()))
                         : stride_sample(X.size(), options.max_centers);

  bool all_exact = options.exhaustive;
  std::uint64_t nodes_left = options.node_budget;
  for (Index x0 : centers) {
    for (double r : radii) {
      const auto outer = index.within(X.point(x0), r);
      std::vector<bool> in_outer(static_cast<std::size_t>(X.size()), false);
      for (const auto& [z, dz] : outer) in_outer[static_cast<std::size_t>(z)] = true;
      // Candidates: centers whose ε r-ball (as a subset of X) lies inside the outer ball.
      std::vector<Index> cand;
      std::vector<std::vector<Index>> balls;
      for (const auto& [c, dc] : outer) {
        // Sampled mode thins candidates to an εr-separated subset first: closer pairs always conflict.
        if (!options.exhaustive &&
            std::any_of(cand.begin(), cand.end(), [&](Index k) { return dist(X, k, c) < epsilon * r; })) {
          continue;
        }
        auto inner = index.within(X.point(c), epsilon * r);
        bool inside = std::all_of(inner.begin(), inner.end(),
                                  [&](const auto& e) { return in_outer[static_cast<std::size_t>(e.first)]; });
        if (!inside) continue;
        std::vector<Index> ids;
        for (const auto& e : inner) ids.push_back(e.first);
        cand.push_back(c);
        balls.push_back(std::move(ids));
      }
      if (static_cast<int>(cand.size()) <= est.kappa_hat) continue;
      if (!options.exhaustive && cand.size() > options.max_candidates) {
        std::vector<Index> keep;
        std::vector<std::vector<Index>> keep_balls;
        for (Index k : stride_sample(static_cast<Index>(cand.size()), options.max_candidates)) {
          keep.push_back(cand[static_cast<std::size_t>(k)]);
          keep_balls.push_back(std::move(balls[static_cast<std::size_t>(k)]));
        }
        cand = std::move(keep);
        balls = std::move(keep_balls);
        est.partial = true;
      }
      const std::size_t n = cand.size();
      std::vector<std::vector<bool>> conflict(n, std::vector<bool>(n, false));
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
          // Balls of radius εr share no point when the centers are 2εr apart.
          if (dist(X, cand[a], cand[b]) >= 2.0 * epsilon * r) continue;
          std::vector<Index> common;
          std::set_intersection(balls[a].begin(), balls[a].end(), balls[b].begin(), balls[b].end(),
                                std::back_inserter(common));
          conflict[a][b] = conflict[b][a] = !common.empty();
        }
      }
      std::vector<std::size_t> packing;
      if (n <= options.exact_candidate_cap && n <= 64 && nodes_left > 0) {
        std::vector<std::uint64_t> masks(n, 0);
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t b = 0; b < n; ++b) {
            if (conflict[a][b]) masks[a] |= std::uint64_t{1} << b;
          }
        }
        PackingSolver solver{&masks, nodes_left};
        const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
        solver.run(0, 0, all);
        nodes_left = solver.exhausted ? 0 : nodes_left - solver.nodes;
        if (solver.exhausted) {
          est.partial = true;
          all_exact = false;
        }
        for (std::size_t a = 0; a < n; ++a) {
          if ((solver.best_set >> a) & 1U) packing.push_back(a);
        }
      } else {
        if (nodes_left == 0) est.partial = true;
        packing = greedy_packing(conflict);
        all_exact = false;
      }
      if (static_cast<int>(packing.size()) > est.kappa_hat) {
        est.kappa_hat = static_cast<int>(packing.size());
        est.witness_center = x0;
        est.witness_radius = r;
        est.witness_packing.clear();
        for (std::size_t a : packing) est.witness_packing.push_back(cand[a]);
      }
    }
  }
  est.exact = all_exact;
  return est;
}

// ---------------------------------------------------------------------------
// Slope
// ---------------------------------------------------------------------------

SlopeReport slope_estimate(const Field& F, const AmbientSpace& space, const Eigen::Ref<const Vector>& y,
                           std::span<const double> probe_radii, std::span<const Vector> directions) {
  if (y.size() != space.dimension()) throw DataError("dimension mismatch in slope_estimate");
  const auto base = F(y);
  if (!base) throw DataError("field undefined at the base point");
  SlopeReport rep;
  for (const Vector& v : directions) {
    const double nv = p_norm(v, space.p());
    if (!(nv > 0.0)) continue;
    const Vector u = v / nv;
    for (double h : probe_radii) {
      if (!(h > 0.0)) throw DataError("probe radii must be positive");
      ++rep.probes;
      const auto value = F(y + h * u);
      if (!value) {
        ++rep.skipped;
        continue;
      }
      rep.value = std::max(rep.value, std::abs(*value - *base) / h);
    }
  }
  return rep;
}

}  // namespace lipext
