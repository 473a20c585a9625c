#include "lipext/wasserstein.hpp"

#include "lipext/projection.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

namespace lipext {

namespace {

constexpr double kMassTol = 1e-10;
// Residual masses below this are treated as exhausted.
constexpr double kFlowEps = 1e-15;

}  // namespace

TransportPlan w1_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const PointSet& X) {
  if (mu.support.size() != static_cast<std::size_t>(mu.weights.size()) ||
      nu.support.size() != static_cast<std::size_t>(nu.weights.size())) {
    throw DataError("measure support and weights differ in length");
  }
  if (std::abs(mu.mass() - nu.mass()) > kMassTol) throw DataError("W1 needs measures of equal mass");
  for (const auto* m : {&mu, &nu}) {
    for (Index i : m->support) {
      if (i < 0 || i >= X.size()) throw DataError("measure support outside X");
    }
    if ((m->weights.array() < 0.0).any()) throw DataError("measure weights must be nonnegative");
  }

  // Shared mass stays in place (metric cost), so only the signed difference is transported.
  std::map<Index, double> diff;
  for (std::size_t k = 0; k < mu.support.size(); ++k) diff[mu.support[k]] += mu.weights(static_cast<Index>(k));
  std::map<Index, double> stay;
  for (std::size_t k = 0; k < nu.support.size(); ++k) {
    const Index i = nu.support[k];
    const double w = nu.weights(static_cast<Index>(k));
    const auto it = diff.find(i);
    if (it != diff.end()) stay[i] = std::min(it->second, w);
    diff[i] -= w;
  }
  std::vector<Index> src, dst;
  std::vector<double> supply, demand;
  for (const auto& [i, v] : diff) {
    if (v > kFlowEps) {
      src.push_back(i);
      supply.push_back(v);
    } else if (v < -kFlowEps) {
      dst.push_back(i);
      demand.push_back(-v);
    }
  }
  const std::size_t S = src.size();
  const std::size_t T = dst.size();
  Matrix cost(static_cast<Index>(S), static_cast<Index>(T));
  for (std::size_t a = 0; a < S; ++a) {
    for (std::size_t b = 0; b < T; ++b) cost(a, b) = dist(X, src[a], dst[b]);
  }
  Matrix flow = Matrix::Zero(static_cast<Index>(S), static_cast<Index>(T));

  // Successive shortest paths with Dijkstra on reduced costs. Nodes 0..S-1 are sources and S..S+T-1
  // sinks; forward arcs a→b are uncapacitated, backward arcs b→a carry the current flow.
  const std::size_t N = S + T;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> potential(N, 0.0);
  for (std::size_t b = 0; b < T; ++b) {
    double best = inf;
    for (std::size_t a = 0; a < S; ++a) best = std::min(best, cost(a, b));
    potential[S + b] = best;
  }
  std::vector<double> label(N);
  std::vector<std::ptrdiff_t> pred(N);
  std::vector<char> done(N);
  for (;;) {
    std::fill(label.begin(), label.end(), inf);
    std::fill(pred.begin(), pred.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    bool any = false;
    for (std::size_t a = 0; a < S; ++a) {
      if (supply[a] > kFlowEps) {
        label[a] = 0.0;
        any = true;
      }
    }
    if (!any) break;
    for (;;) {
      std::size_t u = N;
      for (std::size_t v = 0; v < N; ++v) {
        if (!done[v] && label[v] < inf && (u == N || label[v] < label[u])) u = v;
      }
      if (u == N) break;
      done[u] = 1;
      if (u < S) {
        for (std::size_t b = 0; b < T; ++b) {
          const double c = label[u] + std::max(0.0, cost(u, b) + potential[u] - potential[S + b]);
          if (c < label[S + b]) {
            label[S + b] = c;
            pred[S + b] = static_cast<std::ptrdiff_t>(u);
          }
        }
      } else {
        const std::size_t b = u - S;
        for (std::size_t a = 0; a < S; ++a) {
          if (flow(a, b) <= kFlowEps || done[a]) continue;
          const double c = label[u] + std::max(0.0, -cost(a, b) + potential[u] - potential[a]);
          if (c < label[a]) {
            label[a] = c;
            pred[a] = static_cast<std::ptrdiff_t>(u);
          }
        }
      }
    }
    std::ptrdiff_t sink = -1;
    for (std::size_t b = 0; b < T; ++b) {
      if (demand[b] > kFlowEps && label[S + b] < inf && (sink < 0 || label[S + b] < label[sink])) {
        sink = static_cast<std::ptrdiff_t>(S + b);
      }
    }
    if (sink < 0) break;
    for (std::size_t v = 0; v < N; ++v) potential[v] += std::min(label[v], label[sink]);
    // Bottleneck along the path.
    double amount = demand[static_cast<std::size_t>(sink) - S];
    std::ptrdiff_t v = sink;
    while (pred[v] >= 0) {
      const std::ptrdiff_t u = pred[v];
      if (static_cast<std::size_t>(v) < S) amount = std::min(amount, flow(v, u - static_cast<std::ptrdiff_t>(S)));
      v = u;
    }
    amount = std::min(amount, supply[static_cast<std::size_t>(v)]);
    const std::size_t source = static_cast<std::size_t>(v);
    v = sink;
    while (pred[v] >= 0) {
      const std::ptrdiff_t u = pred[v];
      if (static_cast<std::size_t>(v) >= S) {
        flow(u, v - static_cast<std::ptrdiff_t>(S)) += amount;
      } else {
        flow(v, u - static_cast<std::ptrdiff_t>(S)) -= amount;
      }
      v = u;
    }
    supply[source] -= amount;
    demand[static_cast<std::size_t>(sink) - S] -= amount;
  }

  TransportPlan plan;
  for (const auto& [i, w] : stay) {
    if (w > 0.0) plan.entries.push_back({i, i, w});
  }
  for (std::size_t a = 0; a < S; ++a) {
    for (std::size_t b = 0; b < T; ++b) {
      if (flow(a, b) > kFlowEps) {
        plan.entries.push_back({src[a], dst[b], flow(a, b)});
        plan.cost += flow(a, b) * cost(a, b);
      }
    }
  }
  return plan;
}

double w1_dual_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::span<const double> f) {
  double v = 0.0;
  for (std::size_t k = 0; k < mu.support.size(); ++k) v += mu.weights(static_cast<Index>(k)) * f[mu.support[k]];
  for (std::size_t k = 0; k < nu.support.size(); ++k) v -= nu.weights(static_cast<Index>(k)) * f[nu.support[k]];
  return v;
}

double lipschitz_on_supports(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::span<const double> f,
                             const PointSet& X) {
  std::vector<Index> pts = mu.support;
  pts.insert(pts.end(), nu.support.begin(), nu.support.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double lip = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      lip = std::max(lip, std::abs(f[pts[a]] - f[pts[b]]) / dist(X, pts[a], pts[b]));
    }
  }
  return lip;
}

DualCheck w1_dual_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::span<const double> f,
                        const PointSet& X) {
  DualCheck c;
  c.value = w1_dual_value(mu, nu, f);
  c.lipschitz = lipschitz_on_supports(mu, nu, f, X);
  c.w1 = w1_exact(mu, nu, X).cost;
  c.feasible = c.value <= c.lipschitz * c.w1 + 1e-9;
  return c;
}

double w1_dual_bruteforce(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const PointSet& X) {
  std::map<Index, double> signed_mass;
  for (std::size_t k = 0; k < mu.support.size(); ++k) signed_mass[mu.support[k]] += mu.weights(static_cast<Index>(k));
  for (std::size_t k = 0; k < nu.support.size(); ++k) signed_mass[nu.support[k]] -= nu.weights(static_cast<Index>(k));
  std::vector<Index> pts;
  std::vector<double> m;
  for (const auto& [i, v] : signed_mass) {
    pts.push_back(i);
    m.push_back(v);
  }
  const std::size_t n = pts.size();
  if (n > 7) throw DataError("brute-force dual is limited to 7 support points");
  if (n < 2) return 0.0;
  Matrix d(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) d(a, b) = dist(X, pts[a], pts[b]);
  }

  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> code(n - 2, 0);
  std::vector<std::vector<std::size_t>> adj(n);
  std::vector<double> f(n);
  std::vector<std::size_t> order, parent(n);
  for (;;) {
    // Decode the Prüfer sequence into a tree.
    for (auto& a : adj) a.clear();
    std::vector<std::size_t> degree(n, 1);
    for (std::size_t c : code) ++degree[c];
    for (std::size_t c : code) {
      std::size_t leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      adj[leaf].push_back(c);
      adj[c].push_back(leaf);
      --degree[leaf];
      --degree[c];
    }
    std::size_t u = n, v = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (degree[k] == 1) (u == n ? u : v) = k;
    }
    adj[u].push_back(v);
    adj[v].push_back(u);

    // BFS order from node 0; every non-root node gets one sign bit.
    order.assign(1, 0);
    std::vector<char> seen(n, 0);
    seen[0] = 1;
    for (std::size_t h = 0; h < order.size(); ++h) {
      for (std::size_t w : adj[order[h]]) {
        if (!seen[w]) {
          seen[w] = 1;
          parent[w] = order[h];
          order.push_back(w);
        }
      }
    }
    for (std::uint32_t signs = 0; signs < (1u << (n - 1)); ++signs) {
      f[0] = 0.0;
      for (std::size_t h = 1; h < n; ++h) {
        const std::size_t w = order[h];
        const double step = d(w, parent[w]);
        f[w] = f[parent[w]] + (((signs >> (h - 1)) & 1u) ? step : -step);
      }
      bool feasible = true;
      for (std::size_t a = 0; a < n && feasible; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
          if (std::abs(f[a] - f[b]) > d(a, b) * (1.0 + 1e-12) + 1e-15) {
            feasible = false;
            break;
          }
        }
      }
      if (!feasible) continue;
      double value = 0.0;
      for (std::size_t a = 0; a < n; ++a) value += f[a] * m[a];
      best = std::max(best, value);
    }
    // Next code in lexicographic order.
    std::size_t pos = 0;
    while (pos < code.size() && ++code[pos] == n) code[pos++] = 0;
    if (pos == code.size()) break;
  }
  return best;
}

double w1_line(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const PointSet& X) {
  if (X.dimension() != 1) throw DataError("closed-form W1 needs points on a line");
  std::vector<std::pair<double, double>> atoms;
  for (std::size_t k = 0; k < mu.support.size(); ++k) {
    atoms.emplace_back(X.point(mu.support[k])(0), mu.weights(static_cast<Index>(k)));
  }
  for (std::size_t k = 0; k < nu.support.size(); ++k) {
    atoms.emplace_back(X.point(nu.support[k])(0), -nu.weights(static_cast<Index>(k)));
  }
  std::sort(atoms.begin(), atoms.end());
  double cdf = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < atoms.size(); ++k) {
    cdf += atoms[k].second;
    total += std::abs(cdf) * (atoms[k + 1].first - atoms[k].first);
  }
  return total;
}

std::string plan_to_json(const TransportPlan& plan) {
  nlohmann::json j;
  j["cost"] = plan.cost;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : plan.entries) entries.push_back({{"source", e.source}, {"target", e.target}, {"mass", e.mass}});
  j["entries"] = entries;
  return j.dump();
}

}  // namespace lipext
