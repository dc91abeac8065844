#pragma once

// Brute-force reference implementations and random instance generators.
// Nothing here goes through BiddingGraph or the library's cycle code; the
// constraint oracles work on raw rounds, one constraint per (round, bundle).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "rpgraph/core.hpp"
#include "rpgraph/rational.hpp"

namespace oracle {

using rpgraph::LengthMatrix;
using rpgraph::Observation;
using rpgraph::Rational;
using rpgraph::Vector;

template <class T>
using Grid = std::vector<std::vector<std::optional<T>>>;

template <class T>
struct Cycle {
  std::vector<std::size_t> vertices;  // starts at its smallest vertex
  T total{};
};

/// Every simple cycle (cardinality >= 2), each once, in DFS order.
template <class T>
std::vector<Cycle<T>> simple_cycles(const Grid<T>& g, std::size_t max_card = std::numeric_limits<std::size_t>::max()) {
  const std::size_t n = g.size();
  std::vector<Cycle<T>> out;
  std::vector<std::size_t> path;
  std::vector<char> on(n, 0);
  std::function<void(std::size_t, std::size_t, T)> dfs = [&](std::size_t root, std::size_t u, T sum) {
    for (std::size_t w = root; w < n; ++w) {
      if (w == u || !g[u][w]) continue;
      if (w == root) {
        if (path.size() >= 2) out.push_back({path, sum + *g[u][w]});
        continue;
      }
      if (on[w] || path.size() >= max_card) continue;
      on[w] = 1;
      path.push_back(w);
      dfs(root, w, sum + *g[u][w]);
      path.pop_back();
      on[w] = 0;
    }
  };
  for (std::size_t r = 0; r < n; ++r) {
    path = {r};
    on[r] = 1;
    dfs(r, r, T{});
    on[r] = 0;
  }
  return out;
}

struct MeanResult {
  std::optional<Rational> mu;
  std::vector<std::size_t> lex_min;  // lexicographically smallest optimal cycle
  std::size_t cycles = 0;
};

template <class T>
Rational to_rational(const T& x) {
  if constexpr (std::is_same_v<T, Rational>)
    return x;
  else
    return Rational(static_cast<long>(x));
}

template <class T>
MeanResult min_mean(const Grid<T>& g, std::size_t max_card = std::numeric_limits<std::size_t>::max()) {
  MeanResult r;
  std::optional<std::pair<T, std::size_t>> best;  // (total, cardinality)
  for (auto& c : simple_cycles(g, max_card)) {
    ++r.cycles;
    const std::size_t len = c.vertices.size();
    if (!best) {
      best = {c.total, len};
      r.lex_min = c.vertices;
      continue;
    }
    // total/len vs best.total/best.len, both denominators positive
    const T lhs = c.total * static_cast<T>(static_cast<long>(best->second));
    const T rhs = best->first * static_cast<T>(static_cast<long>(len));
    if (lhs < rhs || (lhs == rhs && c.vertices < r.lex_min)) {
      best = {c.total, len};
      r.lex_min = c.vertices;
    }
  }
  if (best) r.mu = to_rational(best->first) / Rational(static_cast<long>(best->second));
  return r;
}

inline Grid<Rational> grid(const LengthMatrix& m) {
  Grid<Rational> g(m.size(), std::vector<std::optional<Rational>>(m.size()));
  for (std::size_t u = 0; u < m.size(); ++u)
    for (std::size_t w = 0; w < m.size(); ++w)
      if (m.has(u, w)) g[u][w] = m.at(u, w);
  return g;
}

inline LengthMatrix matrix(const Grid<long>& g) {
  LengthMatrix m(g.size());
  for (std::size_t u = 0; u < g.size(); ++u)
    for (std::size_t w = 0; w < g.size(); ++w)
      if (u != w && g[u][w]) m.set(u, w, Rational(*g[u][w]));
  return m;
}

// ---------------------------------------------------------------------------
// Difference constraints straight from the rounds.

using Values = std::map<Vector, Rational>;

inline std::vector<Vector> distinct_bundles(const std::vector<Observation>& obs) {
  std::vector<Vector> out;
  for (const auto& o : obs)
    if (std::find(out.begin(), out.end(), o.bundle) == out.end()) out.push_back(o.bundle);
  return out;
}

/// All-pairs shortest paths over variables bundles[0..n-1] plus a zero node n.
/// Arc a -> b with weight c encodes v(b) - v(a) <= c.
struct System {
  std::vector<Vector> bundles;
  Grid<Rational> d;
  bool consistent = true;

  std::size_t index(const Vector& x) const {
    return static_cast<std::size_t>(std::find(bundles.begin(), bundles.end(), x) - bundles.begin());
  }
  std::size_t zero() const { return bundles.size(); }

  void arc(std::size_t a, std::size_t b, const Rational& c) {
    if (!d[a][b] || c < *d[a][b]) d[a][b] = c;
  }

  void close() {
    const std::size_t n = d.size();
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) {
        if (!d[i][k]) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (!d[k][j]) continue;
          const Rational via = *d[i][k] + *d[k][j];
          if (!d[i][j] || via < *d[i][j]) d[i][j] = via;
        }
      }
    for (std::size_t i = 0; i < n; ++i)
      if (d[i][i] && d[i][i]->sign() < 0) consistent = false;
  }
};

struct SystemOptions {
  bool individually_rational = false;
  std::optional<Values> upper;  // v(x) <= beta
};

/// For every round t and every observed bundle y:
///   v(x_t) - p_t.x_t >= v(y) - p_t.y - eps   i.e.   v(y) - v(x_t) <= p_t.(y - x_t) + eps
inline System constraints(const std::vector<Observation>& obs, const Rational& eps, const SystemOptions& opt = {}) {
  System s;
  s.bundles = distinct_bundles(obs);
  const std::size_t n = s.bundles.size() + 1;
  s.d.assign(n, std::vector<std::optional<Rational>>(n));
  for (std::size_t i = 0; i < n; ++i) s.d[i][i] = Rational();
  for (const auto& o : obs) {
    const std::size_t a = s.index(o.bundle);
    const Rational cost = rpgraph::dot(o.prices, o.bundle);
    for (const auto& y : s.bundles) {
      const std::size_t b = s.index(y);
      if (a == b) continue;
      s.arc(a, b, rpgraph::dot(o.prices, y) - cost + eps);
    }
    if (opt.individually_rational) s.arc(a, s.zero(), -cost);  // v(z) - v(x) <= -cost
  }
  if (opt.upper)
    for (const auto& [x, beta] : *opt.upper) s.arc(s.zero(), s.index(x), beta);  // v(x) - v(z) <= beta
  s.close();
  return s;
}

inline bool feasible(const std::vector<Observation>& obs, const Rational& eps, bool ir) {
  return constraints(obs, eps, {ir, std::nullopt}).consistent;
}

/// Coordinate-wise minimum over IR eps-approximate valuations (nullopt if none).
inline std::optional<Values> coordinate_min(const std::vector<Observation>& obs, const Rational& eps) {
  System s = constraints(obs, eps, {true, std::nullopt});
  if (!s.consistent) return std::nullopt;
  Values out;
  for (std::size_t i = 0; i < s.bundles.size(); ++i) out[s.bundles[i]] = -*s.d[i][s.zero()];
  return out;
}

/// Coordinate-wise maximum under upper bounds; unbounded coordinates absent.
inline std::optional<std::map<Vector, std::optional<Rational>>> coordinate_max(const std::vector<Observation>& obs,
                                                                              const Rational& eps,
                                                                              const Values& upper) {
  System s = constraints(obs, eps, {false, upper});
  if (!s.consistent) return std::nullopt;
  std::map<Vector, std::optional<Rational>> out;
  for (std::size_t i = 0; i < s.bundles.size(); ++i) out[s.bundles[i]] = s.d[s.zero()][i];
  return out;
}

/// Direct substitution of every per-round constraint (y = x_t is vacuous
/// for eps >= 0 and skipped).
inline bool satisfies(const std::vector<Observation>& obs, const Values& v, const Rational& eps) {
  for (const auto& o : obs) {
    const Rational lhs = v.at(o.bundle) - rpgraph::dot(o.prices, o.bundle);
    for (const auto& [y, vy] : v)
      if (y != o.bundle && lhs < vy - rpgraph::dot(o.prices, y) - eps) return false;
  }
  return true;
}

inline bool individually_rational(const std::vector<Observation>& obs, const Values& v) {
  for (const auto& o : obs)
    if (v.at(o.bundle) < rpgraph::dot(o.prices, o.bundle)) return false;
  return true;
}

/// Arc length by definition: min over rounds bidding u of p_t.(w - u).
inline std::optional<Rational> arc_length(const std::vector<Observation>& obs, const Vector& u, const Vector& w) {
  std::optional<Rational> best;
  for (const auto& o : obs) {
    if (o.bundle != u) continue;
    Rational x = rpgraph::dot(o.prices, w) - rpgraph::dot(o.prices, u);
    if (!best || x < *best) best = x;
  }
  return best;
}

/// Min mean over simple cycles of the graph defined straight from rounds.
inline std::optional<Rational> history_mu(const std::vector<Observation>& obs,
                                          std::size_t max_card = std::numeric_limits<std::size_t>::max()) {
  const auto bundles = distinct_bundles(obs);
  Grid<Rational> g(bundles.size(), std::vector<std::optional<Rational>>(bundles.size()));
  for (std::size_t i = 0; i < bundles.size(); ++i)
    for (std::size_t j = 0; j < bundles.size(); ++j)
      if (i != j) g[i][j] = arc_length(obs, bundles[i], bundles[j]);
  return min_mean(g, max_card).mu;
}

/// Every set of `size` vertices from 0..n-1 meeting all given cycles, lexicographic.
inline std::vector<std::vector<std::size_t>> hitting_sets(std::size_t n, const std::vector<std::vector<std::size_t>>& cycles,
                                                          std::size_t size) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (pick.size() == size) {
      for (const auto& c : cycles)
        if (std::none_of(c.begin(), c.end(), [&](auto v) { return std::find(pick.begin(), pick.end(), v) != pick.end(); }))
          return;
      out.push_back(pick);
      return;
    }
    for (std::size_t v = from; v < n; ++v) {
      pick.push_back(v);
      rec(v + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return out;
}

// ---------------------------------------------------------------------------
// Generators.

using Rng = std::mt19937_64;

inline long uniform(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

inline Grid<long> random_grid(Rng& rng, std::size_t n, long lo, long hi) {
  Grid<long> g(n, std::vector<std::optional<long>>(n));
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t w = 0; w < n; ++w)
      if (u != w) g[u][w] = uniform(rng, lo, hi);
  return g;
}

/// Realizes a complete length matrix as a bidding history: round u+1 bids
/// the unit vector e_u at prices p[u] = c, p[w] = c + l(u, w), with c chosen
/// so every price is positive.
inline std::vector<Observation> embed(const LengthMatrix& m) {
  const std::size_t n = m.size();
  const Rational c = m.max_abs() + Rational(1);
  std::vector<Observation> out;
  for (std::size_t u = 0; u < n; ++u) {
    Observation o;
    o.round = static_cast<rpgraph::RoundId>(u + 1);
    o.prices.assign(n, c);
    o.bundle.assign(n, Rational());
    o.bundle[u] = 1;
    for (std::size_t w = 0; w < n; ++w)
      if (w != u) o.prices[w] = c + m.at(u, w);
    out.push_back(std::move(o));
  }
  return out;
}

struct HistoryShape {
  std::size_t rounds = 5;
  std::size_t dimension = 2;
  long price_lo = 1, price_hi = 6;
  long qty_hi = 2;
  std::size_t bundle_pool = 0;  // 0: draw bundles freely; otherwise reuse a pool
};

inline std::vector<Observation> random_history(Rng& rng, const HistoryShape& shape) {
  std::vector<Vector> pool;
  for (std::size_t i = 0; i < shape.bundle_pool; ++i) {
    Vector x(shape.dimension);
    for (auto& q : x) q = uniform(rng, 0, shape.qty_hi);
    pool.push_back(std::move(x));
  }
  std::vector<Observation> out;
  for (std::size_t t = 0; t < shape.rounds; ++t) {
    Observation o;
    o.round = static_cast<rpgraph::RoundId>(t + 1);
    for (std::size_t j = 0; j < shape.dimension; ++j) o.prices.push_back(Rational(uniform(rng, shape.price_lo, shape.price_hi)));
    if (pool.empty()) {
      for (std::size_t j = 0; j < shape.dimension; ++j) o.bundle.push_back(Rational(uniform(rng, 0, shape.qty_hi)));
    } else {
      o.bundle = pool[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(pool.size()) - 1))];
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace oracle
