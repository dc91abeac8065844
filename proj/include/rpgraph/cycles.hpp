#pragma once

// Minimum mean cycles, bounded-cardinality worst cycles and negative cycle
// enumeration over LengthMatrix / BiddingGraph.
//
// Tie-breaking among cycles of equal mean is canonical: rotate each cycle to
// start at its smallest vertex id and take the lexicographically smallest
// sequence (a proper prefix sorts first).

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

#include "rpgraph/core.hpp"
#include "rpgraph/detail/scaled.hpp"

namespace rpgraph {

struct MeanCycleResult {
  std::optional<Rational> mu;
  std::optional<CycleCertificate> certificate;
};

struct BoundedCycleReport {
  std::size_t k = 1;
  std::optional<CycleCertificate> worst;  // min-mean cycle of cardinality <= k+1
};

namespace detail {

template <class Int>
struct Fraction {
  Int num;
  long den;

  friend bool operator<(const Fraction& a, const Fraction& b) {
    const Int lhs = a.num * Int(b.den);
    const Int rhs = b.num * Int(a.den);
    return lhs < rhs;
  }
};

/// Lexicographically smallest simple cycle (rotated to its minimum vertex)
/// in the digraph given by `adj`. Empty when the digraph is acyclic.
inline std::vector<std::size_t> canonical_cycle(std::size_t n, const std::vector<char>& adj) {
  std::vector<char> allowed(n), reach(n);
  std::vector<std::size_t> stack;

  // Vertices (>= s, allowed) that can reach s.
  auto reverse_reach = [&](std::size_t s) {
    std::fill(reach.begin(), reach.end(), 0);
    stack.assign(1, s);
    reach[s] = 1;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t u = s; u < n; ++u)
        if (allowed[u] && !reach[u] && adj[u * n + v]) {
          reach[u] = 1;
          stack.push_back(u);
        }
    }
  };

  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t v = 0; v < n; ++v) allowed[v] = v > s;
    reverse_reach(s);
    bool on_cycle = false;
    for (std::size_t w = s + 1; w < n && !on_cycle; ++w) on_cycle = adj[s * n + w] && reach[w];
    if (!on_cycle) continue;

    std::vector<std::size_t> cycle{s};
    std::size_t cur = s;
    while (true) {
      if (cur != s && adj[cur * n + s]) return cycle;
      reverse_reach(s);
      std::size_t next = n;
      for (std::size_t w = s + 1; w < n; ++w)
        if (allowed[w] && reach[w] && adj[cur * n + w]) {
          next = w;
          break;
        }
      if (next == n) fail(ErrorCode::internal, "canonical cycle search lost its way back");
      allowed[next] = 0;
      cycle.push_back(next);
      cur = next;
    }
  }
  return {};
}

/// Karp's characterisation with walk-length tables from a virtual source
/// joined to every vertex by zero-length arcs. Returns mu on the scaled
/// lattice as (num, den) with 1 <= den <= n.
template <class Int>
std::optional<Fraction<Int>> karp_mean(const ScaledMatrix<Int>& s) {
  const std::size_t n = s.n;
  if (n < 2) return std::nullopt;
  std::vector<std::vector<Int>> d(n + 1, std::vector<Int>(n, Int(0)));
  std::vector<std::vector<char>> finite(n + 1, std::vector<char>(n, 0));
  std::fill(finite[0].begin(), finite[0].end(), 1);
  for (std::size_t k = 1; k <= n; ++k) {
    auto& dk = d[k];
    auto& fk = finite[k];
    const auto& dp = d[k - 1];
    const auto& fp = finite[k - 1];
    for (std::size_t u = 0; u < n; ++u) {
      if (!fp[u]) continue;
      const Int& du = dp[u];
      const std::size_t row = u * n;
      for (std::size_t v = 0; v < n; ++v) {
        if (!s.present[row + v]) continue;
        Int cand = du + s.w[row + v];
        if (!fk[v] || cand < dk[v]) {
          dk[v] = std::move(cand);
          fk[v] = 1;
        }
      }
    }
  }

  std::optional<Fraction<Int>> best;
  for (std::size_t v = 0; v < n; ++v) {
    if (!finite[n][v]) continue;
    std::optional<Fraction<Int>> worst;
    for (std::size_t k = 0; k < n; ++k) {
      if (!finite[k][v]) continue;
      Fraction<Int> f{Int(d[n][v] - d[k][v]), static_cast<long>(n - k)};
      if (!worst || *worst < f) worst = f;
    }
    if (worst && (!best || *worst < *best)) best = worst;
  }
  return best;
}

/// Lengths w*den - num, i.e. the matrix shifted by -mean on the scaled lattice.
template <class Int>
std::vector<Int> shifted(const ScaledMatrix<Int>& s, const Fraction<Int>& mean) {
  std::vector<Int> out(s.w.size(), Int(0));
  for (std::size_t i = 0; i < s.w.size(); ++i)
    if (s.present[i]) out[i] = s.w[i] * Int(mean.den) - mean.num;
  return out;
}

/// Minimum over r <= max_arcs of the lightest walk v -> target with r arcs,
/// restricted to vertices >= target. back[r][v].
template <class Int>
void backward_bounds(std::size_t n, const std::vector<Int>& w, const std::vector<char>& present, std::size_t target,
                     std::size_t max_arcs, std::vector<std::vector<std::optional<Int>>>& back) {
  back.assign(max_arcs + 1, std::vector<std::optional<Int>>(n));
  back[0][target] = Int(0);
  for (std::size_t r = 1; r <= max_arcs; ++r) {
    back[r] = back[r - 1];
    for (std::size_t v = target; v < n; ++v)
      for (std::size_t x = target; x < n; ++x) {
        if (x == v || !present[v * n + x] || !back[r - 1][x]) continue;
        Int cand = w[v * n + x] + *back[r - 1][x];
        if (!back[r][v] || cand < *back[r][v]) back[r][v] = std::move(cand);
      }
  }
}

/// Depth-first search over simple cycles rooted at their minimum vertex s,
/// in lexicographic order, pruned by `back`. `visit` receives each cycle
/// whose weight satisfies `accept(sum)`; returning false stops the search.
/// `budget` bounds the number of expanded search nodes.
template <class Int, class Accept, class Visit>
bool cycle_search(std::size_t n, const std::vector<Int>& w, const std::vector<char>& present, std::size_t s,
                  std::size_t max_len, const std::vector<std::vector<std::optional<Int>>>& back, Accept&& accept,
                  Visit&& visit, std::size_t& budget) {
  std::vector<std::size_t> path{s};
  std::vector<char> used(n, 0);
  used[s] = 1;
  bool stopped = false;

  auto rec = [&](auto&& self, std::size_t cur, const Int& sum) -> void {
    if (stopped) return;
    if (budget == 0) {
      stopped = true;
      return;
    }
    --budget;
    const std::size_t arcs = path.size() - 1;
    if (cur != s && present[cur * n + s]) {
      Int closed = sum + w[cur * n + s];
      if (accept(closed) && !visit(path)) {
        stopped = true;
        return;
      }
    }
    if (arcs + 2 > max_len) return;
    const std::size_t remaining = max_len - arcs - 1;
    for (std::size_t x = s + 1; x < n; ++x) {
      if (used[x] || !present[cur * n + x] || !back[remaining][x]) continue;
      Int next = sum + w[cur * n + x];
      Int bound = next + *back[remaining][x];
      if (!accept(bound)) continue;
      used[x] = 1;
      path.push_back(x);
      self(self, x, next);
      path.pop_back();
      used[x] = 0;
      if (stopped) return;
    }
  };
  rec(rec, s, Int(0));
  return !stopped;
}

template <class Int>
MeanCycleResult min_mean_cycle_scaled(const ScaledMatrix<Int>& s, const LengthMatrix& lengths) {
  MeanCycleResult out;
  auto mean = karp_mean(s);
  if (!mean) return out;
  out.mu = s.rational(mean->num, mean->den);

  const std::size_t n = s.n;
  const auto reduced = shifted(s, *mean);
  std::vector<std::pair<std::size_t, Int>> sources;
  for (std::size_t v = 0; v < n; ++v) sources.emplace_back(v, Int(0));
  auto pot = bellman_ford(n, reduced, s.present, sources);
  if (!pot) fail(ErrorCode::internal, "shifted graph has a negative cycle");

  std::vector<char> tight(n * n, 0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (s.present[u * n + v]) {
        Int lhs = *(*pot)[u] + reduced[u * n + v];
        tight[u * n + v] = lhs == *(*pot)[v];
      }
  auto cycle = canonical_cycle(n, tight);
  if (cycle.empty()) fail(ErrorCode::internal, "no cycle attains the minimum mean");
  out.certificate = make_certificate(lengths, std::move(cycle));
  if (out.certificate->mean_length != *out.mu) fail(ErrorCode::internal, "certificate mean disagrees with mu");
  return out;
}

template <class Int>
BoundedCycleReport worst_bounded_scaled(const ScaledMatrix<Int>& s, const LengthMatrix& lengths, std::size_t k) {
  BoundedCycleReport out;
  out.k = k;
  const std::size_t n = s.n;
  const std::size_t max_len = k + 1;

  // Closed walks at s through vertices >= s, by exact arc count.
  std::optional<Fraction<Int>> best;
  std::size_t best_root = n;
  std::vector<std::optional<Int>> cur(n), next(n);
  for (std::size_t root = 0; root + 1 < n; ++root) {
    std::fill(cur.begin(), cur.end(), std::nullopt);
    cur[root] = Int(0);
    std::optional<Fraction<Int>> root_best;
    for (std::size_t len = 1; len <= max_len; ++len) {
      std::fill(next.begin(), next.end(), std::nullopt);
      for (std::size_t u = root; u < n; ++u) {
        if (!cur[u]) continue;
        const std::size_t row = u * n;
        for (std::size_t v = root; v < n; ++v) {
          if (!s.present[row + v]) continue;
          Int cand = *cur[u] + s.w[row + v];
          if (!next[v] || cand < *next[v]) next[v] = std::move(cand);
        }
      }
      std::swap(cur, next);
      if (len >= 2 && cur[root]) {
        Fraction<Int> f{*cur[root], static_cast<long>(len)};
        if (!root_best || f < *root_best) root_best = f;
      }
    }
    if (root_best && (!best || *root_best < *best)) {
      best = root_best;
      best_root = root;
    }
  }
  if (!best) return out;

  const auto reduced = shifted(s, *best);
  std::vector<std::vector<std::optional<Int>>> back;
  backward_bounds(n, reduced, s.present, best_root, max_len - 1, back);
  std::vector<std::size_t> found;
  std::size_t budget = std::numeric_limits<std::size_t>::max();
  cycle_search(
      n, reduced, s.present, best_root, max_len, back, [](const Int& sum) { return !(Int(0) < sum); },
      [&](const std::vector<std::size_t>& path) {
        found = path;
        return false;
      },
      budget);
  if (found.empty()) fail(ErrorCode::internal, "bounded cycle search found no certificate");
  out.worst = make_certificate(lengths, std::move(found));
  if (out.worst->mean_length != s.rational(best->num, best->den))
    fail(ErrorCode::internal, "bounded certificate mean disagrees with DP");
  return out;
}

}  // namespace detail

/// Exact minimum mean cycle with a canonical certificate.
inline MeanCycleResult min_mean_cycle(const LengthMatrix& lengths) {
  return detail::with_scaled(lengths, {}, [&](const auto& s) { return detail::min_mean_cycle_scaled(s, lengths); });
}

inline MeanCycleResult min_mean_cycle(const BiddingGraph& g) {
  auto r = min_mean_cycle(g.lengths());
  if (r.certificate) r.certificate = g.with_witnesses(std::move(*r.certificate));
  return r;
}

/// Minimum-mean simple cycle among cycles of cardinality <= k+1.
inline BoundedCycleReport worst_bounded_cycle(const LengthMatrix& lengths, std::size_t k) {
  if (k < 1) fail(ErrorCode::invalid_argument, "k must be at least 1");
  if (k + 1 >= lengths.size()) {
    // Every simple cycle qualifies.
    BoundedCycleReport out;
    out.k = k;
    out.worst = min_mean_cycle(lengths).certificate;
    return out;
  }
  return detail::with_scaled(lengths, {}, [&](const auto& s) { return detail::worst_bounded_scaled(s, lengths, k); });
}

inline BoundedCycleReport worst_bounded_cycle(const BiddingGraph& g, std::size_t k) {
  auto r = worst_bounded_cycle(g.lengths(), k);
  if (r.worst) r.worst = g.with_witnesses(std::move(*r.worst));
  return r;
}

struct CycleEnumeration {
  std::vector<CycleCertificate> cycles;  // canonical rotation, lexicographic order
  bool complete = true;
};

struct EnumerationLimits {
  std::size_t max_cardinality = 8;
  std::size_t max_cycles = 100000;
  std::size_t max_search_nodes = 5000000;
};

/// All simple cycles with mean strictly below -epsilon (equivalently total
/// length below -|C| epsilon) and cardinality <= limits.max_cardinality.
inline CycleEnumeration enumerate_violating_cycles(const LengthMatrix& lengths, const Rational& epsilon,
                                                   const EnumerationLimits& limits = {}) {
  CycleEnumeration out;
  const std::size_t n = lengths.size();
  if (n < 2 || limits.max_cardinality < 2) return out;
  const std::size_t max_len = std::min(limits.max_cardinality, n);
  const Rational eps[] = {epsilon};
  detail::with_scaled(lengths, eps, [&](const auto& s) {
    using Int = std::decay_t<decltype(s.w.front())>;
    std::vector<Int> w(s.w.size(), Int(0));
    for (std::size_t i = 0; i < w.size(); ++i)
      if (s.present[i]) w[i] = s.w[i] + s.extras[0];
    std::size_t budget = limits.max_search_nodes;
    std::vector<std::vector<std::optional<Int>>> back;
    for (std::size_t root = 0; root + 1 < n; ++root) {
      detail::backward_bounds(n, w, s.present, root, max_len - 1, back);
      const bool done = detail::cycle_search(
          n, w, s.present, root, max_len, back, [](const Int& sum) { return sum < Int(0); },
          [&](const std::vector<std::size_t>& path) {
            if (out.cycles.size() >= limits.max_cycles) return false;
            out.cycles.push_back(make_certificate(lengths, path));
            return true;
          },
          budget);
      if (!done) {
        out.complete = false;
        return 0;
      }
    }
    return 0;
  });
  return out;
}

/// Tight instance for the k-bounded mean bound: the cycle v_0 .. v_{k+1}
/// has every arc at -lmax/k, every other arc is lmax.
inline LengthMatrix tight_cycle_fixture(std::size_t k, const Rational& lmax, std::size_t n) {
  if (k < 1) fail(ErrorCode::invalid_argument, "k must be at least 1");
  if (lmax.sign() <= 0) fail(ErrorCode::invalid_argument, "lmax must be positive");
  if (n < k + 3) fail(ErrorCode::invalid_argument, "fixture needs n >= k + 3");
  LengthMatrix m(n);
  const Rational low = -lmax / Rational(static_cast<long>(k));
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t w = 0; w < n; ++w)
      if (u != w) m.set(u, w, lmax);
  for (std::size_t i = 0; i < k + 2; ++i) m.set(i, (i + 1) % (k + 2), low);
  return m;
}

}  // namespace rpgraph
