#pragma once

// Virtual valuation functions fitted to a bidding graph. All three are
// shortest-path labelings of the graph shifted by its minimum mean cycle, so
// every cycle there is non-negative and distances exist.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "rpgraph/core.hpp"
#include "rpgraph/cycles.hpp"
#include "rpgraph/detail/scaled.hpp"

namespace rpgraph {

/// Values on observed bundles (by bundle id). An absent value means the
/// coordinate is unbounded above by the given constraints.
struct Valuation {
  std::vector<std::optional<Rational>> values;
  Rational epsilon;
  bool individually_rational = false;

  const Rational& operator[](BundleId id) const { return *values.at(id); }
  bool bounded() const {
    for (const auto& v : values)
      if (!v) return false;
    return true;
  }
};

/// Upper bounds beta_i on a subset of observed bundles.
using UpperBounds = std::map<BundleId, Rational>;

namespace detail {

/// Shortest distances from a set of labeled sources. Throws if a negative
/// cycle is reachable.
inline std::vector<std::optional<Rational>> shortest_from(const LengthMatrix& m,
                                                          const std::vector<std::pair<std::size_t, Rational>>& sources) {
  std::vector<Rational> labels;
  for (const auto& src : sources) labels.push_back(src.second);
  return with_scaled(m, labels, [&](const auto& s) {
    using Int = std::decay_t<decltype(s.w.front())>;
    std::vector<std::pair<std::size_t, Int>> init;
    for (std::size_t i = 0; i < sources.size(); ++i) init.emplace_back(sources[i].first, s.extras[i]);
    auto dist = bellman_ford(s.n, s.w, s.present, init);
    if (!dist) fail(ErrorCode::internal, "negative cycle in a graph that must be cycle-non-negative");
    std::vector<std::optional<Rational>> out(s.n);
    for (std::size_t v = 0; v < s.n; ++v)
      if ((*dist)[v]) out[v] = s.rational(*(*dist)[v]);
    return out;
  });
}

inline LengthMatrix transpose(const LengthMatrix& m) {
  LengthMatrix t(m.size());
  for (std::size_t u = 0; u < m.size(); ++u)
    for (std::size_t w = 0; w < m.size(); ++w)
      if (m.has(u, w)) t.set(w, u, m.at(u, w));
  return t;
}

inline LengthMatrix shift_unchecked(const LengthMatrix& m, const Rational& mu) {
  LengthMatrix out(m.size());
  for (std::size_t u = 0; u < m.size(); ++u)
    for (std::size_t w = 0; w < m.size(); ++w)
      if (m.has(u, w)) out.set(u, w, m.at(u, w) - mu);
  return out;
}

}  // namespace detail

/// Lengths minus mu. mu must be the matrix's minimum mean (absent or
/// nullopt means no cycles, shift by zero); anything else throws.
inline LengthMatrix shifted_graph(const LengthMatrix& lengths, const std::optional<Rational>& mu) {
  LengthMatrix out = detail::shift_unchecked(lengths, mu.value_or(Rational()));
  const auto check = min_mean_cycle(out);
  if (mu ? (!check.mu || !check.mu->is_zero()) : check.mu.has_value())
    fail(ErrorCode::internal, "shift is not the graph's minimum mean cycle");
  return out;
}

inline LengthMatrix shifted_graph(const BiddingGraph& g, const std::optional<Rational>& mu) {
  return shifted_graph(g.lengths(), mu);
}

/// max_{rounds t bidding u} p_t . x_t, the individual-rationality floor of u.
inline Rational ir_floor(const BiddingGraph& g, BundleId u) { return -g.sink_arc(u).first; }

/// v(w) - v(u) <= l(u,w) + epsilon on every arc; equivalent to the
/// per-round epsilon-constraints because arcs keep the binding round.
inline bool satisfies_constraints(const BiddingGraph& g, const std::vector<std::optional<Rational>>& values,
                                  const Rational& epsilon) {
  const std::size_t n = g.vertex_count();
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t w = 0; w < n; ++w) {
      if (u == w) continue;
      if (!values[u] || !values[w]) continue;
      if (*values[w] - *values[u] > g.length(u, w) + epsilon) return false;
    }
  return true;
}

inline bool is_individually_rational(const BiddingGraph& g, const std::vector<std::optional<Rational>>& values) {
  for (std::size_t u = 0; u < g.vertex_count(); ++u)
    if (values[u] && *values[u] < ir_floor(g, u)) return false;
  return true;
}

/// Shortest-path distances from `root` in the shifted graph; epsilon = -mu.
inline Valuation deviation_valuation(const BiddingGraph& g, BundleId root, const MeanCycleResult& mmc) {
  if (root >= g.vertex_count()) fail(ErrorCode::invalid_argument, "root is not an observed bundle");
  const LengthMatrix shifted = shifted_graph(g, mmc.mu);
  Valuation v;
  v.values = detail::shortest_from(shifted, {{root, Rational()}});
  v.epsilon = mmc.mu ? -*mmc.mu : Rational();
  v.individually_rational = is_individually_rational(g, v.values);
  return v;
}

inline Valuation deviation_valuation(const BiddingGraph& g, BundleId root = 0) {
  return deviation_valuation(g, root, min_mean_cycle(g));
}

/// Componentwise minimal individually rational (-mu)-approximate valuation:
/// v(x) = -(distance from x to a sink joined by arcs of length -p_t . x_t).
inline Valuation min_ir_valuation(const BiddingGraph& g, const MeanCycleResult& mmc) {
  if (g.vertex_count() == 0) fail(ErrorCode::empty_input, "no observations");
  const LengthMatrix reversed = detail::transpose(shifted_graph(g, mmc.mu));
  std::vector<std::pair<std::size_t, Rational>> sources;
  for (BundleId u = 0; u < g.vertex_count(); ++u) sources.emplace_back(u, g.sink_arc(u).first);
  auto dist = detail::shortest_from(reversed, sources);
  Valuation v;
  v.values.resize(g.vertex_count());
  for (BundleId u = 0; u < g.vertex_count(); ++u) v.values[u] = -*dist[u];
  v.epsilon = mmc.mu ? -*mmc.mu : Rational();
  v.individually_rational = is_individually_rational(g, v.values);
  if (!v.individually_rational) fail(ErrorCode::internal, "minimum valuation is not individually rational");
  return v;
}

inline Valuation min_ir_valuation(const BiddingGraph& g) { return min_ir_valuation(g, min_mean_cycle(g)); }

/// Componentwise maximal (-mu)-approximate valuation with v(x_i) <= beta_i:
/// distances from a source joined to each bounded bundle by an arc of
/// length beta_i. Bundles the source cannot reach come back unbounded.
inline Valuation max_valuation(const BiddingGraph& g, const UpperBounds& bounds, const MeanCycleResult& mmc) {
  if (bounds.empty()) fail(ErrorCode::invalid_argument, "at least one upper bound is required");
  std::vector<std::pair<std::size_t, Rational>> sources;
  for (const auto& [id, beta] : bounds) {
    if (id >= g.vertex_count()) fail(ErrorCode::invalid_argument, "bound on an unobserved bundle");
    sources.emplace_back(id, beta);
  }
  Valuation v;
  v.values = detail::shortest_from(shifted_graph(g, mmc.mu), sources);
  v.epsilon = mmc.mu ? -*mmc.mu : Rational();
  v.individually_rational = is_individually_rational(g, v.values);
  return v;
}

inline Valuation max_valuation(const BiddingGraph& g, const UpperBounds& bounds) {
  return max_valuation(g, bounds, min_mean_cycle(g));
}

}  // namespace rpgraph
