#pragma once

// Relaxed revealed-preference activity rules. A rule with tolerance epsilon
// accepts when the worst relevant cycle of the bidding graph has mean
// >= -epsilon: digons for WARP, cardinality <= k+1 for KARP(k), every cycle
// for GARP.

#include <algorithm>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rpgraph/core.hpp"
#include "rpgraph/cycles.hpp"
#include "rpgraph/valuation.hpp"

namespace rpgraph {

enum class Rule { warp, karp, garp };

inline std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::warp: return "warp";
    case Rule::karp: return "karp";
    case Rule::garp: return "garp";
  }
  return "garp";
}

inline Rule parse_rule(std::string_view name) {
  if (name == "warp") return Rule::warp;
  if (name == "karp") return Rule::karp;
  if (name == "garp") return Rule::garp;
  fail(ErrorCode::invalid_argument, "unknown rule '" + std::string(name) + "'");
}

struct RuleConfig {
  Rule rule = Rule::garp;
  std::size_t k = 1;  // used by KARP only
  Rational epsilon;

  /// Largest cycle cardinality the rule inspects; nullopt for GARP.
  std::optional<std::size_t> max_cardinality() const {
    switch (rule) {
      case Rule::warp: return 2;
      case Rule::karp: return k + 1;
      case Rule::garp: return std::nullopt;
    }
    return std::nullopt;
  }

  void validate() const {
    if (rule == Rule::karp && k < 1) fail(ErrorCode::invalid_argument, "KARP requires k >= 1");
    if (epsilon.sign() < 0) fail(ErrorCode::invalid_argument, "epsilon must be non-negative");
  }

  friend bool operator==(const RuleConfig&, const RuleConfig&) = default;
};

struct WithdrawalAdvice {
  std::vector<std::vector<BundleId>> sets;  // minimum hitting sets, lexicographic
  std::size_t violating_cycles = 0;         // cycles examined
  std::size_t disjoint_cycles = 0;          // greedy packing, at most budget + 1
  bool complete = true;
};

struct AdviceOptions {
  bool enabled = true;
  std::size_t budget = 2;
  EnumerationLimits limits;
};

struct RuleVerdict {
  bool accepted = true;
  std::optional<CycleCertificate> violation;
  std::optional<Rational> worst_mean;  // absent when the graph has no relevant cycle
  Rational implied_epsilon;
  std::optional<WithdrawalAdvice> withdrawal_advice;
};

/// Worst relevant cycle under the rule, with witness rounds.
inline std::optional<CycleCertificate> worst_relevant_cycle(const BiddingGraph& g, const RuleConfig& cfg) {
  switch (cfg.rule) {
    case Rule::warp: return worst_bounded_cycle(g, 1).worst;
    case Rule::karp: return worst_bounded_cycle(g, cfg.k).worst;
    case Rule::garp: return min_mean_cycle(g).certificate;
  }
  return std::nullopt;
}

inline std::optional<CycleCertificate> worst_relevant_cycle(const LengthMatrix& m, const RuleConfig& cfg) {
  switch (cfg.rule) {
    case Rule::warp: return worst_bounded_cycle(m, 1).worst;
    case Rule::karp: return worst_bounded_cycle(m, cfg.k).worst;
    case Rule::garp: return min_mean_cycle(m).certificate;
  }
  return std::nullopt;
}

inline bool rule_accepts(const LengthMatrix& m, const RuleConfig& cfg) {
  const auto worst = worst_relevant_cycle(m, cfg);
  return !worst || worst->mean_length >= -cfg.epsilon;
}

/// Arcs among the kept vertices only, renumbered densely. Dropping a bundle
/// vertex drops all of its rounds; arcs between survivors are unchanged.
inline LengthMatrix induced_subgraph(const LengthMatrix& m, const std::vector<BundleId>& removed,
                                     std::vector<BundleId>* kept_out = nullptr) {
  std::vector<BundleId> kept;
  for (BundleId v = 0; v < m.size(); ++v)
    if (std::find(removed.begin(), removed.end(), v) == removed.end()) kept.push_back(v);
  LengthMatrix out(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j = 0; j < kept.size(); ++j)
      if (i != j && m.has(kept[i], kept[j])) out.set(i, j, m.at(kept[i], kept[j]));
  if (kept_out) *kept_out = std::move(kept);
  return out;
}

namespace detail {

inline void collect_hitting_sets(const std::vector<std::vector<BundleId>>& cycles, std::size_t size,
                                 std::vector<char>& chosen, std::vector<BundleId>& current,
                                 std::set<std::vector<BundleId>>& out) {
  const auto unhit = std::find_if(cycles.begin(), cycles.end(), [&](const auto& c) {
    return std::none_of(c.begin(), c.end(), [&](BundleId v) { return chosen[v]; });
  });
  if (unhit == cycles.end()) {
    if (current.size() == size) {
      auto s = current;
      std::sort(s.begin(), s.end());
      out.insert(std::move(s));
    }
    return;
  }
  if (current.size() == size) return;
  for (BundleId v : *unhit) {
    chosen[v] = 1;
    current.push_back(v);
    collect_hitting_sets(cycles, size, chosen, current, out);
    current.pop_back();
    chosen[v] = 0;
  }
}

}  // namespace detail

/// All minimum-cardinality vertex sets (size <= budget) meeting every
/// violating cycle, found by growing a family of violating cycles until each
/// minimum hitting set of the family re-validates. Exact for every rule;
/// limits.max_cycles caps the family, past which the advice is marked
/// incomplete.
inline WithdrawalAdvice withdrawal_advice(const LengthMatrix& m, const RuleConfig& cfg, std::size_t budget,
                                          EnumerationLimits limits = {}) {
  if (budget < 1) fail(ErrorCode::invalid_argument, "withdrawal budget must be at least 1");
  cfg.validate();

  WithdrawalAdvice advice;
  auto violation = [&](const std::vector<BundleId>& removed) -> std::optional<std::vector<BundleId>> {
    std::vector<BundleId> kept;
    const auto worst = worst_relevant_cycle(induced_subgraph(m, removed, &kept), cfg);
    if (!worst || worst->mean_length >= -cfg.epsilon) return std::nullopt;
    std::vector<BundleId> cycle;
    for (auto v : worst->vertices) cycle.push_back(kept[v]);
    return cycle;
  };

  // More than `budget` pairwise disjoint violating cycles rule out every
  // set within the budget.
  std::vector<std::vector<BundleId>> cycles;
  std::vector<BundleId> packed;
  std::vector<char> in_packing(m.size(), 0);
  const Rational digon_floor = Rational(-2) * cfg.epsilon;
  for (BundleId u = 0; u < m.size() && advice.disjoint_cycles <= budget; ++u)
    for (BundleId w = u + 1; w < m.size() && !in_packing[u]; ++w)
      if (!in_packing[w] && m.has(u, w) && m.has(w, u) && m.at(u, w) + m.at(w, u) < digon_floor) {
        in_packing[u] = in_packing[w] = 1;
        packed.insert(packed.end(), {u, w});
        cycles.push_back({u, w});
        ++advice.disjoint_cycles;
      }
  while (advice.disjoint_cycles <= budget) {
    auto cycle = violation(packed);
    if (!cycle) break;
    packed.insert(packed.end(), cycle->begin(), cycle->end());
    cycles.push_back(std::move(*cycle));
    ++advice.disjoint_cycles;
  }
  advice.violating_cycles = cycles.size();
  if (cycles.empty() || advice.disjoint_cycles > budget) return advice;

  std::vector<char> chosen(m.size(), 0);
  for (std::size_t size = 1; size <= budget; ++size) {
    std::set<std::vector<BundleId>> valid;
    for (;;) {
      std::set<std::vector<BundleId>> sets;
      std::vector<BundleId> current;
      detail::collect_hitting_sets(cycles, size, chosen, current, sets);
      bool grew = false;
      for (const auto& s : sets) {
        if (valid.count(s)) continue;
        if (auto cycle = violation(s)) {
          if (std::find(cycles.begin(), cycles.end(), *cycle) == cycles.end()) cycles.push_back(std::move(*cycle));
          grew = true;
        } else {
          valid.insert(s);
        }
      }
      advice.violating_cycles = cycles.size();
      if (!grew) break;
      if (cycles.size() > limits.max_cycles) {
        advice.complete = false;
        break;
      }
    }
    if (!valid.empty() || !advice.complete) {
      advice.sets.assign(valid.begin(), valid.end());
      return advice;
    }
  }
  return advice;
}

inline WithdrawalAdvice withdrawal_advice(const BiddingGraph& g, const RuleConfig& cfg, std::size_t budget,
                                          EnumerationLimits limits = {}) {
  return withdrawal_advice(g.lengths(), cfg, budget, limits);
}

/// Verdict for the whole graph under the rule.
inline RuleVerdict evaluate_rule(const BiddingGraph& g, const RuleConfig& cfg, const AdviceOptions& advice = {}) {
  cfg.validate();
  RuleVerdict v;
  auto worst = worst_relevant_cycle(g, cfg);
  if (worst) {
    v.worst_mean = worst->mean_length;
    v.implied_epsilon = worst->mean_length.sign() < 0 ? -worst->mean_length : Rational();
    v.accepted = worst->mean_length >= -cfg.epsilon;
  }
  if (!v.accepted) {
    v.violation = std::move(worst);
    if (advice.enabled) v.withdrawal_advice = withdrawal_advice(g, cfg, advice.budget, advice.limits);
  }
  return v;
}

/// Validates a prospective bid against an already-built history graph.
inline RuleVerdict validate_bid(const BiddingGraph& history, const Observation& candidate, const RuleConfig& cfg,
                                const AdviceOptions& advice = {}) {
  if (auto last = history.last_round(); last && candidate.round <= *last)
    fail(ErrorCode::stale_round, "round " + std::to_string(candidate.round) + " is not after round " +
                                     std::to_string(*last));
  BiddingGraph g = history.round_count() ? history : BiddingGraph(candidate.dimension());
  g.add(candidate);
  return evaluate_rule(g, cfg, advice);
}

inline RuleVerdict validate_bid(std::span<const Observation> history, const Observation& candidate,
                                const RuleConfig& cfg, const AdviceOptions& advice = {}) {
  if (history.empty()) return validate_bid(BiddingGraph(candidate.dimension()), candidate, cfg, advice);
  return validate_bid(BiddingGraph::build(history), candidate, cfg, advice);
}

/// (p_k - p_0).x_0 - sum_{i=1..k} (p_i - p_{i-1}).x_i for rounds x_0..x_k;
/// equals the length of the corresponding closed walk of round-level arcs.
inline Rational check_karp_inequality(std::span<const Observation> rounds) {
  if (rounds.size() < 2) fail(ErrorCode::invalid_argument, "need at least two rounds");
  const std::size_t dim = rounds.front().dimension();
  for (const auto& r : rounds) check_observation(r, dim);
  auto diff = [](const Vector& a, const Vector& b) {
    Vector d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
  };
  const std::size_t k = rounds.size() - 1;
  Rational value = dot(diff(rounds[k].prices, rounds[0].prices), rounds[0].bundle);
  for (std::size_t i = 1; i <= k; ++i) value -= dot(diff(rounds[i].prices, rounds[i - 1].prices), rounds[i].bundle);
  return value;
}

/// Direct relaxed KARP test for one tuple of k+1 rounds.
inline bool karp_tuple_holds(std::span<const Observation> rounds, const Rational& epsilon) {
  return check_karp_inequality(rounds) >= -Rational(static_cast<long>(rounds.size())) * epsilon;
}

struct CriticalArc {
  BundleId from = 0;
  BundleId to = 0;
  RoundId witness = 0;
  std::optional<Rational> lambda;  // nullopt: +infinity, removed at every lambda

  bool removed_below(const Rational& lambda_bound) const { return !lambda || *lambda >= lambda_bound; }
  bool removed_strictly_above(const Rational& lambda_bound) const { return !lambda || *lambda > lambda_bound; }
};

struct AfriatResult {
  Rational lambda_star = 1;
  std::vector<CriticalArc> removed_arcs;
  std::optional<Rational> residual_mu;
  std::vector<CriticalArc> critical;  // every arc with its critical value
  Valuation valuation;                // the minimum IR valuation used for the ratios
};

/// Afriat-index analog by arc deletion. The arc (u, w), with witness round
/// t, is dropped when v(w) - p_t.w > lambda (v(u) - p_t.u), so its critical
/// value is the ratio of the two surpluses. lambda_star is the supremum of
/// lambda in [0, 1] whose residual graph has mu >= -epsilon; at lambda = 1
/// arcs with critical value > 1 are removed, below 1 the removed set is
/// {critical >= lambda_star}.
/// Uses the given valuation for the surplus ratios; it must be defined on
/// every observed bundle.
inline AfriatResult afriat_lambda(const BiddingGraph& g, const Rational& epsilon, const Valuation& valuation) {
  AfriatResult out;
  out.valuation = valuation;
  const auto& v = out.valuation;
  const std::size_t n = g.vertex_count();
  if (v.values.size() != n || !v.bounded())
    fail(ErrorCode::invalid_argument, "valuation must give a value for every observed bundle");

  for (BundleId u = 0; u < n; ++u)
    for (BundleId w = 0; w < n; ++w) {
      if (u == w) continue;
      CriticalArc arc{u, w, g.witness(u, w), Rational()};
      const auto& rounds = g.rounds_of(u);
      const auto rec = std::find_if(rounds.begin(), rounds.end(), [&](const auto& r) { return r.round == arc.witness; });
      const Rational num = v[w] - dot(rec->prices, g.bundle(w));
      const Rational den = v[u] - rec->cost;
      if (num.sign() <= 0)
        arc.lambda = Rational();
      else if (den.sign() <= 0)
        arc.lambda.reset();
      else
        arc.lambda = num / den;
      out.critical.push_back(arc);
    }

  auto residual = [&](auto&& removed) {
    LengthMatrix m = g.lengths();
    for (const auto& a : out.critical)
      if (removed(a)) m.erase(a.from, a.to);
    return m;
  };
  auto feasible = [&](const LengthMatrix& m) {
    const auto r = min_mean_cycle(m);
    return !r.mu || *r.mu >= -epsilon;
  };
  auto finish = [&](const Rational& lambda, auto&& removed) {
    out.lambda_star = lambda;
    for (const auto& a : out.critical)
      if (removed(a)) out.removed_arcs.push_back(a);
    out.residual_mu = min_mean_cycle(residual(removed)).mu;
    return out;
  };

  const Rational one = 1;
  auto at_one = [&](const CriticalArc& a) { return a.removed_strictly_above(one); };
  if (feasible(residual(at_one))) return finish(one, at_one);

  // Candidate suprema: distinct critical values in [0, 1], descending; 0
  // removes every arc and is always feasible.
  std::vector<Rational> candidates{Rational()};
  for (const auto& a : out.critical)
    if (a.lambda && *a.lambda <= one) candidates.push_back(*a.lambda);
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) { return b < a; });
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // Feasibility is monotone: smaller lambda removes a superset of arcs.
  std::size_t lo = 0, hi = candidates.size() - 1;  // answer index in [lo, hi]; hi is feasible
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const Rational c = candidates[mid];
    if (feasible(residual([&](const CriticalArc& a) { return a.removed_below(c); })))
      hi = mid;
    else
      lo = mid + 1;
  }
  const Rational best = candidates[lo];
  return finish(best, [&](const CriticalArc& a) { return a.removed_below(best); });
}

inline AfriatResult afriat_lambda(const BiddingGraph& g, const Rational& epsilon) {
  return afriat_lambda(g, epsilon, min_ir_valuation(g));
}

}  // namespace rpgraph
