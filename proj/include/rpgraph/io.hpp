#pragma once

// JSON encodings. Numbers travel as decimal strings; exact values are
// rendered "n" or "n/d", both of which parse back to the same Rational.

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rpgraph/core.hpp"
#include "rpgraph/cycles.hpp"
#include "rpgraph/rules.hpp"
#include "rpgraph/valuation.hpp"

namespace rpgraph::io {

using Json = nlohmann::ordered_json;

inline Json to_json(const Rational& r) { return r.str(); }

inline Json to_json(const std::optional<Rational>& r) { return r ? Json(r->str()) : Json(nullptr); }

inline Rational rational_from_json(const Json& j, std::size_t line = 0) {
  if (j.is_string()) {
    try {
      return Rational::parse(j.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(line, e.what());
    }
  }
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw ParseError(line, "expected a decimal string, got " + j.dump());
}

inline Json to_json(const Vector& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(x.str());
  return out;
}

inline Vector vector_from_json(const Json& j, std::size_t line = 0) {
  if (!j.is_array()) throw ParseError(line, "expected an array of decimal strings");
  Vector out;
  for (const auto& x : j) out.push_back(rational_from_json(x, line));
  return out;
}

inline Json to_json(const Observation& o) {
  return Json{{"t", o.round}, {"p", to_json(o.prices)}, {"x", to_json(o.bundle)}};
}

inline Observation observation_from_json(const Json& j, std::size_t line = 0) {
  if (!j.is_object()) throw ParseError(line, "expected an object");
  for (const char* key : {"t", "p", "x"})
    if (!j.contains(key)) throw ParseError(line, std::string("missing field '") + key + "'");
  if (!j["t"].is_number_integer()) throw ParseError(line, "'t' must be an integer");
  Observation o;
  o.round = j["t"].get<RoundId>();
  o.prices = vector_from_json(j["p"], line);
  o.bundle = vector_from_json(j["x"], line);
  return o;
}

/// JSON Lines, one round per line; blank lines are skipped. The dimension
/// comes from the first line and is enforced on the rest.
inline std::vector<Observation> read_observations(std::istream& in) {
  std::vector<Observation> out;
  std::string text;
  std::size_t line = 0;
  std::optional<std::size_t> dimension;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ParseError(line, std::string("invalid JSON: ") + e.what());
    }
    Observation o = observation_from_json(j, line);
    try {
      check_observation(o, dimension);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line) + ": " + e.what());
    }
    if (!dimension) dimension = o.dimension();
    out.push_back(std::move(o));
  }
  if (out.empty()) fail(ErrorCode::empty_input, "no observations");
  return out;
}

inline Json bundles_json(const BiddingGraph& g, const std::vector<BundleId>& ids) {
  Json out = Json::array();
  for (auto id : ids) out.push_back(to_json(g.bundle(id)));
  return out;
}

inline Json to_json(const CycleCertificate& c, const BiddingGraph* g = nullptr) {
  Json out{{"vertices", c.vertices},
           {"total_length", to_json(c.total_length)},
           {"mean_length", to_json(c.mean_length)},
           {"mean_length_decimal", c.mean_length.decimal()}};
  if (!c.witness_rounds.empty()) out["witness_rounds"] = c.witness_rounds;
  if (g) out["bundles"] = bundles_json(*g, c.vertices);
  return out;
}

inline Json to_json(const WithdrawalAdvice& a, const BiddingGraph* g = nullptr) {
  Json sets = Json::array();
  for (const auto& s : a.sets) {
    Json entry{{"bundle_ids", s}};
    if (g) {
      entry["bundles"] = bundles_json(*g, s);
      std::vector<RoundId> rounds;
      for (auto id : s)
        for (const auto& r : g->rounds_of(id)) rounds.push_back(r.round);
      std::sort(rounds.begin(), rounds.end());
      entry["rounds"] = rounds;
    }
    sets.push_back(std::move(entry));
  }
  return Json{{"sets", std::move(sets)}, {"violating_cycles", a.violating_cycles},
              {"disjoint_cycles", a.disjoint_cycles}, {"complete", a.complete}};
}

inline Json to_json(const RuleVerdict& v, const BiddingGraph* g = nullptr) {
  Json out{{"accepted", v.accepted},
           {"worst_mean", to_json(v.worst_mean)},
           {"implied_epsilon", to_json(v.implied_epsilon)},
           {"implied_epsilon_decimal", v.implied_epsilon.decimal()}};
  out["violation"] = v.violation ? to_json(*v.violation, g) : Json(nullptr);
  out["withdrawal_advice"] = v.withdrawal_advice ? to_json(*v.withdrawal_advice, g) : Json(nullptr);
  return out;
}

inline Json to_json(const RuleConfig& c) {
  Json out{{"rule", std::string(to_string(c.rule))}};
  if (c.rule == Rule::karp) out["k"] = c.k;
  out["epsilon"] = to_json(c.epsilon);
  return out;
}

inline RuleConfig rule_config_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError(0, "rule config must be an object");
  RuleConfig c;
  if (j.contains("rule")) {
    if (!j["rule"].is_string()) throw ParseError(0, "'rule' must be a string");
    c.rule = parse_rule(j["rule"].get<std::string>());
  }
  if (j.contains("k")) {
    if (!j["k"].is_number_integer() || j["k"].get<long>() < 1) fail(ErrorCode::invalid_argument, "k must be >= 1");
    c.k = j["k"].get<std::size_t>();
  }
  if (j.contains("epsilon")) c.epsilon = rational_from_json(j["epsilon"]);
  c.validate();
  return c;
}

inline Json to_json(const Valuation& v, const BiddingGraph& g) {
  Json values = Json::array();
  for (BundleId id = 0; id < v.values.size(); ++id) {
    Json entry{{"bundle", to_json(g.bundle(id))}, {"value", to_json(v.values[id])}};
    if (!v.values[id]) entry["unbounded"] = true;
    values.push_back(std::move(entry));
  }
  return Json{{"epsilon", to_json(v.epsilon)},
              {"individually_rational", v.individually_rational},
              {"values", std::move(values)}};
}

/// Bounds mirror the valuation export: {"values": [{"bundle": [...],
/// "value": "5"}, ...]} or the bare array. Every bundle must be observed.
inline UpperBounds bounds_from_json(const Json& j, const BiddingGraph& g) {
  const Json& entries = j.is_object() && j.contains("values") ? j["values"] : j;
  if (!entries.is_array()) throw ParseError(0, "bounds must be an array of {bundle, value}");
  UpperBounds bounds;
  for (const auto& e : entries) {
    if (!e.is_object() || !e.contains("bundle") || !e.contains("value"))
      throw ParseError(0, "each bound needs 'bundle' and 'value'");
    if (e["value"].is_null()) continue;
    const Vector bundle = vector_from_json(e["bundle"]);
    const auto id = g.bundles().find(bundle);
    if (!id) fail(ErrorCode::invalid_argument, "bound on a bundle that was never bid: " + to_json(bundle).dump());
    bounds[*id] = rational_from_json(e["value"]);
  }
  if (bounds.empty()) fail(ErrorCode::invalid_argument, "at least one upper bound is required");
  return bounds;
}

inline Json to_json(const LengthMatrix& m) {
  Json rows = Json::array();
  for (std::size_t u = 0; u < m.size(); ++u) {
    Json row = Json::array();
    for (std::size_t w = 0; w < m.size(); ++w) row.push_back(m.has(u, w) ? Json(m.at(u, w).str()) : Json(nullptr));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline LengthMatrix length_matrix_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError(0, "length matrix must be an array of rows");
  LengthMatrix m(j.size());
  for (std::size_t u = 0; u < j.size(); ++u) {
    if (!j[u].is_array() || j[u].size() != j.size()) throw ParseError(0, "length matrix must be square");
    for (std::size_t w = 0; w < j.size(); ++w)
      if (!j[u][w].is_null() && u != w) m.set(u, w, rational_from_json(j[u][w]));
  }
  return m;
}

inline Json to_json(const CriticalArc& a) {
  return Json{{"from", a.from}, {"to", a.to}, {"witness_round", a.witness},
              {"lambda", a.lambda ? Json(a.lambda->str()) : Json("inf")}};
}

inline Json to_json(const AfriatResult& r, const BiddingGraph& g) {
  Json removed = Json::array();
  for (const auto& a : r.removed_arcs) removed.push_back(to_json(a));
  Json critical = Json::array();
  for (const auto& a : r.critical) critical.push_back(to_json(a));
  return Json{{"lambda_star", to_json(r.lambda_star)},
              {"lambda_star_decimal", r.lambda_star.decimal()},
              {"removed_arcs", std::move(removed)},
              {"residual_mu", to_json(r.residual_mu)},
              {"critical", std::move(critical)},
              {"valuation", to_json(r.valuation, g)}};
}

/// Full report on a history: graph statistics, mu with certificate, rule
/// verdicts at epsilon (KARP at k), implied epsilon and delta-confidence.
inline Json analysis_json(const BiddingGraph& g, std::size_t k, const Rational& epsilon,
                          const AdviceOptions& advice = {}) {
  const auto mmc = min_mean_cycle(g);
  Json out{{"rounds", g.round_count()}, {"vertices", g.vertex_count()}, {"arcs", g.arc_count()},
           {"lmax", to_json(g.lmax())}, {"bmax", to_json(g.bmax())}};
  out["mu"] = to_json(mmc.mu);
  out["mu_decimal"] = mmc.mu ? Json(mmc.mu->decimal()) : Json(nullptr);
  out["certificate"] = mmc.certificate ? to_json(*mmc.certificate, &g) : Json(nullptr);
  const Rational implied = mmc.mu && mmc.mu->sign() < 0 ? -*mmc.mu : Rational();
  out["implied_epsilon"] = to_json(implied);
  out["delta_confidence"] = mmc.mu && mmc.mu->sign() > 0 ? Json(mmc.mu->str()) : Json(nullptr);
  out["epsilon"] = to_json(epsilon);
  Json verdicts = Json::object();
  for (Rule rule : {Rule::warp, Rule::karp, Rule::garp}) {
    RuleConfig cfg{rule, k, epsilon};
    Json v = to_json(evaluate_rule(g, cfg, advice), &g);
    if (rule == Rule::karp) v["k"] = k;
    verdicts[std::string(to_string(rule))] = std::move(v);
  }
  out["verdicts"] = std::move(verdicts);
  return out;
}

}  // namespace rpgraph::io
