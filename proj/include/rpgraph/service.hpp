#pragma once

// What-if sessions over a single bidder's history. Commits enforce the
// session rule; what-if queries evaluate a prospective bid without touching
// state. Every mutation is an event, optionally appended to a JSONL log from
// which the session can be replayed.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <type_traits>
#include <vector>

#include "rpgraph/core.hpp"
#include "rpgraph/cycles.hpp"
#include "rpgraph/io.hpp"
#include "rpgraph/rules.hpp"
#include "rpgraph/valuation.hpp"

namespace rpgraph::service {

using io::Json;

inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct CommitResult {
  RuleVerdict verdict;
  bool committed = false;
  BiddingGraph graph;  // history plus the bid, whether or not it was committed
};

struct WhatIfResult {
  RuleVerdict verdict;
  std::optional<Rational> mu_before;
  std::optional<Rational> mu_after;
  BiddingGraph graph;  // history plus the prospective bid

  std::optional<Rational> delta_mu() const {
    if (!mu_before || !mu_after) return std::nullopt;
    return *mu_after - *mu_before;
  }
};

/// One bidder's committed history with derived caches. Not synchronized;
/// SessionManager serializes access.
class Session {
 public:
  Session(std::string id, std::size_t dimension, RuleConfig cfg)
      : id_(std::move(id)), dimension_(dimension), cfg_(cfg), graph_(dimension) {
    if (dimension < 1) fail(ErrorCode::invalid_argument, "dimension must be at least 1");
    cfg_.validate();
    events_.push_back(Json{{"event", "create"}, {"n", dimension}, {"rule", io::to_json(cfg_)}});
  }

  const std::string& id() const noexcept { return id_; }
  std::size_t dimension() const noexcept { return dimension_; }
  const RuleConfig& config() const noexcept { return cfg_; }
  const std::vector<Observation>& committed() const noexcept { return committed_; }
  const BiddingGraph& graph() const noexcept { return graph_; }
  const MeanCycleResult& mean_cycle() const noexcept { return mmc_; }
  const std::optional<Valuation>& min_valuation() const noexcept { return min_ir_; }
  const std::vector<Json>& events() const noexcept { return events_; }

  AdviceOptions advice;

  CommitResult commit(const Observation& obs) {
    check_candidate(obs);
    CommitResult out;
    BiddingGraph next = graph_;
    next.add(obs);
    out.verdict = evaluate_rule(next, cfg_, advice);
    out.graph = next;
    if (!out.verdict.accepted) return out;
    committed_.push_back(obs);
    graph_ = std::move(next);
    refresh();
    out.committed = true;
    events_.push_back(Json{{"event", "commit"}, {"observation", io::to_json(obs)}});
    return out;
  }

  WhatIfResult whatif(const Observation& obs, const std::optional<RuleConfig>& override_cfg = std::nullopt) const {
    check_candidate(obs);
    const RuleConfig cfg = override_cfg.value_or(cfg_);
    cfg.validate();
    BiddingGraph next = graph_;
    next.add(obs);
    WhatIfResult out;
    out.verdict = evaluate_rule(next, cfg, advice);
    out.mu_before = mmc_.mu;
    out.mu_after = min_mean_cycle(next).mu;
    out.graph = std::move(next);
    return out;
  }

  /// Removes the given rounds and rebuilds the graph from the survivors.
  void withdraw(const std::vector<RoundId>& rounds) {
    if (rounds.empty()) fail(ErrorCode::invalid_argument, "no rounds to withdraw");
    for (RoundId t : rounds)
      if (std::none_of(committed_.begin(), committed_.end(), [&](const auto& o) { return o.round == t; }))
        fail(ErrorCode::unknown_round, "round " + std::to_string(t) + " is not committed");
    std::erase_if(committed_, [&](const Observation& o) {
      return std::find(rounds.begin(), rounds.end(), o.round) != rounds.end();
    });
    graph_ = committed_.empty() ? BiddingGraph(dimension_) : BiddingGraph::build(committed_);
    refresh();
    events_.push_back(Json{{"event", "withdraw"}, {"rounds", rounds}});
  }

  Json analysis() const {
    Json out = io::analysis_json(graph_, cfg_.k, cfg_.epsilon, advice);
    out["session"] = id_;
    out["rule"] = io::to_json(cfg_);
    out["verdict"] = io::to_json(evaluate_rule(graph_, cfg_, advice), &graph_);
    Json rounds = Json::array();
    for (const auto& o : committed_) rounds.push_back(io::to_json(o));
    out["observations"] = std::move(rounds);
    Json bundles = Json::array();
    for (BundleId id = 0; id < graph_.vertex_count(); ++id) bundles.push_back(io::to_json(graph_.bundle(id)));
    out["bundles"] = std::move(bundles);
    Json arcs = Json::array();
    for (BundleId u = 0; u < graph_.vertex_count(); ++u)
      for (BundleId w = 0; w < graph_.vertex_count(); ++w)
        if (u != w)
          arcs.push_back(Json{{"from", u}, {"to", w}, {"length", io::to_json(graph_.length(u, w))},
                              {"witness_round", graph_.witness(u, w)}});
    out["graph_arcs"] = std::move(arcs);
    return out;
  }

  Json valuations(const std::optional<Json>& bounds) const {
    if (!min_ir_) fail(ErrorCode::empty_input, "no committed observations");
    Json out{{"min", io::to_json(*min_ir_, graph_)}};
    if (bounds) out["max"] = io::to_json(max_valuation(graph_, io::bounds_from_json(*bounds, graph_), mmc_), graph_);
    return out;
  }

  std::uint64_t state_hash() const {
    Json state{{"n", dimension_}, {"rule", io::to_json(cfg_)}};
    Json rounds = Json::array();
    for (const auto& o : committed_) rounds.push_back(io::to_json(o));
    state["observations"] = std::move(rounds);
    state["mu"] = io::to_json(mmc_.mu);
    return fnv1a(state.dump());
  }

 private:
  void check_candidate(const Observation& obs) const {
    check_observation(obs, dimension_);
    if (!committed_.empty() && obs.round <= committed_.back().round)
      fail(ErrorCode::stale_round,
           "round " + std::to_string(obs.round) + " is not after round " + std::to_string(committed_.back().round));
  }

  void refresh() {
    mmc_ = min_mean_cycle(graph_);
    min_ir_.reset();
    if (graph_.vertex_count() > 0) min_ir_ = min_ir_valuation(graph_, mmc_);
  }

  std::string id_;
  std::size_t dimension_;
  RuleConfig cfg_;
  std::vector<Observation> committed_;
  BiddingGraph graph_;
  MeanCycleResult mmc_;
  std::optional<Valuation> min_ir_;
  std::vector<Json> events_;
};

/// Thread-safe registry. Sessions are independent; within a session writers
/// are exclusive and readers share a consistent snapshot.
class SessionManager {
 public:
  SessionManager() = default;
  /// With a log directory every session's events go to <dir>/<id>.jsonl.
  explicit SessionManager(std::filesystem::path log_dir) : log_dir_(std::move(log_dir)) {
    std::filesystem::create_directories(*log_dir_);
  }

  std::string create(std::size_t dimension, const RuleConfig& cfg) {
    std::unique_lock lock(registry_mutex_);
    std::string id = "s" + std::to_string(++counter_);
    auto entry = std::make_shared<Entry>(Session(id, dimension, cfg));
    log(id, entry->session.events().front());
    sessions_.emplace(id, std::move(entry));
    return id;
  }

  CommitResult commit(const std::string& id, const Observation& obs) {
    return write(id, [&](Session& s) {
      auto r = s.commit(obs);
      if (r.committed) log(id, s.events().back());
      return r;
    });
  }

  WhatIfResult whatif(const std::string& id, const Observation& obs,
                      const std::optional<RuleConfig>& cfg = std::nullopt) const {
    return read(id, [&](const Session& s) { return s.whatif(obs, cfg); });
  }

  Json withdraw(const std::string& id, const std::vector<RoundId>& rounds) {
    return write(id, [&](Session& s) {
      s.withdraw(rounds);
      log(id, s.events().back());
      return s.analysis();
    });
  }

  Json analysis(const std::string& id) const {
    return read(id, [](const Session& s) { return s.analysis(); });
  }

  Json valuations(const std::string& id, const std::optional<Json>& bounds) const {
    return read(id, [&](const Session& s) { return s.valuations(bounds); });
  }

  std::uint64_t state_hash(const std::string& id) const {
    return read(id, [](const Session& s) { return s.state_hash(); });
  }

  std::vector<Json> events(const std::string& id) const {
    return read(id, [](const Session& s) { return s.events(); });
  }

  bool contains(const std::string& id) const {
    std::shared_lock lock(registry_mutex_);
    return sessions_.contains(id);
  }

  /// Rebuilds a session from its event log (create first, then commit and
  /// withdraw events in order). Commits are re-validated.
  static Session replay(const std::string& id, std::istream& events) {
    std::optional<Session> session;
    std::string text;
    std::size_t line = 0;
    while (std::getline(events, text)) {
      ++line;
      if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
      const Json e = Json::parse(text, nullptr, false);
      if (e.is_discarded() || !e.is_object() || !e.contains("event")) throw ParseError(line, "bad event");
      const std::string kind = e["event"].get<std::string>();
      if (kind == "create") {
        session.emplace(id, e["n"].get<std::size_t>(), io::rule_config_from_json(e["rule"]));
      } else if (!session) {
        throw ParseError(line, "event before create");
      } else if (kind == "commit") {
        if (!session->commit(io::observation_from_json(e["observation"], line)).committed)
          throw ParseError(line, "logged commit no longer passes the rule");
      } else if (kind == "withdraw") {
        session->withdraw(e["rounds"].get<std::vector<RoundId>>());
      } else {
        throw ParseError(line, "unknown event '" + kind + "'");
      }
    }
    if (!session) throw ParseError(line, "empty event log");
    return std::move(*session);
  }

  /// Loads every <id>.jsonl in the log directory.
  void recover() {
    if (!log_dir_) return;
    std::unique_lock lock(registry_mutex_);
    for (const auto& file : std::filesystem::directory_iterator(*log_dir_)) {
      if (file.path().extension() != ".jsonl") continue;
      const std::string id = file.path().stem().string();
      std::ifstream in(file.path());
      sessions_[id] = std::make_shared<Entry>(replay(id, in));
      if (id.size() > 1 && id[0] == 's') counter_ = std::max(counter_, std::stoull(id.substr(1)));
    }
  }

 private:
  struct Entry {
    explicit Entry(Session s) : session(std::move(s)) {}
    mutable std::shared_mutex mutex;
    Session session;
  };

  std::shared_ptr<Entry> find(const std::string& id) const {
    std::shared_lock lock(registry_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) fail(ErrorCode::unknown_session, "unknown session '" + id + "'");
    return it->second;
  }

  template <class F>
  auto read(const std::string& id, F&& f) const -> std::invoke_result_t<F, const Session&> {
    auto entry = find(id);
    std::shared_lock lock(entry->mutex);
    return f(entry->session);
  }

  template <class F>
  auto write(const std::string& id, F&& f) -> std::invoke_result_t<F, Session&> {
    auto entry = find(id);
    std::unique_lock lock(entry->mutex);
    return f(entry->session);
  }

  void log(const std::string& id, const Json& event) const {
    if (!log_dir_) return;
    std::lock_guard lock(log_mutex_);
    std::ofstream out(*log_dir_ / (id + ".jsonl"), std::ios::app);
    out << event.dump() << '\n';
  }

  mutable std::shared_mutex registry_mutex_;
  mutable std::mutex log_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::optional<std::filesystem::path> log_dir_;
  unsigned long long counter_ = 0;
};

}  // namespace rpgraph::service
