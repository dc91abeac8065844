#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpgraph/error.hpp"
#include "rpgraph/rational.hpp"

namespace rpgraph {

using RoundId = std::int64_t;
using BundleId = std::size_t;

/// One auction round: the prices posted and the bundle bid for at them.
struct Observation {
  RoundId round = 0;
  Vector prices;
  Vector bundle;

  std::size_t dimension() const { return prices.size(); }
  Rational cost() const { return dot(prices, bundle); }

  friend bool operator==(const Observation&, const Observation&) = default;
};

inline void check_observation(const Observation& obs, std::optional<std::size_t> dimension = std::nullopt) {
  if (obs.round <= 0) fail(ErrorCode::invalid_argument, "round id must be positive");
  if (obs.prices.size() != obs.bundle.size())
    fail(ErrorCode::dimension_mismatch, "round " + std::to_string(obs.round) + ": price and bundle lengths differ");
  if (obs.prices.empty()) fail(ErrorCode::dimension_mismatch, "round " + std::to_string(obs.round) + ": empty vectors");
  if (dimension && obs.prices.size() != *dimension)
    fail(ErrorCode::dimension_mismatch, "round " + std::to_string(obs.round) + ": expected " +
                                            std::to_string(*dimension) + " items, got " +
                                            std::to_string(obs.prices.size()));
  for (const auto& v : obs.prices)
    if (v.sign() < 0) fail(ErrorCode::negative_value, "round " + std::to_string(obs.round) + ": negative price");
  for (const auto& v : obs.bundle)
    if (v.sign() < 0) fail(ErrorCode::negative_value, "round " + std::to_string(obs.round) + ": negative quantity");
}

/// Dense ids for distinct quantity vectors, in first-appearance order.
class BundleTable {
 public:
  explicit BundleTable(std::size_t dimension = 0) : dimension_(dimension) {}

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return bundles_.size(); }
  const Vector& operator[](BundleId id) const { return bundles_.at(id); }

  BundleId intern(const Vector& x) {
    check_dimension(x);
    auto [it, inserted] = index_.try_emplace(x, bundles_.size());
    if (inserted) bundles_.push_back(x);
    return it->second;
  }

  std::optional<BundleId> find(const Vector& x) const {
    check_dimension(x);
    auto it = index_.find(x);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  void check_dimension(const Vector& x) const {
    if (x.size() != dimension_)
      fail(ErrorCode::dimension_mismatch,
           "bundle has " + std::to_string(x.size()) + " items, expected " + std::to_string(dimension_));
  }

  std::size_t dimension_;
  std::vector<Vector> bundles_;
  std::map<Vector, BundleId> index_;
};

/// Dense arc-length matrix of a digraph without self-loops. Absent entries
/// are missing arcs.
class LengthMatrix {
 public:
  LengthMatrix() = default;
  explicit LengthMatrix(std::size_t n) : n_(n), cells_(n * n) {}

  std::size_t size() const noexcept { return n_; }

  bool has(std::size_t u, std::size_t w) const { return cells_[u * n_ + w].has_value(); }
  const Rational& at(std::size_t u, std::size_t w) const { return *cells_[u * n_ + w]; }
  const std::optional<Rational>& get(std::size_t u, std::size_t w) const { return cells_[u * n_ + w]; }

  void set(std::size_t u, std::size_t w, Rational length) {
    if (u == w) fail(ErrorCode::invalid_argument, "self-loops are not represented");
    cells_[u * n_ + w] = std::move(length);
  }
  void erase(std::size_t u, std::size_t w) { cells_[u * n_ + w].reset(); }

  std::size_t arc_count() const {
    return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](const auto& c) { return c.has_value(); }));
  }

  /// Grows to n vertices, keeping existing arcs.
  void resize(std::size_t n) {
    if (n <= n_) return;
    std::vector<std::optional<Rational>> next(n * n);
    for (std::size_t u = 0; u < n_; ++u)
      for (std::size_t w = 0; w < n_; ++w) next[u * n + w] = std::move(cells_[u * n_ + w]);
    cells_ = std::move(next);
    n_ = n;
  }

  /// Maximum |length| over present arcs; zero when there are none.
  Rational max_abs() const {
    Rational best;
    for (const auto& c : cells_)
      if (c && best < c->abs()) best = c->abs();
    return best;
  }

  friend bool operator==(const LengthMatrix&, const LengthMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::optional<Rational>> cells_;
};

/// A simple cycle; vertices[i] -> vertices[i+1 mod size] are its arcs.
struct CycleCertificate {
  std::vector<std::size_t> vertices;
  Rational total_length;
  Rational mean_length;
  std::vector<RoundId> witness_rounds;  // one per arc, empty for plain matrices

  std::size_t cardinality() const { return vertices.size(); }

  friend bool operator==(const CycleCertificate&, const CycleCertificate&) = default;
};

inline CycleCertificate make_certificate(const LengthMatrix& lengths, std::vector<std::size_t> cycle) {
  CycleCertificate cert;
  cert.vertices = std::move(cycle);
  const std::size_t m = cert.vertices.size();
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t u = cert.vertices[i], w = cert.vertices[(i + 1) % m];
    if (!lengths.has(u, w)) fail(ErrorCode::internal, "certificate uses a missing arc");
    cert.total_length += lengths.at(u, w);
  }
  cert.mean_length = cert.total_length / Rational(static_cast<long>(m));
  return cert;
}

/// Complete digraph on the distinct bid bundles. The arc u -> w carries the
/// most stringent revealed constraint: min over rounds t bidding u of
/// p_t . (w - u), with the earliest attaining round as witness.
class BiddingGraph {
 public:
  struct RoundRecord {
    RoundId round;
    Vector prices;
    Rational cost;  // p_t . x_t
  };

  BiddingGraph() = default;
  explicit BiddingGraph(std::size_t dimension) : bundles_(dimension) {}

  /// Batch construction; the result does not depend on input order.
  static BiddingGraph build(std::span<const Observation> observations) {
    if (observations.empty()) fail(ErrorCode::empty_input, "no observations");
    std::vector<const Observation*> sorted;
    sorted.reserve(observations.size());
    for (const auto& o : observations) sorted.push_back(&o);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->round < b->round; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i]->round == sorted[i - 1]->round)
        fail(ErrorCode::duplicate_round, "duplicate round id " + std::to_string(sorted[i]->round));
    BiddingGraph g(sorted.front()->dimension());
    for (const auto* o : sorted) g.add(*o);
    return g;
  }

  /// Incremental update; touches only arcs incident to the bid's bundle.
  BundleId add(const Observation& obs) {
    check_observation(obs, bundles_.dimension());
    if (round_vertex_.contains(obs.round))
      fail(ErrorCode::duplicate_round, "duplicate round id " + std::to_string(obs.round));

    const std::size_t before = bundles_.size();
    const BundleId u = bundles_.intern(obs.bundle);
    RoundRecord rec{obs.round, obs.prices, obs.cost()};

    if (u == before) {
      lengths_.resize(before + 1);
      witness_.resize(before + 1);
      rounds_.emplace_back();
      sink_.emplace_back();
      // Arcs into the new vertex from every existing vertex.
      for (BundleId v = 0; v < before; ++v)
        for (const auto& r : rounds_[v]) relax(v, u, r, dot(r.prices, obs.bundle) - r.cost);
    }
    // Arcs out of u under the new round's prices.
    for (BundleId w = 0; w < bundles_.size(); ++w)
      if (w != u) relax(u, w, rec, dot(obs.prices, bundles_[w]) - rec.cost);

    const Rational neg_cost = -rec.cost;
    auto& sink = sink_[u];
    if (!sink || neg_cost < sink->first || (neg_cost == sink->first && rec.round < sink->second))
      sink = std::make_pair(neg_cost, rec.round);
    if (bmax_ < rec.cost) bmax_ = rec.cost;

    round_vertex_.emplace(obs.round, u);
    rounds_[u].push_back(std::move(rec));
    return u;
  }

  std::size_t dimension() const noexcept { return bundles_.dimension(); }
  std::size_t vertex_count() const noexcept { return bundles_.size(); }
  std::size_t round_count() const noexcept { return round_vertex_.size(); }
  std::size_t arc_count() const { return lengths_.arc_count(); }

  const BundleTable& bundles() const noexcept { return bundles_; }
  const Vector& bundle(BundleId id) const { return bundles_[id]; }
  const LengthMatrix& lengths() const noexcept { return lengths_; }
  const Rational& length(BundleId u, BundleId w) const { return lengths_.at(u, w); }
  RoundId witness(BundleId u, BundleId w) const { return witness_[u][w]; }

  /// Rounds that bid bundle u, in arrival order.
  const std::vector<RoundRecord>& rounds_of(BundleId u) const { return rounds_.at(u); }
  std::optional<BundleId> vertex_of_round(RoundId t) const {
    auto it = round_vertex_.find(t);
    if (it == round_vertex_.end()) return std::nullopt;
    return it->second;
  }
  /// min over rounds bidding u of -p_t . x_t, with its earliest round.
  const std::pair<Rational, RoundId>& sink_arc(BundleId u) const { return *sink_.at(u); }
  std::optional<RoundId> last_round() const {
    if (round_vertex_.empty()) return std::nullopt;
    return round_vertex_.rbegin()->first;
  }

  Rational lmax() const { return lengths_.max_abs(); }
  const Rational& bmax() const noexcept { return bmax_; }

  /// Fills witness rounds for a certificate on this graph's vertex ids.
  CycleCertificate with_witnesses(CycleCertificate cert) const {
    cert.witness_rounds.clear();
    const std::size_t m = cert.vertices.size();
    for (std::size_t i = 0; i < m; ++i) cert.witness_rounds.push_back(witness(cert.vertices[i], cert.vertices[(i + 1) % m]));
    return cert;
  }

  friend bool operator==(const BiddingGraph& a, const BiddingGraph& b) {
    return a.lengths_ == b.lengths_ && a.witness_ == b.witness_ && a.bmax_ == b.bmax_ &&
           a.round_vertex_ == b.round_vertex_;
  }

 private:
  void relax(BundleId u, BundleId w, const RoundRecord& r, Rational value) {
    auto& slot = witness_[u];
    if (slot.size() < bundles_.size()) slot.resize(bundles_.size(), 0);
    const auto& cur = lengths_.get(u, w);
    if (!cur || value < *cur || (value == *cur && r.round < slot[w])) {
      lengths_.set(u, w, std::move(value));
      slot[w] = r.round;
    }
  }

  BundleTable bundles_;
  LengthMatrix lengths_;
  std::vector<std::vector<RoundId>> witness_;
  std::vector<std::vector<RoundRecord>> rounds_;
  std::vector<std::optional<std::pair<Rational, RoundId>>> sink_;
  std::map<RoundId, BundleId> round_vertex_;
  Rational bmax_;
};

inline BiddingGraph build_bidding_graph(std::span<const Observation> observations) {
  return BiddingGraph::build(observations);
}

}  // namespace rpgraph
