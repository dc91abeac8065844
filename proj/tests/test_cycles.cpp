#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rpgraph/cycles.hpp"
#include "support.hpp"

using namespace rpgraph;
using support::lengths;
using support::q;

namespace {

LengthMatrix three_vertex() {
  return lengths({{nullptr, "-2", "3"}, {"3", nullptr, "1"}, {"-2", "3", nullptr}});
}

LengthMatrix random_matrix(oracle::Rng& rng, std::size_t n, long lo, long hi, int density_pct = 100) {
  LengthMatrix m(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t w = 0; w < n; ++w)
      if (u != w && oracle::uniform(rng, 1, 100) <= density_pct) {
        const long den = oracle::uniform(rng, 1, 4);
        m.set(u, w, Rational(oracle::uniform(rng, lo, hi), den));
      }
  return m;
}

}  // namespace

TEST(MinMeanCycle, Digon) {
  const auto r = min_mean_cycle(lengths({{nullptr, "-1"}, {"-1", nullptr}}));
  ASSERT_TRUE(r.mu);
  EXPECT_EQ(*r.mu, Rational(-1));
  EXPECT_EQ(r.certificate->vertices, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(r.certificate->total_length, Rational(-2));
}

TEST(MinMeanCycle, SingleVertexHasNone) {
  const auto r = min_mean_cycle(LengthMatrix(1));
  EXPECT_FALSE(r.mu);
  EXPECT_FALSE(r.certificate);
  EXPECT_FALSE(min_mean_cycle(LengthMatrix(0)).mu);
}

TEST(MinMeanCycle, ThreeVertexExample) {
  const auto m = three_vertex();
  const auto r = min_mean_cycle(m);
  ASSERT_TRUE(r.mu);
  EXPECT_EQ(*r.mu, Rational(-1));
  EXPECT_EQ(r.certificate->vertices, (std::vector<std::size_t>{0, 1, 2}));
  const auto all = oracle::simple_cycles(oracle::grid(m));
  EXPECT_EQ(all.size(), 5u);
}

TEST(MinMeanCycle, AcyclicMatrixHasNone) {
  EXPECT_FALSE(min_mean_cycle(lengths({{nullptr, "1", "1"}, {nullptr, nullptr, "1"}, {nullptr, nullptr, nullptr}})).mu);
}

TEST(MinMeanCycle, TiesBreakToLexicographicallySmallest) {
  // every cycle has mean 0
  LengthMatrix m(4);
  for (std::size_t u = 0; u < 4; ++u)
    for (std::size_t w = 0; w < 4; ++w)
      if (u != w) m.set(u, w, Rational(0));
  EXPECT_EQ(min_mean_cycle(m).certificate->vertices, (std::vector<std::size_t>{0, 1}));

  // two disjoint optimal digons and an optimal triangle through 0
  auto t = lengths({{nullptr, "5", "-1", "5"}, {"5", nullptr, "5", "-1"}, {"5", "-1", nullptr, "5"}, {"-1", "5", "5", nullptr}});
  const auto r = min_mean_cycle(t);
  const auto o = oracle::min_mean(oracle::grid(t));
  EXPECT_EQ(*r.mu, *o.mu);
  EXPECT_EQ(r.certificate->vertices, o.lex_min);
}

TEST(MinMeanCycle, MatchesEnumerationOnRandomGraphs) {
  oracle::Rng rng(21);
  for (int it = 0; it < 400; ++it) {
    const std::size_t n = 2 + it % 6;
    const auto m = random_matrix(rng, n, -6, 6, it % 3 ? 100 : 55);
    const auto r = min_mean_cycle(m);
    const auto o = oracle::min_mean(oracle::grid(m));
    ASSERT_EQ(r.mu.has_value(), o.mu.has_value());
    if (!o.mu) continue;
    EXPECT_EQ(*r.mu, *o.mu);
    ASSERT_TRUE(r.certificate);
    EXPECT_EQ(r.certificate->vertices, o.lex_min);
    EXPECT_EQ(r.certificate->mean_length, *r.mu);
  }
}

TEST(MinMeanCycle, HugeLengthsUseArbitraryPrecision) {
  oracle::Rng rng(22);
  const Rational big = Rational::parse("100000000000000000000000000000000000000");
  for (int it = 0; it < 30; ++it) {
    const std::size_t n = 3 + it % 4;
    auto m = random_matrix(rng, n, -9, 9);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t w = 0; w < n; ++w)
        if (m.has(u, w)) m.set(u, w, m.at(u, w) * big + Rational(oracle::uniform(rng, -3, 3), 7));
    const auto r = min_mean_cycle(m);
    const auto o = oracle::min_mean(oracle::grid(m));
    EXPECT_EQ(*r.mu, *o.mu);
    EXPECT_EQ(r.certificate->vertices, o.lex_min);
  }
}

TEST(MinMeanCycle, BiddingGraphCertificateCarriesWitnesses) {
  const auto g = BiddingGraph::build(support::e2());
  const auto r = min_mean_cycle(g);
  EXPECT_EQ(*r.mu, Rational(-1));
  EXPECT_EQ(r.certificate->witness_rounds, (std::vector<RoundId>{1, 2}));
}

TEST(WorstBoundedCycle, Examples) {
  const auto digon = worst_bounded_cycle(lengths({{nullptr, "-1"}, {"-1", nullptr}}), 1);
  ASSERT_TRUE(digon.worst);
  EXPECT_EQ(digon.worst->mean_length, Rational(-1));
  EXPECT_EQ(digon.worst->cardinality(), 2u);

  const auto fix = worst_bounded_cycle(tight_cycle_fixture(2, Rational(2), 5), 2);
  ASSERT_TRUE(fix.worst);
  EXPECT_GE(fix.worst->mean_length, Rational(0));
  EXPECT_LE(fix.worst->cardinality(), 3u);

  EXPECT_FALSE(worst_bounded_cycle(LengthMatrix(1), 3).worst);
  EXPECT_THROW(worst_bounded_cycle(LengthMatrix(2), 0), Error);

  // triangle is invisible at k = 1
  const auto tri = worst_bounded_cycle(three_vertex(), 1);
  EXPECT_EQ(tri.worst->mean_length, Rational(1, 2));
  EXPECT_EQ(tri.worst->vertices, (std::vector<std::size_t>{0, 1}));
}

TEST(WorstBoundedCycle, MatchesEnumerationAndIsMonotone) {
  oracle::Rng rng(23);
  for (int it = 0; it < 300; ++it) {
    const std::size_t n = 3 + it % 5;
    const auto m = random_matrix(rng, n, -5, 8, it % 4 ? 100 : 60);
    const auto mmc = min_mean_cycle(m);
    std::optional<Rational> prev;
    for (std::size_t k = 1; k + 1 <= n; ++k) {
      const auto r = worst_bounded_cycle(m, k);
      const auto o = oracle::min_mean(oracle::grid(m), k + 1);
      ASSERT_EQ(r.worst.has_value(), o.mu.has_value()) << "k=" << k;
      if (!o.mu) continue;
      EXPECT_EQ(r.worst->mean_length, *o.mu);
      EXPECT_EQ(r.worst->vertices, o.lex_min);
      EXPECT_LE(r.worst->cardinality(), k + 1);
      if (prev) EXPECT_LE(r.worst->mean_length, *prev);
      prev = r.worst->mean_length;
    }
    if (mmc.mu) EXPECT_EQ(*prev, *mmc.mu);
  }
}

TEST(TightCycleFixture, Examples) {
  const auto m = tight_cycle_fixture(2, Rational(2), 5);
  EXPECT_EQ(m.size(), 5u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(m.at(i, (i + 1) % 4), Rational(-1));
  EXPECT_EQ(m.at(0, 2), Rational(2));
  EXPECT_EQ(m.at(4, 0), Rational(2));
  const auto r = min_mean_cycle(m);
  EXPECT_EQ(*r.mu, Rational(-1));
  EXPECT_EQ(r.certificate->vertices, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(*oracle::min_mean(oracle::grid(m)).mu, Rational(-1));

  const auto m1 = tight_cycle_fixture(1, Rational(1), 4);
  EXPECT_EQ(*min_mean_cycle(m1).mu, Rational(-1));
  EXPECT_GE(*oracle::min_mean(oracle::grid(m1), 2).mu, Rational(0));

  EXPECT_THROW(tight_cycle_fixture(2, Rational(2), 4), Error);
  EXPECT_THROW(tight_cycle_fixture(1, Rational(0), 4), Error);
}

TEST(EnumerateViolatingCycles, MatchesEnumeration) {
  oracle::Rng rng(24);
  for (int it = 0; it < 150; ++it) {
    const std::size_t n = 2 + it % 6;
    const auto m = random_matrix(rng, n, -6, 6);
    const Rational eps(static_cast<long>(it % 3), 2);
    const std::size_t cap = 2 + it % 5;
    const auto r = enumerate_violating_cycles(m, eps, {cap, 100000, 5000000});
    EXPECT_TRUE(r.complete);
    std::vector<std::vector<std::size_t>> want;
    for (const auto& c : oracle::simple_cycles(oracle::grid(m), cap))
      if (c.total + Rational(static_cast<long>(c.vertices.size())) * eps < Rational(0)) want.push_back(c.vertices);
    std::sort(want.begin(), want.end());
    std::vector<std::vector<std::size_t>> got;
    for (const auto& c : r.cycles) got.push_back(c.vertices);
    EXPECT_EQ(got, want);
  }
}

TEST(EnumerateViolatingCycles, CapsMarkIncomplete) {
  LengthMatrix m(6);
  for (std::size_t u = 0; u < 6; ++u)
    for (std::size_t w = 0; w < 6; ++w)
      if (u != w) m.set(u, w, Rational(-1));
  EXPECT_TRUE(enumerate_violating_cycles(m, Rational(0)).complete);
  const auto few = enumerate_violating_cycles(m, Rational(0), {8, 10, 5000000});
  EXPECT_FALSE(few.complete);
  EXPECT_EQ(few.cycles.size(), 10u);
  EXPECT_FALSE(enumerate_violating_cycles(m, Rational(0), {8, 100000, 50}).complete);
}

TEST(MeanBound, BoundedCyclesNonNegativeImpliesMeanBound) {
  oracle::Rng rng(25);
  int checked = 0;
  for (int it = 0; it < 4000 && checked < 150; ++it) {
    const std::size_t k = 1 + it % 3;
    const std::size_t n = k + 2 + it % 3;
    const auto m = random_matrix(rng, n, -3, 9);
    const auto b = worst_bounded_cycle(m, k);
    if (b.worst && b.worst->mean_length.sign() < 0) continue;
    ++checked;
    EXPECT_GE(*min_mean_cycle(m).mu, -m.max_abs() / Rational(static_cast<long>(k)));
  }
  EXPECT_GE(checked, 150);
}
