#pragma once

// Integer images of rational length matrices. All lengths (plus any extra
// rationals the caller needs in the same units) are multiplied by the lcm of
// their denominators; graph DPs then run on __int128 when the magnitudes
// leave enough headroom and on mpz_class otherwise. Results are exact either
// way.

#include <gmpxx.h>

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rpgraph/core.hpp"
#include "rpgraph/rational.hpp"

namespace rpgraph::detail {

using i128 = __int128;

inline mpz_class to_mpz(const mpz_class& v) { return v; }
inline mpz_class to_mpz(i128 v) {
  const bool negative = v < 0;
  unsigned __int128 mag = negative ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  mpz_class hi(static_cast<unsigned long>(mag >> 64));
  mpz_class lo(static_cast<unsigned long>(mag & 0xffffffffffffffffULL));
  mpz_class out = hi * mpz_class("18446744073709551616") + lo;
  return negative ? mpz_class(-out) : out;
}

template <class Int>
Int from_mpz(const mpz_class& z);

template <>
inline mpz_class from_mpz<mpz_class>(const mpz_class& z) {
  return z;
}

template <>
inline i128 from_mpz<i128>(const mpz_class& z) {
  mpz_class mag = ::abs(z);
  mpz_class lo_part = mag % mpz_class("18446744073709551616");
  mpz_class hi_part = mag / mpz_class("18446744073709551616");
  unsigned __int128 v = (static_cast<unsigned __int128>(hi_part.get_ui()) << 64) | lo_part.get_ui();
  return z < 0 ? -static_cast<i128>(v) : static_cast<i128>(v);
}

template <class Int>
Int of(long v) {
  return Int(v);
}

/// Integer image of a LengthMatrix; `extras` share the same scale.
template <class Int>
struct ScaledMatrix {
  std::size_t n = 0;
  std::vector<Int> w;
  std::vector<char> present;
  std::vector<Int> extras;
  mpz_class scale;

  bool has(std::size_t u, std::size_t v) const { return present[u * n + v] != 0; }
  const Int& at(std::size_t u, std::size_t v) const { return w[u * n + v]; }

  /// Back to rationals: value / (scale * den).
  Rational rational(const Int& value, long den = 1) const {
    return Rational(to_mpz(value), mpz_class(scale * den));
  }
};

/// Scales `m` and `extras`, then invokes `f` with ScaledMatrix<i128> or
/// ScaledMatrix<mpz_class>. Headroom covers products of magnitude about
/// 4 n^2 max|value|, which every DP here stays within.
template <class F>
decltype(auto) with_scaled(const LengthMatrix& m, std::span<const Rational> extras, F&& f) {
  const std::size_t n = m.size();
  mpz_class scale = 1;
  auto absorb = [&](const Rational& r) {
    mpz_class d = r.den();
    if (d != 1) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), d.get_mpz_t());
  };
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (m.has(u, v)) absorb(m.at(u, v));
  for (const auto& r : extras) absorb(r);

  std::vector<mpz_class> cells(n * n);
  std::vector<char> present(n * n, 0);
  std::size_t max_bits = 1;
  auto image = [&](const Rational& r) {
    mpz_class z = r.num() * (scale / r.den());
    max_bits = std::max(max_bits, mpz_sizeinbase(z.get_mpz_t(), 2));
    return z;
  };
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (m.has(u, v)) {
        cells[u * n + v] = image(m.at(u, v));
        present[u * n + v] = 1;
      }
  std::vector<mpz_class> extra_cells;
  for (const auto& r : extras) extra_cells.push_back(image(r));

  std::size_t n_bits = 1;
  while ((std::size_t{1} << n_bits) <= n + 2) ++n_bits;

  auto fill = [&](auto& out) {
    using Int = std::decay_t<decltype(out.w.front())>;
    out.n = n;
    out.scale = scale;
    out.present = present;
    for (const auto& z : cells) out.w.push_back(from_mpz<Int>(z));
    for (const auto& z : extra_cells) out.extras.push_back(from_mpz<Int>(z));
  };

  if (max_bits + 2 * n_bits + 4 <= 120) {
    ScaledMatrix<i128> s;
    s.w.reserve(n * n);
    fill(s);
    return f(s);
  }
  ScaledMatrix<mpz_class> s;
  s.w.reserve(n * n);
  fill(s);
  return f(s);
}

/// Label-correcting shortest paths over present arcs from the given sources
/// (each with its initial label). Returns nullopt if a negative cycle is
/// reachable.
template <class Int>
std::optional<std::vector<std::optional<Int>>> bellman_ford(
    std::size_t n, const std::vector<Int>& w, const std::vector<char>& present,
    const std::vector<std::pair<std::size_t, Int>>& sources) {
  std::vector<std::optional<Int>> dist(n);
  std::vector<std::size_t> hops(n, 0);
  std::vector<char> queued(n, 0);
  std::deque<std::size_t> queue;
  for (const auto& [s, d0] : sources) {
    if (!dist[s] || d0 < *dist[s]) dist[s] = d0;
    if (!queued[s]) {
      queued[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    queued[u] = 0;
    const Int du = *dist[u];
    for (std::size_t v = 0; v < n; ++v) {
      if (!present[u * n + v]) continue;
      Int cand = du + w[u * n + v];
      if (!dist[v] || cand < *dist[v]) {
        dist[v] = std::move(cand);
        hops[v] = hops[u] + 1;
        if (hops[v] >= n) return std::nullopt;
        if (!queued[v]) {
          queued[v] = 1;
          queue.push_back(v);
        }
      }
    }
  }
  return dist;
}

}  // namespace rpgraph::detail
