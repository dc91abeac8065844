#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "rpgraph/core.hpp"

namespace support {

inline rpgraph::Vector vec(std::initializer_list<const char*> xs) {
  rpgraph::Vector out;
  for (const char* x : xs) out.push_back(rpgraph::Rational::parse(x));
  return out;
}

inline rpgraph::Observation obs(rpgraph::RoundId t, std::initializer_list<const char*> p,
                                std::initializer_list<const char*> x) {
  return {t, vec(p), vec(x)};
}

inline rpgraph::Rational q(const char* text) { return rpgraph::Rational::parse(text); }

// t=1 p=(2,1) x=A=(1,0); t=2 p=(1,2) x=B=(0,1): digon of lengths -1, -1.
inline std::vector<rpgraph::Observation> e2() { return {obs(1, {"2", "1"}, {"1", "0"}), obs(2, {"1", "2"}, {"0", "1"})}; }

inline rpgraph::LengthMatrix lengths(const std::vector<std::vector<const char*>>& rows) {
  rpgraph::LengthMatrix m(rows.size());
  for (std::size_t u = 0; u < rows.size(); ++u)
    for (std::size_t w = 0; w < rows.size(); ++w)
      if (rows[u][w]) m.set(u, w, q(rows[u][w]));
  return m;
}

}  // namespace support
