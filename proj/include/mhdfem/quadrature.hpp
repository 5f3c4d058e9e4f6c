#pragma once

#include "mhdfem/types.hpp"

#include <map>
#include <vector>

namespace mhdfem {

/// Quadrature rule on the reference D-simplex, stored in barycentric
/// coordinates. Weights sum to one; integrals over a physical simplex K are
/// measure(K) * sum_q w_q f(x_q).
template <int D>
struct QuadratureRule {
  std::vector<std::array<double, D + 1>> bary;
  std::vector<double> weight;

  int size() const { return static_cast<int>(weight.size()); }
};

namespace detail {

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Enumerate nonnegative integer (D+1)-tuples with the given sum.
template <int D, class F>
void compositions_rec(int sum, int pos, std::array<int, D + 1>& k, F&& f) {
  if (pos == D) {
    k[D] = sum;
    f(k);
    return;
  }
  for (int v = sum; v >= 0; --v) {
    k[pos] = v;
    compositions_rec<D>(sum - v, pos + 1, k, f);
  }
}

template <int D, class F>
void for_each_composition(int sum, F&& f) {
  std::array<int, D + 1> k{};
  compositions_rec<D>(sum, 0, k, f);
}

// Grundmann-Moller rule of index s on the unit D-simplex, exact to
// polynomial degree 2s+1. Weights are normalized to sum to one.
template <int D>
QuadratureRule<D> grundmann_moller(int s) {
  QuadratureRule<D> rule;
  const int d = D;
  for (int i = 0; i <= s; ++i) {
    const double denom = d + 1 + 2 * s - 2 * i;
    double c = (i % 2 == 0 ? 1.0 : -1.0) * std::pow(4.0, -s) *
               std::pow(denom, 2 * s + 1) /
               (factorial(i) * factorial(d + 1 + 2 * s - i));
    c *= factorial(d);  // normalize: reference simplex has measure 1/d!
    for_each_composition<D>(s - i, [&](const std::array<int, D + 1>& k) {
      std::array<double, D + 1> b;
      for (int j = 0; j <= D; ++j) b[j] = (2.0 * k[j] + 1.0) / denom;
      rule.bary.push_back(b);
      rule.weight.push_back(c);
    });
  }
  return rule;
}

}  // namespace detail

/// Rule exact at least to the requested polynomial degree.
template <int D>
const QuadratureRule<D>& simplex_rule(int degree) {
  static std::map<int, QuadratureRule<D>> cache;
  const int s = degree <= 1 ? 0 : (degree - 1 + 1) / 2;  // 2s+1 >= degree
  auto it = cache.find(s);
  if (it == cache.end())
    it = cache.emplace(s, detail::grundmann_moller<D>(s)).first;
  return it->second;
}

/// Map a barycentric quadrature point to a physical simplex.
template <int Dim, int D>
Vec<Dim> bary_to_point(const std::array<double, D + 1>& b,
                       const std::array<Vec<Dim>, D + 1>& verts) {
  Vec<Dim> x = Vec<Dim>::Zero();
  for (int j = 0; j <= D; ++j) x += b[j] * verts[j];
  return x;
}

}  // namespace mhdfem
