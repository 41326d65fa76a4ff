// quad.hpp -- Gauss-Legendre quadrature rules.
#pragma once

#include <vector>

namespace ptqed::quad {

struct Rule {
  std::vector<double> x;  // nodes
  std::vector<double> w;  // weights
};

// n-point Gauss-Legendre rule on [-1, 1]; results are cached per n.
const Rule& legendre_unit(int n);

// n-point Gauss-Legendre rule mapped to [a, b].
Rule legendre(int n, double a, double b);

// Convenience: integrate f over [a, b] with an n-point rule.
template <typename F>
double integrate(F&& f, int n, double a, double b) {
  Rule r = legendre(n, a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(r.x[i]);
  return s;
}

}  // namespace ptqed::quad
