#pragma once

// Test-side oracles, deliberately independent of the library assembly and
// quadrature paths they are used to check.

#include "bforc/mesh.hpp"
#include "bforc/mms.hpp"
#include "bforc/quadrature.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracles {

/// Exact reference-triangle monomial integral int x^a y^b = a! b! / (a+b+2)!
/// evaluated as 1 / (C(a+b, a) (a+b+1) (a+b+2)) in extended precision.
inline double monomial_integral(int a, int b) {
  long double v = 1.0L;
  for (int k = 1; k <= b; ++k) v *= static_cast<long double>(k) / static_cast<long double>(a + k);
  v /= static_cast<long double>(a + b + 1);
  v /= static_cast<long double>(a + b + 2);
  return static_cast<double>(v);
}

/// Gauss-Legendre nodes/weights on [0,1] via Newton iteration.
inline void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess on [-1,1]
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = 0.5 * (1.0 - x);  // descending roots -> ascending nodes
    weights[i] = 1.0 / ((1.0 - x * x) * pp * pp);
  }
}

/// Reference-triangle quadrature of a chosen polynomial exactness degree,
/// built by the Duffy substitution y = t (1 - x) from a tensor Gauss rule.
/// Completely independent of the stocked symmetric rules.
inline bforc::QuadratureRule duffy_reference_rule(int degree) {
  const int n = degree / 2 + 2;
  std::vector<double> xs, wx;
  gauss_legendre_01(n, xs, wx);
  bforc::QuadratureRule rule;
  rule.exactness_degree = degree;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      rule.points.emplace_back(xs[i], xs[j] * (1.0 - xs[i]));
      rule.weights.push_back(wx[i] * wx[j] * (1.0 - xs[i]));
    }
  }
  return rule;
}

/// Central-difference application of the strong momentum/heat operators to
/// the closed-form value evaluators (velocity, pressure, temperature only).
class FdForcing {
public:
  FdForcing(const bforc::TestCase& tc, double step = 1e-5)
      : tc_(tc), exact_(bforc::reference_solution()), h_(step) {}

  std::pair<bforc::Vec2, double> eval(const bforc::Vec2& x) const {
    const auto u1 = [this](const bforc::Vec2& y) { return exact_.velocity(y).x(); };
    const auto u2 = [this](const bforc::Vec2& y) { return exact_.velocity(y).y(); };
    const auto pr = [this](const bforc::Vec2& y) { return exact_.pressure(y); };
    const auto te = [this](const bforc::Vec2& y) { return exact_.temperature(y); };

    const double U1 = u1(x), U2 = u2(x), T = te(x);
    const double speed = std::sqrt(U1 * U1 + U2 * U2);
    const double drag = speed > 0.0 ? std::pow(speed, tc_.laws.s - 2.0) : 0.0;

    const double f1 = -div_coeff_grad(u1, te, tc_.laws.nu, x) + U1 * dx(u1, x) + U2 * dy(u1, x) +
                      U1 + drag * U1 + dx(pr, x);
    const double f2 = -div_coeff_grad(u2, te, tc_.laws.nu, x) + U1 * dx(u2, x) + U2 * dy(u2, x) +
                      U2 + drag * U2 + dy(pr, x);
    const double g = -div_coeff_grad(te, te, tc_.laws.kappa, x) + U1 * dx(te, x) + U2 * dy(te, x);
    return {bforc::Vec2(f1, f2), g};
  }

private:
  using Scalar = std::function<double(const bforc::Vec2&)>;

  double dx(const Scalar& f, const bforc::Vec2& x) const {
    return (f({x.x() + h_, x.y()}) - f({x.x() - h_, x.y()})) / (2.0 * h_);
  }
  double dy(const Scalar& f, const bforc::Vec2& x) const {
    return (f({x.x(), x.y() + h_}) - f({x.x(), x.y() - h_})) / (2.0 * h_);
  }

  /// div( coeff(T(x)) grad f ) by nested central differences.
  double div_coeff_grad(const Scalar& f, const Scalar& temp,
                        const std::function<double(double)>& coeff, const bforc::Vec2& x) const {
    const auto flux_x = [&](const bforc::Vec2& y) { return coeff(temp(y)) * dx(f, y); };
    const auto flux_y = [&](const bforc::Vec2& y) { return coeff(temp(y)) * dy(f, y); };
    return dx(flux_x, x) + dy(flux_y, x);
  }

  bforc::TestCase tc_;
  bforc::ExactSolution exact_;
  double h_;
};

inline std::vector<bforc::Vec2> random_interior_points(int count, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<bforc::Vec2> pts;
  pts.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double x = dist(gen);
    const double y = dist(gen);
    pts.emplace_back(x, y);
  }
  return pts;
}

}  // namespace oracles
