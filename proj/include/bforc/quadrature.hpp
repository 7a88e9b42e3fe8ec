#pragma once

#include "bforc/mesh.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace bforc {

/// Quadrature rule on the reference triangle {x,y >= 0, x+y <= 1}.
/// Weights sum to the reference area 1/2.
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  std::size_t size() const { return points.size(); }
};

namespace detail {

inline void add_centroid(QuadratureRule& r, double w) {
  r.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
  r.weights.push_back(w);
}

// three points with barycentric coordinates (a, a, 1-2a) and permutations;
// reference coordinates are (lambda2, lambda3)
inline void add_orbit3(QuadratureRule& r, double a, double w) {
  const double c = 1.0 - 2.0 * a;
  r.points.emplace_back(a, c);
  r.points.emplace_back(c, a);
  r.points.emplace_back(a, a);
  for (int k = 0; k < 3; ++k) r.weights.push_back(w);
}

// six points: all permutations of barycentric (a, b, 1-a-b)
inline void add_orbit6(QuadratureRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  r.points.emplace_back(b, c);
  r.points.emplace_back(c, b);
  r.points.emplace_back(a, c);
  r.points.emplace_back(c, a);
  r.points.emplace_back(a, b);
  r.points.emplace_back(b, a);
  for (int k = 0; k < 6; ++k) r.weights.push_back(w);
}

// Symmetric rules of Dunavant type. Orbit parameters and weights were
// re-solved from the moment equations in 50-digit arithmetic; the exactness
// sweep in the test suite validates every literal against closed-form
// monomial integrals.
inline std::vector<QuadratureRule> build_rules() {
  std::vector<QuadratureRule> rules;

  {
    QuadratureRule r;
    r.exactness_degree = 1;
    add_centroid(r, 0.5);
    rules.push_back(std::move(r));
  }
  {
    QuadratureRule r;
    r.exactness_degree = 2;
    add_orbit3(r, 1.0 / 6.0, 1.0 / 6.0);
    rules.push_back(std::move(r));
  }
  {
    QuadratureRule r;
    r.exactness_degree = 4;
    add_orbit3(r, 0.4459484909159648863183292538830520, 0.1116907948390057328475035042165614);
    add_orbit3(r, 0.09157621350977074345957146340220151, 0.05497587182766093381916316245010526);
    rules.push_back(std::move(r));
  }
  {
    QuadratureRule r;
    r.exactness_degree = 6;
    add_orbit3(r, 0.2492867451709104212916385531070191, 0.05839313786318968301264480569278972);
    add_orbit3(r, 0.06308901449150222834033160287081916, 0.02542245318510340846046840455343449);
    add_orbit6(r, 0.3103524510337844054166077339565522, 0.6365024991213986472301425944120497,
               0.04142553780918678759677672821022123);
    rules.push_back(std::move(r));
  }
  {
    QuadratureRule r;
    r.exactness_degree = 8;
    add_centroid(r, 0.07215780383889358412554555524453231);
    add_orbit3(r, 0.4592925882927231560288155144941693, 0.04754581713364231239694805219429216);
    add_orbit3(r, 0.1705693077517602066222935014914645, 0.05160868526735912514089577514606452);
    add_orbit3(r, 0.05054722831703097545842355059659895, 0.01622924881159904015546296417089030);
    add_orbit6(r, 0.2631128296346381134217857862846436, 0.7284923929554042812410003791760620,
               0.01361515708721749713242234503695446);
    rules.push_back(std::move(r));
  }
  {
    QuadratureRule r;
    r.exactness_degree = 10;
    add_centroid(r, 0.04540899519137679004764329755001427);
    add_orbit3(r, 0.4855776333836573773675075322081262, 0.01836297887823335235850303594568330);
    add_orbit3(r, 0.1094815754850370547954586313405228, 0.02266052971776396739130282236929866);
    add_orbit6(r, 0.1417072194148799547566832504763602, 0.3079398387641209501651550229306316,
               0.03637895842271005430215758830968034);
    add_orbit6(r, 0.02500353476268638607398848100774453, 0.2466725606399026939172764654111768,
               0.01416362126552874241836853079104955);
    add_orbit6(r, 0.009540815400299457580152809622886831, 0.06680325101220026577354021276202474,
               0.004710833481866411729963735483443414);
    rules.push_back(std::move(r));
  }
  return rules;
}

}  // namespace detail

inline const std::vector<QuadratureRule>& stocked_rules() {
  static const std::vector<QuadratureRule> rules = detail::build_rules();
  return rules;
}

/// Smallest stocked rule that integrates polynomials of total degree d exactly.
inline const QuadratureRule& rule_for_degree(int d) {
  if (d < 1 || d > 10) throw std::invalid_argument("rule_for_degree: degree must be in [1, 10]");
  for (const auto& r : stocked_rules()) {
    if (r.exactness_degree >= d) return r;
  }
  throw std::logic_error("rule_for_degree: no stocked rule");  // unreachable
}

/// Apply a rule to a scalar integrand on the reference triangle.
inline double integrate(const QuadratureRule& rule, const std::function<double(const Vec2&)>& f) {
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double v = f(rule.points[q]);
    if (!std::isfinite(v)) throw std::runtime_error("integrate: non-finite integrand value");
    sum += rule.weights[q] * v;
  }
  return sum;
}

/// Pull-back integration over a physical cell: |det J| times the reference
/// integral of f composed with the affine map.
inline double integrate_cell(const QuadratureRule& rule, const Mesh& mesh, int cell,
                             const std::function<double(const Vec2&)>& f) {
  const CellGeometry geom = cell_geometry(mesh, cell);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double v = f(mesh.map_to_physical(cell, rule.points[q]));
    if (!std::isfinite(v)) throw std::runtime_error("integrate_cell: non-finite integrand value");
    sum += rule.weights[q] * v;
  }
  return geom.det * sum;
}

}  // namespace bforc
