#pragma once

#include "bforc/mesh.hpp"

#include <array>
#include <stdexcept>
#include <vector>

namespace bforc {

enum class ElementKind { P1, P2, P1Bubble };

/// Shape function values and reference gradients at one point.
struct BasisEval {
  int n = 0;
  std::array<double, 6> value{};
  std::array<Vec2, 6> grad{};
};

/// Lagrange elements on the reference triangle. All bases are nodal: shape i
/// equals 1 at node i and 0 at every other node. The mini-element vertex
/// functions are the barycentric coordinates corrected by the bubble so that
/// they vanish at the barycenter; the bubble itself is 27*l0*l1*l2.
class ReferenceElement {
public:
  explicit ReferenceElement(ElementKind kind) : kind_(kind) {}

  ElementKind kind() const { return kind_; }

  int n_local_dofs() const {
    switch (kind_) {
      case ElementKind::P1: return 3;
      case ElementKind::P2: return 6;
      case ElementKind::P1Bubble: return 4;
    }
    return 0;
  }

  /// Polynomial degree the element reproduces exactly.
  int degree() const { return kind_ == ElementKind::P2 ? 2 : 1; }

  /// Highest polynomial degree appearing in the basis (3 for the bubble).
  int basis_degree() const {
    switch (kind_) {
      case ElementKind::P1: return 1;
      case ElementKind::P2: return 2;
      case ElementKind::P1Bubble: return 3;
    }
    return 0;
  }

  /// Node positions in reference coordinates, ordered: vertices, then edge
  /// midpoints (P2, local edge k joins vertices k and (k+1)%3) or the
  /// barycenter (mini).
  std::vector<Vec2> nodes() const {
    const Vec2 v0(0.0, 0.0), v1(1.0, 0.0), v2(0.0, 1.0);
    switch (kind_) {
      case ElementKind::P1: return {v0, v1, v2};
      case ElementKind::P2:
        return {v0, v1, v2, 0.5 * (v0 + v1), 0.5 * (v1 + v2), 0.5 * (v2 + v0)};
      case ElementKind::P1Bubble: return {v0, v1, v2, Vec2(1.0 / 3.0, 1.0 / 3.0)};
    }
    return {};
  }

  BasisEval evaluate(const Vec2& p) const {
    const double x = p.x();
    const double y = p.y();
    const double l0 = 1.0 - x - y;
    const double l1 = x;
    const double l2 = y;
    const Vec2 g0(-1.0, -1.0), g1(1.0, 0.0), g2(0.0, 1.0);

    BasisEval out;
    switch (kind_) {
      case ElementKind::P1: {
        out.n = 3;
        out.value = {l0, l1, l2};
        out.grad = {g0, g1, g2};
        break;
      }
      case ElementKind::P2: {
        out.n = 6;
        out.value = {l0 * (2.0 * l0 - 1.0), l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0),
                     4.0 * l0 * l1,         4.0 * l1 * l2,         4.0 * l2 * l0};
        out.grad = {(4.0 * l0 - 1.0) * g0,
                    (4.0 * l1 - 1.0) * g1,
                    (4.0 * l2 - 1.0) * g2,
                    4.0 * (l0 * g1 + l1 * g0),
                    4.0 * (l1 * g2 + l2 * g1),
                    4.0 * (l2 * g0 + l0 * g2)};
        break;
      }
      case ElementKind::P1Bubble: {
        out.n = 4;
        const double bubble = 27.0 * l0 * l1 * l2;
        const Vec2 gb = 27.0 * (l1 * l2 * g0 + l0 * l2 * g1 + l0 * l1 * g2);
        out.value = {l0 - bubble / 3.0, l1 - bubble / 3.0, l2 - bubble / 3.0, bubble};
        out.grad = {g0 - gb / 3.0, g1 - gb / 3.0, g2 - gb / 3.0, gb};
        break;
      }
    }
    return out;
  }

private:
  ElementKind kind_;
};

inline BasisEval evaluate_basis(const ReferenceElement& element, const Vec2& point) {
  return element.evaluate(point);
}

}  // namespace bforc
