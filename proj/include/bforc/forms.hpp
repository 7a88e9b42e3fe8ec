#pragma once

#include "bforc/csr.hpp"
#include "bforc/laws.hpp"
#include "bforc/quadrature.hpp"
#include "bforc/space.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace bforc {

/// Pointwise right-hand-side evaluators for the momentum and heat equations.
struct ForcingEvaluator {
  std::function<Vec2(const Vec2&)> momentum;
  std::function<double(const Vec2&)> heat;
};

struct LoadVectors {
  Eigen::VectorXd momentum;     // free velocity dofs
  Eigen::VectorXd heat;         // free temperature dofs
};

namespace detail {

/// Shape values and reference gradients tabulated at the points of one rule.
struct BasisTable {
  const QuadratureRule* rule = nullptr;
  int n_local = 0;
  std::vector<double> value;   // q * n_local + i
  std::vector<Vec2> ref_grad;  // q * n_local + i

  double val(std::size_t q, int i) const { return value[q * static_cast<std::size_t>(n_local) + i]; }
  const Vec2& grad(std::size_t q, int i) const { return ref_grad[q * static_cast<std::size_t>(n_local) + i]; }
};

inline BasisTable tabulate(const ReferenceElement& element, const QuadratureRule& rule) {
  BasisTable t;
  t.rule = &rule;
  t.n_local = element.n_local_dofs();
  t.value.reserve(rule.size() * static_cast<std::size_t>(t.n_local));
  t.ref_grad.reserve(rule.size() * static_cast<std::size_t>(t.n_local));
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const BasisEval e = element.evaluate(rule.points[q]);
    for (int i = 0; i < t.n_local; ++i) {
      t.value.push_back(e.value[i]);
      t.ref_grad.push_back(e.grad[i]);
    }
  }
  return t;
}

inline double eval_scalar(const FeSpace& space, const Eigen::VectorXd& coeffs, const BasisTable& tab,
                          int cell, std::size_t q) {
  double v = 0.0;
  for (int i = 0; i < tab.n_local; ++i) v += coeffs[space.scalar_dof(cell, i)] * tab.val(q, i);
  return v;
}

inline Vec2 eval_vector(const FeSpace& space, const Eigen::VectorXd& coeffs, const BasisTable& tab,
                        int cell, std::size_t q) {
  Vec2 v = Vec2::Zero();
  for (int i = 0; i < tab.n_local; ++i) {
    const int sd = space.scalar_dof(cell, i);
    v.x() += coeffs[2 * sd] * tab.val(q, i);
    v.y() += coeffs[2 * sd + 1] * tab.val(q, i);
  }
  return v;
}

/// Pattern of a square matrix on the free dofs of a space. Vector spaces
/// couple within each component only (all velocity forms here are
/// component-diagonal).
inline CsrMatrix square_free_matrix(const FeSpace& space) {
  std::vector<std::vector<int>> pattern(static_cast<std::size_t>(space.n_free()));
  const int nloc = space.n_local();
  const int mult = space.vector_multiplicity;
  for (int c = 0; c < space.mesh->n_cells(); ++c) {
    for (int comp = 0; comp < mult; ++comp) {
      for (int i = 0; i < nloc; ++i) {
        const int fi = space.free_index[space.global_dof(c, i, comp)];
        if (fi < 0) continue;
        for (int j = 0; j < nloc; ++j) {
          const int fj = space.free_index[space.global_dof(c, j, comp)];
          if (fj >= 0) pattern[static_cast<std::size_t>(fi)].push_back(fj);
        }
      }
    }
  }
  return CsrMatrix(space.n_free(), space.n_free(), std::move(pattern));
}

inline void check_same_mesh(const FeSpace& a, const FeSpace& b, const char* where) {
  if (a.mesh != b.mesh) throw std::invalid_argument(std::string(where) + ": spaces live on different meshes");
}

/// Weighted vector mass/stiffness kernel shared by the viscous and
/// Forchheimer assemblies: local (i,j) entry
///   sum_q w_q det (grad_weight_q grad_i . grad_j + mass_weight_q N_i N_j).
template <typename GradWeight, typename MassWeight>
CsrMatrix assemble_weighted_velocity(const FeSpace& V, const QuadratureRule& rule,
                                     GradWeight&& grad_weight, MassWeight&& mass_weight) {
  CsrMatrix A = square_free_matrix(V);
  const BasisTable tab = tabulate(V.element, rule);
  const int nloc = tab.n_local;
  const Mesh& mesh = *V.mesh;
  std::array<Vec2, 6> g;
  std::array<double, 36> local{};
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry geom = cell_geometry(mesh, c);
    local.fill(0.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double wq = rule.weights[q] * geom.det;
      const double gw = grad_weight(c, q);
      const double mw = mass_weight(c, q);
      for (int i = 0; i < nloc; ++i) g[i] = geom.inverse_transpose * tab.grad(q, i);
      for (int i = 0; i < nloc; ++i) {
        for (int j = 0; j < nloc; ++j) {
          local[static_cast<std::size_t>(i * nloc + j)] +=
              wq * (gw * g[i].dot(g[j]) + mw * tab.val(q, i) * tab.val(q, j));
        }
      }
    }
    for (int comp = 0; comp < 2; ++comp) {
      for (int i = 0; i < nloc; ++i) {
        const int fi = V.free_index[V.global_dof(c, i, comp)];
        if (fi < 0) continue;
        for (int j = 0; j < nloc; ++j) {
          const int fj = V.free_index[V.global_dof(c, j, comp)];
          if (fj >= 0) A.add(fi, fj, local[static_cast<std::size_t>(i * nloc + j)]);
        }
      }
    }
  }
  return A;
}

}  // namespace detail

/// Velocity block of the viscous and zeroth-order terms,
///   int ( nu(T) grad u . grad v + u . v ),
/// with the temperature coefficient evaluated at the given field.
inline CsrMatrix assemble_viscous_mass(const CoefficientField& temperature, const FeSpace& V,
                                       const MaterialLaws& laws) {
  detail::check_same_mesh(*temperature.space, V, "assemble_viscous_mass");
  const QuadratureRule& rule = rule_for_degree(8);
  const detail::BasisTable temp_tab = detail::tabulate(temperature.space->element, rule);
  const FeSpace& Y = *temperature.space;
  // cache nu(T) per (cell, q)
  const Mesh& mesh = *V.mesh;
  std::vector<double> nu_values(static_cast<std::size_t>(mesh.n_cells()) * rule.size());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double nv = laws.nu(detail::eval_scalar(Y, temperature.values, temp_tab, c, q));
      if (!std::isfinite(nv)) throw std::runtime_error("assemble_viscous_mass: non-finite viscosity value");
      nu_values[static_cast<std::size_t>(c) * rule.size() + q] = nv;
    }
  }
  return detail::assemble_weighted_velocity(
      V, rule, [&](int c, std::size_t q) { return nu_values[static_cast<std::size_t>(c) * rule.size() + q]; },
      [](int, std::size_t) { return 1.0; });
}

/// Forchheimer drag block int |w|^(s-2) u . v with the lagged field w; an
/// explicit rule override backs the quadrature-sufficiency check.
inline CsrMatrix assemble_forchheimer_with_rule(const CoefficientField& w, const FeSpace& V, double s,
                                                const QuadratureRule& rule) {
  detail::check_same_mesh(*w.space, V, "assemble_forchheimer");
  if (!(s >= 3.0 && s <= 4.0)) throw std::invalid_argument("assemble_forchheimer: s must lie in [3, 4]");
  const detail::BasisTable wtab = detail::tabulate(w.space->element, rule);
  const FeSpace& W = *w.space;
  const Mesh& mesh = *V.mesh;
  std::vector<double> drag(static_cast<std::size_t>(mesh.n_cells()) * rule.size());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 wv = detail::eval_vector(W, w.values, wtab, c, q);
      drag[static_cast<std::size_t>(c) * rule.size() + q] = forchheimer_weight(wv.norm(), s);
    }
  }
  return detail::assemble_weighted_velocity(
      V, rule, [](int, std::size_t) { return 0.0; },
      [&](int c, std::size_t q) { return drag[static_cast<std::size_t>(c) * rule.size() + q]; });
}

inline CsrMatrix assemble_forchheimer(const CoefficientField& w, const FeSpace& V, double s) {
  return assemble_forchheimer_with_rule(w, V, s, rule_for_degree(8));
}

/// Skew-symmetrized convection
///   1/2 [ int (w . grad u) . v - int (w . grad v) . u ]
/// with transporting field w. Skewness holds exactly for any quadrature.
inline CsrMatrix assemble_skew_convection(const CoefficientField& w, const FeSpace& V) {
  detail::check_same_mesh(*w.space, V, "assemble_skew_convection");
  // integrand degree: w basis x grad basis x basis
  const int deg = 3 * V.element.basis_degree() - 1;
  const QuadratureRule& rule = rule_for_degree(deg);
  CsrMatrix N = detail::square_free_matrix(V);
  const detail::BasisTable tab = detail::tabulate(V.element, rule);
  const detail::BasisTable wtab = detail::tabulate(w.space->element, rule);
  const FeSpace& W = *w.space;
  const Mesh& mesh = *V.mesh;
  const int nloc = tab.n_local;
  std::array<double, 6> wg;  // w . grad_i
  std::array<double, 36> local{};
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry geom = cell_geometry(mesh, c);
    local.fill(0.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double wq = 0.5 * rule.weights[q] * geom.det;
      const Vec2 wv = detail::eval_vector(W, w.values, wtab, c, q);
      for (int i = 0; i < nloc; ++i) wg[i] = wv.dot(geom.inverse_transpose * tab.grad(q, i));
      for (int i = 0; i < nloc; ++i) {
        for (int j = 0; j < nloc; ++j) {
          local[static_cast<std::size_t>(i * nloc + j)] +=
              wq * (wg[j] * tab.val(q, i) - wg[i] * tab.val(q, j));
        }
      }
    }
    for (int comp = 0; comp < 2; ++comp) {
      for (int i = 0; i < nloc; ++i) {
        const int fi = V.free_index[V.global_dof(c, i, comp)];
        if (fi < 0) continue;
        for (int j = 0; j < nloc; ++j) {
          const int fj = V.free_index[V.global_dof(c, j, comp)];
          if (fj >= 0) N.add(fi, fj, local[static_cast<std::size_t>(i * nloc + j)]);
        }
      }
    }
  }
  return N;
}

/// Divergence coupling B with entries -int q div v; rows run over all
/// pressure dofs, columns over all velocity dofs.
inline CsrMatrix assemble_divergence(const FeSpace& V, const FeSpace& Q) {
  detail::check_same_mesh(V, Q, "assemble_divergence");
  const QuadratureRule& rule = rule_for_degree(4);
  const detail::BasisTable vtab = detail::tabulate(V.element, rule);
  const detail::BasisTable ptab = detail::tabulate(Q.element, rule);
  const Mesh& mesh = *V.mesh;
  const int nv = vtab.n_local;
  const int np = ptab.n_local;

  std::vector<std::vector<int>> pattern(static_cast<std::size_t>(Q.n_dofs()));
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int ip = 0; ip < np; ++ip) {
      auto& row = pattern[static_cast<std::size_t>(Q.scalar_dof(c, ip))];
      for (int j = 0; j < nv; ++j) {
        for (int comp = 0; comp < 2; ++comp) row.push_back(V.global_dof(c, j, comp));
      }
    }
  }
  CsrMatrix B(Q.n_dofs(), V.n_dofs(), std::move(pattern));

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry geom = cell_geometry(mesh, c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double wq = rule.weights[q] * geom.det;
      for (int ip = 0; ip < np; ++ip) {
        const int row = Q.scalar_dof(c, ip);
        const double pw = wq * ptab.val(q, ip);
        for (int j = 0; j < nv; ++j) {
          const Vec2 g = geom.inverse_transpose * vtab.grad(q, j);
          for (int comp = 0; comp < 2; ++comp) {
            B.add(row, V.global_dof(c, j, comp), -pw * g[comp]);
          }
        }
      }
    }
  }
  return B;
}

/// Drop the constrained velocity columns of the divergence operator.
inline CsrMatrix restrict_divergence(const CsrMatrix& B, const FeSpace& V) {
  std::vector<std::vector<int>> pattern(static_cast<std::size_t>(B.rows()));
  for (int r = 0; r < B.rows(); ++r) {
    for (int k = B.row_offsets()[r]; k < B.row_offsets()[r + 1]; ++k) {
      const int f = V.free_index[B.col_ids()[static_cast<std::size_t>(k)]];
      if (f >= 0) pattern[static_cast<std::size_t>(r)].push_back(f);
    }
  }
  CsrMatrix R(B.rows(), V.n_free(), std::move(pattern));
  for (int r = 0; r < B.rows(); ++r) {
    for (int k = B.row_offsets()[r]; k < B.row_offsets()[r + 1]; ++k) {
      const int f = V.free_index[B.col_ids()[static_cast<std::size_t>(k)]];
      if (f >= 0) R.add(r, f, B.values()[static_cast<std::size_t>(k)]);
    }
  }
  return R;
}

/// Heat diffusion block int kappa(R) grad T . grad S with lagged field R.
inline CsrMatrix assemble_heat_diffusion(const CoefficientField& R, const FeSpace& Y,
                                         const MaterialLaws& laws) {
  detail::check_same_mesh(*R.space, Y, "assemble_heat_diffusion");
  const QuadratureRule& rule = rule_for_degree(8);
  CsrMatrix K = detail::square_free_matrix(Y);
  const detail::BasisTable tab = detail::tabulate(Y.element, rule);
  const detail::BasisTable rtab = detail::tabulate(R.space->element, rule);
  const Mesh& mesh = *Y.mesh;
  const int nloc = tab.n_local;
  std::array<Vec2, 6> g;
  std::array<double, 36> local{};
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry geom = cell_geometry(mesh, c);
    local.fill(0.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double kv = laws.kappa(detail::eval_scalar(*R.space, R.values, rtab, c, q));
      if (!std::isfinite(kv)) throw std::runtime_error("assemble_heat_diffusion: non-finite diffusivity value");
      const double wq = rule.weights[q] * geom.det * kv;
      for (int i = 0; i < nloc; ++i) g[i] = geom.inverse_transpose * tab.grad(q, i);
      for (int i = 0; i < nloc; ++i) {
        for (int j = 0; j < nloc; ++j) {
          local[static_cast<std::size_t>(i * nloc + j)] += wq * g[i].dot(g[j]);
        }
      }
    }
    for (int i = 0; i < nloc; ++i) {
      const int fi = Y.free_index[Y.global_dof(c, i)];
      if (fi < 0) continue;
      for (int j = 0; j < nloc; ++j) {
        const int fj = Y.free_index[Y.global_dof(c, j)];
        if (fj >= 0) K.add(fi, fj, local[static_cast<std::size_t>(i * nloc + j)]);
      }
    }
  }
  return K;
}

/// Skew-symmetrized temperature transport
///   1/2 int ( (w . grad T) S - (w . grad S) T ).
inline CsrMatrix assemble_skew_transport(const CoefficientField& w, const FeSpace& Y) {
  detail::check_same_mesh(*w.space, Y, "assemble_skew_transport");
  const int deg = w.space->element.basis_degree() + 2 * Y.element.basis_degree() - 1;
  const QuadratureRule& rule = rule_for_degree(deg);
  CsrMatrix C = detail::square_free_matrix(Y);
  const detail::BasisTable tab = detail::tabulate(Y.element, rule);
  const detail::BasisTable wtab = detail::tabulate(w.space->element, rule);
  const Mesh& mesh = *Y.mesh;
  const int nloc = tab.n_local;
  std::array<double, 6> wg;
  std::array<double, 36> local{};
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry geom = cell_geometry(mesh, c);
    local.fill(0.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double wq = 0.5 * rule.weights[q] * geom.det;
      const Vec2 wv = detail::eval_vector(*w.space, w.values, wtab, c, q);
      for (int i = 0; i < nloc; ++i) wg[i] = wv.dot(geom.inverse_transpose * tab.grad(q, i));
      for (int i = 0; i < nloc; ++i) {
        for (int j = 0; j < nloc; ++j) {
          local[static_cast<std::size_t>(i * nloc + j)] +=
              wq * (wg[j] * tab.val(q, i) - wg[i] * tab.val(q, j));
        }
      }
    }
    for (int i = 0; i < nloc; ++i) {
      const int fi = Y.free_index[Y.global_dof(c, i)];
      if (fi < 0) continue;
      for (int j = 0; j < nloc; ++j) {
        const int fj = Y.free_index[Y.global_dof(c, j)];
        if (fj >= 0) C.add(fi, fj, local[static_cast<std::size_t>(i * nloc + j)]);
      }
    }
  }
  return C;
}

/// Load vectors int f . v and int g S on free dofs.
inline LoadVectors assemble_loads(const ForcingEvaluator& forcing, const FeSpace& V, const FeSpace& Y) {
  detail::check_same_mesh(V, Y, "assemble_loads");
  const QuadratureRule& rule = rule_for_degree(8);
  const detail::BasisTable vtab = detail::tabulate(V.element, rule);
  const detail::BasisTable ytab = detail::tabulate(Y.element, rule);
  const Mesh& mesh = *V.mesh;
  LoadVectors out;
  out.momentum = Eigen::VectorXd::Zero(V.n_free());
  out.heat = Eigen::VectorXd::Zero(Y.n_free());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry geom = cell_geometry(mesh, c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 x = mesh.map_to_physical(c, rule.points[q]);
      const double wq = rule.weights[q] * geom.det;
      const Vec2 fv = forcing.momentum(x);
      const double gv = forcing.heat(x);
      if (!fv.allFinite() || !std::isfinite(gv)) {
        throw std::runtime_error("assemble_loads: non-finite forcing value");
      }
      for (int i = 0; i < vtab.n_local; ++i) {
        const double nw = wq * vtab.val(q, i);
        for (int comp = 0; comp < 2; ++comp) {
          const int fi = V.free_index[V.global_dof(c, i, comp)];
          if (fi >= 0) out.momentum[fi] += nw * fv[comp];
        }
      }
      for (int i = 0; i < ytab.n_local; ++i) {
        const int fi = Y.free_index[Y.global_dof(c, i)];
        if (fi >= 0) out.heat[fi] += wq * gv * ytab.val(q, i);
      }
    }
  }
  return out;
}

/// Pressure basis integrals int psi_q, used for the zero-mean constraint.
inline Eigen::VectorXd assemble_pressure_mean(const FeSpace& Q) {
  const QuadratureRule& rule = rule_for_degree(2);
  const detail::BasisTable tab = detail::tabulate(Q.element, rule);
  const Mesh& mesh = *Q.mesh;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(Q.n_dofs());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry geom = cell_geometry(mesh, c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double wq = rule.weights[q] * geom.det;
      for (int i = 0; i < tab.n_local; ++i) m[Q.scalar_dof(c, i)] += wq * tab.val(q, i);
    }
  }
  return m;
}

}  // namespace bforc
