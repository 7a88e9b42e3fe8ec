#pragma once

#include "bforc/element.hpp"
#include "bforc/mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <vector>

namespace bforc {

enum class ElementPair { TaylorHood, Mini };

struct ElementChoice {
  ElementPair pair = ElementPair::TaylorHood;

  /// Temperature ansatz degree implied by the velocity/pressure pair.
  int temperature_degree() const { return pair == ElementPair::TaylorHood ? 2 : 1; }
};

/// Global finite element space for one field. Scalar dofs are numbered
/// vertices first, then edges (P2) or cells (mini bubbles); a 2-vector field
/// interleaves components as dof = 2*scalar + component.
struct FeSpace {
  ReferenceElement element{ElementKind::P1};
  const Mesh* mesh = nullptr;
  int vector_multiplicity = 1;
  int n_scalar_dofs = 0;
  std::vector<int> dof_map;       // n_cells x n_local scalar dof ids
  std::vector<Vec2> dof_nodes;    // scalar dof -> node coordinates
  std::vector<bool> constrained;  // per scalar dof, zero-trace constraint
  std::vector<int> dirichlet_dofs;  // sorted, global (vector) numbering
  std::vector<int> free_dofs;       // sorted, global numbering
  std::vector<int> free_index;      // global dof -> free position or -1

  int n_dofs() const { return vector_multiplicity * n_scalar_dofs; }
  int n_free() const { return static_cast<int>(free_dofs.size()); }
  int n_local() const { return element.n_local_dofs(); }

  int scalar_dof(int cell, int local) const {
    return dof_map[static_cast<std::size_t>(cell) * static_cast<std::size_t>(n_local()) +
                   static_cast<std::size_t>(local)];
  }

  int global_dof(int cell, int local, int component = 0) const {
    return vector_multiplicity * scalar_dof(cell, local) + component;
  }
};

namespace detail {

inline FeSpace make_space(const Mesh& mesh, ElementKind kind, int multiplicity, bool zero_trace) {
  FeSpace s;
  s.element = ReferenceElement(kind);
  s.mesh = &mesh;
  s.vector_multiplicity = multiplicity;

  const int nv = mesh.n_vertices();
  const int nloc = s.element.n_local_dofs();
  s.dof_map.resize(static_cast<std::size_t>(mesh.n_cells()) * static_cast<std::size_t>(nloc));

  switch (kind) {
    case ElementKind::P1:
      s.n_scalar_dofs = nv;
      s.dof_nodes = mesh.vertices;
      s.constrained.assign(static_cast<std::size_t>(nv), false);
      for (int c = 0; c < mesh.n_cells(); ++c) {
        for (int k = 0; k < 3; ++k) s.dof_map[static_cast<std::size_t>(3 * c + k)] = mesh.cells[c][k];
      }
      if (zero_trace) s.constrained.assign(mesh.vertex_on_boundary.begin(), mesh.vertex_on_boundary.end());
      break;
    case ElementKind::P2: {
      s.n_scalar_dofs = nv + mesh.n_edges();
      s.dof_nodes = mesh.vertices;
      for (const Edge& e : mesh.edges) {
        s.dof_nodes.push_back(0.5 * (mesh.vertices[e.v0] + mesh.vertices[e.v1]));
      }
      s.constrained.assign(static_cast<std::size_t>(s.n_scalar_dofs), false);
      for (int c = 0; c < mesh.n_cells(); ++c) {
        for (int k = 0; k < 3; ++k) {
          s.dof_map[static_cast<std::size_t>(6 * c + k)] = mesh.cells[c][k];
          s.dof_map[static_cast<std::size_t>(6 * c + 3 + k)] = nv + mesh.cell_edges[c][k];
        }
      }
      if (zero_trace) {
        for (int v = 0; v < nv; ++v) s.constrained[static_cast<std::size_t>(v)] = mesh.vertex_on_boundary[v];
        for (int e = 0; e < mesh.n_edges(); ++e) {
          s.constrained[static_cast<std::size_t>(nv + e)] = mesh.edge_on_boundary[e];
        }
      }
      break;
    }
    case ElementKind::P1Bubble: {
      s.n_scalar_dofs = nv + mesh.n_cells();
      s.dof_nodes = mesh.vertices;
      for (int c = 0; c < mesh.n_cells(); ++c) s.dof_nodes.push_back(mesh.cell_centroid(c));
      s.constrained.assign(static_cast<std::size_t>(s.n_scalar_dofs), false);
      for (int c = 0; c < mesh.n_cells(); ++c) {
        for (int k = 0; k < 3; ++k) s.dof_map[static_cast<std::size_t>(4 * c + k)] = mesh.cells[c][k];
        s.dof_map[static_cast<std::size_t>(4 * c + 3)] = nv + c;
      }
      if (zero_trace) {
        for (int v = 0; v < nv; ++v) s.constrained[static_cast<std::size_t>(v)] = mesh.vertex_on_boundary[v];
      }
      break;
    }
  }

  s.free_index.assign(static_cast<std::size_t>(s.n_dofs()), -1);
  for (int sd = 0; sd < s.n_scalar_dofs; ++sd) {
    for (int comp = 0; comp < multiplicity; ++comp) {
      const int g = multiplicity * sd + comp;
      if (s.constrained[static_cast<std::size_t>(sd)]) {
        s.dirichlet_dofs.push_back(g);
      } else {
        s.free_index[static_cast<std::size_t>(g)] = static_cast<int>(s.free_dofs.size());
        s.free_dofs.push_back(g);
      }
    }
  }
  return s;
}

}  // namespace detail

inline FeSpace build_velocity_space(const Mesh& mesh, ElementChoice choice) {
  const ElementKind kind =
      choice.pair == ElementPair::TaylorHood ? ElementKind::P2 : ElementKind::P1Bubble;
  return detail::make_space(mesh, kind, 2, /*zero_trace=*/true);
}

/// Continuous P1 pressure space; no Dirichlet constraints. The zero-mean
/// condition is imposed algebraically in the solver.
inline FeSpace build_pressure_space(const Mesh& mesh) {
  return detail::make_space(mesh, ElementKind::P1, 1, /*zero_trace=*/false);
}

inline FeSpace build_temperature_space(const Mesh& mesh, ElementChoice choice) {
  const ElementKind kind = choice.temperature_degree() == 2 ? ElementKind::P2 : ElementKind::P1;
  return detail::make_space(mesh, kind, 1, /*zero_trace=*/true);
}

/// Total unknown count of a discrete problem: free velocity dofs, all nodal
/// pressure dofs, free temperature dofs.
inline long ndof_total(const FeSpace& velocity, const FeSpace& pressure, const FeSpace& temperature) {
  return static_cast<long>(velocity.n_free()) + static_cast<long>(pressure.n_dofs()) +
         static_cast<long>(temperature.n_free());
}

/// Finite element function given by a coefficient vector over all dofs of its
/// space (constrained entries included and equal to zero for zero-trace
/// spaces).
struct CoefficientField {
  const FeSpace* space = nullptr;
  Eigen::VectorXd values;

  static CoefficientField zero(const FeSpace& s) {
    return {&s, Eigen::VectorXd::Zero(s.n_dofs())};
  }
};

/// Nodal interpolation of a scalar function (multiplicity-1 spaces).
inline CoefficientField interpolate(const FeSpace& space, const std::function<double(const Vec2&)>& f) {
  if (space.vector_multiplicity != 1) throw std::invalid_argument("interpolate: scalar space expected");
  CoefficientField out = CoefficientField::zero(space);
  for (int sd = 0; sd < space.n_scalar_dofs; ++sd) out.values[sd] = f(space.dof_nodes[sd]);
  return out;
}

/// Nodal interpolation of a 2-vector function.
inline CoefficientField interpolate_vector(const FeSpace& space,
                                           const std::function<Vec2(const Vec2&)>& f) {
  if (space.vector_multiplicity != 2) throw std::invalid_argument("interpolate_vector: vector space expected");
  CoefficientField out = CoefficientField::zero(space);
  for (int sd = 0; sd < space.n_scalar_dofs; ++sd) {
    const Vec2 v = f(space.dof_nodes[sd]);
    out.values[2 * sd] = v.x();
    out.values[2 * sd + 1] = v.y();
  }
  return out;
}

}  // namespace bforc
