#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bforc {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Undirected mesh edge. `cell_right` is -1 on the boundary.
struct Edge {
  int v0 = -1;
  int v1 = -1;  // v0 < v1
  int cell_left = -1;
  int cell_right = -1;

  int n_adjacent() const { return cell_right < 0 ? 1 : 2; }
};

/// Conforming triangulation with counterclockwise cells.
///
/// Construction happens through the factory functions below; after
/// construction the mesh is immutable and safe to read concurrently.
class Mesh {
public:
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> cells;       // vertex triples, positive orientation
  std::vector<Edge> edges;                     // sorted lexicographically by (v0, v1)
  std::vector<std::array<int, 3>> cell_edges;  // local edge k joins cell vertices k, (k+1)%3
  std::vector<bool> vertex_on_boundary;
  std::vector<bool> edge_on_boundary;
  double h_max = 0.0;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  int n_boundary_edges() const {
    return static_cast<int>(std::count(edge_on_boundary.begin(), edge_on_boundary.end(), true));
  }

  double cell_area(int cell) const {
    const auto& c = cells[static_cast<std::size_t>(cell)];
    const Vec2 d1 = vertices[c[1]] - vertices[c[0]];
    const Vec2 d2 = vertices[c[2]] - vertices[c[0]];
    return 0.5 * (d1.x() * d2.y() - d1.y() * d2.x());
  }

  double total_area() const {
    double a = 0.0;
    for (int c = 0; c < n_cells(); ++c) a += cell_area(c);
    return a;
  }

  Vec2 cell_centroid(int cell) const {
    const auto& c = cells[static_cast<std::size_t>(cell)];
    return (vertices[c[0]] + vertices[c[1]] + vertices[c[2]]) / 3.0;
  }

  /// Map a reference point to physical coordinates of a cell.
  Vec2 map_to_physical(int cell, const Vec2& ref) const {
    const auto& c = cells[static_cast<std::size_t>(cell)];
    const Vec2& p0 = vertices[c[0]];
    return p0 + ref.x() * (vertices[c[1]] - p0) + ref.y() * (vertices[c[2]] - p0);
  }
};

struct CellGeometry {
  Mat2 jacobian;
  double det = 0.0;
  Mat2 inverse_transpose;
};

/// Affine map from the reference triangle {x,y >= 0, x+y <= 1} to a cell.
/// det equals twice the cell area and must be positive.
inline CellGeometry cell_geometry(const Mesh& mesh, int cell) {
  if (cell < 0 || cell >= mesh.n_cells()) throw std::invalid_argument("cell_geometry: cell id out of range");
  const auto& c = mesh.cells[static_cast<std::size_t>(cell)];
  const Vec2& p0 = mesh.vertices[c[0]];
  CellGeometry g;
  g.jacobian.col(0) = mesh.vertices[c[1]] - p0;
  g.jacobian.col(1) = mesh.vertices[c[2]] - p0;
  g.det = g.jacobian(0, 0) * g.jacobian(1, 1) - g.jacobian(0, 1) * g.jacobian(1, 0);
  if (!(g.det > 0.0)) throw std::runtime_error("cell_geometry: degenerate or inverted cell " + std::to_string(cell));
  const double inv_det = 1.0 / g.det;
  // inverse transpose of [[a,b],[c,d]] is [[d,-c],[-b,a]]/det
  g.inverse_transpose(0, 0) = g.jacobian(1, 1) * inv_det;
  g.inverse_transpose(0, 1) = -g.jacobian(1, 0) * inv_det;
  g.inverse_transpose(1, 0) = -g.jacobian(0, 1) * inv_det;
  g.inverse_transpose(1, 1) = g.jacobian(0, 0) * inv_det;
  return g;
}

namespace detail {

inline void finalize_connectivity(Mesh& mesh) {
  const int nc = mesh.n_cells();
  // collect undirected vertex pairs, lexicographic order
  std::map<std::pair<int, int>, std::array<int, 2>> adj;
  for (int c = 0; c < nc; ++c) {
    const auto& cell = mesh.cells[static_cast<std::size_t>(c)];
    for (int k = 0; k < 3; ++k) {
      const int a = cell[k];
      const int b = cell[(k + 1) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = adj.try_emplace({key.first, key.second}, std::array<int, 2>{-1, -1});
      auto& cells_of = it->second;
      if (cells_of[0] < 0) {
        cells_of[0] = c;
      } else if (cells_of[1] < 0) {
        cells_of[1] = c;
      } else {
        throw std::runtime_error("mesh: edge shared by more than two cells");
      }
    }
  }
  mesh.edges.clear();
  mesh.edges.reserve(adj.size());
  std::map<std::pair<int, int>, int> edge_id;
  for (const auto& [key, cells_of] : adj) {
    edge_id[key] = static_cast<int>(mesh.edges.size());
    Edge e;
    e.v0 = key.first;
    e.v1 = key.second;
    e.cell_left = cells_of[0];
    e.cell_right = cells_of[1];
    mesh.edges.push_back(e);
  }
  mesh.cell_edges.assign(static_cast<std::size_t>(nc), {-1, -1, -1});
  for (int c = 0; c < nc; ++c) {
    const auto& cell = mesh.cells[static_cast<std::size_t>(c)];
    for (int k = 0; k < 3; ++k) {
      const auto key = std::minmax(cell[k], cell[(k + 1) % 3]);
      mesh.cell_edges[static_cast<std::size_t>(c)][k] = edge_id.at({key.first, key.second});
    }
  }
  mesh.edge_on_boundary.resize(mesh.edges.size());
  mesh.vertex_on_boundary.assign(mesh.vertices.size(), false);
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const bool bdry = mesh.edges[e].n_adjacent() == 1;
    mesh.edge_on_boundary[e] = bdry;
    if (bdry) {
      mesh.vertex_on_boundary[static_cast<std::size_t>(mesh.edges[e].v0)] = true;
      mesh.vertex_on_boundary[static_cast<std::size_t>(mesh.edges[e].v1)] = true;
    }
  }
  double h = 0.0;
  for (int c = 0; c < nc; ++c) {
    const auto& cell = mesh.cells[static_cast<std::size_t>(c)];
    for (int k = 0; k < 3; ++k) {
      h = std::max(h, (mesh.vertices[cell[k]] - mesh.vertices[cell[(k + 1) % 3]]).norm());
    }
  }
  mesh.h_max = h;
}

inline void require_positive_cells(const Mesh& mesh) {
  for (int c = 0; c < mesh.n_cells(); ++c) {
    if (!(mesh.cell_area(c) > 0.0)) {
      throw std::runtime_error("mesh: cell " + std::to_string(c) + " has non-positive area");
    }
  }
}

}  // namespace detail

/// Build a mesh from vertices and cells. Cells with clockwise orientation are
/// flipped; degenerate cells are rejected.
inline Mesh build_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells) {
  Mesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.cells = std::move(cells);
  const int nv = mesh.n_vertices();
  for (auto& cell : mesh.cells) {
    for (int v : cell) {
      if (v < 0 || v >= nv) throw std::invalid_argument("build_mesh: vertex index out of range");
    }
  }
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    if (mesh.cell_area(static_cast<int>(c)) < 0.0) std::swap(mesh.cells[c][1], mesh.cells[c][2]);
  }
  detail::require_positive_cells(mesh);
  detail::finalize_connectivity(mesh);
  return mesh;
}

/// Uniform triangulation of the rectangle [x0,x1] x [y0,y1], nx-by-ny squares,
/// each split along the lower-left to upper-right diagonal. Vertices and cells
/// are numbered lexicographically by (y, x).
inline Mesh structured_rectangle(double x0, double y0, double x1, double y1, int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("structured_rectangle: need nx, ny >= 1");
  if (!(x1 > x0) || !(y1 > y0)) throw std::invalid_argument("structured_rectangle: empty rectangle");
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      vertices.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
    }
  }
  const auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> cells;
  cells.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      cells.push_back({v00, v10, v11});
      cells.push_back({v00, v11, v01});
    }
  }
  return build_mesh(std::move(vertices), std::move(cells));
}

inline Mesh structured_unit_square(int n) {
  if (n < 1) throw std::invalid_argument("structured_unit_square: need n >= 1");
  return structured_rectangle(0.0, 0.0, 1.0, 1.0, n, n);
}

/// Split every cell into 4 congruent children through the edge midpoints.
/// Children of cell c occupy ids 4c..4c+3; midpoint vertices are appended in
/// edge order.
inline Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Vec2> vertices = mesh.vertices;
  vertices.reserve(vertices.size() + mesh.edges.size());
  const int nv = mesh.n_vertices();
  for (const Edge& e : mesh.edges) {
    vertices.push_back(0.5 * (mesh.vertices[e.v0] + mesh.vertices[e.v1]));
  }
  std::vector<std::array<int, 3>> cells;
  cells.reserve(static_cast<std::size_t>(4 * mesh.n_cells()));
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[static_cast<std::size_t>(c)];
    const auto& ce = mesh.cell_edges[static_cast<std::size_t>(c)];
    const int m01 = nv + ce[0];
    const int m12 = nv + ce[1];
    const int m20 = nv + ce[2];
    cells.push_back({cell[0], m01, m20});
    cells.push_back({m01, cell[1], m12});
    cells.push_back({m20, m12, cell[2]});
    cells.push_back({m01, m12, m20});
  }
  return build_mesh(std::move(vertices), std::move(cells));
}

/// Plain-text mesh format: header "ntri-mesh 1", vertex count, "x y" lines,
/// cell count, "i j k" lines (0-based).
inline Mesh read_mesh(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "ntri-mesh" || version != 1) {
    throw std::runtime_error("read_mesh: expected header 'ntri-mesh 1'");
  }
  int nv = 0;
  if (!(in >> nv) || nv < 3) throw std::runtime_error("read_mesh: bad vertex count");
  std::vector<Vec2> vertices(static_cast<std::size_t>(nv));
  for (auto& v : vertices) {
    if (!(in >> v.x() >> v.y())) throw std::runtime_error("read_mesh: truncated vertex list");
  }
  int nc = 0;
  if (!(in >> nc) || nc < 1) throw std::runtime_error("read_mesh: bad cell count");
  std::vector<std::array<int, 3>> cells(static_cast<std::size_t>(nc));
  for (auto& c : cells) {
    if (!(in >> c[0] >> c[1] >> c[2])) throw std::runtime_error("read_mesh: truncated cell list");
  }
  return build_mesh(std::move(vertices), std::move(cells));
}

inline Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_mesh_file: cannot open " + path);
  return read_mesh(in);
}

inline void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << "ntri-mesh 1\n" << mesh.n_vertices() << "\n";
  out.precision(17);
  for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << "\n";
  out << mesh.n_cells() << "\n";
  for (const auto& c : mesh.cells) out << c[0] << " " << c[1] << " " << c[2] << "\n";
}

inline void write_mesh_file(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_mesh_file: cannot open " + path);
  write_mesh(out, mesh);
}

}  // namespace bforc
