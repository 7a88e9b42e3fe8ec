#include "bforc/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace bforc;

TEST(Mesh, StructuredCountsSmallest) {
  const Mesh m = structured_unit_square(1);
  EXPECT_EQ(m.n_vertices(), 4);
  EXPECT_EQ(m.n_cells(), 2);
  EXPECT_EQ(m.n_edges(), 5);
  EXPECT_EQ(m.n_boundary_edges(), 4);
}

TEST(Mesh, StructuredCountsN2) {
  const Mesh m = structured_unit_square(2);
  EXPECT_EQ(m.n_vertices(), 9);
  EXPECT_EQ(m.n_cells(), 8);
  EXPECT_EQ(m.n_edges(), 16);
  EXPECT_EQ(m.n_boundary_edges(), 8);
}

TEST(Mesh, StructuredHmax) {
  const Mesh m = structured_unit_square(4);
  EXPECT_NEAR(m.h_max, std::sqrt(2.0) / 4.0, 1e-15);
}

TEST(Mesh, RejectsZeroSubdivisions) {
  EXPECT_THROW(structured_unit_square(0), std::invalid_argument);
}

TEST(Mesh, RefineQuadruplesCells) {
  const Mesh m = refine_uniform(structured_unit_square(1));
  EXPECT_EQ(m.n_cells(), 8);
}

TEST(Mesh, RefineHalvesHmax) {
  const Mesh m = refine_uniform(structured_unit_square(2));
  EXPECT_NEAR(m.h_max, std::sqrt(2.0) / 4.0, 1e-15);
}

TEST(Mesh, RefinePreservesArea) {
  Mesh m = structured_unit_square(3);
  for (int level = 0; level < 3; ++level) {
    m = refine_uniform(m);
    EXPECT_NEAR(m.total_area(), 1.0, 1e-14);
  }
}

TEST(Mesh, EulerRelationAndOrientation) {
  Mesh m = structured_unit_square(2);
  for (int level = 0; level < 4; ++level) {
    EXPECT_EQ(m.n_vertices() - m.n_edges() + m.n_cells(), 1);
    for (int c = 0; c < m.n_cells(); ++c) EXPECT_GT(m.cell_area(c), 0.0);
    EXPECT_NEAR(m.total_area(), 1.0, 1e-13);
    m = refine_uniform(m);
  }
}

TEST(Mesh, EdgeAdjacencyCounts) {
  const Mesh m = structured_unit_square(3);
  for (int e = 0; e < m.n_edges(); ++e) {
    EXPECT_EQ(m.edges[e].n_adjacent(), m.edge_on_boundary[e] ? 1 : 2);
    EXPECT_LT(m.edges[e].v0, m.edges[e].v1);
  }
}

TEST(Mesh, RectangleDomain) {
  const Mesh m = structured_rectangle(0.0, 0.0, 2.0, 1.0, 4, 2);
  EXPECT_EQ(m.n_vertices(), 15);
  EXPECT_EQ(m.n_cells(), 16);
  EXPECT_NEAR(m.total_area(), 2.0, 1e-14);
}

TEST(CellGeometry, IdentityMap) {
  const Mesh m = build_mesh({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, {{0, 1, 2}});
  const CellGeometry g = cell_geometry(m, 0);
  EXPECT_NEAR((g.jacobian - Mat2::Identity()).norm(), 0.0, 1e-15);
  EXPECT_NEAR(g.det, 1.0, 1e-15);
  EXPECT_NEAR((g.inverse_transpose - Mat2::Identity()).norm(), 0.0, 1e-15);
}

TEST(CellGeometry, Scaling) {
  const Mesh m = build_mesh({{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.5}}, {{0, 1, 2}});
  EXPECT_NEAR(cell_geometry(m, 0).det, 0.25, 1e-15);
}

TEST(CellGeometry, TranslationInvariance) {
  const Mesh m = build_mesh({{1.0, 1.0}, {2.0, 1.0}, {1.0, 2.0}}, {{0, 1, 2}});
  const CellGeometry g = cell_geometry(m, 0);
  EXPECT_NEAR((g.jacobian - Mat2::Identity()).norm(), 0.0, 1e-15);
}

TEST(CellGeometry, RejectsBadCellId) {
  const Mesh m = structured_unit_square(1);
  EXPECT_THROW(cell_geometry(m, -1), std::invalid_argument);
  EXPECT_THROW(cell_geometry(m, 2), std::invalid_argument);
}

TEST(CellGeometry, DetIsTwiceArea) {
  const Mesh m = structured_unit_square(3);
  for (int c = 0; c < m.n_cells(); ++c) {
    EXPECT_NEAR(cell_geometry(m, c).det, 2.0 * m.cell_area(c), 1e-15);
  }
}

TEST(MeshIo, RejectsDegenerateCell) {
  EXPECT_THROW(build_mesh({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}, {{0, 1, 2}}), std::runtime_error);
}

TEST(MeshIo, RoundTrip) {
  const Mesh m = structured_unit_square(3);
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh back = read_mesh(ss);
  ASSERT_EQ(back.n_vertices(), m.n_vertices());
  ASSERT_EQ(back.n_cells(), m.n_cells());
  EXPECT_EQ(back.n_edges(), m.n_edges());
  for (int v = 0; v < m.n_vertices(); ++v) {
    EXPECT_EQ(back.vertices[v].x(), m.vertices[v].x());
    EXPECT_EQ(back.vertices[v].y(), m.vertices[v].y());
  }
  EXPECT_EQ(back.h_max, m.h_max);
}

TEST(MeshIo, FlipsClockwiseCells) {
  std::stringstream ss("ntri-mesh 1\n3\n0 0\n1 0\n0 1\n1\n0 2 1\n");
  const Mesh m = read_mesh(ss);
  EXPECT_GT(m.cell_area(0), 0.0);
}

TEST(MeshIo, RejectsBadHeader) {
  std::stringstream ss("tri-mesh 1\n3\n");
  EXPECT_THROW(read_mesh(ss), std::runtime_error);
}

TEST(MeshIo, RejectsTruncatedInput) {
  std::stringstream ss("ntri-mesh 1\n4\n0 0\n1 0\n");
  EXPECT_THROW(read_mesh(ss), std::runtime_error);
}
