#pragma once

#include "bforc/convergence.hpp"
#include "bforc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bforc {

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace detail

/// Convergence table as CSV. Rate cells of the first level stay empty.
inline void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  out << "n,h,ndof,iters,err_u_h1,rate_u,err_p_l2,rate_p,err_T_h1,rate_T\n";
  for (const auto& r : rows) {
    out << r.n << ',' << detail::fmt("%.12e", r.h) << ',' << r.ndof << ',' << r.report.iterations << ','
        << detail::fmt("%.12e", r.errors.velocity_h1) << ','
        << (r.has_rates ? detail::fmt("%.4f", r.rates[0]) : "") << ','
        << detail::fmt("%.12e", r.errors.pressure_l2) << ','
        << (r.has_rates ? detail::fmt("%.4f", r.rates[1]) : "") << ','
        << detail::fmt("%.12e", r.errors.temperature_h1) << ','
        << (r.has_rates ? detail::fmt("%.4f", r.rates[2]) : "") << '\n';
  }
}

inline void write_convergence_csv_file(const std::string& path, const std::vector<ConvergenceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_convergence_csv_file: cannot open " + path);
  write_convergence_csv(out, rows);
}

namespace detail {

struct SvgMapper {
  double lo_x, hi_x, lo_y, hi_y;  // log10 data range
  double x0, x1, y0, y1;          // pixel viewport (y grows downward)

  double px(double logx) const { return x0 + (logx - lo_x) / (hi_x - lo_x) * (x1 - x0); }
  double py(double logy) const { return y0 - (logy - lo_y) / (hi_y - lo_y) * (y0 - y1); }
};

}  // namespace detail

/// Log-log chart of the three error norms against Ndof with a reference
/// slope line. `guide_slope` is the slope of the guide against Ndof
/// (-1 for the quadratic pair, -1/2 for the linear one).
inline void write_convergence_svg(std::ostream& out, const std::vector<ConvergenceRow>& rows,
                                  double guide_slope) {
  if (rows.size() < 2) throw std::invalid_argument("write_convergence_svg: need at least two levels");

  const struct Series {
    const char* label;
    const char* color;
  } series_meta[3] = {{"velocity_h1", "#1f6fb4"},
                      {"pressure_l2", "#d95f02"},
                      {"temperature_h1", "#1b9e77"}};

  const auto value = [](const ConvergenceRow& r, int s) {
    return s == 0 ? r.errors.velocity_h1 : s == 1 ? r.errors.pressure_l2 : r.errors.temperature_h1;
  };

  double lo_y = 1e300, hi_y = -1e300;
  for (const auto& r : rows) {
    for (int s = 0; s < 3; ++s) {
      const double v = value(r, s);
      if (!(v > 0.0)) throw std::invalid_argument("write_convergence_svg: errors must be positive");
      lo_y = std::min(lo_y, std::log10(v));
      hi_y = std::max(hi_y, std::log10(v));
    }
  }
  detail::SvgMapper m;
  m.lo_x = std::log10(static_cast<double>(rows.front().ndof));
  m.hi_x = std::log10(static_cast<double>(rows.back().ndof));
  m.lo_y = lo_y - 0.35;
  m.hi_y = hi_y + 0.15;
  m.x0 = 70.0;
  m.x1 = 600.0;
  m.y0 = 420.0;
  m.y1 = 30.0;

  // least-squares slopes vs Ndof, recorded as metadata together with the
  // equivalent rate vs h (factor 2 in two dimensions)
  std::string meta;
  for (int s = 0; s < 3; ++s) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rows) {
      const double X = std::log10(static_cast<double>(r.ndof));
      const double Y = std::log10(value(r, s));
      sx += X; sy += Y; sxx += X * X; sxy += X * Y;
    }
    const double nr = static_cast<double>(rows.size());
    const double slope = (nr * sxy - sx * sy) / (nr * sxx - sx * sx);
    meta += std::string(series_meta[s].label) + ": slope_vs_ndof=" + detail::fmt("%.6f", slope) +
            " rate_vs_h=" + detail::fmt("%.6f", 2.0 * std::abs(slope)) + "; ";
  }

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"660\" height=\"470\" "
         "viewBox=\"0 0 660 470\">\n";
  out << "<desc>" << meta << "guide_slope_vs_ndof=" << detail::fmt("%.4f", guide_slope) << "</desc>\n";
  out << "<rect width=\"660\" height=\"470\" fill=\"white\"/>\n";
  out << "<line x1=\"" << m.x0 << "\" y1=\"" << m.y0 << "\" x2=\"" << m.x1 << "\" y2=\"" << m.y0
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << m.x0 << "\" y1=\"" << m.y0 << "\" x2=\"" << m.x0 << "\" y2=\"" << m.y1
      << "\" stroke=\"black\"/>\n";

  // decade ticks
  for (int e = static_cast<int>(std::ceil(m.lo_x)); e <= static_cast<int>(std::floor(m.hi_x)); ++e) {
    const double x = m.px(e);
    out << "<line x1=\"" << x << "\" y1=\"" << m.y0 << "\" x2=\"" << x << "\" y2=\"" << m.y0 + 6
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << m.y0 + 20
        << "\" font-size=\"12\" text-anchor=\"middle\">1e" << e << "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(m.lo_y)); e <= static_cast<int>(std::floor(m.hi_y)); ++e) {
    const double y = m.py(e);
    out << "<line x1=\"" << m.x0 - 6 << "\" y1=\"" << y << "\" x2=\"" << m.x0 << "\" y2=\"" << y
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << m.x0 - 10 << "\" y=\"" << y + 4
        << "\" font-size=\"12\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  out << "<text x=\"335\" y=\"455\" font-size=\"13\" text-anchor=\"middle\">Ndof</text>\n";

  for (int s = 0; s < 3; ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << series_meta[s].color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : rows) {
      out << m.px(std::log10(static_cast<double>(r.ndof))) << ',' << m.py(std::log10(value(r, s))) << ' ';
    }
    out << "\"/>\n";
    for (const auto& r : rows) {
      out << "<circle cx=\"" << m.px(std::log10(static_cast<double>(r.ndof))) << "\" cy=\""
          << m.py(std::log10(value(r, s))) << "\" r=\"3\" fill=\"" << series_meta[s].color << "\"/>\n";
    }
    out << "<text x=\"" << m.x1 - 160 << "\" y=\"" << m.y1 + 16 + 16 * s << "\" font-size=\"12\" fill=\""
        << series_meta[s].color << "\">" << series_meta[s].label << "</text>\n";
  }

  // guide line anchored above the first velocity point
  {
    const double lx0 = std::log10(static_cast<double>(rows.front().ndof));
    const double lx1 = std::log10(static_cast<double>(rows.back().ndof));
    const double ly0 = std::log10(value(rows.front(), 0)) + 0.25;
    const double ly1 = ly0 + guide_slope * (lx1 - lx0);
    out << "<line x1=\"" << m.px(lx0) << "\" y1=\"" << m.py(ly0) << "\" x2=\"" << m.px(lx1) << "\" y2=\""
        << m.py(ly1) << "\" stroke=\"#555555\" stroke-dasharray=\"6,4\"/>\n";
    out << "<text x=\"" << m.px(lx1) - 70 << "\" y=\"" << m.py(ly1) - 6
        << "\" font-size=\"12\" fill=\"#555555\">Ndof^" << detail::fmt("%.2g", guide_slope)
        << "</text>\n";
  }
  out << "</svg>\n";
}

inline void write_convergence_svg_file(const std::string& path, const std::vector<ConvergenceRow>& rows,
                                       double guide_slope) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_convergence_svg_file: cannot open " + path);
  write_convergence_svg(out, rows, guide_slope);
}

/// Legacy VTK (version 2.0, ASCII, UNSTRUCTURED_GRID) with vertex-sampled
/// point data: velocity padded to 3 components, pressure, temperature.
/// Higher-order and bubble dofs are not exported.
inline void write_vtk(std::ostream& out, const Mesh& mesh, const StateVector& state) {
  out << "# vtk DataFile Version 2.0\n";
  out << "coupled flow and heat fields\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  out.precision(12);
  for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << " 0\n";
  out << "CELLS " << mesh.n_cells() << ' ' << 4 * mesh.n_cells() << '\n';
  for (const auto& c : mesh.cells) out << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  out << "CELL_TYPES " << mesh.n_cells() << '\n';
  for (int c = 0; c < mesh.n_cells(); ++c) out << "5\n";
  out << "POINT_DATA " << mesh.n_vertices() << '\n';
  out << "VECTORS velocity double\n";
  // vertex dofs come first in every space, and the bases are nodal there
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    out << state.u[2 * v] << ' ' << state.u[2 * v + 1] << " 0\n";
  }
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.n_vertices(); ++v) out << state.p[v] << '\n';
  out << "SCALARS temperature double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.n_vertices(); ++v) out << state.T[v] << '\n';
}

inline void write_vtk_file(const std::string& path, const Mesh& mesh, const StateVector& state) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk_file: cannot open " + path);
  write_vtk(out, mesh, state);
}

}  // namespace bforc
