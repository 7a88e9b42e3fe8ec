#pragma once

#include "bforc/mms.hpp"
#include "bforc/solver.hpp"

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace bforc {

/// One refinement level of a manufactured-solution study.
struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  long ndof = 0;
  ErrorNorms errors;
  PicardReport report;
  double grad_u_norm_sq = 0.0;      // || grad u_h ||^2
  double momentum_load_work = 0.0;  // (f, u_h)
  double momentum_load_inf = 0.0;   // || f_vec ||_inf
  bool has_rates = false;
  std::array<double, 3> rates{};   // velocity, pressure, temperature vs h
};

/// Solve one test case on one mesh level. The converged state is copied out
/// when requested (field output).
inline ConvergenceRow solve_level(const TestCase& tc, ElementChoice choice, int n, double tol = 1e-6,
                                  int max_iter = 100, StateVector* state_out = nullptr) {
  const Mesh mesh = structured_unit_square(n);
  const DiscreteProblem prob = make_discrete_problem(mesh, choice, tc.laws, manufactured_forcing(tc));
  auto [state, report] = picard_solve(prob, tol, max_iter);

  ConvergenceRow row;
  row.n = n;
  row.h = mesh.h_max;
  row.ndof = ndof_total(prob.velocity, prob.pressure, prob.temperature);
  row.errors = error_norms(state, prob.velocity, prob.pressure, prob.temperature, reference_solution());
  row.report = report;
  row.grad_u_norm_sq = velocity_gradient_norm_sq(state.u, prob.velocity);
  row.momentum_load_work = prob.loads.momentum.dot(detail::gather_free(prob.velocity, state.u));
  row.momentum_load_inf = prob.loads.momentum.lpNorm<Eigen::Infinity>();
  if (state_out != nullptr) *state_out = std::move(state);
  return row;
}

/// Fill in the observed rates of a level sequence.
inline void attach_rates(std::vector<ConvergenceRow>& rows) {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double ratio = std::log(rows[k - 1].h / rows[k].h);
    rows[k].has_rates = true;
    rows[k].rates[0] = std::log(rows[k - 1].errors.velocity_h1 / rows[k].errors.velocity_h1) / ratio;
    rows[k].rates[1] = std::log(rows[k - 1].errors.pressure_l2 / rows[k].errors.pressure_l2) / ratio;
    rows[k].rates[2] = std::log(rows[k - 1].errors.temperature_h1 / rows[k].errors.temperature_h1) / ratio;
  }
}

/// Full refinement study; the observed rate between consecutive levels is
/// log(e_prev / e_next) / log(h_prev / h_next).
inline std::vector<ConvergenceRow> convergence_table(const TestCase& tc, ElementChoice choice,
                                                     std::span<const int> levels, double tol = 1e-6,
                                                     int max_iter = 100) {
  if (levels.empty()) throw std::invalid_argument("convergence_table: no levels");
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (levels[k] <= levels[k - 1]) throw std::invalid_argument("convergence_table: levels must increase");
  }
  std::vector<ConvergenceRow> rows;
  rows.reserve(levels.size());
  for (const int n : levels) rows.push_back(solve_level(tc, choice, n, tol, max_iter));
  attach_rates(rows);
  return rows;
}

}  // namespace bforc
