#pragma once

#include "bforc/forms.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bforc {

/// Factorization hit a numerically singular pivot.
struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The fixed-point loop exhausted its iteration budget.
struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Direct sparse LU solve (partial pivoting, COLAMD fill-reducing ordering).
inline Eigen::VectorXd sparse_lu_solve(const Eigen::SparseMatrix<double>& M, const Eigen::VectorXd& rhs) {
  if (M.rows() != M.cols() || M.rows() != rhs.size()) {
    throw std::invalid_argument("sparse_lu_solve: shape mismatch");
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(M);
  lu.factorize(M);
  if (lu.info() != Eigen::Success) {
    throw SingularMatrixError("sparse_lu_solve: numerically singular matrix");
  }
  Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite()) throw SingularMatrixError("sparse_lu_solve: non-finite solution");
  return x;
}

inline Eigen::VectorXd sparse_lu_solve(const CsrMatrix& M, const Eigen::VectorXd& rhs) {
  return sparse_lu_solve(M.to_eigen(), rhs);
}

/// Discrete unknowns: velocity and temperature coefficients over all dofs of
/// their spaces (constrained entries zero), all nodal pressure dofs, and the
/// pressure-mean multiplier.
struct StateVector {
  Eigen::VectorXd u;
  Eigen::VectorXd p;
  Eigen::VectorXd T;
  double lambda = 0.0;

  static StateVector zero(const FeSpace& V, const FeSpace& Q, const FeSpace& Y) {
    StateVector s;
    s.u = Eigen::VectorXd::Zero(V.n_dofs());
    s.p = Eigen::VectorXd::Zero(Q.n_dofs());
    s.T = Eigen::VectorXd::Zero(Y.n_dofs());
    return s;
  }
};

/// Blocks of one linearized momentum solve.
struct SaddleSystem {
  const CsrMatrix* A = nullptr;           // free velocity x free velocity
  const CsrMatrix* B = nullptr;           // pressure x free velocity
  const Eigen::VectorXd* mean = nullptr;  // pressure basis integrals
  const Eigen::VectorXd* load = nullptr;  // free velocity load
};

/// Diagnostics of one fixed-point run. The constraint residuals are maxima
/// over every momentum solve of the run; the energy residuals test the final
/// assembled system at the returned state (the skew blocks drop out).
struct PicardReport {
  int iterations = 0;
  std::vector<double> increments;
  bool converged = false;
  double divergence_residual = 0.0;
  double pressure_mean_abs = 0.0;
  double momentum_energy_residual = 0.0;
  double heat_energy_residual = 0.0;
};

/// Spaces, coefficient laws, and fixed data of one discrete problem.
struct DiscreteProblem {
  const Mesh* mesh = nullptr;
  ElementChoice choice;
  MaterialLaws laws;
  FeSpace velocity;
  FeSpace pressure;
  FeSpace temperature;
  CsrMatrix divergence;  // pressure rows, free velocity columns
  Eigen::VectorXd pressure_mean;
  LoadVectors loads;
};

inline DiscreteProblem make_discrete_problem(const Mesh& mesh, ElementChoice choice,
                                             const MaterialLaws& laws, const ForcingEvaluator& forcing) {
  DiscreteProblem p;
  p.mesh = &mesh;
  p.choice = choice;
  p.laws = laws;
  p.velocity = build_velocity_space(mesh, choice);
  p.pressure = build_pressure_space(mesh);
  p.temperature = build_temperature_space(mesh, choice);
  p.divergence = restrict_divergence(assemble_divergence(p.velocity, p.pressure), p.velocity);
  p.pressure_mean = assemble_pressure_mean(p.pressure);
  p.loads = assemble_loads(forcing, p.velocity, p.temperature);
  return p;
}

struct MomentumSolution {
  Eigen::VectorXd u;  // all velocity dofs
  Eigen::VectorXd p;  // all pressure dofs
  double lambda = 0.0;
  double divergence_residual = 0.0;
  double pressure_mean_abs = 0.0;
  double energy_residual = 0.0;  // relative, skew block excluded
};

namespace detail {

/// Bordered saddle-point matrix
///   [ A   B^T  0 ]
///   [ B   0    m ]
///   [ 0  m^T   0 ]
/// acting on (u, p, lambda); the multiplier row pins the pressure mean.
inline Eigen::SparseMatrix<double> bordered_system(const CsrMatrix& A, const CsrMatrix& B,
                                                   const Eigen::VectorXd& mean) {
  const int nu = A.rows();
  const int np = B.rows();
  const int n = nu + np + 1;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(A.nnz() + 2 * B.nnz() + 2 * static_cast<std::size_t>(np));
  for (int r = 0; r < nu; ++r) {
    for (int k = A.row_offsets()[r]; k < A.row_offsets()[r + 1]; ++k) {
      trips.emplace_back(r, A.col_ids()[k], A.values()[k]);
    }
  }
  for (int r = 0; r < np; ++r) {
    for (int k = B.row_offsets()[r]; k < B.row_offsets()[r + 1]; ++k) {
      const int c = B.col_ids()[k];
      const double v = B.values()[k];
      trips.emplace_back(nu + r, c, v);
      trips.emplace_back(c, nu + r, v);
    }
  }
  for (int r = 0; r < np; ++r) {
    trips.emplace_back(nu + r, n - 1, mean[r]);
    trips.emplace_back(n - 1, nu + r, mean[r]);
  }
  Eigen::SparseMatrix<double> M(n, n);
  M.setFromTriplets(trips.begin(), trips.end());
  M.makeCompressed();
  return M;
}

inline Eigen::VectorXd scatter_free(const FeSpace& space, const Eigen::VectorXd& free_values) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(space.n_dofs());
  for (int k = 0; k < space.n_free(); ++k) full[space.free_dofs[k]] = free_values[k];
  return full;
}

inline Eigen::VectorXd gather_free(const FeSpace& space, const Eigen::VectorXd& full_values) {
  Eigen::VectorXd free_values(space.n_free());
  for (int k = 0; k < space.n_free(); ++k) free_values[k] = full_values[space.free_dofs[k]];
  return free_values;
}

}  // namespace detail

/// One linearized momentum solve: viscous/mass, skew convection, and drag
/// blocks are assembled at the lagged state, the new velocity and pressure
/// appear linearly. The returned pressure has zero mean by construction.
inline MomentumSolution solve_momentum_step(const StateVector& lag, const DiscreteProblem& prob) {
  if (!lag.u.allFinite() || !lag.T.allFinite()) {
    throw std::invalid_argument("solve_momentum_step: non-finite lagged state");
  }
  const FeSpace& V = prob.velocity;
  const CoefficientField w{&prob.velocity, lag.u};
  const CoefficientField Tf{&prob.temperature, lag.T};

  CsrMatrix A_visc = assemble_viscous_mass(Tf, V, prob.laws);
  const CsrMatrix A_skew = assemble_skew_convection(w, V);
  const CsrMatrix A_drag = assemble_forchheimer(w, V, prob.laws.s);

  CsrMatrix A = A_visc;
  A.axpy(A_skew);
  A.axpy(A_drag);

  const int nu = V.n_free();
  const int np = prob.pressure.n_dofs();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nu + np + 1);
  rhs.head(nu) = prob.loads.momentum;

  const Eigen::VectorXd sol =
      sparse_lu_solve(detail::bordered_system(A, prob.divergence, prob.pressure_mean), rhs);

  MomentumSolution out;
  const Eigen::VectorXd u_free = sol.head(nu);
  out.u = detail::scatter_free(V, u_free);
  out.p = sol.segment(nu, np);
  out.lambda = sol[nu + np];

  out.divergence_residual = prob.divergence.multiply(u_free).lpNorm<Eigen::Infinity>();
  out.pressure_mean_abs = std::abs(prob.pressure_mean.dot(out.p));
  // discrete energy identity with the test function equal to the solution;
  // the skew block contributes nothing
  const double load_work = prob.loads.momentum.dot(u_free);
  const double energy = A_visc.quadratic_form(u_free) + A_drag.quadratic_form(u_free) +
                        out.p.dot(prob.divergence.multiply(u_free));
  out.energy_residual = std::abs(energy - load_work) / std::max(std::abs(load_work), 1e-300);
  return out;
}

/// One linearized heat solve: diffusion at the lagged temperature plus skew
/// transport by the freshly computed velocity.
inline Eigen::VectorXd solve_heat_step(const Eigen::VectorXd& u_new, const Eigen::VectorXd& T_lag,
                                       const DiscreteProblem& prob, double* energy_residual = nullptr) {
  if (!u_new.allFinite()) throw std::invalid_argument("solve_heat_step: non-finite velocity");
  const FeSpace& Y = prob.temperature;
  const CoefficientField w{&prob.velocity, u_new};
  const CoefficientField Rf{&prob.temperature, T_lag};

  const CsrMatrix K = assemble_heat_diffusion(Rf, Y, prob.laws);
  const CsrMatrix C = assemble_skew_transport(w, Y);
  CsrMatrix H = K;
  H.axpy(C);

  const Eigen::VectorXd T_free = sparse_lu_solve(H, prob.loads.heat);
  if (energy_residual != nullptr) {
    const double load_work = prob.loads.heat.dot(T_free);
    *energy_residual =
        std::abs(K.quadratic_form(T_free) - load_work) / std::max(std::abs(load_work), 1e-300);
  }
  return detail::scatter_free(Y, T_free);
}

/// Fixed-point iteration: momentum solve, then heat solve, repeated until the
/// Euclidean norm of the concatenated coefficient increment (u, p, T; the
/// multiplier excluded) drops to tol. Starts from the zero state.
inline std::pair<StateVector, PicardReport> picard_solve(const DiscreteProblem& prob, double tol = 1e-6,
                                                         int max_iter = 100) {
  if (!(tol > 0.0)) throw std::invalid_argument("picard_solve: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("picard_solve: max_iter must be >= 1");

  StateVector state = StateVector::zero(prob.velocity, prob.pressure, prob.temperature);
  PicardReport report;

  for (int it = 1; it <= max_iter; ++it) {
    MomentumSolution mom = solve_momentum_step(state, prob);
    double heat_energy = 0.0;
    Eigen::VectorXd T_new = solve_heat_step(mom.u, state.T, prob, &heat_energy);

    if (!mom.u.allFinite() || !mom.p.allFinite() || !T_new.allFinite()) {
      throw std::runtime_error("picard_solve: non-finite iterate");
    }

    const double inc = std::sqrt((mom.u - state.u).squaredNorm() + (mom.p - state.p).squaredNorm() +
                                 (T_new - state.T).squaredNorm());
    report.increments.push_back(inc);
    report.iterations = it;

    state.u = std::move(mom.u);
    state.p = std::move(mom.p);
    state.T = std::move(T_new);
    state.lambda = mom.lambda;
    report.divergence_residual = std::max(report.divergence_residual, mom.divergence_residual);
    report.pressure_mean_abs = std::max(report.pressure_mean_abs, mom.pressure_mean_abs);
    report.momentum_energy_residual = mom.energy_residual;
    report.heat_energy_residual = heat_energy;

    if (inc <= tol) {
      report.converged = true;
      return {std::move(state), std::move(report)};
    }
  }
  throw NonConvergenceError("picard_solve: no convergence within " + std::to_string(max_iter) +
                            " iterations (last increment " + std::to_string(report.increments.back()) +
                            ")");
}

}  // namespace bforc
