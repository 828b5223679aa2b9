#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace likertopt {

/// min ½ zᵀ diag(q) z + cᵀz  s.t.  A z ≤ b
///
/// The Hessian is diagonal and positive semidefinite. A is row-major sparse;
/// rows for infinite bounds are never emitted.
struct QuadraticProgram {
  Eigen::VectorXd q_diag;
  Eigen::VectorXd c;
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  Eigen::VectorXd b;

  [[nodiscard]] Eigen::Index num_variables() const noexcept { return c.size(); }
  [[nodiscard]] Eigen::Index num_constraints() const noexcept { return b.size(); }
  [[nodiscard]] double objective(const Eigen::VectorXd& z) const;
};

enum class QPStatus { Optimal, MaxIterations };

struct QPSolution {
  Eigen::VectorXd z;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  QPStatus status = QPStatus::MaxIterations;
};

struct QPOptions {
  double tol = 1e-8;
  int max_iter = 20000;
};

/// Primal-dual interior point method (Mehrotra predictor-corrector).
///
/// Columns of A with few nonzeros and a diagonal Hessian entry (slack-like
/// variables) are eliminated through a Schur complement; rows of the
/// remaining dense block that repeat up to sign are merged when forming the
/// normal matrix. Both are exact reformulations of the Newton system.
///
/// Throws Error(Infeasible) when the dual iterates diverge with a persistent
/// primal residual, Error(NumericalBreakdown) on non-finite iterates.
QPSolution solve_qp(const QuadraticProgram& qp, const QPOptions& options = {});

void check_qp(const QuadraticProgram& qp);

}  // namespace likertopt
