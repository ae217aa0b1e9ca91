#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpwz/dd.hpp"

namespace gpwz {

/// Fixed-t numeric solution of the fourth-order ODE
///   u_xxxx + (5/3) u u_xx + (5/6) (u_x)^2 + (5/18)(x - t u + u^3) = 0
/// on a uniform grid, with u and u_x clamped to the cusp-cubic branch values
/// at both ends.
struct GridSolution {
  double t = 0.0;
  double x_min = 0.0, x_max = 0.0, h = 0.0;
  Eigen::VectorXd u;        // solution values, rounded to double
  std::vector<dd> u_ext;    // extended-precision representation (internal)
  double converged = 0.0;   // final residual max-norm

  int n() const { return static_cast<int>(u.size()); }
  double x(int i) const { return x_min + i * h; }
};

struct SolverConfig {
  double h = 0.05;
  double x_min = -200.0, x_max = 60.0;
  double tol = 1e-9;          // residual max-norm at convergence
  int max_newton = 40;
  double damping_min = 1e-6;  // line-search floor
  double dt0 = 0.25;          // initial continuation step in t
  double dt_max = 1.0;
  double dt_min = 1e-4;
  std::vector<double> t_path;  // optional forced waypoints for continuation
};

struct SolveError : std::runtime_error {
  enum class Kind { non_convergence, step_collapse, singular_jacobian };
  Kind kind;
  double t;
  SolveError(Kind k, double t_, const std::string& what)
      : std::runtime_error(what), kind(k), t(t_) {}
};

/// Residual of the discrete operator (second-order stencils; boundary rows
/// encode the u and u_x clamps).  Extended-precision evaluation: the grid
/// function is representable below the 1e-9 gate even where 1/h^4
/// amplification exceeds double resolution.
Eigen::VectorXd ode_residual(const std::vector<dd>& u, double t, double x_min, double h);
Eigen::VectorXd ode_residual(const Eigen::VectorXd& u, double t, double x_min, double h);

/// Damped Newton on the banded Jacobian from the given guess.  `forcing`, if
/// non-empty, is subtracted from every residual row (manufactured-solution
/// hook).  Throws SolveError.
GridSolution solve_fixed_t(const SolverConfig& cfg, double t, const Eigen::VectorXd& guess,
                           const Eigen::VectorXd& forcing = Eigen::VectorXd());

/// Continuation in t from 0 to each target (all targets of one sign, sorted
/// by |t|), reusing each solution as the next guess, with automatic step
/// halving on Newton failure.  Returns one GridSolution per target.
std::vector<GridSolution> continuation_solve(const SolverConfig& cfg,
                                             const std::vector<double>& targets);

struct ScaledCurve {
  Eigen::VectorXd z, U;
};

/// (z, U) view of a fixed-t solution: z = x/|t|^{3/2}, U = u/sqrt(|t|).
ScaledCurve to_scaled(const GridSolution& sol);

/// Boundary data used by the solver: the cubic-branch value and slope at x.
double cubic_boundary_value(double x, double t, bool left_end);
double cubic_boundary_slope(double u, double t);

}  // namespace gpwz
