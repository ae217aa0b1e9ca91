#include "gpwz/gp_bvp.hpp"

#include <algorithm>
#include <cmath>

#include "gpwz/banded.hpp"
#include "gpwz/outer.hpp"

namespace gpwz {
namespace {

int grid_size(const SolverConfig& cfg) {
  const double span = cfg.x_max - cfg.x_min;
  const int n = static_cast<int>(std::lround(span / cfg.h)) + 1;
  if (n < 9) throw std::invalid_argument("gp_bvp: grid needs at least 9 points");
  return n;
}

struct BoundaryData {
  double gL, gR, dgL, dgR;
};

BoundaryData boundary_data(double t, double x_min, double x_max) {
  BoundaryData b;
  b.gL = cubic_boundary_value(x_min, t, true);
  b.gR = cubic_boundary_value(x_max, t, false);
  b.dgL = cubic_boundary_slope(b.gL, t);
  b.dgR = cubic_boundary_slope(b.gR, t);
  return b;
}

Eigen::VectorXd residual_impl(const std::vector<dd>& u, double t, double x_min, double h,
                              const BoundaryData& bd) {
  const int n = static_cast<int>(u.size());
  const double inv_h2 = 1.0 / (h * h);
  const double inv_h4 = inv_h2 * inv_h2;
  const double inv_2h = 0.5 / h;

  std::vector<dd> d2(n);
  for (int i = 1; i < n - 1; ++i) d2[i] = u[i - 1] - 2.0 * u[i] + u[i + 1];

  Eigen::VectorXd F(n);
  F(0) = double(u[0] - bd.gL);
  F(1) = double((4.0 * u[1] - 3.0 * u[0] - u[2]) * inv_2h - bd.dgL);
  for (int i = 2; i < n - 2; ++i) {
    const dd d4 = d2[i - 1] - 2.0 * d2[i] + d2[i + 1];
    const dd ux = (u[i + 1] - u[i - 1]) * inv_2h;
    const double x = x_min + i * h;
    const dd alg = (u[i] * u[i]) * u[i] - t * u[i] + x;
    const dd r = d4 * inv_h4 + (5.0 / 3.0) * (u[i] * d2[i]) * inv_h2 +
                 (5.0 / 6.0) * (ux * ux) + (5.0 / 18.0) * alg;
    F(i) = double(r);
  }
  F(n - 2) = double((3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) * inv_2h - bd.dgR);
  F(n - 1) = double(u[n - 1] - bd.gR);
  return F;
}

void fill_jacobian(BandedLU<double>& J, const std::vector<dd>& u, double t, double h) {
  const int n = static_cast<int>(u.size());
  const double inv_h2 = 1.0 / (h * h);
  const double inv_h4 = inv_h2 * inv_h2;
  const double inv_2h = 0.5 / h;
  J.reset();
  J.at(0, 0) = 1.0;
  J.at(1, 0) = -3.0 * inv_2h;
  J.at(1, 1) = 4.0 * inv_2h;
  J.at(1, 2) = -inv_2h;
  for (int i = 2; i < n - 2; ++i) {
    const double ui = u[i].hi;
    const double um = u[i - 1].hi, up = u[i + 1].hi;
    const double ux = (up - um) * inv_2h;
    const double uxx = (um - 2.0 * ui + up) * inv_h2;
    J.at(i, i - 2) = inv_h4;
    J.at(i, i + 2) = inv_h4;
    J.at(i, i - 1) = -4.0 * inv_h4 + (5.0 / 3.0) * ui * inv_h2 - (5.0 / 6.0) * ux / h;
    J.at(i, i + 1) = -4.0 * inv_h4 + (5.0 / 3.0) * ui * inv_h2 + (5.0 / 6.0) * ux / h;
    J.at(i, i) = 6.0 * inv_h4 + (5.0 / 3.0) * uxx - (10.0 / 3.0) * ui * inv_h2 +
                 (5.0 / 18.0) * (3.0 * ui * ui - t);
  }
  J.at(n - 2, n - 3) = inv_2h;
  J.at(n - 2, n - 2) = -4.0 * inv_2h;
  J.at(n - 2, n - 1) = 3.0 * inv_2h;
  J.at(n - 1, n - 1) = 1.0;
}

}  // namespace

double cubic_boundary_value(double x, double t, bool left_end) {
  if (t == 0.0) return std::cbrt(-x);
  const double s = std::sqrt(std::abs(t));
  const double z = x / (s * s * s);
  double U;
  if (t > 0.0)
    U = cusp_root(z, +1,
                  left_end ? CubicBranch::from_minus_infinity : CubicBranch::from_plus_infinity);
  else
    U = cusp_root(z, -1, CubicBranch::unique);
  return s * U;
}

double cubic_boundary_slope(double u, double t) { return -1.0 / (3.0 * u * u - t); }

Eigen::VectorXd ode_residual(const std::vector<dd>& u, double t, double x_min, double h) {
  const int n = static_cast<int>(u.size());
  const double x_max = x_min + (n - 1) * h;
  return residual_impl(u, t, x_min, h, boundary_data(t, x_min, x_max));
}

Eigen::VectorXd ode_residual(const Eigen::VectorXd& u, double t, double x_min, double h) {
  std::vector<dd> v(u.size());
  for (int i = 0; i < u.size(); ++i) v[i] = dd(u(i));
  return ode_residual(v, t, x_min, h);
}

GridSolution solve_fixed_t(const SolverConfig& cfg, double t, const Eigen::VectorXd& guess,
                           const Eigen::VectorXd& forcing) {
  const int n = grid_size(cfg);
  if (guess.size() != n) throw std::invalid_argument("solve_fixed_t: guess size mismatch");
  std::vector<dd> u(n);
  for (int i = 0; i < n; ++i) u[i] = dd(guess(i));

  GridSolution out;
  out.t = t;
  out.x_min = cfg.x_min;
  out.x_max = cfg.x_min + (n - 1) * cfg.h;
  out.h = cfg.h;
  solve_in_place(cfg, t, u, forcing, out.converged);
  out.u_ext = std::move(u);
  out.u.resize(n);
  for (int i = 0; i < n; ++i) out.u(i) = double(out.u_ext[i]);
  return out;
}

namespace {

void newton(const SolverConfig& cfg, double t, std::vector<dd>& u, const Eigen::VectorXd& forcing,
            double& achieved) {
  const int n = static_cast<int>(u.size());
  const double x_max = cfg.x_min + (n - 1) * cfg.h;
  const BoundaryData bd = boundary_data(t, cfg.x_min, x_max);
  const bool forced = forcing.size() != 0;
  if (forced && forcing.size() != n)
    throw std::invalid_argument("solve_fixed_t: forcing size mismatch");

  auto eval = [&](const std::vector<dd>& v) {
    Eigen::VectorXd F = residual_impl(v, t, cfg.x_min, cfg.h, bd);
    if (forced) F -= forcing;
    return F;
  };

  Eigen::VectorXd F = eval(u);
  double nrm = F.cwiseAbs().maxCoeff();
  BandedLU<double> J(n, 2, 2);
  std::vector<dd> trial(n);
  for (int it = 0; it < cfg.max_newton; ++it) {
    if (nrm <= cfg.tol) {
      achieved = nrm;
      return;
    }
    fill_jacobian(J, u, t, cfg.h);
    try {
      J.factorize();
    } catch (const std::runtime_error& e) {
      throw SolveError(SolveError::Kind::singular_jacobian, t, e.what());
    }
    const Eigen::VectorXd step = J.solve(-F);
    double lam = 1.0;
    for (;;) {
      for (int i = 0; i < n; ++i) trial[i] = u[i] + lam * step(i);
      Eigen::VectorXd Ft = eval(trial);
      const double nt = Ft.cwiseAbs().maxCoeff();
      if (nt < nrm || nt <= cfg.tol) {
        u.swap(trial);
        F = std::move(Ft);
        nrm = nt;
        break;
      }
      lam *= 0.5;
      if (lam < cfg.damping_min)
        throw SolveError(SolveError::Kind::step_collapse, t,
                         "solve_fixed_t: line search exhausted");
    }
  }
  if (nrm <= cfg.tol) {
    achieved = nrm;
    return;
  }
  throw SolveError(SolveError::Kind::non_convergence, t,
                   "solve_fixed_t: residual " + std::to_string(nrm) + " after max iterations");
}

}  // namespace

void solve_in_place(const SolverConfig& cfg, double t, std::vector<dd>& u,
                    const Eigen::VectorXd& forcing, double& achieved) {
  newton(cfg, t, u, forcing, achieved);
}

std::vector<GridSolution> continuation_solve(const SolverConfig& cfg,
                                             const std::vector<double>& targets) {
  if (targets.empty()) return {};
  const double sgn = targets.back() > 0 ? 1.0 : -1.0;
  for (double tv : targets)
    if (tv * sgn <= 0.0)
      throw std::invalid_argument("continuation_solve: targets must share one sign");
  std::vector<double> stops = targets;
  std::sort(stops.begin(), stops.end(), [&](double a, double b) { return a * sgn < b * sgn; });
  for (double w : cfg.t_path)
    if (w * sgn > 0.0 && w * sgn < stops.back() * sgn) stops.push_back(w);
  std::sort(stops.begin(), stops.end(), [&](double a, double b) { return a * sgn < b * sgn; });
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  const int n = grid_size(cfg);
  // smooth blend of the t = 0 cubic-root asymptotics as the anchor guess
  std::vector<dd> u(n);
  for (int i = 0; i < n; ++i) {
    const double x = cfg.x_min + i * cfg.h;
    u[i] = dd(-x * std::pow(x * x + 1.0, -1.0 / 3.0));
  }
  double achieved = 0.0;
  newton(cfg, 0.0, u, Eigen::VectorXd(), achieved);

  std::vector<GridSolution> out;
  out.reserve(targets.size());
  double t_cur = 0.0;
  double dt = cfg.dt0;
  std::vector<dd> saved = u;
  for (double stop : stops) {
    while (sgn * (stop - t_cur) > 1e-12) {
      const double t_next = sgn * std::min(sgn * (t_cur + sgn * dt), sgn * stop);
      saved = u;
      try {
        newton(cfg, t_next, u, Eigen::VectorXd(), achieved);
        t_cur = t_next;
        if (dt < cfg.dt_max) dt = std::min(cfg.dt_max, dt * 1.4);
      } catch (const SolveError&) {
        u = saved;
        dt *= 0.5;
        if (dt < cfg.dt_min) throw;
      }
    }
    const bool is_target = std::find(targets.begin(), targets.end(), stop) != targets.end();
    if (is_target) {
      GridSolution sol;
      sol.t = t_cur;
      sol.x_min = cfg.x_min;
      sol.x_max = cfg.x_min + (n - 1) * cfg.h;
      sol.h = cfg.h;
      sol.converged = achieved;
      sol.u_ext = u;
      sol.u.resize(n);
      for (int i = 0; i < n; ++i) sol.u(i) = double(u[i]);
      out.push_back(std::move(sol));
    }
  }
  return out;
}

ScaledCurve to_scaled(const GridSolution& sol) {
  if (sol.t == 0.0) throw std::invalid_argument("to_scaled: t must be nonzero");
  const double s = std::sqrt(std::abs(sol.t));
  const double zfac = 1.0 / (s * s * s);
  ScaledCurve c;
  c.z.resize(sol.n());
  c.U.resize(sol.n());
  for (int i = 0; i < sol.n(); ++i) {
    c.z(i) = sol.x(i) * zfac;
    c.U(i) = sol.u(i) / s;
  }
  return c;
}

}  // namespace gpwz
