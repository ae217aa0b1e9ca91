#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gpwz {

/// All slowly varying parameters of the modulated wave at one z.
///
/// The triple l1 <= l2 <= l3 solves the Whitham-variable system; everything
/// else is algebraic in (z, l1, l2, l3):
///   k^2 = (l2-l1)/(l3-l1),  q = E(k)/K(k),
///   A = 2(l3-l1),  B = sqrt(A/12),  C = l1+l2-l3,
///   R = (k^2-2)A/3 - C,  Q = pi B/K(k),  f = Q(4R+6z)/7.
struct ModulationPoint {
  double z;
  double l1, l2, l3;
  double k, q;
  double A, B, C, R, Q, f;
};

/// Monotone-in-z table of solved points spanning the oscillation zone
/// z in (z_lead, z_trail) = (-sqrt(2), sqrt(10)/27).
struct ModulationTable {
  std::vector<ModulationPoint> points;
  double z_lead;
  double z_trail;
};

struct ConvergenceError : std::runtime_error {
  double z;
  explicit ConvergenceError(const std::string& what, double z_) : std::runtime_error(what), z(z_) {}
};

/// Zone edges and the exact edge-limit parameter sets.
double zone_lead();   // -sqrt(2)
double zone_trail();  // sqrt(10)/27
ModulationPoint leading_edge_point();   // l = (-s2/4, -s2/4, s2), k = 0
ModulationPoint trailing_edge_point();  // l = (-s10/3, s10/4, s10/4), k = 1

/// Derived fields from a triple (does not check that the triple solves
/// anything; used by interpolation as well as by the solver).
ModulationPoint assemble_point(double z, double l1, double l2, double l3);

/// Residuals of the three Whitham-variable equations at (l1,l2,l3; z):
/// the z-free constraint, the z-equation, and the q-equation.
Eigen::Vector3d whitham_residuals(double l1, double l2, double l3, double z);

/// Newton solve of whitham_residuals = 0 at fixed z, to residual norm 1e-11,
/// with step halving to preserve the ordering l1 <= l2 <= l3.
ModulationPoint solve_point(double z, const ModulationPoint& guess);

/// Continuation sweep across the zone: n points, geometric refinement into
/// both edges, each solution seeding the next.  k runs from ~0 to ~1.
ModulationTable sweep_zone(int n);

/// Extrapolated zone edges from the table's near-edge points:
/// leading via z = d0 + d4 k^4 + d6 k^6, trailing via
/// z = e0 + e1 k'^2 ln k'^2 + e2 k'^2.  Returns (z_lead_hat, z_trail_hat).
std::pair<double, double> estimate_edges(const ModulationTable& table);

/// Max over a phase grid of the absolute residuals of the three equations the
/// profile U0(phi) = A dn^2((K/pi) phi; k) + C has to satisfy:
///   (i)  first-order:  Q^2 (dU0)^2 + U0^3/3 + R U0^2 + (18R^2-5)U0/3
///                      + (15R - 54R^3 - 5z)/3
///   (ii) third-order:  Q^3 d^3U0 + Q R dU0 + Q U0 dU0
///   (iii) fourth-order: Q^4 d^4U0 + (5/6)Q^2(2 U0 d^2U0 + (dU0)^2)
///                      + (5/18)(z - U0 + U0^3)
/// Phi-derivatives are evaluated analytically through the dn^2 polynomial
/// identities, never by finite differences.
double ansatz_residual(const ModulationPoint& p, const std::vector<double>& phi_grid);

/// Residuals of the corrected dn^2-substitution system
///   E1: A - 12B^2
///   E2: 4(2-k^2)B^2 + C + R
///   E3: (k^2-1)A^2 + 3C^2 + 6CR + 18R^2 - 5
///   E4: C^3 + 3RC^2 + (18R^2-5)C - 54R^3 + 15R - 5z
Eigen::Vector4d dn2_system_residuals(double A, double B, double C, double R, double k, double z);

/// Right-hand side of the modulation ODE for R(z):
///   dR/dz = (486R^4 - 171R^2 + 9zR + 5) / (9 (54R^3-9R+z)(2R+3z)).
double r_ode_rhs(double z, double R);

struct ROdeSample {
  double z;
  double fd;        // centered difference of R(z) from re-solves at z +- h
  double rhs;       // ODE right-hand side
  bool singular;    // denominator factor within 1e-4 of zero
};

/// Per-z comparison of the centered difference dR/dz (step h, re-solved) with
/// the ODE right-hand side, over the interior points of the table.
std::vector<ROdeSample> r_ode_residual(const ModulationTable& table, double h = 1e-4);

/// H(z,R) = N(z,R) / (3 (54R^3-9R+z)^2 (2R+3z)^2); throws std::domain_error
/// at a pole of the denominator.
double eval_H(double z, double R);

struct EdgeSeriesReport {
  double dz;            // z - z_lead of the probe point
  double k_numeric, k_series;
  double R_numeric, R_series;
  double lead_coeff;    // k / dz^{1/4} at the smallest dz
  double R_at_edge;     // extrapolated R(z_lead)
  double dRdz_at_edge;  // one-sided fit of dR/dz at the edge
};

/// Near-edge comparison of numeric k(z), R(z) with their truncated expansions
///   k = (2^{7/8}/sqrt(5)) d^{1/4} (1 - (2^{3/4}/10) d^{1/2} + (131/1280) sqrt(2) d),
///   R = -sqrt(2)/6 + d/40 + (7/2560) sqrt(2) d^2,   d = z - z_lead.
EdgeSeriesReport edge_series_check(const ModulationTable& table);

/// Residuals of the three averaged (Potemin-form) equations z - Y_j + Z_j = 0,
/// with Z_j = (V + (3Y_j - S1) dV/dl_j)/35 and V = 5 S1^3 - 12 S1 S2 + 8 S3.
/// Throws std::domain_error on a degenerate triple (vanishing Y-denominator).
Eigen::Vector3d potemin_residuals(double l1, double l2, double l3, double z);

/// Residuals of the two (A,k,z) relations obtained by eliminating C:
///  r11 (degree-6, palindromic k-coefficients 8,-24,43,-46,43,-24,8) and
///  r12 (the q-bearing relation).  `printed_r11` evaluates the uncorrected
///  sign pattern (-43,24,-8 tail) for diagnostics; it does not vanish on
///  solutions.
Eigen::Vector2d ak_equation_residuals(double A, double k, double z);
double ak_equation_r11_printed(double A, double k, double z);

}  // namespace gpwz
