#include "gpwz/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gpwz/specfun.hpp"

namespace gpwz {
namespace {

constexpr double kPi = std::numbers::pi_v<double>;
const double kSqrt2 = std::sqrt(2.0);
const double kSqrt10 = std::sqrt(10.0);

// dq/dm of q(m) = E/K, modulus parameter m = k^2.  Regular at m = 0 with
// limit -1/2; the closed form uses dE/dm = (E-K)/(2m), dK/dm = (E-(1-m)K)/(2m(1-m)).
double dq_dm(double m) {
  if (m < 1e-8) return -0.5 - m / 8.0;
  const auto ell = elliptic_KE(std::sqrt(m));
  const double E = ell.bigE, K = ell.bigK, q = ell.q;
  return ((E - K) / (2.0 * m) - q * (E - (1.0 - m) * K) / (2.0 * m * (1.0 - m))) / K;
}

double q_of_m(double m) {
  if (m <= 0.0) return 1.0;
  return elliptic_KE(std::sqrt(std::min(m, 1.0 - 1e-15))).q;
}

struct QParts {
  double num;  // (l2-l3)(3 l2 l3 + 3 l3 l1 + 9 l3^2 - 5)
  double den;  // l1(2l2^2+l2l3+2l3^2-5) - (l2+l3)(6l2^2-2l2l3+6l3^2-5)
};

QParts q_rational(double l1, double l2, double l3) {
  const double M = 3.0 * l2 * l3 + 3.0 * l3 * l1 + 9.0 * l3 * l3 - 5.0;
  const double D1 = 2.0 * l2 * l2 + l2 * l3 + 2.0 * l3 * l3 - 5.0;
  const double D2 = 6.0 * l2 * l2 - 2.0 * l2 * l3 + 6.0 * l3 * l3 - 5.0;
  return {(l2 - l3) * M, l1 * D1 - (l2 + l3) * D2};
}

Eigen::Matrix3d whitham_jacobian(double l1, double l2, double l3) {
  Eigen::Matrix3d J;
  // constraint row
  J(0, 0) = 6.0 * l1 + 2.0 * (l2 + l3);
  J(0, 1) = 6.0 * l2 + 2.0 * (l1 + l3);
  J(0, 2) = 6.0 * l3 + 2.0 * (l1 + l2);
  // z-equation row: r_z = z - (2/45) G
  const double P = 8.0 * l2 * l2 + 4.0 * l2 * l3 + 8.0 * l3 * l3 - 15.0;
  const double T = 24.0 * l2 * l2 - 8.0 * l2 * l3 + 24.0 * l3 * l3 - 25.0;
  J(1, 0) = -(2.0 / 45.0) * P;
  J(1, 1) = -(2.0 / 45.0) * (l1 * (16.0 * l2 + 4.0 * l3) - T - (l2 + l3) * (48.0 * l2 - 8.0 * l3));
  J(1, 2) = -(2.0 / 45.0) * (l1 * (4.0 * l2 + 16.0 * l3) - T - (l2 + l3) * (-8.0 * l2 + 48.0 * l3));
  // q-equation row: r_q = q(m) - num/(2 den)
  const double w = l3 - l1;
  const double m = (l2 - l1) / w;
  const double dm1 = (l2 - l3) / (w * w);
  const double dm2 = 1.0 / w;
  const double dm3 = -m / w;
  const double qp = dq_dm(m);
  const auto [num, den] = q_rational(l1, l2, l3);
  const double M = 3.0 * l2 * l3 + 3.0 * l3 * l1 + 9.0 * l3 * l3 - 5.0;
  const double D2 = 6.0 * l2 * l2 - 2.0 * l2 * l3 + 6.0 * l3 * l3 - 5.0;
  const double dnum1 = (l2 - l3) * 3.0 * l3;
  const double dnum2 = M + (l2 - l3) * 3.0 * l3;
  const double dnum3 = -M + (l2 - l3) * (3.0 * l2 + 3.0 * l1 + 18.0 * l3);
  const double dden1 = 2.0 * l2 * l2 + l2 * l3 + 2.0 * l3 * l3 - 5.0;
  const double dden2 = l1 * (4.0 * l2 + l3) - D2 - (l2 + l3) * (12.0 * l2 - 2.0 * l3);
  const double dden3 = l1 * (l2 + 4.0 * l3) - D2 - (l2 + l3) * (-2.0 * l2 + 12.0 * l3);
  J(2, 0) = qp * dm1 - (dnum1 * den - num * dden1) / (2.0 * den * den);
  J(2, 1) = qp * dm2 - (dnum2 * den - num * dden2) / (2.0 * den * den);
  J(2, 2) = qp * dm3 - (dnum3 * den - num * dden3) / (2.0 * den * den);
  return J;
}

// Leading-edge guess from the near-edge expansion of k(z).
ModulationPoint leading_guess(double z) {
  const double dz = std::max(z + kSqrt2, 1e-14);
  const double k = std::pow(2.0, 7.0 / 8.0) / std::sqrt(5.0) * std::pow(dz, 0.25) *
                   (1.0 - std::pow(2.0, 0.75) / 10.0 * std::sqrt(dz) +
                    131.0 / 1280.0 * kSqrt2 * dz);
  const double m = k * k;
  const double mid = -kSqrt2 / 4.0, l3 = kSqrt2;
  const double d = m * (l3 - mid);
  return assemble_point(z, mid - d / 2.0, mid + d / 2.0, l3);
}

}  // namespace

double zone_lead() { return -kSqrt2; }
double zone_trail() { return kSqrt10 / 27.0; }

ModulationPoint leading_edge_point() {
  ModulationPoint p = assemble_point(-kSqrt2, -kSqrt2 / 4.0, -kSqrt2 / 4.0, kSqrt2);
  return p;
}

ModulationPoint trailing_edge_point() {
  // l2 = l3 limit of the system: constraint + vanishing q-denominator give
  // (l1, l2, l3) = (-sqrt(10)/3, sqrt(10)/4, sqrt(10)/4) and z = sqrt(10)/27.
  ModulationPoint p;
  p.z = kSqrt10 / 27.0;
  p.l1 = -kSqrt10 / 3.0;
  p.l2 = p.l3 = kSqrt10 / 4.0;
  p.k = 1.0;
  p.q = 0.0;
  p.A = 2.0 * (p.l3 - p.l1);
  p.B = std::sqrt(p.A / 12.0);
  p.C = p.l1;
  p.R = -p.A / 3.0 - p.C;
  p.Q = 0.0;  // pi B / K(k), K -> inf
  p.f = 0.0;
  return p;
}

ModulationPoint assemble_point(double z, double l1, double l2, double l3) {
  ModulationPoint p;
  p.z = z;
  p.l1 = l1;
  p.l2 = l2;
  p.l3 = l3;
  const double w = l3 - l1;
  double m = (l2 - l1) / w;
  m = std::min(std::max(m, 0.0), 1.0);
  p.k = std::sqrt(m);
  p.A = 2.0 * w;
  p.B = std::sqrt(p.A / 12.0);
  p.C = l1 + l2 - l3;
  p.R = (m - 2.0) * p.A / 3.0 - p.C;
  if (m >= 1.0) {
    p.q = 0.0;
    p.Q = 0.0;
    p.f = 0.0;
    return p;
  }
  const auto ell = elliptic_KE(p.k);
  p.q = ell.q;
  p.Q = kPi * p.B / ell.bigK;
  p.f = p.Q * (4.0 * p.R + 6.0 * z) / 7.0;
  return p;
}

Eigen::Vector3d whitham_residuals(double l1, double l2, double l3, double z) {
  if (l3 - l1 < 1e-12)
    throw std::domain_error("whitham_residuals: degenerate triple, l3 - l1 < 1e-12");
  Eigen::Vector3d r;
  r(0) = 3.0 * (l1 * l1 + l2 * l2 + l3 * l3) + 2.0 * (l1 * l2 + l2 * l3 + l3 * l1) - 5.0;
  r(1) = z - (2.0 / 45.0) *
                 (l1 * (8.0 * l2 * l2 + 4.0 * l2 * l3 + 8.0 * l3 * l3 - 15.0) -
                  (l2 + l3) * (24.0 * l2 * l2 - 8.0 * l2 * l3 + 24.0 * l3 * l3 - 25.0));
  const auto [num, den] = q_rational(l1, l2, l3);
  if (den == 0.0)
    throw std::domain_error("whitham_residuals: q-equation denominator vanished");
  const double m = (l2 - l1) / (l3 - l1);
  r(2) = q_of_m(m) - num / (2.0 * den);
  return r;
}

ModulationPoint solve_point(double z, const ModulationPoint& guess) {
  Eigen::Vector3d l(guess.l1, guess.l2, guess.l3);
  constexpr int kMaxIter = 50;
  constexpr double kTol = 1e-11;
  double nrm = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxIter; ++it) {
    Eigen::Vector3d F;
    try {
      F = whitham_residuals(l(0), l(1), l(2), z);
    } catch (const std::domain_error& e) {
      throw ConvergenceError(std::string("solve_point: ") + e.what(), z);
    }
    nrm = F.cwiseAbs().maxCoeff();
    if (nrm <= kTol) return assemble_point(z, l(0), l(1), l(2));
    const Eigen::Matrix3d J = whitham_jacobian(l(0), l(1), l(2));
    const Eigen::Vector3d dl = J.partialPivLu().solve(-F);
    double lam = 1.0;
    Eigen::Vector3d ln = l + dl;
    while (!(ln(0) <= ln(1) && ln(1) <= ln(2))) {
      lam *= 0.5;
      if (lam < 1e-12)
        throw ConvergenceError("solve_point: ordering violated, damping exhausted", z);
      ln = l + lam * dl;
    }
    l = ln;
  }
  throw ConvergenceError("solve_point: no convergence after max iterations", z);
}

namespace {

// March to z_target from `from`, bisecting the step when Newton fails.
ModulationPoint continue_to(double z_target, const ModulationPoint& from, int depth = 0) {
  try {
    return solve_point(z_target, from);
  } catch (const ConvergenceError&) {
    if (depth > 48) throw;
    const double z_mid = 0.5 * (from.z + z_target);
    const ModulationPoint mid = continue_to(z_mid, from, depth + 1);
    return continue_to(z_target, mid, depth + 1);
  }
}

}  // namespace

ModulationTable sweep_zone(int n) {
  if (n < 16) throw std::invalid_argument("sweep_zone: n must be >= 16");
  const double zl = zone_lead(), zt = zone_trail();

  const int n_lead = n / 4;
  const int n_trail = n / 4;
  const int n_mid = n - n_lead - n_trail;

  std::vector<double> schedule;
  schedule.reserve(n);
  const double g0 = 1e-8, g1 = 0.08;
  for (int i = 0; i < n_lead; ++i)
    schedule.push_back(zl + g0 * std::pow(g1 / g0, double(i) / (n_lead - 1)));
  const double zm0 = zl + 0.1, zm1 = zt - 0.05;
  for (int i = 0; i < n_mid; ++i)
    schedule.push_back(zm0 + (zm1 - zm0) * double(i) / (n_mid - 1));
  const double t0 = 0.03, t1 = 1e-5;
  for (int i = 0; i < n_trail; ++i)
    schedule.push_back(zt - t0 * std::pow(t1 / t0, double(i) / (n_trail - 1)));

  ModulationTable table;
  table.z_lead = zl;
  table.z_trail = zt;
  table.points.reserve(n);

  ModulationPoint cur = solve_point(schedule.front(), leading_guess(schedule.front()));
  table.points.push_back(cur);
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    cur = continue_to(schedule[i], cur);
    table.points.push_back(cur);
  }

  for (std::size_t i = 1; i < table.points.size(); ++i)
    if (!(table.points[i].k > table.points[i - 1].k))
      throw ConvergenceError("sweep_zone: k not monotone along the table", table.points[i].z);
  return table;
}

std::pair<double, double> estimate_edges(const ModulationTable& table) {
  const auto& pts = table.points;
  if (pts.size() < 8) throw std::invalid_argument("estimate_edges: table too small");

  // leading edge: z = d0 + d4 k^4 + d6 k^6 on three spread small-k points
  const double k0 = pts.front().k;
  auto pick_lead = [&](double factor) {
    std::size_t i = 0;
    while (i + 1 < pts.size() && pts[i].k < factor * k0) ++i;
    return i;
  };
  const std::size_t ia = 0;
  std::size_t ib = pick_lead(2.0), ic = pick_lead(4.0);
  if (ib <= ia) ib = ia + 1;
  if (ic <= ib) ic = ib + 1;
  Eigen::Matrix3d Ml;
  Eigen::Vector3d bl;
  const std::size_t lead_idx[3] = {ia, ib, ic};
  for (int r = 0; r < 3; ++r) {
    const double k = pts[lead_idx[r]].k;
    Ml(r, 0) = 1.0;
    Ml(r, 1) = std::pow(k, 4);
    Ml(r, 2) = std::pow(k, 6);
    bl(r) = pts[lead_idx[r]].z;
  }
  const double z_lead_hat = Ml.partialPivLu().solve(bl)(0);

  // trailing edge: z = e0 + e1 kp2 ln(kp2) + e2 kp2 on three spread points
  const double kp2_last = 1.0 - pts.back().k * pts.back().k;
  auto pick_trail = [&](double factor) {
    std::size_t i = pts.size() - 1;
    while (i > 0 && (1.0 - pts[i].k * pts[i].k) < factor * kp2_last) --i;
    return i;
  };
  const std::size_t ja = pts.size() - 1;
  std::size_t jb = pick_trail(2.0), jc = pick_trail(4.5);
  if (jb >= ja) jb = ja - 1;
  if (jc >= jb) jc = jb - 1;
  Eigen::Matrix3d Mt;
  Eigen::Vector3d bt;
  const std::size_t trail_idx[3] = {ja, jb, jc};
  for (int r = 0; r < 3; ++r) {
    const double kp2 = 1.0 - pts[trail_idx[r]].k * pts[trail_idx[r]].k;
    Mt(r, 0) = 1.0;
    Mt(r, 1) = kp2 * std::log(kp2);
    Mt(r, 2) = kp2;
    bt(r) = pts[trail_idx[r]].z;
  }
  const double z_trail_hat = Mt.partialPivLu().solve(bt)(0);
  return {z_lead_hat, z_trail_hat};
}

double ansatz_residual(const ModulationPoint& p, const std::vector<double>& phi_grid) {
  const double k = p.k, m = k * k;
  const double A = p.A, C = p.C, R = p.R, Q = p.Q, z = p.z;
  const double c = (k < 1.0) ? elliptic_KE(k).bigK / kPi
                             : std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const double phi : phi_grid) {
    const double Y = [&] {
      const double dn = jacobi_dn(c * phi, k);
      return dn * dn;
    }();
    const double U0 = A * Y + C;
    const double P = -4.0 * Y * Y * Y + 4.0 * (2.0 - m) * Y * Y - 4.0 * (1.0 - m) * Y;
    const double P1 = -12.0 * Y * Y + 8.0 * (2.0 - m) * Y - 4.0 * (1.0 - m);
    const double P2 = -24.0 * Y + 8.0 * (2.0 - m);
    const double P3 = -24.0;
    const double Pc = std::max(P, 0.0);

    const double du_sq = A * A * c * c * Pc;    // (dU0/dphi)^2
    const double d2u = A * c * c * P1 / 2.0;    // d^2 U0/dphi^2
    const double du_abs = A * c * std::sqrt(Pc);
    const double d4u = A * std::pow(c, 4) * (P3 * P / 2.0 + P2 * P1 / 4.0);

    const double r1 = Q * Q * du_sq + U0 * U0 * U0 / 3.0 + R * U0 * U0 +
                      (18.0 * R * R - 5.0) * U0 / 3.0 +
                      (15.0 * R - 54.0 * R * R * R - 5.0 * z) / 3.0;
    const double r2 = du_abs * (Q * Q * Q * c * c * P2 / 2.0 + Q * R + Q * U0);
    const double r3 = std::pow(Q, 4) * d4u +
                      (5.0 / 6.0) * Q * Q * (2.0 * U0 * d2u + du_sq) +
                      (5.0 / 18.0) * (z - U0 + U0 * U0 * U0);
    worst = std::max({worst, std::abs(r1), std::abs(r2), std::abs(r3)});
  }
  return worst;
}

Eigen::Vector4d dn2_system_residuals(double A, double B, double C, double R, double k, double z) {
  const double m = k * k;
  Eigen::Vector4d r;
  r(0) = A - 12.0 * B * B;
  r(1) = 4.0 * (2.0 - m) * B * B + C + R;
  r(2) = (m - 1.0) * A * A + 3.0 * C * C + 6.0 * C * R + 18.0 * R * R - 5.0;
  r(3) = C * C * C + 3.0 * R * C * C + (18.0 * R * R - 5.0) * C -
         54.0 * R * R * R + 15.0 * R - 5.0 * z;
  return r;
}

double r_ode_rhs(double z, double R) {
  const double num = 486.0 * std::pow(R, 4) - 171.0 * R * R + 9.0 * z * R + 5.0;
  const double den = 9.0 * (54.0 * R * R * R - 9.0 * R + z) * (2.0 * R + 3.0 * z);
  return num / den;
}

std::vector<ROdeSample> r_ode_residual(const ModulationTable& table, double h) {
  std::vector<ROdeSample> out;
  out.reserve(table.points.size());
  for (const auto& p : table.points) {
    if (p.z - h <= table.z_lead || p.z + h >= table.z_trail) continue;
    ROdeSample s;
    s.z = p.z;
    s.singular = std::abs(54.0 * std::pow(p.R, 3) - 9.0 * p.R + p.z) < 1e-4;
    const ModulationPoint pm = solve_point(p.z - h, p);
    const ModulationPoint pp = solve_point(p.z + h, p);
    s.fd = (pp.R - pm.R) / (2.0 * h);
    s.rhs = r_ode_rhs(p.z, p.R);
    out.push_back(s);
  }
  return out;
}

double eval_H(double z, double R) {
  const double d1 = 54.0 * R * R * R - 9.0 * R + z;
  const double d2 = 2.0 * R + 3.0 * z;
  const double den = 3.0 * d1 * d1 * d2 * d2;
  if (den == 0.0) throw std::domain_error("eval_H: pole, (54R^3-9R+z)(2R+3z) = 0");
  const double R2 = R * R;
  const double N = 45.0 * z * z * z + (4860.0 * R2 * R - 582.0 * R) * z * z +
                   (131220.0 * std::pow(R2, 3) - 43416.0 * R2 * R2 + 2721.0 * R2 - 35.0) * z +
                   139968.0 * std::pow(R2, 3) * R - 59616.0 * R2 * R2 * R +
                   6048.0 * R2 * R - 120.0 * R;
  return N / den;
}

EdgeSeriesReport edge_series_check(const ModulationTable& table) {
  const double zl = table.z_lead;
  auto solve_at = [&](double dz) {
    // seed with the nearest table point, fall back on the series guess
    const auto& pts = table.points;
    auto it = std::lower_bound(pts.begin(), pts.end(), zl + dz,
                               [](const ModulationPoint& p, double zv) { return p.z < zv; });
    if (it == pts.end()) it = std::prev(pts.end());
    try {
      return solve_point(zl + dz, *it);
    } catch (const ConvergenceError&) {
      return solve_point(zl + dz, leading_guess(zl + dz));
    }
  };
  auto k_series = [&](double dz) {
    return std::pow(2.0, 7.0 / 8.0) / std::sqrt(5.0) * std::pow(dz, 0.25) *
           (1.0 - std::pow(2.0, 0.75) / 10.0 * std::sqrt(dz) + 131.0 / 1280.0 * kSqrt2 * dz);
  };
  auto R_series = [&](double dz) {
    return -kSqrt2 / 6.0 + dz / 40.0 + 7.0 / 2560.0 * kSqrt2 * dz * dz;
  };

  EdgeSeriesReport rep;
  rep.dz = 1e-3;
  const ModulationPoint probe = solve_at(rep.dz);
  rep.k_numeric = probe.k;
  rep.k_series = k_series(rep.dz);
  rep.R_numeric = probe.R;
  rep.R_series = R_series(rep.dz);

  const ModulationPoint tiny = solve_at(1e-6);
  rep.lead_coeff = tiny.k / std::pow(1e-6, 0.25);

  const ModulationPoint pa = solve_at(1e-4);
  const ModulationPoint pb = solve_at(2e-4);
  const double slope_small = (pb.R - pa.R) / 1e-4;
  rep.R_at_edge = pa.R - slope_small * 1e-4;

  const ModulationPoint pc = solve_at(2e-3);
  rep.dRdz_at_edge = (pc.R - probe.R) / 1e-3;
  return rep;
}

Eigen::Vector3d potemin_residuals(double l1, double l2, double l3, double z) {
  if (l1 == l2 || l2 == l3)
    throw std::domain_error("potemin_residuals: degenerate triple");
  const double m = (l2 - l1) / (l3 - l1);
  const double q = q_of_m(m);
  const double S1 = l1 + l2 + l3;
  const double S2 = l1 * l2 + l2 * l3 + l3 * l1;
  const double V = 5.0 * S1 * S1 * S1 - 12.0 * S1 * S2 + 8.0 * l1 * l2 * l3;
  const double dV[3] = {
      15.0 * S1 * S1 - 12.0 * (S2 + S1 * (l2 + l3)) + 8.0 * l2 * l3,
      15.0 * S1 * S1 - 12.0 * (S2 + S1 * (l1 + l3)) + 8.0 * l1 * l3,
      15.0 * S1 * S1 - 12.0 * (S2 + S1 * (l1 + l2)) + 8.0 * l1 * l2,
  };
  if (q == 0.0 || q == 1.0 || 1.0 - q - m == 0.0)
    throw std::domain_error("potemin_residuals: vanishing Y denominator");
  const double Y[3] = {
      S1 / 3.0 + (2.0 / 3.0) * (l1 - l2) / (1.0 - q),
      S1 / 3.0 - (2.0 / 3.0) * (l1 - l2) * (1.0 - m) / (1.0 - q - m),
      S1 / 3.0 + (2.0 / 3.0) * (l3 - l2) / q,
  };
  Eigen::Vector3d r;
  for (int j = 0; j < 3; ++j)
    r(j) = z - Y[j] + (V + (3.0 * Y[j] - S1) * dV[j]) / 35.0;
  return r;
}

Eigen::Vector2d ak_equation_residuals(double A, double k, double z) {
  const double m = k * k;
  const double q = q_of_m(m);
  const double g = m * m - m + 1.0;
  const double pal = ((((((8.0 * m - 24.0) * m + 43.0) * m - 46.0) * m + 43.0) * m - 24.0) * m + 8.0);
  Eigen::Vector2d r;
  r(0) = pal * std::pow(A, 6) - 140.0 * g * g * std::pow(A, 4) +
         50.0 * z * (m - 2.0) * (2.0 * m - 1.0) * (m + 1.0) * std::pow(A, 3) +
         500.0 * g * A * A + 3375.0 * z * z - 500.0;
  r(1) = 21.0 * m * m * (m - 1.0) * (m - 1.0) * A * A * A +
         10.0 *
             (((2.0 * q - 1.0) * m - (3.0 * q + 1.0)) * m * m - (3.0 * q - 4.0) * m +
              (2.0 * q - 2.0)) *
             A +
         315.0 * z * ((2.0 * q - 1.0) * m * m - (2.0 * q - 3.0) * m + (2.0 * q - 2.0));
  return r;
}

double ak_equation_r11_printed(double A, double k, double z) {
  const double m = k * k;
  const double g = m * m - m + 1.0;
  const double coeff = ((((((8.0 * m - 24.0) * m + 43.0) * m - 46.0) * m - 43.0) * m + 24.0) * m - 8.0);
  return coeff * std::pow(A, 6) - 140.0 * g * g * std::pow(A, 4) +
         50.0 * z * (m - 2.0) * (2.0 * m - 1.0) * (m + 1.0) * std::pow(A, 3) +
         500.0 * g * A * A + 3375.0 * z * z - 500.0;
}

}  // namespace gpwz
