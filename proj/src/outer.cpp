#include "gpwz/outer.hpp"

#include <cmath>
#include <stdexcept>

namespace gpwz {
namespace {

constexpr double kFoldZ = 0.38490017945975052;  // 2/sqrt(27)
constexpr double kFoldU = 0.57735026918962576;  // 1/sqrt(3)

// Newton polish on U^3 + s*U + z with s = -1 (t_sign=+1) or +1 (t_sign=-1).
double polish(double u, double s, double z) {
  for (int i = 0; i < 8; ++i) {
    const double f = z + s * u + u * u * u;
    const double df = s + 3.0 * u * u;
    const double du = f / df;
    u -= du;
    if (std::abs(du) <= 1e-16 * (1.0 + std::abs(u))) break;
  }
  return u;
}

}  // namespace

double cusp_root(double z, int t_sign, CubicBranch branch) {
  if (t_sign != 1 && t_sign != -1)
    throw std::domain_error("cusp_root: t_sign must be +1 or -1");

  if (t_sign == -1) {
    // U^3 + U + z = 0, strictly monotone.  Any branch label maps to the
    // unique root.
    double u = -z;
    if (std::abs(z) > 1.0) u = -std::copysign(std::cbrt(std::abs(z)), z);
    return polish(u, +1.0, z);
  }

  // t_sign = +1: U^3 - U + z = 0.
  const bool three_roots = std::abs(z) < kFoldZ;
  if (branch == CubicBranch::unique) {
    if (three_roots)
      throw std::domain_error("cusp_root: no unique branch inside |z| < 2/sqrt(27)");
    branch = (z < 0.0) ? CubicBranch::from_minus_infinity
                       : CubicBranch::from_plus_infinity;
  }
  if (branch == CubicBranch::from_minus_infinity && z >= kFoldZ)
    throw std::domain_error("cusp_root: from_minus_infinity branch folds at z = 2/sqrt(27)");
  if (branch == CubicBranch::from_plus_infinity && z <= -kFoldZ)
    throw std::domain_error("cusp_root: from_plus_infinity branch folds at z = -2/sqrt(27)");

  double u;
  if (three_roots) {
    // trigonometric form: roots (2/sqrt(3)) cos(theta/3 - 2 pi j/3),
    // theta = acos(-(3 sqrt(3)/2) z); j = 0 is the largest root, j = 2 the
    // smallest.
    const double arg = std::min(1.0, std::max(-1.0, -2.5980762113533160 * z));
    const double theta = std::acos(arg);
    const double two_over_sqrt3 = 1.1547005383792515;
    u = (branch == CubicBranch::from_minus_infinity)
            ? two_over_sqrt3 * std::cos(theta / 3.0)
            : two_over_sqrt3 * std::cos(theta / 3.0 - 2.0943951023931953 * 2.0);
  } else {
    // single real root; asymptotic seed, sign from the surviving branch
    u = -std::copysign(std::cbrt(std::abs(z)) + 0.5, z);
  }
  return polish(u, -1.0, z);
}

double cusp_root_derivative(double z, int t_sign, CubicBranch branch) {
  const double u = cusp_root(z, t_sign, branch);
  if (t_sign == -1) return -1.0 / (3.0 * u * u + 1.0);
  const double den = 3.0 * u * u - 1.0;
  if (std::abs(den) < 1e-8)
    throw std::domain_error("cusp_root_derivative: fold point, 3U^2 = 1");
  return -1.0 / den;
}

}  // namespace gpwz
