#pragma once

namespace gpwz {

/// Real-root branches of the cusp cubic.
///
/// For t_sign = +1 the scaled cubic is  z - U + U^3 = 0;
/// for t_sign = -1 it is               z + U + U^3 = 0  (strictly monotone,
/// one real root for every z).  Branches are labelled by continuation from
/// z -> +-infinity; the middle root of the three-root region is never
/// returned.
enum class CubicBranch {
  from_plus_infinity,   // U <= -1/sqrt(3), continuous from z -> +inf
  from_minus_infinity,  // U >= +1/sqrt(3), continuous from z -> -inf
  unique,               // t_sign = -1, or t_sign = +1 outside the fold region
};

/// Root of the scaled cusp cubic on the requested branch.
/// Residual of the returned root is at most ~1e-14 (a couple of Newton
/// polishes on a closed-form seed).  Throws std::domain_error when the
/// branch does not exist at this z (folds at |z| = 2/sqrt(27) for t_sign=+1).
double cusp_root(double z, int t_sign, CubicBranch branch);

/// dU/dz of the branch function by implicit differentiation:
///   -1/(3U^2 - 1) for t_sign = +1,   -1/(3U^2 + 1) for t_sign = -1.
/// Throws std::domain_error within 1e-8 of a fold point (3U^2 = 1).
double cusp_root_derivative(double z, int t_sign, CubicBranch branch);

}  // namespace gpwz
