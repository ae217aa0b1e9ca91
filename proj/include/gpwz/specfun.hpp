#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpwz {

/// Complete elliptic integrals of the first and second kind for one modulus k,
/// together with the ratio q = E/K (the period mean of dn^2).
///
/// All interfaces in this library take the modulus k, never the parameter
/// m = k^2; the conversion happens only inside this header.
template <typename Scalar = double>
struct EllipticEval {
  Scalar k;
  Scalar bigK;
  Scalar bigE;
  Scalar q;
};

/// K(k), E(k) by the arithmetic-geometric mean iteration:
///   a_{n+1} = (a_n+b_n)/2,  b_{n+1} = sqrt(a_n b_n),  c_{n+1} = (a_n-b_n)/2,
///   K = pi/(2 agm(1,k')),   E = K (1 - sum_{n>=0} 2^{n-1} c_n^2),  c_0 = k.
/// Converges quadratically; relative error is a few ulps for k in [0, 1).
template <typename Scalar>
EllipticEval<Scalar> elliptic_KE(Scalar k) {
  if (!(k >= Scalar(0)) || k >= Scalar(1))
    throw std::domain_error("elliptic_KE: modulus must satisfy 0 <= k < 1");
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar a = Scalar(1);
  Scalar b = std::sqrt((Scalar(1) - k) * (Scalar(1) + k));  // k'
  Scalar c = k;
  Scalar csum = c * c / Scalar(2);
  Scalar pow2 = Scalar(1);  // 2^{n-1} relative to the n=1 term
  for (int n = 0; n < 64 && std::abs(c) > eps * a; ++n) {
    c = (a - b) / Scalar(2);
    const Scalar an = (a + b) / Scalar(2);
    b = std::sqrt(a * b);
    a = an;
    csum += pow2 * c * c;
    pow2 *= Scalar(2);
  }
  const Scalar pi = Scalar(3.14159265358979323846264338327950288L);
  EllipticEval<Scalar> out;
  out.k = k;
  out.bigK = pi / (Scalar(2) * a);
  out.bigE = out.bigK * (Scalar(1) - csum);
  out.q = out.bigE / out.bigK;
  return out;
}

namespace detail {

// Descending-Landen evaluation of dn (the phi-chain of the AGM method):
// phi_N = 2^N a_N u, phi_{n-1} = (phi_n + asin(c_n/a_n sin phi_n))/2,
// dn = cos(phi_0)/cos(phi_1 - phi_0).
template <typename Scalar>
Scalar dn_agm(Scalar u, Scalar k) {
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar a[64], c[64];
  Scalar an = Scalar(1);
  Scalar bn = std::sqrt((Scalar(1) - k) * (Scalar(1) + k));
  int n = 0;
  a[0] = an;
  c[0] = k;
  while (n < 62 && std::abs(an - bn) > eps * an) {
    ++n;
    c[n] = (an - bn) / Scalar(2);
    const Scalar t = (an + bn) / Scalar(2);
    bn = std::sqrt(an * bn);
    an = t;
    a[n] = an;
  }
  Scalar phi = std::ldexp(a[n] * u, n);
  Scalar phi_prev = phi;
  for (int i = n; i >= 1; --i) {
    Scalar s = (c[i] / a[i]) * std::sin(phi);
    s = std::min(Scalar(1), std::max(Scalar(-1), s));
    phi_prev = phi;
    phi = (phi + std::asin(s)) / Scalar(2);
  }
  return std::cos(phi) / std::cos(phi_prev - phi);
}

}  // namespace detail

/// Jacobi dn(theta; k), range [sqrt(1-k^2), 1], period 2K(k) for k < 1.
///
/// The argument is reduced modulo the period before the Landen chain, and
/// dn is even in theta by construction.  For k above 1 - 1e-9 the AGM chain
/// degrades, so the soliton limit with its first k'^2 correction is used:
///   dn(u;k) ~ sech u + (k'^2/4)(sinh u cosh u + u) tanh u sech u.
template <typename Scalar>
Scalar jacobi_dn(Scalar theta, Scalar k) {
  if (!(k >= Scalar(0)) || k > Scalar(1) || !std::isfinite(theta))
    throw std::domain_error("jacobi_dn: need finite theta and 0 <= k <= 1");
  if (k == Scalar(0)) return Scalar(1);
  if (k == Scalar(1)) return Scalar(1) / std::cosh(theta);
  const Scalar twoK = Scalar(2) * elliptic_KE(k).bigK;
  const Scalar u = std::abs(std::remainder(theta, twoK));
  if (k > Scalar(1) - Scalar(1e-9)) {
    const Scalar kp2 = (Scalar(1) - k) * (Scalar(1) + k);
    const Scalar se = Scalar(1) / std::cosh(u);
    return se + kp2 / Scalar(4) * (std::sinh(u) * std::cosh(u) + u) * std::tanh(u) * se;
  }
  return detail::dn_agm(u, k);
}

}  // namespace gpwz
