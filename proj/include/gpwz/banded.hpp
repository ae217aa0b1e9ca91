#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace gpwz {

/// Banded LU with partial pivoting, LAPACK gbtrf-style storage: the factor
/// array has 2*kl+ku+1 rows (kl extra rows of fill above the band) and entry
/// (i,j) of the matrix lives at ab(kl+ku+i-j, j).
template <typename Scalar>
class BandedLU {
 public:
  BandedLU(int n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), ab_(Eigen::MatrixX<Scalar>::Zero(2 * kl + ku + 1, n)),
        piv_(n) {}

  Scalar& at(int i, int j) { return ab_(kl_ + ku_ + i - j, j); }
  Scalar at(int i, int j) const { return ab_(kl_ + ku_ + i - j, j); }

  void reset() { ab_.setZero(); factored_ = false; }

  /// In-place factorization; throws std::runtime_error on an exact zero pivot.
  void factorize() {
    for (int j = 0; j < n_; ++j) {
      const int km = std::min(kl_, n_ - 1 - j);
      int p = 0;
      for (int i = 1; i <= km; ++i)
        if (std::abs(at(j + i, j)) > std::abs(at(j + p, j))) p = i;
      piv_[j] = j + p;
      if (at(j + p, j) == Scalar(0))
        throw std::runtime_error("BandedLU: singular matrix (zero pivot)");
      const int jend = std::min(n_ - 1, j + ku_ + kl_);
      if (p != 0)
        for (int c = j; c <= jend; ++c) std::swap(at(j, c), at(j + p, c));
      for (int i = 1; i <= km; ++i) {
        const Scalar mult = at(j + i, j) / at(j, j);
        at(j + i, j) = mult;
        for (int c = j + 1; c <= jend; ++c) at(j + i, c) -= mult * at(j, c);
      }
    }
    factored_ = true;
  }

  Eigen::VectorX<Scalar> solve(Eigen::VectorX<Scalar> b) const {
    if (!factored_) throw std::logic_error("BandedLU: solve before factorize");
    for (int j = 0; j < n_; ++j) {
      if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
      const int km = std::min(kl_, n_ - 1 - j);
      for (int i = 1; i <= km; ++i) b[j + i] -= at(j + i, j) * b[j];
    }
    for (int j = n_ - 1; j >= 0; --j) {
      b[j] /= at(j, j);
      const int i0 = std::max(0, j - ku_ - kl_);
      for (int i = i0; i < j; ++i) b[i] -= at(i, j) * b[j];
    }
    return b;
  }

  int size() const { return n_; }

 private:
  int n_, kl_, ku_;
  Eigen::MatrixX<Scalar> ab_;
  std::vector<int> piv_;
  bool factored_ = false;
};

}  // namespace gpwz
