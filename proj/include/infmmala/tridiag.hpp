#pragma once

#include <span>
#include <vector>

#include "infmmala/errors.hpp"

namespace infmmala {

class Rng;

// Symmetric tridiagonal matrix stored as main diagonal plus the shared
// sub/super-diagonal. Always holds precision-side objects (prior precision,
// metric tensors), never covariances, so inverses are applied through the
// Cholesky factor rather than formed.
struct SymTridiag {
  std::vector<double> diag;  // length n
  std::vector<double> off;   // length n - 1

  SymTridiag() = default;
  SymTridiag(std::vector<double> diag, std::vector<double> off);

  int n() const { return static_cast<int>(diag.size()); }
  static SymTridiag identity(int n);
};

// Lower-bidiagonal Cholesky factor F of a SymTridiag M, with F F^T = M.
// d is the (positive) diagonal of F, e its sub-diagonal.
struct CholBidiag {
  std::vector<double> d;
  std::vector<double> e;

  int n() const { return static_cast<int>(d.size()); }
};

// Factor an SPD tridiagonal matrix in O(n). Throws NotPositiveDefinite when
// a pivot falls below 1e-300; for the metric tensors built in this library
// that indicates a model bug, and chain drivers turn it into a rejection.
CholBidiag cholesky(const SymTridiag& m);

// Solve (F F^T) z = b by forward then backward substitution.
std::vector<double> solve(const CholBidiag& f, std::span<const double> b);

// Solve F^T v = z. With z ~ N(0, I) the result has covariance (F F^T)^{-1};
// sample_zero_mean draws z internally.
std::vector<double> backsolve_transposed(const CholBidiag& f, std::span<const double> z);
std::vector<double> sample_zero_mean(const CholBidiag& f, Rng& rng);

// log|F F^T| = 2 sum_i log d[i].
double log_det(const CholBidiag& f);

std::vector<double> matvec(const SymTridiag& m, std::span<const double> v);

// v^T M w without forming any intermediate vector.
double quad_form(const SymTridiag& m, std::span<const double> v, std::span<const double> w);

}  // namespace infmmala
