#include "infmmala/tridiag.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "infmmala/rng.hpp"

namespace infmmala {

namespace {

constexpr double kPivotTol = 1e-300;

void require_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + ": expected length " +
                            std::to_string(want) + ", got " + std::to_string(got));
  }
}

}  // namespace

SymTridiag::SymTridiag(std::vector<double> diag_in, std::vector<double> off_in)
    : diag(std::move(diag_in)), off(std::move(off_in)) {
  if (diag.empty()) throw DimensionMismatch("SymTridiag: dimension must be >= 1");
  require_length(off.size(), diag.size() - 1, "SymTridiag off-diagonal");
}

SymTridiag SymTridiag::identity(int n) {
  return SymTridiag(std::vector<double>(static_cast<std::size_t>(n), 1.0),
                    std::vector<double>(static_cast<std::size_t>(n - 1), 0.0));
}

CholBidiag cholesky(const SymTridiag& m) {
  const std::size_t n = m.diag.size();
  CholBidiag f;
  f.d.resize(n);
  f.e.resize(n - 1);

  double pivot = m.diag[0];
  if (!(pivot > kPivotTol)) throw NotPositiveDefinite("cholesky: pivot 0 not positive");
  f.d[0] = std::sqrt(pivot);
  for (std::size_t i = 1; i < n; ++i) {
    f.e[i - 1] = m.off[i - 1] / f.d[i - 1];
    pivot = m.diag[i] - f.e[i - 1] * f.e[i - 1];
    if (!(pivot > kPivotTol)) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(i) + " not positive");
    }
    f.d[i] = std::sqrt(pivot);
  }
  return f;
}

std::vector<double> solve(const CholBidiag& f, std::span<const double> b) {
  const std::size_t n = f.d.size();
  require_length(b.size(), n, "solve rhs");

  std::vector<double> z(n);
  z[0] = b[0] / f.d[0];
  for (std::size_t i = 1; i < n; ++i) {
    z[i] = (b[i] - f.e[i - 1] * z[i - 1]) / f.d[i];
  }
  z[n - 1] /= f.d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    z[i] = (z[i] - f.e[i] * z[i + 1]) / f.d[i];
  }
  return z;
}

std::vector<double> backsolve_transposed(const CholBidiag& f, std::span<const double> z) {
  const std::size_t n = f.d.size();
  require_length(z.size(), n, "backsolve rhs");

  std::vector<double> v(n);
  v[n - 1] = z[n - 1] / f.d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    v[i] = (z[i] - f.e[i] * v[i + 1]) / f.d[i];
  }
  return v;
}

std::vector<double> sample_zero_mean(const CholBidiag& f, Rng& rng) {
  std::vector<double> z(f.d.size());
  rng.fill_normal(z);
  return backsolve_transposed(f, z);
}

double log_det(const CholBidiag& f) {
  double acc = 0.0;
  for (double di : f.d) acc += std::log(di);
  return 2.0 * acc;
}

std::vector<double> matvec(const SymTridiag& m, std::span<const double> v) {
  const std::size_t n = m.diag.size();
  require_length(v.size(), n, "matvec operand");

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = m.diag[i] * v[i];
    if (i > 0) acc += m.off[i - 1] * v[i - 1];
    if (i + 1 < n) acc += m.off[i] * v[i + 1];
    out[i] = acc;
  }
  return out;
}

double quad_form(const SymTridiag& m, std::span<const double> v, std::span<const double> w) {
  const std::size_t n = m.diag.size();
  require_length(v.size(), n, "quad_form left operand");
  require_length(w.size(), n, "quad_form right operand");

  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += m.diag[i] * v[i] * w[i];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    acc += m.off[i] * (v[i] * w[i + 1] + v[i + 1] * w[i]);
  }
  return acc;
}

}  // namespace infmmala
