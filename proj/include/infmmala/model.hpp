#pragma once

#include <span>
#include <string>
#include <vector>

#include "infmmala/tridiag.hpp"

namespace infmmala {

class Rng;

// Uniform time grid t_j = j*delta for j = 1..N, with the process pinned at
// t = 0 to the fixed origin x_star. The horizon is T = N*delta.
struct GridSpec {
  int N = 0;
  double delta = 0.0;
  double x_star = 0.0;

  double horizon() const { return N * delta; }
  bool operator==(const GridSpec&) const = default;
};

// Grid index j in [1, N] with j*delta == t (within 1e-9 relative rounding).
// Throws OffGridTime otherwise.
int grid_index_of_time(const GridSpec& grid, double t);

// Discretized path (x_1, ..., x_N). The origin x(0) = x_star is conditioning
// data, not state, and is never stored in `values`.
struct Path {
  GridSpec grid;
  std::vector<double> values;

  Path() = default;
  Path(GridSpec grid, std::vector<double> values);

  // Value at grid index j in [0, N]; j = 0 resolves to the fixed origin.
  double at(int j) const { return j == 0 ? grid.x_star : values[static_cast<std::size_t>(j - 1)]; }
};

// Observations y_i = f(x at index j_i) + noise, indices 1-based on the grid,
// strictly increasing.
struct ObservationSet {
  std::vector<int> indices;
  std::vector<double> values;
  double sigma2 = 0.0;

  int count() const { return static_cast<int>(indices.size()); }
};

// Drift a(x) = c0 + c1*x.
struct DriftFn {
  double c0 = 0.0;
  double c1 = 0.0;

  static DriftFn affine(double c0, double c1) { return {c0, c1}; }

  double operator()(double x) const { return c0 + c1 * x; }
  double deriv(double) const { return c1; }
  std::string name() const;
};

// Observation map f with derivative and (where defined) inverse.
//
// power32 is the C^1 sign-extension of x^{3/2}:
//   f(x) = sign(x)|x|^{3/2},  f'(x) = 1.5 |x|^{1/2},  f^{-1}(y) = sign(y)|y|^{2/3}.
// constant(c) has f' = 0 everywhere and no inverse; it makes observations
// carry no information about the path.
class ObsMap {
 public:
  enum class Kind { Identity, Power32, Constant };

  static ObsMap identity() { return ObsMap(Kind::Identity, 0.0); }
  static ObsMap power32() { return ObsMap(Kind::Power32, 0.0); }
  static ObsMap constant(double value) { return ObsMap(Kind::Constant, value); }
  static ObsMap by_name(const std::string& name);  // "identity" | "power32"

  double value(double x) const;
  double deriv(double x) const;
  bool invertible() const { return kind_ != Kind::Constant; }
  double inverse(double y) const;  // throws NonInvertibleObsMap

  Kind kind() const { return kind_; }
  std::string name() const;

 private:
  ObsMap(Kind kind, double c) : kind_(kind), c_(c) {}
  Kind kind_;
  double c_;
};

struct ModelFunctions {
  DriftFn drift;
  ObsMap obs_map = ObsMap::identity();
};

// Prior precision of the discretized Brownian motion pinned at x_star:
// diag = [2, ..., 2, 1]/delta, off = [-1, ..., -1]/delta.
SymTridiag build_prior_precision(const GridSpec& grid);

// Immutable bundle of grid, data and model functions, with the prior
// precision L and the vector L*mu = (x_star/delta)*e_1 precomputed.
class DiffusionTarget {
 public:
  DiffusionTarget(GridSpec grid, ObservationSet obs, ModelFunctions fns);

  const GridSpec& grid() const { return grid_; }
  const ObservationSet& obs() const { return obs_; }
  const ModelFunctions& fns() const { return fns_; }
  const SymTridiag& prior_precision() const { return prior_precision_; }
  std::span<const double> prior_precision_mean() const { return lmu_; }
  double x_star() const { return grid_.x_star; }

 private:
  GridSpec grid_;
  ObservationSet obs_;
  ModelFunctions fns_;
  SymTridiag prior_precision_;
  std::vector<double> lmu_;
};

// Negative log change-of-measure density against the Brownian prior, split
// into the observation part sum_i (y_i - f(x_{j_i}))^2 / (2 sigma^2) and the
// Girsanov part -int a dx + 1/2 int a^2 ds (left-point Euler sums, x_0 = x*).
struct Potential {
  double total = 0.0;
  double obs = 0.0;
  double girsanov = 0.0;
};

Potential phi(const DiffusionTarget& t, const Path& x);

// Exact gradient of phi(...).total for the implemented discretization.
std::vector<double> grad_phi(const DiffusionTarget& t, const Path& x);

// Fisher metric G(x) = D(x) + L with D diagonal, D_j = f'(x_j)^2/sigma^2 at
// observation indices and zero elsewhere. D >= 0, so G inherits positive
// definiteness from L.
SymTridiag metric_tensor(const DiffusionTarget& t, const Path& x);

// Manifold drift S(x) = -G(x)^{-1} { grad phi(x) - D(x) x - L mu }, using the
// diagonality of D(x) = G(x) - L.
std::vector<double> s_vector(const DiffusionTarget& t, const Path& x, const SymTridiag& g,
                             const CholBidiag& gf);
std::vector<double> s_vector_with_grad(const DiffusionTarget& t, const Path& x,
                                       std::span<const double> grad, const SymTridiag& g,
                                       const CholBidiag& gf);

// Euler-Maruyama: x_j = x_{j-1} + a(x_{j-1}) delta + sqrt(delta) xi_j.
Path simulate_path(const GridSpec& grid, const DriftFn& drift, Rng& rng);
Path simulate_path_from_noise(const GridSpec& grid, const DriftFn& drift,
                              std::span<const double> xi);

// y_i = f(x at index j_i) + sqrt(sigma2) zeta_i.
ObservationSet simulate_observations(const Path& x, std::vector<int> indices, const ObsMap& f,
                                     double sigma2, Rng& rng);
ObservationSet simulate_observations_from_noise(const Path& x, std::vector<int> indices,
                                                const ObsMap& f, double sigma2,
                                                std::span<const double> zeta);

// Path through the given pins (1-based indices, strictly increasing), with
// x(0) = x_star as an implicit pin: standard sequential Brownian bridge
// between consecutive pins, free Brownian motion beyond the last pin.
// The from_noise variant consumes one standard normal per unpinned index,
// in grid order.
Path brownian_bridge_fill(const GridSpec& grid, std::span<const int> pin_indices,
                          std::span<const double> pin_values, Rng& rng);
Path brownian_bridge_fill_from_noise(const GridSpec& grid, std::span<const int> pin_indices,
                                     std::span<const double> pin_values,
                                     std::span<const double> xi);

}  // namespace infmmala
