#pragma once

#include <map>
#include <span>
#include <vector>

#include "infmmala/model.hpp"

namespace infmmala {

// Outcome of one Metropolis-Hastings step.
struct StepRecord {
  bool accepted = false;
  double log_ratio = 0.0;
  double acc_prob = 0.0;      // min(1, exp(log_ratio))
  double qve_proposed = 0.0;  // quadratic-variation estimate of the proposal
  bool metric_failure = false;  // candidate metric not SPD; forced rejection
};

// QVe = sum_{j=1..N} (x_j - x_{j-1})^2 with x_0 = x_star.
double qv_estimate(const Path& x);

// Grid indices of the requested times. Throws OffGridTime for times that are
// not grid points.
std::vector<int> trace_indices(const GridSpec& grid, std::span<const double> times);

struct ChainSummary {
  long long n_steps = 0;
  double acceptance_rate = 0.0;
  long long metric_failures = 0;
  std::map<int, std::vector<double>> traces;  // grid index -> value per step
  std::vector<double> qve_series;             // QVe of each proposed path
  std::vector<double> coord_mean;             // over kept states, all coordinates
  std::vector<double> coord_var;              // sample variance (n - 1)
};

// Streaming aggregation (Welford moments) so chains never need to be stored.
class SummaryBuilder {
 public:
  SummaryBuilder(int n_coords, std::vector<int> trace_idx);

  // `current` is the state after the accept/reject decision of `rec`.
  void add(const StepRecord& rec, const Path& current);
  ChainSummary finish() const;  // throws EmptyChain before any add()

 private:
  long long n_ = 0;
  long long accepted_ = 0;
  long long metric_failures_ = 0;
  std::vector<int> trace_idx_;
  ChainSummary out_;
  std::vector<double> m2_;  // Welford sum of squared deviations
};

// Two-pass reference over stored per-step states; used to cross-check the
// streaming builder and by callers that already hold the chain.
ChainSummary summarize(std::span<const StepRecord> records, std::span<const Path> states,
                       std::span<const int> trace_idx);

struct GaussianPosterior {
  std::vector<double> mean;
  std::vector<double> marginal_var;
};

// Exact posterior for the linear-Gaussian special case (affine drift,
// identity observation map), where the change of measure is quadratic: the
// posterior is N(m, P^{-1}) with P = L + H, H the constant Hessian of the
// potential, and P m = L mu - grad(0). Dense-cost marginal variances, so the
// grid is capped at N <= 500; test oracle, not a sampling component.
GaussianPosterior exact_gaussian_posterior(const DiffusionTarget& target);

}  // namespace infmmala
