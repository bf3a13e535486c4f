#include "infmmala/diagnostics.hpp"

#include <cmath>
#include <utility>

#include "infmmala/errors.hpp"

namespace infmmala {

double qv_estimate(const Path& x) {
  double qv = 0.0;
  for (int j = 1; j <= x.grid.N; ++j) {
    const double inc = x.at(j) - x.at(j - 1);
    qv += inc * inc;
  }
  return qv;
}

std::vector<int> trace_indices(const GridSpec& grid, std::span<const double> times) {
  std::vector<int> idx;
  idx.reserve(times.size());
  for (double t : times) idx.push_back(grid_index_of_time(grid, t));
  return idx;
}

SummaryBuilder::SummaryBuilder(int n_coords, std::vector<int> trace_idx)
    : trace_idx_(std::move(trace_idx)) {
  if (n_coords < 1) {
    throw DimensionMismatch("summary needs at least one coordinate, got " +
                            std::to_string(n_coords));
  }
  out_.coord_mean.assign(static_cast<std::size_t>(n_coords), 0.0);
  out_.coord_var.assign(static_cast<std::size_t>(n_coords), 0.0);
  m2_.assign(static_cast<std::size_t>(n_coords), 0.0);
  for (int j : trace_idx_) {
    if (j < 1 || j > n_coords) {
      throw IndexOutOfRange("trace index " + std::to_string(j) + " outside grid range [1, " +
                            std::to_string(n_coords) + "]");
    }
    out_.traces.emplace(j, std::vector<double>{});
  }
}

void SummaryBuilder::add(const StepRecord& rec, const Path& current) {
  if (current.values.size() != out_.coord_mean.size()) {
    throw DimensionMismatch("state has " + std::to_string(current.values.size()) +
                            " coordinates, summary expects " +
                            std::to_string(out_.coord_mean.size()));
  }
  ++n_;
  if (rec.accepted) ++accepted_;
  if (rec.metric_failure) ++metric_failures_;
  out_.qve_series.push_back(rec.qve_proposed);
  for (int j : trace_idx_) out_.traces[j].push_back(current.at(j));
  for (std::size_t i = 0; i < current.values.size(); ++i) {
    const double d = current.values[i] - out_.coord_mean[i];
    out_.coord_mean[i] += d / static_cast<double>(n_);
    m2_[i] += d * (current.values[i] - out_.coord_mean[i]);
  }
}

ChainSummary SummaryBuilder::finish() const {
  if (n_ == 0) throw EmptyChain("summary of an empty chain");
  ChainSummary out = out_;
  out.n_steps = n_;
  out.acceptance_rate = static_cast<double>(accepted_) / static_cast<double>(n_);
  out.metric_failures = metric_failures_;
  for (std::size_t i = 0; i < m2_.size(); ++i) {
    out.coord_var[i] = n_ > 1 ? m2_[i] / static_cast<double>(n_ - 1) : 0.0;
  }
  return out;
}

ChainSummary summarize(std::span<const StepRecord> records, std::span<const Path> states,
                       std::span<const int> trace_idx) {
  if (records.empty()) throw EmptyChain("summary of an empty chain");
  if (records.size() != states.size()) {
    throw DimensionMismatch("got " + std::to_string(records.size()) + " records but " +
                            std::to_string(states.size()) + " states");
  }
  const std::size_t n = static_cast<std::size_t>(states[0].grid.N);
  ChainSummary out;
  out.n_steps = static_cast<long long>(records.size());
  long long accepted = 0;
  for (const auto& rec : records) {
    if (rec.accepted) ++accepted;
    if (rec.metric_failure) ++out.metric_failures;
    out.qve_series.push_back(rec.qve_proposed);
  }
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(out.n_steps);
  for (int j : trace_idx) {
    auto& series = out.traces[j];
    series.reserve(states.size());
    for (const auto& x : states) series.push_back(x.at(j));
  }
  out.coord_mean.assign(n, 0.0);
  out.coord_var.assign(n, 0.0);
  for (const auto& x : states) {
    for (std::size_t i = 0; i < n; ++i) out.coord_mean[i] += x.values[i];
  }
  for (std::size_t i = 0; i < n; ++i) out.coord_mean[i] /= static_cast<double>(out.n_steps);
  if (out.n_steps > 1) {
    for (const auto& x : states) {
      for (std::size_t i = 0; i < n; ++i) {
        const double d = x.values[i] - out.coord_mean[i];
        out.coord_var[i] += d * d;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.coord_var[i] /= static_cast<double>(out.n_steps - 1);
  }
  return out;
}

GaussianPosterior exact_gaussian_posterior(const DiffusionTarget& target) {
  const auto& fns = target.fns();
  if (fns.obs_map.kind() != ObsMap::Kind::Identity) {
    throw UnsupportedModel("exact posterior requires the identity observation map, got " +
                           fns.obs_map.name());
  }
  const int N = target.grid().N;
  if (N > 500) {
    throw UnsupportedModel("exact posterior is dense-cost, grid capped at 500, got " +
                           std::to_string(N));
  }
  const double delta = target.grid().delta;
  const double c1 = fns.drift.c1;

  // Hessian of the potential: the observation part adds 1/sigma2 on observed
  // diagonal entries; the Girsanov part of an affine drift is the constant
  // tridiagonal d^2/dx_k dx_l of the quadratic Euler sums.
  SymTridiag p = target.prior_precision();
  const auto n = static_cast<std::size_t>(N);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    p.diag[i] += 2.0 * c1 + c1 * c1 * delta;
    p.off[i] += -c1;
  }
  for (int j : target.obs().indices) {
    p.diag[static_cast<std::size_t>(j - 1)] += 1.0 / target.obs().sigma2;
  }
  const CholBidiag pf = cholesky(p);

  // P m = L mu - grad_phi(0).
  const Path zero(target.grid(), std::vector<double>(n, 0.0));
  const std::vector<double> g0 = grad_phi(target, zero);
  const auto lmu = target.prior_precision_mean();
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = lmu[i] - g0[i];

  GaussianPosterior out;
  out.mean = solve(pf, rhs);
  out.marginal_var.resize(n);
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = 1.0;
    out.marginal_var[i] = solve(pf, e)[i];
    e[i] = 0.0;
  }
  return out;
}

}  // namespace infmmala
