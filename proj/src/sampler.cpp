#include "infmmala/sampler.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "infmmala/errors.hpp"
#include "infmmala/rng.hpp"

namespace infmmala {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_same_grid(const Path& a, const Path& b) {
  if (!(a.grid == b.grid)) {
    throw DimensionMismatch("paths live on different grids");
  }
}

}  // namespace

std::string algo_name(Algo algo) {
  switch (algo) {
    case Algo::InfMmala:
      return "inf-mmala";
    case Algo::InfMala:
      return "inf-mala";
    case Algo::Mmala:
      return "mmala";
  }
  std::abort();
}

Algo algo_from_name(const std::string& name) {
  if (name == "inf-mmala") return Algo::InfMmala;
  if (name == "inf-mala") return Algo::InfMala;
  if (name == "mmala") return Algo::Mmala;
  throw ValidationError("algo", "unknown algorithm '" + name +
                                    "' (expected inf-mmala, inf-mala or mmala)");
}

ProposalCoeffs ProposalCoeffs::from_step(double h) {
  if (!std::isfinite(h) || !(h > 0.0)) {
    std::ostringstream os;
    os << "step size h must be a positive finite real, got " << h;
    throw Error(os.str());
  }
  const double denom = 1.0 + h / 4.0;
  return {h, (1.0 - h / 4.0) / denom, (h / 2.0) / denom, std::sqrt(h) / denom};
}

ChainState make_chain_state(const DiffusionTarget& t, Path x, MetricMode mode) {
  ChainState st;
  st.phi = phi(t, x).total;
  st.grad = grad_phi(t, x);
  st.g = mode == MetricMode::Fisher ? metric_tensor(t, x) : t.prior_precision();
  st.gf = cholesky(st.g);
  st.logdet_g = log_det(st.gf);
  st.s = s_vector_with_grad(t, x, st.grad, st.g, st.gf);
  st.x = std::move(x);
  return st;
}

Proposal propose_given_noise(const ChainState& state, const ProposalCoeffs& c,
                             std::span<const double> w) {
  const auto n = state.x.values.size();
  if (w.size() != n) {
    throw DimensionMismatch("noise vector has " + std::to_string(w.size()) + " values for " +
                            std::to_string(n) + " coordinates");
  }
  const double half_sqrt_h = 0.5 * std::sqrt(c.h);
  Proposal p;
  p.v.resize(n);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.v[i] = half_sqrt_h * state.s[i] + w[i];
    values[i] = c.a_keep * state.x.values[i] + c.a_noise * p.v[i];
  }
  p.x_prime = Path(state.x.grid, std::move(values));
  return p;
}

Proposal propose(const ChainState& state, const ProposalCoeffs& c, Rng& rng) {
  return propose_given_noise(state, c, sample_zero_mean(state.gf, rng));
}

std::vector<double> implied_noise(const Path& x_prime, const Path& x, double h) {
  require_same_grid(x_prime, x);
  const double inv_sqrt_h = 1.0 / std::sqrt(h);
  const double cp = 1.0 + h / 4.0;
  const double cm = 1.0 - h / 4.0;
  std::vector<double> v(x.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = (cp * x_prime.values[i] - cm * x.values[i]) * inv_sqrt_h;
  }
  return v;
}

double log_noise_density_ratio(std::span<const double> v, std::span<const double> s,
                               const SymTridiag& g, double logdet_g, const SymTridiag& prior,
                               double h) {
  if (v.size() != s.size() || static_cast<int>(v.size()) != g.n() ||
      g.n() != prior.n()) {
    throw DimensionMismatch("noise/drift/metric sizes disagree");
  }
  const double sqrt_h = std::sqrt(h);
  return 0.5 * sqrt_h * quad_form(g, s, v) - (h / 8.0) * quad_form(g, s, s) -
         0.5 * (quad_form(g, v, v) - quad_form(prior, v, v)) + 0.5 * logdet_g;
}

namespace {

// Forward/reverse noise and drift, recentered at the prior mean. The
// uncentered assembly is exact only for a zero prior mean; subtracting mu
// from the path (and hence (sqrt(h)/2) mu from each implied noise, mu from
// each drift) restores the cancellation of the reference terms for any
// origin.
double centered_half(const DiffusionTarget& t, const ChainState& from, const ChainState& to,
                     double h) {
  std::vector<double> v = implied_noise(to.x, from.x, h);
  const double mu = t.x_star();
  const double noise_shift = 0.5 * std::sqrt(h) * mu;
  for (double& vi : v) vi -= noise_shift;
  std::vector<double> s = from.s;
  for (double& si : s) si -= mu;
  return -from.phi +
         log_noise_density_ratio(v, s, from.g, from.logdet_g, t.prior_precision(), h);
}

}  // namespace

double log_accept_ratio(const DiffusionTarget& t, const ChainState& state, const ChainState& cand,
                        double h) {
  return centered_half(t, cand, state, h) - centered_half(t, state, cand, h);
}

bool accepts(double log_ratio, double u) { return std::log(u) < log_ratio; }

namespace {

double clamped_acc_prob(double log_ratio) {
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

StepResult finish_step(ChainState state, ChainState cand, double log_ratio, double qve_proposed,
                       Rng& rng) {
  StepRecord rec;
  rec.log_ratio = log_ratio;
  rec.acc_prob = clamped_acc_prob(log_ratio);
  rec.qve_proposed = qve_proposed;
  rec.accepted = accepts(log_ratio, rng.uniform());
  return {rec.accepted ? std::move(cand) : std::move(state), rec};
}

StepResult rejected_metric_failure(ChainState state, double qve_proposed) {
  StepRecord rec;
  rec.accepted = false;
  rec.log_ratio = kNegInf;
  rec.acc_prob = 0.0;
  rec.qve_proposed = qve_proposed;
  rec.metric_failure = true;
  return {std::move(state), rec};
}

StepResult step_semi_implicit(const DiffusionTarget& t, ChainState state, const ProposalCoeffs& c,
                              MetricMode mode, Rng& rng) {
  Proposal p = propose(state, c, rng);
  const double qve_proposed = qv_estimate(p.x_prime);
  ChainState cand;
  try {
    cand = make_chain_state(t, std::move(p.x_prime), mode);
  } catch (const NotPositiveDefinite&) {
    return rejected_metric_failure(std::move(state), qve_proposed);
  }
  const double log_ratio = log_accept_ratio(t, state, cand, c.h);
  return finish_step(std::move(state), std::move(cand), log_ratio, qve_proposed, rng);
}

}  // namespace

StepResult step_inf_mmala(const DiffusionTarget& t, ChainState state, const ProposalCoeffs& c,
                          Rng& rng) {
  return step_semi_implicit(t, std::move(state), c, MetricMode::Fisher, rng);
}

StepResult step_inf_mala(const DiffusionTarget& t, ChainState state, const ProposalCoeffs& c,
                         Rng& rng) {
  return step_semi_implicit(t, std::move(state), c, MetricMode::PriorOnly, rng);
}

namespace {

// Mean of the explicit-scheme proposal from `st`: x + (h/2) G^{-1} grad log-target,
// where grad log-target = -grad phi - L (x - mu).
std::vector<double> explicit_mean(const DiffusionTarget& t, const ChainState& st, double h) {
  const auto n = st.x.values.size();
  const double mu = t.x_star();
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = st.x.values[i] - mu;
  std::vector<double> lz = matvec(t.prior_precision(), z);
  std::vector<double> grad_log(n);
  for (std::size_t i = 0; i < n; ++i) grad_log[i] = -st.grad[i] - lz[i];
  std::vector<double> drift = solve(st.gf, grad_log);
  std::vector<double> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = st.x.values[i] + 0.5 * h * drift[i];
  return m;
}

// log target(x) + log q(x -> other), dropping constants shared by both
// directions.
double explicit_half(const DiffusionTarget& t, const ChainState& from, const Path& to, double h) {
  const auto n = from.x.values.size();
  const double mu = t.x_star();
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = from.x.values[i] - mu;
  const double log_target = -from.phi - 0.5 * quad_form(t.prior_precision(), z, z);
  std::vector<double> r = explicit_mean(t, from, h);
  for (std::size_t i = 0; i < n; ++i) r[i] = to.values[i] - r[i];
  const double log_q = 0.5 * from.logdet_g - quad_form(from.g, r, r) / (2.0 * h);
  return log_target + log_q;
}

}  // namespace

StepResult step_mmala(const DiffusionTarget& t, ChainState state, double h, Rng& rng) {
  if (!std::isfinite(h) || !(h > 0.0)) {
    std::ostringstream os;
    os << "step size h must be a positive finite real, got " << h;
    throw Error(os.str());
  }
  const auto n = state.x.values.size();
  std::vector<double> m = explicit_mean(t, state, h);
  std::vector<double> w = sample_zero_mean(state.gf, rng);
  const double sqrt_h = std::sqrt(h);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = m[i] + sqrt_h * w[i];
  Path x_prime(state.x.grid, std::move(values));
  const double qve_proposed = qv_estimate(x_prime);

  ChainState cand;
  try {
    cand = make_chain_state(t, std::move(x_prime), MetricMode::Fisher);
  } catch (const NotPositiveDefinite&) {
    return rejected_metric_failure(std::move(state), qve_proposed);
  }
  const double log_ratio =
      explicit_half(t, cand, state.x, h) - explicit_half(t, state, cand.x, h);
  return finish_step(std::move(state), std::move(cand), log_ratio, qve_proposed, rng);
}

Path init_path_from_noise(const InitStrategy& strategy, const DiffusionTarget& t,
                          std::span<const double> xi) {
  const auto& grid = t.grid();
  switch (strategy.kind) {
    case InitStrategy::Kind::Prior: {
      if (static_cast<int>(xi.size()) != grid.N) {
        throw DimensionMismatch("noise vector has " + std::to_string(xi.size()) +
                                " values for grid size " + std::to_string(grid.N));
      }
      const CholBidiag lf = cholesky(t.prior_precision());
      std::vector<double> values = backsolve_transposed(lf, xi);
      for (double& v : values) v += grid.x_star;
      return Path(grid, std::move(values));
    }
    case InitStrategy::Kind::FlatBridge: {
      const auto& idx = t.obs().indices;
      std::vector<double> pins(idx.size(), strategy.value);
      return brownian_bridge_fill_from_noise(grid, idx, pins, xi);
    }
    case InitStrategy::Kind::DataPinned: {
      const auto& idx = t.obs().indices;
      std::vector<double> pins(idx.size());
      for (std::size_t i = 0; i < pins.size(); ++i) {
        pins[i] = t.fns().obs_map.inverse(t.obs().values[i]);
      }
      return brownian_bridge_fill_from_noise(grid, idx, pins, xi);
    }
  }
  std::abort();
}

Path init_path(const InitStrategy& strategy, const DiffusionTarget& t, Rng& rng) {
  const std::size_t draws =
      strategy.kind == InitStrategy::Kind::Prior
          ? static_cast<std::size_t>(t.grid().N)
          : static_cast<std::size_t>(t.grid().N) - t.obs().indices.size();
  std::vector<double> xi(draws);
  rng.fill_normal(xi);
  return init_path_from_noise(strategy, t, xi);
}

ChainSummary run_chain(const DiffusionTarget& t, Algo algo, double h, long long iters,
                       const InitStrategy& init, std::uint64_t seed, const RunHooks& hooks) {
  if (iters < 1) {
    throw EmptyChain("chain needs at least one iteration, got " + std::to_string(iters));
  }
  Rng rng(seed);
  const MetricMode mode = algo == Algo::InfMala ? MetricMode::PriorOnly : MetricMode::Fisher;
  ChainState state = make_chain_state(t, init_path(init, t, rng), mode);
  const ProposalCoeffs coeffs = ProposalCoeffs::from_step(h);

  SummaryBuilder builder(t.grid().N, hooks.trace_idx);
  for (long long i = 0; i < iters; ++i) {
    StepResult r = algo == Algo::Mmala
                       ? step_mmala(t, std::move(state), h, rng)
                       : step_semi_implicit(t, std::move(state), coeffs, mode, rng);
    builder.add(r.record, r.state.x);
    if (hooks.on_step) hooks.on_step(i, r.record, r.state.x);
    state = std::move(r.state);
  }
  return builder.finish();
}

}  // namespace infmmala
