#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "infmmala/diagnostics.hpp"
#include "infmmala/model.hpp"
#include "infmmala/tridiag.hpp"

namespace infmmala {

class Rng;

enum class Algo { InfMmala, InfMala, Mmala };

std::string algo_name(Algo algo);                  // "inf-mmala" | "inf-mala" | "mmala"
Algo algo_from_name(const std::string& name);

// Coefficients of the semi-implicit proposal
//   x' = a_keep * x + a_drift * S(x) + a_noise * w,   w ~ N(0, G(x)^{-1}).
// a_keep^2 + a_noise^2 = 1 (so the scheme preserves the reference Gaussian)
// and a_keep + a_drift = 1 (so fixed points of S are preserved in mean).
struct ProposalCoeffs {
  double h = 0.0;
  double a_keep = 0.0;
  double a_drift = 0.0;
  double a_noise = 0.0;

  static ProposalCoeffs from_step(double h);
};

// Which metric the kernel moves under: the Fisher/prior sum G(x) = D(x) + L,
// or the prior precision L alone (position-independent preconditioning).
enum class MetricMode { Fisher, PriorOnly };

// Current chain position with every per-position quantity the kernels reuse.
// All caches are plain recomputations from x; they are refreshed only when a
// candidate is accepted.
struct ChainState {
  Path x;
  double phi = 0.0;          // potential at x
  std::vector<double> grad;  // gradient of the potential at x
  SymTridiag g;              // metric at x
  CholBidiag gf;             // Cholesky factor of g
  std::vector<double> s;     // manifold drift S(x)
  double logdet_g = 0.0;
};

ChainState make_chain_state(const DiffusionTarget& t, Path x, MetricMode mode);

struct Proposal {
  Path x_prime;
  std::vector<double> v;  // the N((sqrt(h)/2) S(x), G(x)^{-1}) draw behind x_prime
};

// Semi-implicit proposal: v = (sqrt(h)/2) * S(x) + w with w ~ N(0, G(x)^{-1}),
// x' = a_keep * x + a_noise * v. The given-noise variant takes w directly.
Proposal propose(const ChainState& state, const ProposalCoeffs& c, Rng& rng);
Proposal propose_given_noise(const ChainState& state, const ProposalCoeffs& c,
                             std::span<const double> w);

// Inverts the proposal map for the reverse move:
// v = [(1 + h/4) x' - (1 - h/4) x] / sqrt(h).
std::vector<double> implied_noise(const Path& x_prime, const Path& x, double h);

// Log density ratio of the proposal noise law N((sqrt(h)/2) s, G^{-1}) to the
// reference noise law N(0, prior^{-1}), evaluated at v, up to the
// state-independent constant +1/2 log|prior| (it cancels between the forward
// and reverse calls in log_accept_ratio, so it is not computed):
//   (sqrt(h)/2) s^T G v - (h/8) s^T G s - 1/2 [v^T G v - v^T prior v]
//   + 1/2 logdet_g.
double log_noise_density_ratio(std::span<const double> v, std::span<const double> s,
                               const SymTridiag& g, double logdet_g, const SymTridiag& prior,
                               double h);

// Log Metropolis-Hastings ratio of the semi-implicit kernel between the
// current state and a candidate built from its proposal. Assembled from
// centered quantities (prior mean subtracted from path, drift and noise), for
// which the forward/reverse reference terms cancel exactly; equals the dense
// finite-dimensional ratio target(x') q(x'->x) / target(x) q(x->x') for every
// pair of states, including nonzero-origin grids.
double log_accept_ratio(const DiffusionTarget& t, const ChainState& state, const ChainState& cand,
                        double h);

// Accept rule shared by all kernels: log u < log_ratio with u ~ Uniform(0,1].
bool accepts(double log_ratio, double u);

struct StepResult {
  ChainState state;
  StepRecord record;
};

// One transition of each kernel. A candidate whose metric fails to factor is
// rejected and flagged in the record rather than aborting the chain.
StepResult step_inf_mmala(const DiffusionTarget& t, ChainState state, const ProposalCoeffs& c,
                          Rng& rng);
StepResult step_inf_mala(const DiffusionTarget& t, ChainState state, const ProposalCoeffs& c,
                         Rng& rng);

// Explicit-scheme baseline: x' = x + (h/2) G^{-1} grad log-target + sqrt(h) w,
// w ~ N(0, G(x)^{-1}), with the standard finite-dimensional MH correction.
StepResult step_mmala(const DiffusionTarget& t, ChainState state, double h, Rng& rng);

struct InitStrategy {
  enum class Kind { Prior, FlatBridge, DataPinned };
  Kind kind = Kind::Prior;
  double value = 0.0;  // FlatBridge level

  static InitStrategy prior() { return {Kind::Prior, 0.0}; }
  static InitStrategy flat_bridge(double v) { return {Kind::FlatBridge, v}; }
  static InitStrategy data_pinned() { return {Kind::DataPinned, 0.0}; }
};

// prior: draw from N(mu, L^{-1}). flat_bridge(v): pin every observation index
// at v, Brownian bridges in between. data_pinned: pin observation index j_i at
// f^{-1}(y_i) (requires an invertible observation map).
Path init_path(const InitStrategy& strategy, const DiffusionTarget& t, Rng& rng);
Path init_path_from_noise(const InitStrategy& strategy, const DiffusionTarget& t,
                          std::span<const double> xi);

struct RunHooks {
  std::vector<int> trace_idx;  // grid indices recorded per step into the summary
  std::function<void(long long iteration, const StepRecord& rec, const Path& current)> on_step;
};

// Runs the selected kernel for `iters` steps from the initialized path,
// aggregating records through a SummaryBuilder. Deterministic in (seed,
// inputs). One chain is strictly sequential; concurrent chains need their own
// seed and share the target read-only.
ChainSummary run_chain(const DiffusionTarget& t, Algo algo, double h, long long iters,
                       const InitStrategy& init, std::uint64_t seed, const RunHooks& hooks = {});

}  // namespace infmmala
