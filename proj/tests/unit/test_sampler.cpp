#include <cmath>
#include <random>
#include <vector>

#include "dense_oracle.hpp"
#include "doctest.h"
#include "infmmala/errors.hpp"
#include "infmmala/model.hpp"
#include "infmmala/rng.hpp"
#include "infmmala/sampler.hpp"

using namespace infmmala;

namespace {

DiffusionTarget make_target(const GridSpec& grid, const ModelFunctions& fns,
                            std::vector<int> idx, std::vector<double> y, double sigma2) {
  ObservationSet obs;
  obs.indices = std::move(idx);
  obs.values = std::move(y);
  obs.sigma2 = sigma2;
  return DiffusionTarget(grid, obs, fns);
}

Path random_path(const GridSpec& grid, std::mt19937_64& gen, double center, double spread) {
  std::normal_distribution<double> z;
  std::vector<double> v(static_cast<std::size_t>(grid.N));
  for (auto& x : v) x = center + spread * z(gen);
  return Path(grid, std::move(v));
}

}  // namespace

TEST_CASE("proposal coefficients satisfy the scheme identities") {
  for (double h : {1e-5, 0.1, 1.0, 4.0, 25.0}) {
    const auto c = ProposalCoeffs::from_step(h);
    CHECK(c.a_keep == doctest::Approx((1.0 - h / 4.0) / (1.0 + h / 4.0)).epsilon(1e-15));
    CHECK(c.a_drift == doctest::Approx((h / 2.0) / (1.0 + h / 4.0)).epsilon(1e-15));
    CHECK(c.a_noise == doctest::Approx(std::sqrt(h) / (1.0 + h / 4.0)).epsilon(1e-15));
    CHECK(c.a_keep * c.a_keep + c.a_noise * c.a_noise == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.a_keep + c.a_drift == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(ProposalCoeffs::from_step(0.0), Error);
  CHECK_THROWS_AS(ProposalCoeffs::from_step(-1.0), Error);
  CHECK_THROWS_AS(ProposalCoeffs::from_step(std::nan("")), Error);
}

TEST_CASE("algo names round-trip and reject unknowns") {
  for (Algo a : {Algo::InfMmala, Algo::InfMala, Algo::Mmala}) {
    CHECK(algo_from_name(algo_name(a)) == a);
  }
  CHECK_THROWS_AS(algo_from_name("hmc"), ValidationError);
}

TEST_CASE("proposal map and its inverse are consistent") {
  std::mt19937_64 gen(5);
  const GridSpec grid{8, 0.25, 2.0};
  const ModelFunctions fns{DriftFn::affine(4.0, -1.0), ObsMap::power32()};
  const auto t = make_target(grid, fns, {4, 8}, {5.0, 7.0}, 0.1);
  Rng rng(31);
  for (double h : {0.3, 1.0, 2.5}) {
    const auto c = ProposalCoeffs::from_step(h);
    const ChainState st = make_chain_state(t, random_path(grid, gen, 2.0, 0.7),
                                           MetricMode::Fisher);
    const Proposal p = propose(st, c, rng);
    const std::vector<double> v = implied_noise(p.x_prime, st.x, h);
    for (int i = 0; i < grid.N; ++i) {
      CHECK(v[static_cast<std::size_t>(i)] ==
            doctest::Approx(p.v[static_cast<std::size_t>(i)]).epsilon(1e-11));
    }
  }
}

// The reversibility anchor: on the pure Gaussian reference (no observations,
// zero drift) the kernel must accept every proposal exactly, for any step
// size, because the semi-implicit scheme preserves that law.
TEST_CASE("log ratio vanishes on the reference Gaussian for all step sizes") {
  for (int N : {2, 100}) {
    const GridSpec grid{N, 0.5, 2.0};
    const ModelFunctions fns{DriftFn::affine(0.0, 0.0), ObsMap::identity()};
    ObservationSet none;
    none.sigma2 = 1.0;
    const DiffusionTarget t(grid, none, fns);
    Rng rng(77);
    for (double h : {0.1, 1.0, 4.0}) {
      const auto c = ProposalCoeffs::from_step(h);
      ChainState st = make_chain_state(t, init_path(InitStrategy::prior(), t, rng),
                                       MetricMode::Fisher);
      for (int k = 0; k < 25; ++k) {
        Proposal p = propose(st, c, rng);
        ChainState cand = make_chain_state(t, std::move(p.x_prime), MetricMode::Fisher);
        CHECK(std::abs(log_accept_ratio(t, st, cand, h)) < 1e-9);
        st = std::move(cand);
      }
    }
  }
}

// Central correctness test: the O(N) log ratio must equal the brute-force
// dense finite-dimensional MH ratio for the same proposal density, both on
// proposal-generated candidates and on arbitrary state pairs.
TEST_CASE("semi-implicit log ratio equals the dense MH oracle") {
  std::mt19937_64 gen(17);
  Rng rng(555);
  int pairs = 0;
  for (int N : {2, 3, 5}) {
    const GridSpec grid{N, 0.3, 2.0};
    const ModelFunctions fns{DriftFn::affine(4.0, -1.0), ObsMap::power32()};
    const auto t = make_target(grid, fns, {1, N}, {2.5, 6.0}, 0.1);
    for (double h : {0.4, 1.0}) {
      for (int rep = 0; rep < 12; ++rep) {
        const ChainState st = make_chain_state(t, random_path(grid, gen, 2.0, 1.0),
                                               MetricMode::Fisher);
        // proposal-generated candidate
        Proposal p = propose(st, ProposalCoeffs::from_step(h), rng);
        ChainState cand = make_chain_state(t, p.x_prime, MetricMode::Fisher);
        double lib = log_accept_ratio(t, st, cand, h);
        double dense = oracle::mh_ratio_semi_implicit(t, st.x, cand.x, h);
        CHECK(std::abs(lib - dense) < 1e-8);
        ++pairs;

        // arbitrary candidate, unrelated to the proposal law
        cand = make_chain_state(t, random_path(grid, gen, 1.0, 1.5), MetricMode::Fisher);
        lib = log_accept_ratio(t, st, cand, h);
        dense = oracle::mh_ratio_semi_implicit(t, st.x, cand.x, h);
        CHECK(std::abs(lib - dense) < 1e-8);
        ++pairs;
      }
    }
  }
  CHECK(pairs >= 100);
}

// Same equivalence for the explicit-scheme baseline, recovered by replaying
// the kernel's noise draw with an identically seeded stream.
TEST_CASE("explicit-scheme log ratio equals the dense MH oracle") {
  std::mt19937_64 gen(19);
  int pairs = 0;
  for (int N : {2, 3, 5}) {
    const GridSpec grid{N, 0.3, 2.0};
    const ModelFunctions fns{DriftFn::affine(4.0, -1.0), ObsMap::power32()};
    const auto t = make_target(grid, fns, {1, N}, {2.5, 6.0}, 0.1);
    for (double h : {0.05, 0.3}) {
      for (int rep = 0; rep < 12; ++rep) {
        const std::uint64_t seed = 9000 + static_cast<std::uint64_t>(pairs);
        const ChainState st = make_chain_state(t, random_path(grid, gen, 2.5, 0.8),
                                               MetricMode::Fisher);
        Rng step_rng(seed), replay_rng(seed);
        const StepResult res = step_mmala(t, st, h, step_rng);
        // replay the proposal: w is the first draw the step consumes
        const std::vector<double> w = sample_zero_mean(st.gf, replay_rng);
        const Eigen::MatrixXd G = oracle::to_dense(st.g);
        const Eigen::MatrixXd L = oracle::to_dense(t.prior_precision());
        const Eigen::VectorXd xv = oracle::to_vec(st.x.values);
        const Eigen::VectorXd mu = Eigen::VectorXd::Constant(N, t.x_star());
        const Eigen::VectorXd grad_log =
            -oracle::to_vec(grad_phi(t, st.x)) - L * (xv - mu);
        const Eigen::VectorXd mean =
            xv + 0.5 * h * Eigen::LLT<Eigen::MatrixXd>(G).solve(grad_log);
        const Eigen::VectorXd xp = mean + std::sqrt(h) * oracle::to_vec(w);
        Path cand(grid, std::vector<double>(xp.data(), xp.data() + N));
        const double dense = oracle::mh_ratio_explicit(t, st.x, cand, h);
        CHECK(std::abs(res.record.log_ratio - dense) < 1e-8);
        ++pairs;
      }
    }
  }
  CHECK(pairs >= 50);
}

TEST_CASE("kernels with the prior metric coincide on observation-free targets") {
  const GridSpec grid{40, 0.1, 2.0};
  const ModelFunctions fns{DriftFn::affine(4.0, -1.0), ObsMap::power32()};
  ObservationSet none;
  none.sigma2 = 0.1;
  const DiffusionTarget t(grid, none, fns);   // G(x) = L, Girsanov still active
  const auto c = ProposalCoeffs::from_step(0.8);
  Rng r1(404), r2(404);
  ChainState a = make_chain_state(t, init_path_from_noise(InitStrategy::flat_bridge(2.0), t,
                                                          std::vector<double>(40, 0.0)),
                                  MetricMode::Fisher);
  ChainState b = a;
  for (int k = 0; k < 50; ++k) {
    const StepResult ra = step_inf_mmala(t, std::move(a), c, r1);
    const StepResult rb = step_inf_mala(t, std::move(b), c, r2);
    CHECK(ra.record.log_ratio == doctest::Approx(rb.record.log_ratio).epsilon(1e-12));
    CHECK(ra.record.accepted == rb.record.accepted);
    a = std::move(ra.state);
    b = std::move(rb.state);
  }
}

TEST_CASE("accept rule and probability clamp") {
  CHECK(accepts(0.5, 0.99));          // log u < 0 <= log_ratio
  CHECK(accepts(-0.1, std::exp(-0.2)));
  CHECK_FALSE(accepts(-0.2, std::exp(-0.1)));

  const GridSpec grid{6, 0.2, 2.0};
  const ModelFunctions fns{DriftFn::affine(4.0, -1.0), ObsMap::power32()};
  const auto t = make_target(grid, fns, {3, 6}, {4.0, 6.0}, 0.1);
  ChainSummary s;
  RunHooks hooks;
  std::vector<StepRecord> recs;
  hooks.on_step = [&](long long, const StepRecord& rec, const Path&) { recs.push_back(rec); };
  run_chain(t, Algo::InfMmala, 1.0, 200, InitStrategy::prior(), 3, hooks);
  for (const auto& rec : recs) {
    CHECK(rec.acc_prob >= 0.0);
    CHECK(rec.acc_prob <= 1.0);
    CHECK(rec.acc_prob ==
          doctest::Approx(std::min(1.0, std::exp(rec.log_ratio))).epsilon(1e-12));
  }
}

TEST_CASE("a candidate with a broken metric is rejected, not fatal") {
  // A state far enough into the observation map's growth region overflows the
  // potential, so the drift and the proposed path degenerate to non-finite
  // values and the candidate metric cannot be factored.
  const GridSpec grid{4, 0.25, 0.0};
  const ModelFunctions fns{DriftFn::affine(0.0, 0.0), ObsMap::power32()};
  const auto t = make_target(grid, fns, {1, 2, 3, 4}, {1.0, -1.0, 1.0, -1.0}, 0.1);
  const Path huge(grid, {1e160, -1e160, 1e160, -1e160});
  ChainState st = make_chain_state(t, huge, MetricMode::Fisher);
  Rng rng(1);
  const StepResult res = step_inf_mmala(t, std::move(st), ProposalCoeffs::from_step(1.0), rng);
  CHECK(res.record.metric_failure);
  CHECK_FALSE(res.record.accepted);
  CHECK(res.state.x.values[0] == 1e160);  // chain stays put
}

TEST_CASE("init strategies produce the documented paths") {
  const GridSpec grid{10, 0.1, 2.0};
  const ModelFunctions fns{DriftFn::affine(4.0, -1.0), ObsMap::power32()};
  const auto t = make_target(grid, fns, {5, 10}, {8.0, -8.0}, 0.1);

  SUBCASE("flat bridge with zero noise is constant at the level") {
    const Path x = init_path_from_noise(InitStrategy::flat_bridge(2.0), t,
                                        std::vector<double>(8, 0.0));
    for (double v : x.values) CHECK(v == doctest::Approx(2.0));
  }

  SUBCASE("data-pinned inverts the observation map at the data") {
    const Path x = init_path_from_noise(InitStrategy::data_pinned(), t,
                                        std::vector<double>(8, 0.0));
    CHECK(x.at(5) == doctest::Approx(4.0));
    CHECK(x.at(10) == doctest::Approx(-4.0));
  }

  SUBCASE("data-pinned requires an invertible map") {
    const ModelFunctions cfns{DriftFn::affine(0.0, 0.0), ObsMap::constant(1.0)};
    const auto ct = make_target(grid, cfns, {5}, {1.0}, 0.1);
    Rng rng(8);
    CHECK_THROWS_AS(init_path(InitStrategy::data_pinned(), ct, rng), NonInvertibleObsMap);
  }

  SUBCASE("prior init has the pinned-Brownian-motion moments") {
    Rng rng(314);
    const int reps = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (int r = 0; r < reps; ++r) {
      const Path x = init_path(InitStrategy::prior(), t, rng);
      const double v = x.at(10);
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / reps;
    const double var = sumsq / reps - mean * mean;
    CHECK(mean == doctest::Approx(2.0).epsilon(0.01));             // mu = x*
    CHECK(var == doctest::Approx(10 * 0.1).epsilon(0.05));         // Var x_T = T
  }
}

TEST_CASE("run_chain aggregates exactly what the hooks observe") {
  const GridSpec grid{20, 0.1, 2.0};
  const ModelFunctions fns{DriftFn::affine(4.0, -1.0), ObsMap::power32()};
  const auto t = make_target(grid, fns, {10, 20}, {5.0, 7.0}, 0.1);

  std::vector<StepRecord> recs;
  std::vector<Path> states;
  std::vector<long long> iters_seen;
  RunHooks hooks;
  hooks.trace_idx = {10, 15};
  hooks.on_step = [&](long long it, const StepRecord& rec, const Path& cur) {
    iters_seen.push_back(it);
    recs.push_back(rec);
    states.push_back(cur);
  };
  const ChainSummary s =
      run_chain(t, Algo::InfMmala, 1.0, 120, InitStrategy::data_pinned(), 42, hooks);

  CHECK(s.n_steps == 120);
  CHECK(recs.size() == 120);
  CHECK(iters_seen.front() == 0);
  CHECK(iters_seen.back() == 119);

  long long accepted = 0;
  for (const auto& r : recs) accepted += r.accepted ? 1 : 0;
  CHECK(s.acceptance_rate == doctest::Approx(static_cast<double>(accepted) / 120.0));
  CHECK(s.qve_series.size() == 120);
  CHECK(s.traces.at(10).size() == 120);
  CHECK(s.traces.at(15).size() == 120);

  // the streaming summary must equal the two-pass reference over the hooks' view
  const ChainSummary ref = summarize(recs, states, hooks.trace_idx);
  for (int i = 0; i < grid.N; ++i) {
    CHECK(s.coord_mean[static_cast<std::size_t>(i)] ==
          doctest::Approx(ref.coord_mean[static_cast<std::size_t>(i)]).epsilon(1e-11));
    CHECK(s.coord_var[static_cast<std::size_t>(i)] ==
          doctest::Approx(ref.coord_var[static_cast<std::size_t>(i)]).epsilon(1e-9));
  }
  CHECK(s.traces.at(10) == ref.traces.at(10));

  // determinism in the seed, sensitivity to it
  const ChainSummary again =
      run_chain(t, Algo::InfMmala, 1.0, 120, InitStrategy::data_pinned(), 42);
  CHECK(again.acceptance_rate == s.acceptance_rate);
  CHECK(again.coord_mean == s.coord_mean);
  const ChainSummary other =
      run_chain(t, Algo::InfMmala, 1.0, 120, InitStrategy::data_pinned(), 43);
  CHECK(other.coord_mean != s.coord_mean);

  CHECK_THROWS_AS(run_chain(t, Algo::InfMmala, 1.0, 0, InitStrategy::prior(), 1), EmptyChain);
}

TEST_CASE("run_chain dispatches distinct kernels") {
  const GridSpec grid{20, 0.1, 2.0};
  const ModelFunctions fns{DriftFn::affine(4.0, -1.0), ObsMap::power32()};
  const auto t = make_target(grid, fns, {10, 20}, {5.0, 7.0}, 0.1);
  const auto a = run_chain(t, Algo::InfMmala, 0.5, 60, InitStrategy::data_pinned(), 5);
  const auto b = run_chain(t, Algo::InfMala, 0.5, 60, InitStrategy::data_pinned(), 5);
  const auto c = run_chain(t, Algo::Mmala, 0.5, 60, InitStrategy::data_pinned(), 5);
  CHECK(a.coord_mean != b.coord_mean);
  CHECK(a.coord_mean != c.coord_mean);
}
