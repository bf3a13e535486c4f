import math

import pytest

import infmmala as m


def small_target(sigma2=0.1):
    grid = m.GridSpec(N=20, delta=0.05, x_star=1.0)
    fns = m.ModelFunctions(m.DriftFn.affine(1.0, -1.0), m.ObsMap.identity())
    obs = m.ObservationSet(indices=[5, 10, 20], values=[0.8, 1.1, 0.9], sigma2=sigma2)
    return m.DiffusionTarget(grid=grid, obs=obs, fns=fns)


def test_chain_runs_deterministically_and_reports():
    t = small_target()
    seed = m.derive_seed(3, 1)
    init = m.InitStrategy.flat_bridge(1.0)
    s1 = m.run_chain(t, "inf-mmala", 0.5, 200, init, seed, trace_idx=[10])
    assert s1.n_steps == 200
    assert 0.0 <= s1.acceptance_rate <= 1.0
    assert s1.metric_failures == 0
    assert len(s1.qve_series) == 200
    assert len(s1.traces[10]) == 200
    assert len(s1.coord_mean) == 20

    s2 = m.run_chain(t, "inf-mmala", 0.5, 200, init, seed, trace_idx=[10])
    assert s2.coord_mean == s1.coord_mean
    s3 = m.run_chain(t, "inf-mmala", 0.5, 200, init, seed + 1, trace_idx=[10])
    assert s3.coord_mean != s1.coord_mean


def test_all_kernels_step_and_bound_probabilities():
    t = small_target()
    rng = m.Rng(9)
    state = m.make_chain_state(t, m.init_path(m.InitStrategy.data_pinned(), t, rng),
                               m.MetricMode.Fisher)
    coeffs = m.ProposalCoeffs.from_step(1.0)
    state, rec = m.step_inf_mmala(t, state, coeffs, rng)
    assert 0.0 <= rec.acc_prob <= 1.0
    state, rec = m.step_inf_mala(t, state, coeffs, rng)
    assert 0.0 <= rec.acc_prob <= 1.0
    state, rec = m.step_mmala(t, state, 0.2, rng)
    assert 0.0 <= rec.acc_prob <= 1.0
    assert rec.qve_proposed > 0.0


def test_reference_invariance_without_data():
    grid = m.GridSpec(N=30, delta=0.2, x_star=0.5)
    fns = m.ModelFunctions(m.DriftFn.affine(0.0, 0.0), m.ObsMap.identity())
    none = m.ObservationSet(indices=[], values=[], sigma2=1.0)
    t = m.DiffusionTarget(grid=grid, obs=none, fns=fns)
    rng = m.Rng(4)
    state = m.make_chain_state(t, m.init_path(m.InitStrategy.prior(), t, rng),
                               m.MetricMode.Fisher)
    coeffs = m.ProposalCoeffs.from_step(1.0)
    for _ in range(10):
        state, rec = m.step_inf_mmala(t, state, coeffs, rng)
        assert abs(rec.log_ratio) < 1e-9
        assert rec.accepted


def test_potential_gradient_consistency():
    t = small_target()
    x = m.Path(m.GridSpec(N=20, delta=0.05, x_star=1.0), [1.0 + 0.01 * j for j in range(20)])
    p = m.phi(t, x)
    assert p.total == pytest.approx(p.obs + p.girsanov)
    g = m.grad_phi(t, x)
    eps = 1e-6
    for j in (0, 9, 19):
        up = list(x.values)
        dn = list(x.values)
        up[j] += eps
        dn[j] -= eps
        fd = (m.phi(t, m.Path(x.grid, up)).total - m.phi(t, m.Path(x.grid, dn)).total) / (2 * eps)
        assert g[j] == pytest.approx(fd, abs=1e-6)


def test_prior_precision_solve_round_trip():
    grid = m.GridSpec(N=15, delta=0.1, x_star=0.0)
    L = m.build_prior_precision(grid)
    f = m.cholesky(L)
    v = [math.sin(j + 1.0) for j in range(15)]
    back = m.solve(f, m.matvec(L, v))
    assert back == pytest.approx(v, abs=1e-10)
    assert m.log_det(f) > 0.0
    assert m.quad_form(L, v, v) > 0.0


def test_exact_posterior_shape_and_spread():
    t = small_target(sigma2=0.05)
    mean, var = m.exact_gaussian_posterior(t)
    assert len(mean) == 20 and len(var) == 20
    assert all(v > 0.0 for v in var)
    # Observed coordinates are pinned down more tightly than the prior allows.
    prior_var_at_20 = 20 * 0.05
    assert var[19] < prior_var_at_20


def test_errors_surface_as_package_exception():
    grid = m.GridSpec(N=10, delta=0.1, x_star=0.0)
    fns = m.ModelFunctions(m.DriftFn.affine(0.0, 0.0), m.ObsMap.identity())
    with pytest.raises(m.Error):
        m.DiffusionTarget(grid=grid,
                          obs=m.ObservationSet(indices=[0], values=[1.0], sigma2=1.0), fns=fns)
    with pytest.raises(m.Error):
        m.ProposalCoeffs.from_step(0.0)
    with pytest.raises(m.Error):
        m.ObsMap.by_name("cubic")
    t = small_target()
    with pytest.raises(m.Error):
        m.run_chain(t, "inf-mmala", 1.0, 0, m.InitStrategy.prior(), 1)
    with pytest.raises(m.Error):
        m.run_chain(t, "nuts", 1.0, 10, m.InitStrategy.prior(), 1)


def test_qv_estimate_counts_the_origin_increment():
    grid = m.GridSpec(N=3, delta=0.5, x_star=1.0)
    x = m.Path(grid, [2.0, 0.0, 3.0])
    assert m.qv_estimate(x) == pytest.approx((2 - 1) ** 2 + (0 - 2) ** 2 + (3 - 0) ** 2)
    assert m.trace_indices(grid, [0.5, 1.5]) == [1, 3]
    assert m.preset_config_names() == ["fig1", "fig2", "mesh"]
