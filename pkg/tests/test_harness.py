import math
import pickle

import numpy as np
import pytest

from fnls import (
    ConvergenceStudyError,
    Field,
    ModelParams,
    ParameterError,
    PetviashviliInitial,
    RunConfig,
    SolitonInitial,
    SolitonParams,
    SpectralGrid,
    StageDivergenceError,
    TrackingError,
    build_initial_field,
    component_errors,
    convergence_study,
    error_growth_study,
    invariant_drift_study,
    nls_soliton,
    petviashvili_profile,
    wave_tracking,
    write_snapshot,
)
from fnls import ProfileFileInitial
from fnls.harness import SPEED_WINDOW

DESK = dict(L=16 * np.pi, N=512, s=1.0, T=1.0, scheme_p=2,
            initial=SolitonInitial(lambda1=1.0, lambda2=0.25))


def desk_config(**overrides):
    merged = {**DESK, **overrides}
    return RunConfig(dt=merged.pop("dt", 1e-2), **merged)


def test_component_errors_closed_form(small_grid):
    base = np.zeros(small_grid.N, dtype=complex)
    shifted = np.full(small_grid.N, 0.3 - 0.4j)
    err_v, err_w = component_errors(Field(shifted, small_grid), Field(base, small_grid))
    root = math.sqrt(2 * small_grid.L)
    assert err_v == pytest.approx(0.3 * root, rel=1e-13)
    assert err_w == pytest.approx(0.4 * root, rel=1e-13)


def test_convergence_study_fourth_order_rates():
    rows = convergence_study(desk_config(dt=2e-2), [2e-2, 1e-2, 5e-3])
    assert rows[0].rate_v is None and rows[0].rate_w is None
    for row in rows[1:]:
        assert 3.6 <= row.rate_v <= 4.4
        assert 3.6 <= row.rate_w <= 4.4
    assert rows[0].err_v > rows[1].err_v > rows[2].err_v > 0


def test_convergence_study_gauge_invariance():
    # a constant phase rotates error between the v and w components but
    # must leave the combined L2 error unchanged
    dts = [2e-2, 1e-2]
    plain = convergence_study(desk_config(), dts)
    rotated = convergence_study(
        desk_config(initial=SolitonInitial(lambda1=1.0, lambda2=0.25, theta0=1.3)), dts)
    for a, b in zip(plain, rotated):
        assert math.hypot(b.err_v, b.err_w) == pytest.approx(
            math.hypot(a.err_v, a.err_w), rel=1e-6)


def test_convergence_study_parallel_matches_sequential():
    dts = [2e-2, 1e-2]
    seq = convergence_study(desk_config(), dts, workers=1)
    par = convergence_study(desk_config(), dts, workers=2)
    for a, b in zip(seq, par):
        assert (a.err_v, a.err_w) == (b.err_v, b.err_w)


def test_convergence_study_input_validation():
    with pytest.raises(ParameterError, match="dt"):
        convergence_study(desk_config(), [0.3])
    with pytest.raises(ParameterError):
        convergence_study(desk_config(), [])
    with pytest.raises(ParameterError, match="soliton"):
        config = desk_config(initial=PetviashviliInitial(lambda1=1.0), s=0.75)
        convergence_study(config, [1e-2])


def test_convergence_study_divergence_carries_partial_rows():
    config = desk_config(T=5.2, dt=1e-2, fp_max_iters=60)
    with pytest.raises(ConvergenceStudyError) as info:
        convergence_study(config, [1e-2, 2.6], workers=1)
    err = info.value
    assert err.failed_dt == 2.6
    assert len(err.partial_rows) == 1
    assert err.partial_rows[0].dt == 1e-2
    assert isinstance(err.__cause__, StageDivergenceError)
    back = pickle.loads(pickle.dumps(err))
    assert back.failed_dt == 2.6 and len(back.partial_rows) == 1


def test_error_growth_study_linear_in_time():
    config = desk_config(dt=2.5e-2, T=20.0)
    result = error_growth_study(config, [2.5, 5.0, 10.0, 15.0, 20.0],
                                fit_window=(5.0, 20.0))
    assert 0.6 <= result.slope <= 1.4
    assert result.fit_window == (5.0, 20.0)
    ts = [p.t for p in result.series]
    assert ts == [2.5, 5.0, 10.0, 15.0, 20.0]
    # roughly linear: doubling t roughly doubles the combined error
    e5 = math.hypot(result.series[1].err_v, result.series[1].err_w)
    e10 = math.hypot(result.series[2].err_v, result.series[2].err_w)
    assert 1.2 <= e10 / e5 <= 3.0


def test_error_growth_study_default_window():
    config = desk_config(dt=2.5e-2, T=20.0)
    result = error_growth_study(config, [5.0, 10.0, 15.0, 20.0])
    assert result.fit_window == (12.5, 20.0)


def test_error_growth_study_zero_time_checkpoint():
    config = desk_config(dt=1e-2, T=2.0)
    result = error_growth_study(config, [0.0, 1.0, 2.0], fit_window=(1.0, 2.0))
    assert result.series[0].t == 0.0
    assert result.series[0].err_v <= 1e-14
    assert math.isfinite(result.slope)


def test_error_growth_study_validation():
    config = desk_config(dt=2.5e-2, T=20.0)
    with pytest.raises(ParameterError, match="checkpoint"):
        error_growth_study(config, [1.23])
    with pytest.raises(ParameterError):
        error_growth_study(config, [])


def test_invariant_drift_study_small_run():
    # N = 512 resolves the soliton to ~1e-11, so aliasing cannot pollute
    # the conserved quantities
    config = desk_config(dt=1e-2, T=1.0)
    result = invariant_drift_study(config)
    assert len(result.records) == 101
    assert result.drift_I1 <= 1e-10
    assert result.drift_I2 <= 1e-10
    # H is conserved only up to the k^4 truncation error of the scheme
    assert result.drift_H <= 1e-6


def test_tracking_analytic_soliton():
    # parabolic peak refinement carries an O(h^4) amplitude bias; N = 4096
    # keeps it near 1e-7 for this profile
    g = SpectralGrid(4096, 16 * np.pi)
    p = SolitonParams(lambda1=1.0, lambda2=0.25)
    snapshots = [(0.25 * j, nls_soliton(g, 0.25 * j, p)) for j in range(9)]
    records = wave_tracking(snapshots)
    peak = math.sqrt(2 * p.a)
    for i, r in enumerate(records):
        assert abs(r.amplitude - peak) <= 1e-6
        assert abs(r.peak_x - 0.25 * r.t) <= 1e-3
        if i < SPEED_WINDOW - 1:
            assert r.speed is None
        else:
            assert abs(r.speed - 0.25) <= 1e-3


def test_tracking_stationary_soliton():
    g = SpectralGrid(1024, 16 * np.pi)
    p = SolitonParams(lambda1=1.0)
    snapshots = [(0.5 * j, nls_soliton(g, 0.5 * j, p)) for j in range(6)]
    records = wave_tracking(snapshots)
    for r in records:
        assert abs(r.peak_x) <= 1e-9
        if r.speed is not None:
            assert abs(r.speed) <= 1e-9


def test_tracking_rolled_snapshots_give_exact_speed(small_grid):
    vals = np.exp(-small_grid.nodes**2) + 0j
    snapshots = [(0.5 * j, Field(np.roll(vals, 3 * j), small_grid)) for j in range(7)]
    records = wave_tracking(snapshots)
    expected = 3 * small_grid.h / 0.5
    for r in records:
        if r.speed is not None:
            assert r.speed == pytest.approx(expected, rel=1e-9)


def test_tracking_unwraps_periodic_crossing(small_grid):
    # the peak leaves through x = L and re-enters at -L; unwrapped positions
    # must keep the fitted speed constant
    vals = np.exp(-small_grid.nodes**2) + 0j
    m = 20   # per-record shift below half a period, as unwrapping requires
    snapshots = [(1.0 * j, Field(np.roll(vals, m * j), small_grid)) for j in range(8)]
    records = wave_tracking(snapshots)
    expected = m * small_grid.h
    for r in records:
        if r.speed is not None:
            assert r.speed == pytest.approx(expected, rel=1e-9)


def test_tracking_flat_field_raises(small_grid):
    flat = Field(np.ones(small_grid.N), small_grid)
    with pytest.raises(TrackingError):
        wave_tracking([(0.0, flat)])


def test_tracking_empty_input():
    with pytest.raises(ParameterError):
        wave_tracking([])


def test_build_initial_field_soliton():
    config = desk_config()
    grid, field = build_initial_field(config)
    assert grid.N == 512
    expected = nls_soliton(grid, 0.0, SolitonParams(1.0, 0.25))
    np.testing.assert_array_equal(field.values, expected.values)


def test_build_initial_field_petviashvili():
    config = RunConfig(L=16 * np.pi, N=512, s=1.0, dt=1e-2, T=1.0, scheme_p=2,
                       initial=PetviashviliInitial(lambda1=1.0, lambda2=0.25))
    grid, field = build_initial_field(config)
    direct = petviashvili_profile(grid, 1.0, 1.0, 0.25)
    np.testing.assert_allclose(field.values, direct.profile.values, atol=1e-14)


def test_build_initial_field_profile_file(tmp_path):
    g = SpectralGrid(64, np.pi)
    vals = np.exp(-g.nodes**2) + 0j
    path = tmp_path / "profile.bin"
    write_snapshot(path, Field(vals, g), s=0.75, t=0.0)

    good = RunConfig(L=np.pi, N=64, s=0.75, dt=1e-2, T=0.1, scheme_p=1,
                     initial=ProfileFileInitial(path=path))
    grid, field = build_initial_field(good)
    np.testing.assert_array_equal(field.values, vals)

    bad_n = RunConfig(L=np.pi, N=128, s=0.75, dt=1e-2, T=0.1, scheme_p=1,
                      initial=ProfileFileInitial(path=path))
    with pytest.raises(ParameterError, match="N"):
        build_initial_field(bad_n)

    bad_s = RunConfig(L=np.pi, N=64, s=0.8, dt=1e-2, T=0.1, scheme_p=1,
                      initial=ProfileFileInitial(path=path))
    with pytest.raises(ParameterError, match="s"):
        build_initial_field(bad_s)
