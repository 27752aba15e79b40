"""Smoke tests for the Python bindings."""

import math

import numpy as np
import pytest

import eselect


def make_arrays(steps=120, horizon=3, q_noise=3.0, seed=5):
    rng = np.random.default_rng(seed)
    base = 400.0 + np.cumsum(rng.uniform(-20.0, 20.0, size=steps + horizon))
    y = np.stack([base[t + 1 : t + 1 + horizon] for t in range(steps)])
    p = y + rng.uniform(-1.0, 1.0, size=y.shape)
    q = y + q_noise * rng.uniform(-1.0, 1.0, size=y.shape)
    return p, q, y


def test_mae_and_score_difference():
    f = np.array([1.0, 3.0])
    y = np.array([0.0, 1.0])
    assert eselect.mae(f, y) == pytest.approx(1.5)
    assert eselect.score_difference(f, f, y) == 0.0


def test_psi_and_normal_cdf():
    assert eselect.psi_sub_exponential(0.0) == 0.0
    assert eselect.psi_sub_exponential(0.5) == pytest.approx(
        math.log(2.0) - 0.5, abs=1e-12
    )
    assert eselect.normal_cdf(0.0) == pytest.approx(0.5)
    assert eselect.normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-5)


def test_transform_round_trip():
    spec = eselect.TransformSpec(sigma=50.0)
    xs = np.linspace(-200.0, 200.0, 101)
    for x in xs:
        b = eselect.bound(x, spec)
        assert abs(b) < 0.5
        assert eselect.unbound(b, spec) == pytest.approx(x, rel=1e-9, abs=1e-12)


def test_calibrate_scale_matches_sample_sd():
    spec = eselect.calibrate_scale(np.array([-1.0, 1.0]), 2)
    assert spec.sigma == pytest.approx(math.sqrt(2.0))


def test_fusion_weights():
    w_p, w_q = eselect.fusion_weights(1.0, 1.0)
    assert (w_p, w_q) == (0.5, 0.5)
    w_p, w_q = eselect.fusion_weights(1.0, 0.025)
    assert w_p == pytest.approx(0.9875)
    assert w_p + w_q == 1.0


def test_run_selection_end_to_end():
    p, q, y = make_arrays()
    result = eselect.run_selection(
        p, q, y, lam=0.5, omega=8, lag=4, calibration=8, strategy="persistence"
    )
    summary = result["summary"]
    assert summary["selection_steps"] == 112
    assert summary["decided_steps"] == 112 - 7
    assert summary["avg_fused"] >= summary["avg_oracle"]
    assert len(result["step"]) == 112
    assert result["source"][0] == "WARMUP"
    assert math.isnan(result["fused_mae"][0])
    assert not math.isnan(result["fused_mae"][-1])


def test_run_selection_is_deterministic():
    p, q, y = make_arrays()
    kwargs = dict(lam=0.3, omega=8, lag=4, calibration=8, strategy="sampling", seed=9)
    a = eselect.run_selection(p, q, y, **kwargs)
    b = eselect.run_selection(p, q, y, **kwargs)
    assert a["source"] == b["source"]
    assert np.array_equal(a["log_e_pq"], b["log_e_pq"])


def test_oracle_benchmark_dominance():
    p, q, y = make_arrays()
    bench = eselect.oracle_benchmark(p, q, y, calibration=8)
    assert bench["oracle"] <= min(bench["baseline_p"], bench["baseline_q"]) + 1e-12
    assert bench["steps"] == 112


def test_simulators():
    fwer = eselect.simulate_fwer(replications=200, length=300, lam=0.5, omega=64)
    se = math.sqrt(0.025 * 0.975 / 200)
    assert fwer["rate_pq"] <= 0.025 + 3 * se
    cov = eselect.simulate_coverage(replications=200, length=300, lam=0.5, omega=64)
    assert cov["coverage"] >= 0.95 - 3 * cov["std_error"]
    power = eselect.simulate_power(
        replications=100, length=400, lam=0.5, omega=64, shift=0.49
    )
    assert power["crossed_fraction"] >= 0.99


def test_errors_surface_as_exceptions():
    with pytest.raises(Exception):
        eselect.mae(np.array([1.0]), np.array([1.0, 2.0]))
    with pytest.raises(Exception):
        eselect.unbound(0.5, eselect.TransformSpec(sigma=1.0))
