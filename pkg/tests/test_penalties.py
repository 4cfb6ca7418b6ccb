import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grpdesc import (Family, GroupedDesign, PenaltySpec, firm_mcp, firm_scad, mv_threshold,
                     objective, penalty_value, soft_threshold)
from grpdesc.oracle import naive_objective
from grpdesc.penalties import penalty_derivative

from conftest import ortho_design

reals = st.floats(-50, 50, allow_nan=False)
lams = st.floats(0, 10, allow_nan=False)


@pytest.mark.parametrize("z,lam,out", [(3.0, 1.0, 2.0), (0.5, 1.0, 0.0), (-3.0, 1.0, -2.0)])
def test_soft_examples(z, lam, out):
    assert soft_threshold(z, lam) == out


def test_firm_examples():
    assert firm_mcp(1.5, 1.0, 3.0) == pytest.approx(0.75, abs=1e-15)
    assert firm_mcp(4.0, 1.0, 3.0) == 4.0
    assert abs(firm_mcp(2.0, 1.0, 1e8) - 1.0) < 1e-6
    assert firm_scad(1.5, 1.0, 4.0) == pytest.approx(0.5, abs=1e-15)
    assert firm_scad(3.0, 1.0, 4.0) == pytest.approx(2.5, abs=1e-14)
    assert firm_scad(5.0, 1.0, 4.0) == 5.0


@pytest.mark.parametrize("fn,gamma", [(firm_mcp, 1.0), (firm_mcp, 0.5), (firm_scad, 2.0)])
def test_gamma_rejected(fn, gamma):
    with pytest.raises(ValueError):
        fn(1.0, 1.0, gamma)


def test_spec_rejects_gamma():
    with pytest.raises(ValueError, match="gamma"):
        PenaltySpec("grmcp", 1.0)
    with pytest.raises(ValueError, match="gamma"):
        PenaltySpec("grscad", 2.0)


def test_mv_examples():
    np.testing.assert_allclose(mv_threshold(np.array([3.0, 4.0]), 1.0, PenaltySpec()), [2.4, 3.2], atol=1e-15)
    mcp = PenaltySpec("grmcp", 3.0)
    np.testing.assert_allclose(mv_threshold(np.array([0.9, 1.2]), 1.0, mcp), [0.45, 0.60], atol=1e-15)
    np.testing.assert_array_equal(mv_threshold(np.array([3.0, 4.0]), 1.0, mcp), [3.0, 4.0])
    np.testing.assert_array_equal(mv_threshold(np.zeros(3), 1.0, mcp), np.zeros(3))


def test_penalty_value_examples():
    lam, g = 0.7, 3.0
    assert penalty_value(g * lam, lam, PenaltySpec("grmcp", g)) == pytest.approx(g * lam ** 2 / 2, rel=1e-14)
    s = PenaltySpec("grscad", 4.0)
    assert penalty_value(1e6, lam, s) == pytest.approx(lam ** 2 * (16 - 1) / (2 * 3), rel=1e-14)
    assert penalty_value(2.0, 0.5, PenaltySpec()) == 1.0


OPS = [
    lambda z, lam: soft_threshold(z, lam),
    lambda z, lam: firm_mcp(z, lam, 3.0),
    lambda z, lam: firm_scad(z, lam, 3.7),
]


@given(reals, lams, st.sampled_from(range(3)))
def test_odd_and_shrinking(z, lam, k):
    op = OPS[k]
    assert op(-z, lam) == -op(z, lam)
    assert abs(op(z, lam)) <= abs(z) + 1e-12


@given(reals, lams)
def test_continuity(z, lam):
    for op in OPS:
        assert abs(op(z + 1e-9, lam) - op(z, lam)) < 1e-8


@given(st.floats(-20, 20), st.floats(0.01, 5))
def test_large_gamma_is_soft(z, lam):
    s = soft_threshold(z, lam)
    assert abs(firm_mcp(z, lam, 1e9) - s) < 1e-6 * (1 + abs(z))
    assert abs(firm_scad(z, lam, 1e9) - s) < 1e-6 * (1 + abs(z))


@given(st.floats(-20, 20), st.floats(0.1, 5))
def test_mcp_near_one_is_hard(z, lam):
    if abs(abs(z) - lam) < 0.01 * lam:
        return
    hard = z if abs(z) > lam else 0.0
    assert abs(firm_mcp(z, lam, 1.0001) - hard) < 1e-12 + 0.01 * abs(z)


def _single_group_q(b, z, lam, spec):
    return 0.5 * np.sum((z - b) ** 2) + penalty_value(np.linalg.norm(b), lam, spec)


SPECS = [PenaltySpec(), PenaltySpec("grmcp", 3.0), PenaltySpec("grscad", 4.0), PenaltySpec("grmcp", 1.5)]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31), st.integers(1, 4), st.sampled_from(range(4)))
def test_mv_threshold_minimizes(seed, k, s):
    rng = np.random.default_rng(seed)
    spec = SPECS[s]
    z = rng.normal(0, 2, k)
    lam = rng.uniform(0.1, 2)
    b = mv_threshold(z, lam, spec)
    q = _single_group_q(b, z, lam, spec)
    scale = rng.choice([1e-3, 1e-1, 1.0], 10_000)[:, None]
    pert = b + scale * rng.standard_normal((10_000, k))
    norms = np.linalg.norm(pert, axis=1)
    pen = np.array([penalty_value(t, lam, spec) for t in norms])
    vals = 0.5 * np.sum((z - pert) ** 2, axis=1) + pen
    assert q <= vals.min() + 1e-12
    # grid oracle along the ray through z (the minimizer is collinear with z)
    nz = np.linalg.norm(z)
    ts = np.linspace(0, 1.5 * nz, 20001)
    ray = [0.5 * (nz - t) ** 2 + penalty_value(t, lam, spec) for t in ts]
    assert q <= min(ray) + 1e-8


@pytest.mark.parametrize("spec", SPECS[1:3], ids=["mcp", "scad"])
def test_penalty_derivative_fd(spec):
    lam, h = 0.8, 1e-7
    d0 = (penalty_value(h, lam, spec) - penalty_value(0.0, lam, spec)) / h
    assert abs(d0 - lam) < 1e-6
    far = spec.gamma * lam * 1.5
    d_far = (penalty_value(far + h, lam, spec) - penalty_value(far, lam, spec)) / h
    assert abs(d_far) < 1e-6
    for t in np.linspace(0.05, 4, 25):
        fd = (penalty_value(t + h, lam, spec) - penalty_value(t - h, lam, spec)) / (2 * h)
        assert abs(fd - penalty_derivative(t, lam, spec)) < 1e-5


@given(st.floats(0, 10), st.floats(0, 10), st.floats(0.01, 3))
def test_penalty_monotone(a, b, lam):
    lo, hi = sorted((a, b))
    for spec in SPECS:
        assert penalty_value(lo, lam, spec) <= penalty_value(hi, lam, spec) + 1e-12


def test_objective_null_values():
    ortho, _ = ortho_design(0)
    spec = PenaltySpec().resolve(ortho)
    obj = objective(ortho, 0.0, np.zeros(ortho.p), 0.3, spec)
    assert obj.loss_part == pytest.approx(np.var(ortho.y) / 2, rel=1e-12)
    assert obj.penalty_part == 0
    lo, _ = ortho_design(0, loss="logistic")
    spec = PenaltySpec(loss="logistic").resolve(lo)
    assert objective(lo, 0.0, np.zeros(lo.p), 0.3, spec).loss_part == pytest.approx(math.log(2), rel=1e-14)


@pytest.mark.parametrize("fam", list(Family))
@pytest.mark.parametrize("loss", ["linear", "logistic"])
def test_objective_matches_naive(fam, loss):
    rng = np.random.default_rng(7)
    ortho, _ = ortho_design(3, loss=loss)
    spec = PenaltySpec(fam, loss=loss).resolve(ortho)
    for _ in range(5):
        beta = rng.normal(0, 0.5, ortho.p)
        b0 = rng.normal() if loss == "logistic" else 0.0
        obj = objective(ortho, b0, beta, 0.2, spec)
        assert obj.value == pytest.approx(obj.loss_part + obj.penalty_part, rel=1e-12)
        assert obj.value == pytest.approx(naive_objective(ortho, b0, beta, 0.2, spec), rel=1e-12)


def test_multipliers_default_and_rank():
    X = np.random.default_rng(0).standard_normal((20, 5))
    X[:, 2] = X[:, 1]
    d = GroupedDesign.from_arrays(X, X[:, 0], [0, 1, 1, 1, 2], unpenalized=[2])
    spec = PenaltySpec().resolve(d)
    np.testing.assert_allclose(spec.multiplier_array(), [1, math.sqrt(3), 0])
    spec_r = PenaltySpec(multiplier_dim="rank").resolve(d, ranks=[1, 2, 1])
    np.testing.assert_allclose(spec_r.multiplier_array(), [1, math.sqrt(2), 0])
