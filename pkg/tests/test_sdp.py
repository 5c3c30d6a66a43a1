import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from xorgames.sdp import EigMinProgram, solve_eigmin, solve_elliptope
from xorgames.theta import lovasz_theta


def _two_by_two_oracle(t):
    """Tsirelson bias of a 2x2 game: Alice's vectors at angles 0 and phi,
    Bob answers each column with the normalised combination, so the bias is
    sum_y || t[0,y] e_0 + t[1,y] e_phi ||."""

    def neg_bias(phi):
        a0, a1 = np.array([1.0, 0.0]), np.array([math.cos(phi), math.sin(phi)])
        return -sum(np.linalg.norm(t[0, y] * a0 + t[1, y] * a1) for y in range(2))

    grid = np.linspace(0, math.pi, 721)
    start = grid[np.argmin([neg_bias(p) for p in grid])]
    step = grid[1] - grid[0]
    res = minimize_scalar(neg_bias, bounds=(start - step, start + step), method="bounded", options={"xatol": 1e-12})
    return -min(res.fun, neg_bias(start))


def _block(t):
    m = t.shape[0]
    c = np.zeros((2 * m, 2 * m))
    c[:m, m:] = t / 2
    c[m:, :m] = t.T / 2
    return c


def test_chsh_angle_oracle():
    t = np.array([[1, 1], [1, -1]]) / 4
    sol = solve_elliptope(_block(t))
    assert sol.optimal
    assert sol.value == pytest.approx(math.sqrt(2) / 2, abs=1e-9)
    assert _two_by_two_oracle(t) == pytest.approx(sol.value, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=4, max_size=4).filter(lambda v: sum(map(abs, v)) > 1e-3))
def test_random_two_by_two_against_oracle(vals):
    t = np.array(vals).reshape(2, 2)
    t = t / np.abs(t).sum()
    sol = solve_elliptope(_block(t))
    assert sol.gap <= 1e-7
    assert sol.value == pytest.approx(_two_by_two_oracle(t), abs=1e-7)


def test_dual_certificate_is_feasible_and_weak_duality():
    rng = np.random.default_rng(1)
    for n in (3, 6, 10):
        c = rng.normal(size=(n, n))
        c = c + c.T
        sol = solve_elliptope(c)
        assert np.linalg.eigvalsh(sol.certificate).min() >= -1e-12
        assert np.allclose(np.diag(sol.primal_matrix), 1.0, atol=1e-9)
        assert np.linalg.eigvalsh(sol.primal_matrix).min() >= -1e-9
        # feasible start keeps every iterate feasible, so primal <= dual throughout
        assert all(p <= d + 1e-9 for p, d in sol.history)
        assert sol.dual_value - sol.primal_value >= -1e-9


def test_scaling_and_determinism():
    rng = np.random.default_rng(2)
    c = rng.normal(size=(5, 5))
    c = c + c.T
    base = solve_elliptope(c)
    scaled = solve_elliptope(7.5 * c)
    assert scaled.value == pytest.approx(7.5 * base.value, rel=1e-7)
    again = solve_elliptope(c)
    assert again.value == base.value and again.iterations == base.iterations


def test_theta_anchors():
    c5 = np.zeros((5, 5), dtype=int)
    for i in range(5):
        c5[i, (i + 1) % 5] = c5[(i + 1) % 5, i] = 1
    assert lovasz_theta(c5).value == pytest.approx(math.sqrt(5), abs=1e-6)
    for n in (3, 5, 8):
        assert lovasz_theta(np.ones((n, n), dtype=int) - np.eye(n, dtype=int)).value == pytest.approx(1, abs=1e-8)
        assert lovasz_theta(np.zeros((n, n), dtype=int)).value == pytest.approx(n, abs=1e-8)


def test_eigmin_fixed_entries_stay_one():
    prog = EigMinProgram.from_free(4, [(0, 1), (2, 3)])
    sol = solve_eigmin(prog)
    a = sol.primal_matrix
    assert np.all(a[prog.fixed_mask()] == 1.0)
    assert sol.primal_value == pytest.approx(sol.dual_value, abs=1e-8)


def test_input_checks():
    with pytest.raises(ValueError, match="tolerance"):
        solve_elliptope(np.eye(2), tol=1e-2)
    with pytest.raises(ValueError, match="256"):
        solve_elliptope(np.zeros((257, 257)))


def test_against_cvxpy():
    cp = pytest.importorskip("cvxpy")
    rng = np.random.default_rng(5)
    for n in (4, 8):
        c = rng.normal(size=(n, n))
        c = c + c.T
        x = cp.Variable((n, n), symmetric=True)
        prob = cp.Problem(cp.Maximize(cp.trace(c @ x)), [cp.diag(x) == 1, x >> 0])
        prob.solve(solver=cp.CLARABEL)
        assert solve_elliptope(c).value == pytest.approx(prob.value, abs=1e-5)
