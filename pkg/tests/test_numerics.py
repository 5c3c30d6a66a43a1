import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from xorgames import numerics

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def square(n_max=6):
    return st.integers(1, n_max).flatmap(lambda n: arrays(np.float64, (n, n), elements=finite))


def _pivoted_cholesky_psd(a, tol):
    """Independent PSD oracle: greedy pivoted Cholesky with a relative floor."""
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    scale = max(1.0, np.abs(a).max()) * n
    work = a.copy()
    for _ in range(n):
        d = np.diag(work)
        if d.min() < -tol * scale:
            return False
        k = int(np.argmax(d))
        if d[k] <= tol * scale:
            return np.abs(work).max() <= tol * scale * 10
        col = work[:, k] / np.sqrt(d[k])
        work = work - np.outer(col, col)
    return True


@settings(max_examples=60, deadline=None)
@given(square())
def test_sym_eig_reconstructs(a):
    s = numerics.symmetrize(a)
    w, v = numerics.sym_eig(a)
    assert np.all(np.diff(w) <= 1e-12)
    assert np.allclose(v @ np.diag(w) @ v.T, s, atol=1e-9 * max(1, np.abs(s).max()))
    assert np.allclose(v.T @ v, np.eye(len(w)), atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(square())
def test_svd_reconstructs(a):
    u, s, v = numerics.svd(a)
    assert np.all(s >= 0) and np.all(np.diff(s) <= 1e-12)
    assert np.allclose(u @ np.diag(s) @ v.T, a, atol=1e-9 * max(1, np.abs(a).max()))
    assert numerics.operator_norm(a) == pytest.approx(s[0], abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(square(5))
def test_is_psd_matches_cholesky_oracle(a):
    g = a @ a.T
    assert numerics.is_psd(g)
    shifted = g - (np.linalg.eigvalsh(g).min() + 1.0) * np.eye(len(g))
    assert not numerics.is_psd(shifted)
    assert numerics.is_psd(shifted) == _pivoted_cholesky_psd(shifted, 1e-9)


def test_spectral_radius_nonsymmetric():
    jordan = np.array([[2.0, 1.0], [0.0, -3.0]])
    assert numerics.spectral_radius(jordan) == pytest.approx(3.0)
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert numerics.spectral_radius(rot) == pytest.approx(1.0)


def test_min_max_eig_and_shape_errors():
    d = np.diag([3.0, -1.0, 2.0])
    assert numerics.min_eig(d) == pytest.approx(-1.0)
    assert numerics.max_eig(d) == pytest.approx(3.0)
    assert list(numerics.eigvalsh_desc(d)) == [3.0, 2.0, -1.0]
    with pytest.raises(ValueError):
        numerics.as_real_matrix(np.ones((2, 3)), square=True)
    with pytest.raises(ValueError):
        numerics.as_real_matrix([[np.nan]])
