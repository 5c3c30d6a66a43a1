"""Small dense semidefinite programming.

Two program shapes are supported:

* the elliptope program ``max <C, X>  s.t.  diag(X) = 1, X >= 0`` whose dual is
  ``min sum(y)  s.t.  diag(y) - C >= 0``;
* the eigenvalue-minimisation program ``min lambda_max(A)`` over symmetric
  ``A`` with some entries fixed to 1 (the diagonal plus a pattern) and the
  rest free.

Both are reduced to the standard pair

    (P)  max <C, X>   s.t.  <A_k, X> = b_k,  X >= 0
    (D)  min b^T y    s.t.  Z = sum_k y_k A_k - C >= 0

and solved with an infeasible primal-dual path-following method using the
HKM search direction and a Mehrotra predictor-corrector step.  The starting
points used here are strictly feasible, and Newton steps preserve the linear
constraints, so every iterate is feasible up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

DEFAULT_TOL = 1e-8
MAX_ITER = 200
_STEP_FRACTION = 0.98
_DIVERGENCE = 1e12
_BLOCK_ENTRIES = 4096
_REFINE = 1e-3
_STALL = 3


@dataclass(frozen=True, eq=False)
class SdpSolution:
    """Result of a solve.

    For the elliptope shape ``primal_matrix`` is the optimal ``X``,
    ``primal_value = <C, X>`` and ``dual_value = sum(dual_vector)``.  For the
    eigenvalue shape ``primal_matrix`` is the optimal ``A``, ``primal_value``
    its largest eigenvalue and ``dual_value`` the lower bound ``<J, X>`` from
    the certificate matrix ``X``.
    """

    primal_matrix: np.ndarray
    primal_value: float
    dual_value: float
    iterations: int
    status: str
    dual_vector: np.ndarray
    certificate: np.ndarray
    primal_residual: float
    dual_residual: float
    history: tuple[tuple[float, float], ...] = field(default=())

    @property
    def gap(self) -> float:
        return abs(self.primal_value - self.dual_value)

    @property
    def value(self) -> float:
        return self.primal_value

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


@dataclass(frozen=True, eq=False)
class EllipticProgram:
    objective: np.ndarray

    @property
    def dim(self) -> int:
        return self.objective.shape[0]


@dataclass(frozen=True, eq=False)
class EigMinProgram:
    """``dim`` x ``dim`` symmetric matrix; ``free_positions`` are the pairs
    ``(i, j)``, ``i < j``, whose entries may vary.  Everything else is 1."""

    dim: int
    free_positions: tuple[tuple[int, int], ...]

    @classmethod
    def from_free(cls, dim: int, free: Sequence[tuple[int, int]]) -> "EigMinProgram":
        pairs = set()
        for i, j in free:
            if i == j:
                raise ValueError("diagonal entries are always fixed")
            if not (0 <= i < dim and 0 <= j < dim):
                raise ValueError(f"position {(i, j)} outside a {dim}x{dim} matrix")
            pairs.add((min(i, j), max(i, j)))
        return cls(dim, tuple(sorted(pairs)))

    def fixed_mask(self) -> np.ndarray:
        mask = np.ones((self.dim, self.dim), dtype=bool)
        for i, j in self.free_positions:
            mask[i, j] = mask[j, i] = False
        return mask


class _Constraints:
    """Sparse symmetric constraint matrices ``A_k`` stored entrywise.

    Entry ``t`` contributes ``vals[t]`` at ``(rows[t], cols[t])`` of ``A_{ids[t]}``;
    off-diagonal entries are stored in both triangles.  Entries are sorted by
    constraint so per-constraint sums are ``reduceat`` calls.
    """

    def __init__(self, n: int, entries: list[list[tuple[int, int, float]]], b):
        self.n = n
        self.k = len(entries)
        ids, rows, cols, vals = [], [], [], []
        for c, ent in enumerate(entries):
            if not ent:
                raise ValueError(f"constraint {c} is empty")
            for i, j, v in ent:
                ids.append(c)
                rows.append(i)
                cols.append(j)
                vals.append(v)
                if i != j:
                    ids.append(c)
                    rows.append(j)
                    cols.append(i)
                    vals.append(v)
        self.ids = np.array(ids, dtype=np.int64)
        self.rows = np.array(rows, dtype=np.int64)
        self.cols = np.array(cols, dtype=np.int64)
        self.vals = np.array(vals, dtype=float)
        self.starts = np.searchsorted(self.ids, np.arange(self.k))
        self.b = np.asarray(b, dtype=float)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """``A(X)_k = <A_k, X>``."""
        return np.add.reduceat(self.vals * x[self.rows, self.cols], self.starts)

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        np.add.at(out, (self.rows, self.cols), self.vals * y[self.ids])
        return out

    def schur(self, x: np.ndarray, zinv: np.ndarray) -> np.ndarray:
        """``M_kl = tr(A_k X A_l Z^{-1})``."""
        total = len(self.ids)
        xs = x[np.ix_(self.cols, self.rows)]
        out = np.empty((self.k, self.k))
        bounds = list(range(0, self.k, max(1, _BLOCK_ENTRIES * self.k // max(total, 1))))
        bounds.append(self.k)
        for c0, c1 in zip(bounds[:-1], bounds[1:]):
            if c0 == c1:
                continue
            t0 = self.starts[c0]
            t1 = self.starts[c1] if c1 < self.k else total
            block = (
                self.vals[t0:t1, None]
                * self.vals[None, :]
                * xs[t0:t1]
                * zinv[np.ix_(self.rows[t0:t1], self.cols)]
            )
            block = np.add.reduceat(block, self.starts[c0:c1] - t0, axis=0)
            out[c0:c1] = np.add.reduceat(block, self.starts, axis=1)
        return 0.5 * (out + out.T)


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    """Largest ``alpha`` with ``X + alpha dX`` still PSD."""
    try:
        lower = np.linalg.cholesky(x)
        w = np.linalg.solve(lower, np.linalg.solve(lower, dx).T)
        lam = np.linalg.eigvalsh(_sym(w))[0]
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh(x)
        vals = np.maximum(vals, 1e-300)
        s = vecs / np.sqrt(vals)
        lam = np.linalg.eigvalsh(_sym(s.T @ dx @ s))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _inv_spd(z: np.ndarray) -> np.ndarray:
    try:
        lower = np.linalg.cholesky(z)
        linv = np.linalg.solve(lower, np.eye(z.shape[0]))
        return linv.T @ linv
    except np.linalg.LinAlgError:
        return _sym(np.linalg.pinv(z))


def _solve_spd(m: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        lower = np.linalg.cholesky(m)
        return np.linalg.solve(lower.T, np.linalg.solve(lower, rhs))
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(m, rhs, rcond=None)[0]


@dataclass
class _Iterate:
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray


class InteriorPointSolver:
    """One solve of the standard-form pair; holds the mutable iteration state."""

    def __init__(self, c: np.ndarray, cons: _Constraints, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER):
        self.c = _sym(np.asarray(c, dtype=float))
        self.cons = cons
        self.tol = tol
        self.max_iter = max_iter
        self.history: list[tuple[float, float]] = []
        self.iterations = 0
        self.status = "max_iter"

    def _residuals(self, it: _Iterate):
        cons, c = self.cons, self.c
        rp = cons.b - cons.apply(it.x)
        rd = c - cons.adjoint(it.y) + it.z
        return rp, rd

    def _direction(self, it, zinv, schur, r, rp, rd):
        cons = self.cons
        rhs = cons.apply(r @ zinv) + cons.apply(it.x @ rd @ zinv) - rp
        dy = _solve_spd(schur, rhs)
        dz = cons.adjoint(dy) - rd
        dx = _sym((r - it.x @ dz) @ zinv)
        return dx, dy, dz

    def run(self, x0: np.ndarray, y0: np.ndarray) -> _Iterate:
        """Iterate from ``(x0, y0)``; returns the most accurate iterate seen.

        Iteration continues past ``tol`` towards ``tol * _REFINE`` while steps
        keep making progress, which buys margin for downstream equality tests.
        """
        cons, c = self.cons, self.c
        n = cons.n
        it = _Iterate(x0.copy(), y0.copy(), cons.adjoint(y0) - c)
        eye = np.eye(n)
        bnorm = 1.0 + np.linalg.norm(cons.b)
        cnorm = 1.0 + np.linalg.norm(c)
        best, best_err = None, np.inf
        for k in range(self.max_iter + 1):
            rp, rd = self._residuals(it)
            pobj = float(np.sum(c * it.x))
            dobj = float(cons.b @ it.y)
            self.history.append((pobj, dobj))
            pinf = np.linalg.norm(rp) / bnorm
            dinf = np.linalg.norm(rd) / cnorm
            relgap = abs(dobj - pobj) / (1.0 + abs(pobj) + abs(dobj))
            err = max(relgap, pinf, dinf)
            if err < best_err:
                best = _Iterate(it.x.copy(), it.y.copy(), it.z.copy())
                best_err = err
                self.iterations = k
            if err <= self.tol * _REFINE:
                break
            if best_err <= self.tol and k - self.iterations >= _STALL:
                break
            if np.max(np.abs(it.y)) > _DIVERGENCE or np.max(np.abs(it.x)) > _DIVERGENCE:
                self.status = "infeasible"
                return best
            if k == self.max_iter:
                break
            mu = float(np.sum(it.x * it.z)) / n
            try:
                zinv = _inv_spd(it.z)
                schur = cons.schur(it.x, zinv)
                xz = it.x @ it.z

                dxa, dya, dza = self._direction(it, zinv, schur, -xz, rp, rd)
                ap = min(1.0, _max_step(it.x, dxa))
                ad = min(1.0, _max_step(it.z, dza))
                mu_aff = float(np.sum((it.x + ap * dxa) * (it.z + ad * dza))) / n
                sigma = min(1.0, max(0.0, mu_aff / mu) ** 3) if mu > 0 else 0.0

                r = sigma * mu * eye - xz - dxa @ dza
                dx, dy, dz = self._direction(it, zinv, schur, r, rp, rd)
                ap = min(1.0, _STEP_FRACTION * _max_step(it.x, dx))
                ad = min(1.0, _STEP_FRACTION * _max_step(it.z, dz))
            except (np.linalg.LinAlgError, FloatingPointError):
                break
            if not (np.all(np.isfinite(dx)) and np.all(np.isfinite(dy))):
                break
            if ap < 1e-12 and ad < 1e-12:
                break
            it.x = _sym(it.x + ap * dx)
            it.y = it.y + ad * dy
            # Z is recomputed from y so dual feasibility holds to rounding.
            z_new = cons.adjoint(it.y) - c
            try:
                np.linalg.cholesky(z_new)
                it.z = z_new
            except np.linalg.LinAlgError:
                it.z = _sym(it.z + ad * dz)
        self.status = "optimal" if best_err <= self.tol else "max_iter"
        return best


def _check_tol(tol: float) -> None:
    if not (0 < tol <= 1e-4):
        raise ValueError(f"tolerance must lie in (0, 1e-4], got {tol}")


def solve_elliptope(p: EllipticProgram | np.ndarray, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER) -> SdpSolution:
    """Maximise ``<C, X>`` over correlation matrices (unit diagonal, PSD).

    The returned ``dual_vector`` is a ``y`` with ``diag(y) - C`` PSD, so
    ``sum(y)`` is a certified upper bound.
    """
    if not isinstance(p, EllipticProgram):
        p = EllipticProgram(np.asarray(p, dtype=float))
    _check_tol(tol)
    c = _sym(np.asarray(p.objective, dtype=float))
    n = c.shape[0]
    if c.shape != (n, n) or not np.all(np.isfinite(c)):
        raise ValueError("objective must be a finite square matrix")
    if n > 256:
        raise ValueError(f"dimension {n} exceeds the dense cap of 256")
    cons = _Constraints(n, [[(i, i, 1.0)] for i in range(n)], np.ones(n))
    lam = float(np.max(np.abs(np.linalg.eigvalsh(c)))) if n else 0.0
    y0 = np.full(n, 1.0 + lam)
    solver = InteriorPointSolver(c, cons, tol, max_iter)
    it = solver.run(np.eye(n), y0)

    y = it.y.copy()
    shift = -np.linalg.eigvalsh(np.diag(y) - c)[0]
    if shift > 0:
        y += shift
    rp, rd = solver._residuals(it)
    return SdpSolution(
        primal_matrix=it.x,
        primal_value=float(np.sum(c * it.x)),
        dual_value=float(np.sum(y)),
        iterations=solver.iterations,
        status=solver.status,
        dual_vector=y,
        certificate=np.diag(y) - c,
        primal_residual=float(np.max(np.abs(rp))) if n else 0.0,
        dual_residual=float(np.max(np.abs(rd))) if n else 0.0,
        history=tuple(solver.history),
    )


def solve_eigmin(p: EigMinProgram, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER) -> SdpSolution:
    """Minimise the largest eigenvalue over the free entries of ``p``.

    Internally this is the dual of ``max <J, X> s.t. tr X = 1, X_ij = 0`` on
    the free positions.  The optimal matrix has its fixed entries equal to 1
    exactly; the free entries are ``1 - y_ij``.
    """
    _check_tol(tol)
    n = p.dim
    if n > 256:
        raise ValueError(f"dimension {n} exceeds the dense cap of 256")
    entries = [[(i, i, 1.0) for i in range(n)]]
    entries += [[(i, j, 1.0)] for i, j in p.free_positions]
    b = np.zeros(len(entries))
    b[0] = 1.0
    cons = _Constraints(n, entries, b)
    j = np.ones((n, n))
    y0 = np.zeros(len(entries))
    y0[0] = n + 1.0
    solver = InteriorPointSolver(j, cons, tol, max_iter)
    it = solver.run(np.eye(n) / n, y0)

    a = np.ones((n, n))
    for (r, s), v in zip(p.free_positions, it.y[1:]):
        a[r, s] = a[s, r] = 1.0 - v
    lam_max = float(np.linalg.eigvalsh(a)[-1])
    rp, rd = solver._residuals(it)
    return SdpSolution(
        primal_matrix=a,
        primal_value=lam_max,
        dual_value=float(np.sum(it.x)),
        iterations=solver.iterations,
        status=solver.status,
        dual_vector=it.y.copy(),
        certificate=it.x,
        primal_residual=float(np.max(np.abs(rd))),
        dual_residual=float(np.max(np.abs(rp))),
        history=tuple(solver.history),
    )
