"""Optimal quantum value of an XOR game and its Tsirelson vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .game import GameError, XorGame
from .sdp import DEFAULT_TOL, SdpSolution, solve_elliptope

CLIP_TOL = 1e-9


class SolverError(RuntimeError):
    """The SDP solver did not reach the requested accuracy."""

    def __init__(self, msg: str, solution: SdpSolution):
        super().__init__(msg)
        self.solution = solution


def block_game_matrix(game: XorGame) -> np.ndarray:
    """The ``2m x 2m`` symmetric matrix ``[[0, T/2], [T^T/2, 0]]``."""
    t = game.tilde_array
    m = game.m
    out = np.zeros((2 * m, 2 * m))
    out[:m, m:] = 0.5 * t
    out[m:, :m] = 0.5 * t.T
    return out


@dataclass(frozen=True, eq=False)
class QuantumSolution:
    bias: float
    gram: np.ndarray
    vectors: np.ndarray
    dual_y: np.ndarray
    sdp: SdpSolution

    @property
    def value(self) -> float:
        return 0.5 * (1.0 + self.bias)

    @property
    def dual_value(self) -> float:
        return float(np.sum(self.dual_y))

    @property
    def gap(self) -> float:
        return self.sdp.gap

    @property
    def m(self) -> int:
        return self.gram.shape[0] // 2

    @property
    def alice(self) -> np.ndarray:
        return self.vectors[: self.m]

    @property
    def bob(self) -> np.ndarray:
        return self.vectors[self.m :]

    @property
    def strategy_matrix(self) -> np.ndarray:
        """``S[x, y] = <u_x | v_y>``."""
        return self.gram[: self.m, self.m :]


def extract_vectors(gram, tol: float = 1e-7, clip: float = CLIP_TOL) -> np.ndarray:
    """Factor a correlation matrix as ``V V^T``; rows of ``V`` are unit vectors.

    Eigenvalues below ``clip * max(1, lambda_max)`` are dropped, so the
    vector dimension is the numerical rank.
    """
    g = numerics.symmetrize(gram)
    if not np.allclose(np.diag(g), 1.0, atol=tol):
        raise ValueError("Gram matrix must have unit diagonal")
    w, v = numerics.sym_eig(g)
    scale = max(1.0, float(w[0]))
    if w[-1] < -max(tol, 1e-7) * scale:
        raise ValueError(f"Gram matrix is not PSD (min eigenvalue {w[-1]:.3g})")
    keep = w > clip * scale
    if not np.any(keep):
        keep[0] = True
    vecs = v[:, keep] * np.sqrt(w[keep])
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    return vecs / np.where(norms > 0, norms, 1.0)


def quantum_value(game: XorGame, tol: float = DEFAULT_TOL, strict: bool = True) -> QuantumSolution:
    """Solve the elliptope relaxation of the game; it is tight for XOR games.

    With ``strict`` a non-converged solve raises :class:`SolverError` carrying
    the best iterate; otherwise it is returned as is.
    """
    sol = solve_elliptope(block_game_matrix(game), tol=tol)
    if strict and not sol.optimal:
        raise SolverError(
            f"quantum SDP stopped with status {sol.status} after {sol.iterations} "
            f"iterations (gap {sol.gap:.3g})",
            sol,
        )
    gram = numerics.symmetrize(sol.primal_matrix)
    vectors = extract_vectors(gram, tol=max(1e-7, 10 * tol))
    return QuantumSolution(
        bias=sol.primal_value,
        gram=gram,
        vectors=vectors,
        dual_y=sol.dual_vector,
        sdp=sol,
    )


@dataclass(frozen=True)
class NormBound:
    quantum_bias: float
    norm_bound: float
    saturated: bool

    @property
    def norm_value(self) -> float:
        """``(1 + ||Phi||/m) / 2``, the winning probability at saturation."""
        return 0.5 * (1.0 + self.norm_bound)


def norm_bound_check(game: XorGame, quantum: QuantumSolution | None = None, tol: float = 1e-6) -> NormBound:
    """Compare the quantum bias with ``||Phi|| / m`` for a uniform game."""
    if not game.uniform:
        raise GameError("norm-bound saturation is only defined for uniform games")
    if quantum is None:
        quantum = quantum_value(game)
    bound = numerics.operator_norm(game.sign_array) / game.m
    return NormBound(quantum.bias, bound, abs(quantum.bias - bound) <= tol)
