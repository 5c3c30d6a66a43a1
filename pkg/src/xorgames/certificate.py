"""Certificates that a game admits no quantum advantage.

Given an optimal classical strategy ``(s_a, s_b)`` the only candidate optimal
dual solution of the quantum SDP is ``diag(y) = (Sigma/2, Lambda/2)`` with

    Sigma_ii  = (T s_b)_i   * s_a_i
    Lambda_ii = (T^T s_a)_i * s_b_i

and it is feasible exactly when ``Sigma`` and ``Lambda`` are definite with the
same sign and ``rho(Lambda^-1 T^T Sigma^-1 T) = 1``.  ``Sigma`` and ``Lambda``
are computed exactly; only the spectral radius is floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg

from . import numerics
from .game import ClassicalSolution, GameError, SignVector, XorGame, classical_value, strategy_bias
from .quantum import QuantumSolution, quantum_value

RHO_TOL = 1e-7
DEFINITE_EPS = 1e-12
AGREEMENT_TOL = 1e-6
SINGULAR_RTOL = 1e-9
PM_ONE_TOL = 1e-7
MAX_DEGENERACY = 16


class CertificateError(ValueError):
    """Precondition of a certificate not met."""


@dataclass(frozen=True, eq=False)
class AdvantageCertificate:
    strategy: tuple[SignVector, SignVector]
    sigma_diag: tuple[Fraction, ...]
    lambda_diag: tuple[Fraction, ...]
    definiteness: str
    rho: float
    tolerance_used: float

    @property
    def rho_error(self) -> float:
        return abs(self.rho - 1.0)

    @property
    def rho_rel_error(self) -> float:
        return self.rho_error / max(1.0, abs(self.rho))

    @property
    def passes(self) -> bool:
        return self.definiteness != "indefinite" and self.rho_error <= self.tolerance_used

    def dual_y(self) -> np.ndarray:
        """The dual point ``(Sigma/2, Lambda/2)`` this certificate stands for."""
        return 0.5 * np.array([float(v) for v in self.sigma_diag + self.lambda_diag])

    def block_matrix(self, game: XorGame) -> np.ndarray:
        """``[[Sigma, -T], [-T^T, Lambda]]``."""
        t = game.tilde_array
        m = game.m
        out = np.zeros((2 * m, 2 * m))
        out[:m, :m] = np.diag([float(v) for v in self.sigma_diag])
        out[m:, m:] = np.diag([float(v) for v in self.lambda_diag])
        out[:m, m:] = -t
        out[m:, :m] = -t.T
        return out


def sigma_lambda(game: XorGame, s_a: Sequence[int], s_b: Sequence[int]):
    t = game.tilde
    m = game.m
    sigma = tuple(
        sum((t[i, y] * s_b[y] for y in range(m)), Fraction(0)) * s_a[i] for i in range(m)
    )
    lam = tuple(
        sum((s_a[x] * t[x, i] for x in range(m)), Fraction(0)) * s_b[i] for i in range(m)
    )
    return sigma, lam


def _definiteness(sigma, lam) -> str:
    vals = sigma + lam
    if all(v > DEFINITE_EPS for v in vals):
        return "both_positive"
    if all(v < -DEFINITE_EPS for v in vals):
        return "both_negative"
    return "indefinite"


def certificate_rho(game: XorGame, sigma, lam) -> float:
    """``rho(Lambda^-1 T^T Sigma^-1 T)``.

    For definite ``Sigma, Lambda`` of equal sign this equals the largest
    eigenvalue of the PSD matrix ``S^-1/2 T L^-1 T^T S^-1/2`` (with
    ``S = |Sigma|``, ``L = |Lambda|``), which is what gets evaluated.
    Otherwise the non-symmetric product is used directly, with zero entries of
    ``Sigma`` or ``Lambda`` giving ``inf``.
    """
    t = game.tilde_array
    s = np.array([float(v) for v in sigma])
    la = np.array([float(v) for v in lam])
    definite = _definiteness(sigma, lam)
    if definite != "indefinite":
        s_half = 1.0 / np.sqrt(np.abs(s))
        w = s_half[:, None] * t / np.sqrt(np.abs(la))[None, :]
        return numerics.max_eig(w @ w.T)
    if np.any(s == 0) or np.any(la == 0):
        return float("inf")
    prod = (t.T / s[None, :]) @ t / la[:, None]
    return numerics.spectral_radius(prod)


def thm1_certificate(
    game: XorGame,
    strategy: tuple[Sequence[int], Sequence[int]],
    tol: float = RHO_TOL,
    classical: ClassicalSolution | None = None,
) -> AdvantageCertificate:
    """Evaluate the no-advantage condition for one optimal classical strategy."""
    if game.has_zero_line:
        raise CertificateError(
            "the certificate needs a game matrix with no all-zero row or column"
        )
    s_a, s_b = (tuple(int(v) for v in s) for s in strategy)
    if len(s_a) != game.m or len(s_b) != game.m or any(v not in (1, -1) for v in s_a + s_b):
        raise CertificateError("strategy must be a pair of +-1 vectors of length m")
    if classical is None:
        classical = classical_value(game)
    bias = strategy_bias(game, s_a, s_b)
    if bias != classical.bias:
        raise CertificateError(
            f"strategy has bias {bias}, the optimal classical bias is {classical.bias}"
        )
    sigma, lam = sigma_lambda(game, s_a, s_b)
    return AdvantageCertificate(
        strategy=(s_a, s_b),
        sigma_diag=sigma,
        lambda_diag=lam,
        definiteness=_definiteness(sigma, lam),
        rho=certificate_rho(game, sigma, lam),
        tolerance_used=tol,
    )


@dataclass(frozen=True, eq=False)
class AdvantageVerdict:
    no_advantage: bool
    certificates: tuple[AdvantageCertificate, ...]
    classical: ClassicalSolution
    quantum: QuantumSolution | None = None
    consistent: bool | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def best(self) -> AdvantageCertificate:
        passing = [c for c in self.certificates if c.passes]
        if passing:
            return passing[0]
        return min(self.certificates, key=lambda c: (c.definiteness == "indefinite", c.rho_error))

    @property
    def quantum_gap(self) -> float | None:
        if self.quantum is None:
            return None
        return self.quantum.value - float(self.classical.value)


def no_advantage(
    game: XorGame,
    tol: float = RHO_TOL,
    classical: ClassicalSolution | None = None,
    quantum: QuantumSolution | None = None,
    cross_check: bool = True,
    agreement_tol: float = AGREEMENT_TOL,
) -> AdvantageVerdict:
    """Run the certificate on every optimal classical strategy.

    The verdict is "no advantage" as soon as one certificate passes.  With
    ``cross_check`` the quantum SDP is solved (unless given) and the verdict
    compared with ``omega_q - omega_c <= agreement_tol``; a mismatch is
    recorded in ``consistent`` and ``notes``, never silently resolved.
    """
    if classical is None:
        classical = classical_value(game)
    certs = tuple(
        thm1_certificate(game, pair, tol=tol, classical=classical)
        for pair in classical.optimal_pairs
    )
    verdict = any(c.passes for c in certs)
    consistent = None
    notes = []
    if cross_check:
        if quantum is None:
            quantum = quantum_value(game)
        gap = quantum.value - float(classical.value)
        consistent = verdict == (gap <= agreement_tol)
        if not consistent:
            notes.append(
                f"numerical inconsistency: certificate says no_advantage={verdict} "
                f"but omega_q - omega_c = {gap:.3e}"
            )
    return AdvantageVerdict(verdict, certs, classical, quantum, consistent, tuple(notes))


@dataclass(frozen=True, eq=False)
class Cor1Certificate:
    max_singular_value: float
    degeneracy: int
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    is_pm_one: bool | None
    matched_strategy: tuple[SignVector, SignVector] | None = None
    explanation: str = ""

    @property
    def indeterminate(self) -> bool:
        return self.is_pm_one is None


def _row_basis(w: np.ndarray) -> np.ndarray:
    """Indices of ``k`` well-conditioned rows of the ``m x k`` matrix ``w``."""
    _, _, piv = scipy.linalg.qr(w.T, pivoting=True, mode="economic")
    return np.sort(piv[: w.shape[1]])


def cor1_check(game: XorGame, max_degeneracy: int = MAX_DEGENERACY, tol: float = PM_ONE_TOL) -> Cor1Certificate:
    """Look for +-1 vectors among the top singular vectors of the game matrix.

    A +-1 vector lying in a ``k``-dimensional subspace is pinned down by its
    entries on ``k`` independent coordinates, so the top right-singular space
    is searched over the ``2^(k-1)`` sign patterns on such a coordinate set
    (up to global sign).  A candidate ``s_b`` is accepted when it lies in the
    space and ``T s_b / sigma_max`` is also a +-1 vector.  Spaces of dimension
    above ``max_degeneracy`` make the check abstain.
    """
    t = game.tilde_array
    u, s, v = numerics.svd(t)
    top = float(s[0])
    m = game.m
    if top <= 0:
        return Cor1Certificate(0.0, m, u, v, False, None, "zero game matrix")
    k = int(np.sum(s >= top * (1.0 - SINGULAR_RTOL)))
    uk, vk = u[:, :k], v[:, :k]
    if k > max_degeneracy:
        return Cor1Certificate(
            top, k, uk, vk, None, None,
            f"top singular space has dimension {k} > {max_degeneracy}; abstaining",
        )
    rows = _row_basis(vk)
    basis = vk[rows]
    for tail in itertools.product((1, -1), repeat=k - 1):
        pattern = np.array((1,) + tail, dtype=float)
        coef = np.linalg.solve(basis, pattern)
        cand = vk @ coef
        if np.max(np.abs(np.abs(cand) - 1.0)) > tol:
            continue
        s_b = np.sign(cand)
        image = t @ s_b / top
        if np.max(np.abs(np.abs(image) - 1.0)) > tol:
            continue
        s_a = tuple(int(x) for x in np.sign(image))
        pair = (s_a, tuple(int(x) for x in s_b))
        return Cor1Certificate(top, k, uk, vk, True, pair, "")
    return Cor1Certificate(top, k, uk, vk, False, None, "no +-1 vector in the top singular space")


@dataclass(frozen=True)
class SymmetricReduction:
    sigma_definite: bool
    rho: float
    passes: bool


def symmetric_reduction_check(
    game: XorGame, strategy: tuple[Sequence[int], Sequence[int]], tol: float = RHO_TOL
) -> SymmetricReduction:
    """Reduced condition for a symmetric game and a symmetric strategy:
    ``+-Sigma`` positive definite and ``rho(Sigma^-1 T) = 1``."""
    s_a, s_b = (tuple(int(v) for v in s) for s in strategy)
    if not game.is_symmetric():
        raise CertificateError("reduced check needs a symmetric game matrix")
    if s_a != s_b and s_a != tuple(-v for v in s_b):
        raise CertificateError("reduced check needs a symmetric strategy (s_a = +-s_b)")
    sigma, _ = sigma_lambda(game, s_a, s_b)
    sd = np.array([float(v) for v in sigma])
    definite = all(v > DEFINITE_EPS for v in sigma) or all(v < -DEFINITE_EPS for v in sigma)
    if not definite:
        if np.any(sd == 0):
            return SymmetricReduction(False, float("inf"), False)
        rho = numerics.spectral_radius(game.tilde_array / sd[:, None])
        return SymmetricReduction(False, rho, False)
    # Sigma^-1 T is similar to the symmetric |Sigma|^-1/2 T |Sigma|^-1/2 up to sign
    half = 1.0 / np.sqrt(np.abs(sd))
    rho = numerics.spectral_radius(half[:, None] * game.tilde_array * half[None, :])
    return SymmetricReduction(True, rho, abs(rho - 1.0) <= tol)


def is_optimal_pair(game: XorGame, pair, classical: ClassicalSolution | None = None) -> bool:
    if classical is None:
        classical = classical_value(game)
    return strategy_bias(game, *pair) == classical.bias
