"""Lovasz theta and class-1 (Shannon capacity = independence number) certificates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .certificate import cor1_check
from .game import GameError, XorGame
from .graph import ALPHA_CAP, GameGraph, build_graph_rules, independence_number
from .sdp import DEFAULT_TOL, EigMinProgram, SdpSolution, solve_eigmin

CLASS1_TOL = 1e-5
WITNESS_TOL = 1e-8
COMMUTE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ThetaResult:
    value: float
    matrix: np.ndarray
    sdp: SdpSolution


def lovasz_theta(adjacency, tol: float = DEFAULT_TOL) -> ThetaResult:
    """Minimum largest eigenvalue over symmetric matrices equal to 1 on the
    diagonal and on non-edges; the edge entries are free."""
    adj = np.asarray(adjacency)
    n = adj.shape[0]
    if adj.shape != (n, n) or not np.array_equal(adj, adj.T) or np.any(np.diag(adj)):
        raise ValueError("adjacency must be a symmetric 0/1 matrix with zero diagonal")
    i, j = np.nonzero(np.triu(adj, 1))
    prog = EigMinProgram.from_free(n, list(zip(i.tolist(), j.tolist())))
    sol = solve_eigmin(prog, tol=tol)
    return ThetaResult(sol.primal_value, sol.primal_matrix, sol)


def _witness_terms(g: GameGraph):
    m = g.m
    j = np.ones((m, m))
    eye = np.eye(m)
    pauli_x = np.array([[0.0, 1.0], [1.0, 0.0]])
    ones_term = np.kron(np.kron(j, j), np.eye(2) + pauli_x)
    x_term = np.kron(np.kron(eye, eye), pauli_x)
    return ones_term, g.adjacency.astype(float), x_term


@dataclass(frozen=True, eq=False)
class ThetaWitness:
    a: float
    b: float
    matrix: np.ndarray
    lambda_max: float
    candidate_eigenvalues: tuple[float, float, float]
    pattern_ok: bool
    commutator_norm: float
    alpha: int
    tolerance: float = WITNESS_TOL

    @property
    def candidates_equal_alpha(self) -> bool:
        return all(abs(c - self.alpha) <= self.tolerance for c in self.candidate_eigenvalues)

    @property
    def valid(self) -> bool:
        return (
            self.pattern_ok
            and abs(self.lambda_max - self.alpha) <= self.tolerance
            and self.commutator_norm <= COMMUTE_TOL
        )


def closed_form_witness(g: GameGraph, alpha: int, tol: float = WITNESS_TOL) -> ThetaWitness:
    """Build ``J(x)J(x)(I+X) + a A(G) + b I(x)I(x)X`` with ``a = -m``, ``b = alpha - m``.

    The three eigenvalues that compete for the maximum are reported using the
    operator norm of the sign matrix; they all equal ``alpha`` exactly when
    ``alpha = m (m + ||Phi||) / 2``.  Nothing is asserted here: ``valid`` says
    whether the witness actually certifies ``theta <= alpha``.
    """
    m = g.m
    a = -float(m)
    b = float(alpha) - m
    ones_term, adj, x_term = _witness_terms(g)
    mat = ones_term + a * adj + b * x_term
    fixed = (adj == 0)
    pattern_ok = bool(np.all(mat[fixed] == 1.0))
    lam = float(numerics.max_eig(mat))
    norm = numerics.operator_norm(g.sign_matrix)
    cands = (
        2.0 * m * m + b + a * (2 * m - 1),
        b - a,
        -b + a * (1 - m - norm),
    )
    terms = (ones_term, adj, x_term)
    comm = 0.0
    for p in range(3):
        for q in range(p + 1, 3):
            c = terms[p] @ terms[q] - terms[q] @ terms[p]
            comm = max(comm, float(np.max(np.abs(c))))
    return ThetaWitness(a, b, mat, lam, cands, pattern_ok, comm, int(alpha), tol)


@dataclass(frozen=True, eq=False)
class CapacityCertificate:
    alpha: int
    theta: float
    class1: bool
    alpha_source: str
    theta_result: ThetaResult
    theta_witness: ThetaWitness | None = None
    alpha_witness: tuple[int, ...] = ()
    notes: tuple[str, ...] = field(default=())
    tolerance: float = CLASS1_TOL

    @property
    def gap(self) -> float:
        return self.theta - self.alpha

    @property
    def sandwich_ok(self) -> bool:
        return self.alpha <= self.theta + self.tolerance


def formula_alpha(game: XorGame) -> int | None:
    """``m (m + ||Phi||) / 2`` when it is (numerically) an integer."""
    m = game.m
    val = 0.5 * m * (m + numerics.operator_norm(game.sign_array))
    r = round(val)
    return int(r) if abs(val - r) <= 1e-8 else None


def class1_certify(
    game: XorGame,
    tol: float = DEFAULT_TOL,
    alpha_cap: int = ALPHA_CAP,
    class1_tol: float = CLASS1_TOL,
    graph: GameGraph | None = None,
) -> CapacityCertificate:
    """Certify ``Theta(G) = alpha(G)`` for the game graph via ``alpha = theta``.

    ``alpha`` comes from exact branch and bound when the graph is small
    enough, otherwise from the closed formula for games whose top singular
    vectors are +-1.  When that holds the closed-form witness is also built.
    """
    if not game.uniform:
        raise GameError("class-1 certification is defined for uniform games")
    if graph is None:
        graph = build_graph_rules(game.signs)
    notes = []
    cor1 = cor1_check(game)
    alpha_f = formula_alpha(game) if cor1.is_pm_one else None

    if graph.n <= alpha_cap:
        ind = independence_number(graph, cap=alpha_cap)
        alpha, source, witness_set = ind.size, "branch_and_bound", ind.witness
        if alpha_f is not None and alpha_f != alpha:
            notes.append(f"formula alpha {alpha_f} disagrees with branch and bound {alpha}")
    elif alpha_f is not None:
        alpha, source, witness_set = alpha_f, "formula", ()
        notes.append(f"graph has {graph.n} vertices > cap {alpha_cap}; alpha from formula")
    else:
        raise GameError(
            f"graph has {graph.n} vertices > cap {alpha_cap} and no closed formula applies"
        )

    theta = lovasz_theta(graph.adjacency, tol=tol)
    if not theta.sdp.optimal:
        notes.append(f"theta SDP status {theta.sdp.status}")
    witness = None
    if cor1.is_pm_one:
        witness = closed_form_witness(graph, alpha)
        if not witness.valid:
            notes.append("closed-form witness failed for a game with +-1 top singular vectors")
    class1 = abs(theta.value - alpha) <= class1_tol
    return CapacityCertificate(
        alpha=alpha,
        theta=theta.value,
        class1=class1,
        alpha_source=source,
        theta_result=theta,
        theta_witness=witness,
        alpha_witness=witness_set,
        notes=tuple(notes),
        tolerance=class1_tol,
    )
