"""The 2m^2-vertex graph of an XOR game.

Vertices are labelled ``(x, y, a)`` and indexed ``v = (x*m + y)*2 + a``; two
vertices are adjacent when ``x = x'`` and ``a != a'``, or when ``y = y'`` and
``(-1)^(a xor a') != Phi[x, y] * Phi[x', y]``.  The independence number of
this graph is ``m^2`` times the classical winning probability of the uniform
game with sign matrix ``Phi``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import numerics

ALPHA_CAP = 50
SPECTRUM_TOL = 1e-8
_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])


class GraphError(ValueError):
    pass


def _check_signs(signs) -> np.ndarray:
    phi = np.array(signs)
    if phi.ndim != 2 or phi.shape[0] != phi.shape[1] or phi.size == 0:
        raise GraphError("sign matrix must be square and non-empty")
    if not np.all(np.isin(phi, (1, -1))):
        raise GraphError("sign matrix entries must be +1 or -1")
    return phi.astype(int)


def vertex_index(m: int, x: int, y: int, a: int) -> int:
    return (x * m + y) * 2 + a


@dataclass(frozen=True, eq=False)
class GameGraph:
    m: int
    sign_matrix: np.ndarray
    adjacency: np.ndarray

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def vertices(self) -> list[tuple[int, int, int]]:
        m = self.m
        return [(x, y, a) for x in range(m) for y in range(m) for a in (0, 1)]

    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    def neighbours(self, v: int) -> list[int]:
        return np.flatnonzero(self.adjacency[v]).tolist()

    def label(self, v: int) -> str:
        return "{},{},{}".format(*self.vertices[v])


def build_graph_rules(signs) -> GameGraph:
    """Adjacency straight from the two edge rules."""
    phi = _check_signs(signs)
    m = phi.shape[0]
    n = 2 * m * m
    adj = np.zeros((n, n), dtype=int)
    labels = [(x, y, a) for x in range(m) for y in range(m) for a in (0, 1)]
    for v, (x, y, a) in enumerate(labels):
        for w, (x2, y2, a2) in enumerate(labels):
            if v == w:
                continue
            rule1 = x == x2 and a != a2
            rule2 = y == y2 and (-1) ** (a ^ a2) != phi[x, y] * phi[x2, y]
            if rule1 or rule2:
                adj[v, w] = 1
    return GameGraph(m, phi, adj)


def _d_operator(phi: np.ndarray) -> np.ndarray:
    return np.diag(phi.astype(float).ravel())


def build_graph_operator(signs) -> GameGraph:
    """Adjacency assembled from the tensor-product formula on registers (x, y, a):

        I (x) (J - I) (x) X  +  1/2 J (x) I (x) (I + X)  -  1/2 [D (J (x) I) D] (x) (I - X)
    """
    phi = _check_signs(signs)
    m = phi.shape[0]
    eye_m = np.eye(m)
    j = np.ones((m, m))
    eye2 = np.eye(2)
    d = _d_operator(phi)
    term1 = np.kron(np.kron(eye_m, j - eye_m), _PAULI_X)
    term2 = 0.5 * np.kron(np.kron(j, eye_m), eye2 + _PAULI_X)
    term3 = -0.5 * np.kron(d @ np.kron(j, eye_m) @ d, eye2 - _PAULI_X)
    adj = term1 + term2 + term3
    rounded = np.rint(adj)
    if np.max(np.abs(adj - rounded)) > 1e-12:
        raise GraphError("operator formula produced non-integral adjacency")
    return GameGraph(m, phi, rounded.astype(int))


def predicted_spectrum(signs) -> list[tuple[float, int]]:
    """Closed-form eigenvalues with multiplicities, as ``(value, mult)`` pairs.

    ``{2m-1: 1, m-1: 2m-2, -1: (m-1)^2, 1-m+-lambda_z: 1 each, 1: m(m-2)}``
    with ``lambda_z`` the singular values of ``Phi``.  For ``m = 1`` the graph
    is a single edge and the spectrum is ``{1, -1}``.
    """
    phi = _check_signs(signs)
    m = phi.shape[0]
    if m == 1:
        return [(1.0, 1), (-1.0, 1)]
    lam = numerics.svd(phi)[1]
    out = [(2.0 * m - 1, 1), (m - 1.0, 2 * m - 2), (-1.0, (m - 1) ** 2), (1.0, m * (m - 2))]
    for z in lam:
        out.append((1.0 - m + z, 1))
        out.append((1.0 - m - z, 1))
    return [(v, k) for v, k in out if k > 0]


def expand_multiset(pairs) -> np.ndarray:
    vals = [v for v, k in pairs for _ in range(k)]
    return np.sort(np.array(vals))[::-1]


@dataclass(frozen=True, eq=False)
class GraphSpectrumReport:
    predicted: list[tuple[float, int]]
    computed: np.ndarray
    max_deviation: float
    overlap_error: float
    eigvec_residual: float
    tolerance: float = SPECTRUM_TOL

    @property
    def matches(self) -> bool:
        return (
            self.max_deviation <= self.tolerance
            and self.overlap_error <= self.tolerance
            and self.eigvec_residual <= self.tolerance
        )


def minus_block(phi: np.ndarray) -> np.ndarray:
    """The block ``-I (x) (J - I) - D (J (x) I) D`` acting on the (x, y) registers,
    i.e. the odd sector after a Hadamard on the answer register."""
    m = phi.shape[0]
    eye_m = np.eye(m)
    j = np.ones((m, m))
    d = _d_operator(phi)
    return -np.kron(eye_m, j - eye_m) - d @ np.kron(j, eye_m) @ d


def eta_vectors(phi: np.ndarray):
    """Yield ``(z, sign, vector, expected_eigenvalue)`` for the nontrivial
    eigenvectors of the odd block built from the SVD of ``Phi``.

    Normalisation is skipped when ``m +- lambda_z`` is numerically zero (the
    vector is then zero and carries no information)."""
    m = phi.shape[0]
    u, s, v = numerics.svd(phi)
    ones = np.ones(m)
    d = _d_operator(phi)
    for z in range(m):
        left = np.kron(u[:, z], ones)
        right = d @ np.kron(ones, v[:, z])
        for sign in (1, -1):
            vec = left + sign * right
            norm2 = 2.0 * (m + sign * s[z])
            if norm2 > 1e-9:
                vec = vec / np.sqrt(norm2)
            yield z, sign, vec, 1.0 - m - sign * s[z]


def singular_overlap_matrix(phi: np.ndarray) -> np.ndarray:
    """``<lambda^A_z| <j| D |j> |lambda^B_z'>`` for all ``z, z'``; should be ``diag(lambda)``."""
    m = phi.shape[0]
    u, _, v = numerics.svd(phi)
    ones = np.ones(m)
    d = _d_operator(phi)
    left = np.stack([np.kron(u[:, z], ones) for z in range(m)], axis=1)
    right = np.stack([np.kron(ones, v[:, z]) for z in range(m)], axis=1)
    return left.T @ d @ right


def spectrum_formula(signs, graph: GameGraph | None = None, tol: float = SPECTRUM_TOL) -> GraphSpectrumReport:
    """Compare the closed-form spectrum with a numerical eigensolve, and check
    the eigenvector construction behind it."""
    phi = _check_signs(signs)
    m = phi.shape[0]
    if graph is None:
        graph = build_graph_rules(phi)
    pred = predicted_spectrum(phi)
    computed = numerics.eigvalsh_desc(graph.adjacency)
    dev = float(np.max(np.abs(expand_multiset(pred) - computed)))

    s = numerics.svd(phi)[1]
    trick = float(np.max(np.abs(singular_overlap_matrix(phi) - np.diag(s))))
    h = minus_block(phi)
    resid = 0.0
    for _, _, vec, ev in eta_vectors(phi):
        resid = max(resid, float(np.max(np.abs(h @ vec - ev * vec))))
    return GraphSpectrumReport(pred, computed, dev, trick, resid, tol)


@dataclass(frozen=True)
class StructuralReport:
    degree: int
    regular: bool
    trace_a: int
    trace_a3: int
    triangle_free: bool
    matching: tuple[tuple[int, int], ...]
    matching_valid: bool

    @property
    def ok(self) -> bool:
        return self.regular and self.trace_a == 0 and self.triangle_free and self.matching_valid


def structural_checks(g: GameGraph) -> StructuralReport:
    a = g.adjacency.astype(np.int64)
    m = g.m
    degrees = a.sum(axis=1)
    regular = bool(np.all(degrees == 2 * m - 1)) and np.array_equal(a, a.T)
    tr3 = int(np.trace(a @ a @ a))
    matching = tuple(
        (vertex_index(m, x, y, 0), vertex_index(m, x, y, 1)) for x in range(m) for y in range(m)
    )
    covered = sorted(v for e in matching for v in e)
    valid = covered == list(range(g.n)) and all(a[u, w] == 1 for u, w in matching)
    return StructuralReport(
        degree=int(degrees[0]),
        regular=regular,
        trace_a=int(np.trace(a)),
        trace_a3=tr3,
        triangle_free=tr3 == 0,
        matching=matching,
        matching_valid=valid,
    )


@dataclass(frozen=True)
class IndependentSet:
    size: int
    witness: tuple[int, ...]
    nodes: int = field(default=0, compare=False)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def independence_number(g: GameGraph | np.ndarray, cap: int = ALPHA_CAP) -> IndependentSet:
    """Exact maximum independent set by branch and bound.

    Works as a maximum-clique search in the complement graph with a greedy
    colouring bound there (a clique cover of the original graph).  Vertices
    are ordered by degree once, so the witness is deterministic.
    """
    adj = g.adjacency if isinstance(g, GameGraph) else np.asarray(g)
    n = adj.shape[0]
    if n > cap:
        raise GraphError(f"{n} vertices exceeds the exact independence cap of {cap}")
    if n == 0:
        return IndependentSet(0, ())
    # non-neighbours in the original graph = neighbours in the complement
    order = sorted(range(n), key=lambda v: (-int(adj[v].sum()), v))
    pos = {v: i for i, v in enumerate(order)}
    comp = [0] * n
    for v in range(n):
        mask = 0
        for w in range(n):
            if w != v and not adj[v, w]:
                mask |= 1 << pos[w]
        comp[pos[v]] = mask

    best: list[int] = []
    nodes = 0

    def colour_bound(cand: int):
        """Greedy colour classes of the complement restricted to ``cand``;
        returns vertices with their colour number, in increasing colour."""
        out = []
        colour = 0
        rest = cand
        while rest:
            colour += 1
            avail = rest
            while avail:
                low = avail & -avail
                v = low.bit_length() - 1
                rest &= ~low
                avail &= ~low & ~comp[v]
                out.append((v, colour))
        return out

    def expand(current: list[int], cand: int):
        nonlocal best, nodes
        nodes += 1
        coloured = colour_bound(cand)
        for v, c in reversed(coloured):
            if len(current) + c <= len(best):
                return
            current.append(v)
            new = cand & comp[v]
            if new:
                expand(current, new)
            elif len(current) > len(best):
                best = list(current)
            current.pop()
            cand &= ~(1 << v)

    expand([], (1 << n) - 1)
    witness = tuple(sorted(order[i] for i in best))
    for i, v in enumerate(witness):
        for w in witness[i + 1 :]:
            if adj[v, w]:
                raise AssertionError("independent set witness has an edge")
    return IndependentSet(len(witness), witness, nodes)


def to_dot(g: GameGraph, name: str = "game_graph") -> str:
    """Graphviz DOT text with vertex labels ``"x,y,a"``."""
    lines = [f"graph {name} {{"]
    for v in range(g.n):
        lines.append(f'  {v} [label="{g.label(v)}"];')
    for v, w in g.edges():
        lines.append(f"  {v} -- {w};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def spectrum_counts(values, decimals: int = 8) -> Counter:
    return Counter(np.round(values, decimals).tolist())
