"""Generators for families of XOR games with known properties.

Each generator returns a :class:`Family` carrying the game and the set of
property tags it is expected to satisfy: ``cor1`` (+-1 top singular vectors),
``thm1`` (no quantum advantage), ``class1`` (game graph has alpha = theta) and
``quantum_advantage``.  All games are built from exact rationals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .game import GameError, XorGame, fraction_str, game_from_matrix, to_fraction, validate_game

KINDS = (
    "chsh",
    "example_ex",
    "nlc",
    "symmetric_row_sum",
    "anticirculant4",
    "pq_pattern",
    "tensor_product",
    "orthogonal_transform",
)


@dataclass(frozen=True, eq=False)
class Family:
    kind: str
    parameters: dict
    expected: frozenset[str]
    game: XorGame
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "parameters": _jsonable(self.parameters),
            "expected": sorted(self.expected),
        }


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _from_exact(rows) -> XorGame:
    return game_from_matrix([[Fraction(v) for v in r] for r in rows])


def gen_chsh() -> Family:
    game = validate_game([[1, 1], [1, -1]])
    return Family("chsh", {}, frozenset({"quantum_advantage"}), game)


EXAMPLE_EX_SIGNS = (
    (1, -1, -1, 1),
    (-1, -1, 1, -1),
    (-1, 1, -1, -1),
    (1, -1, -1, 1),
)


def gen_example_ex() -> Family:
    """The 4x4 game with entries +-1/16 that has no quantum advantage even
    though its top singular vectors are not +-1 vectors."""
    game = validate_game([list(r) for r in EXAMPLE_EX_SIGNS])
    return Family("example_ex", {}, frozenset({"thm1"}), game)


def hadamard(m: int) -> np.ndarray:
    """Unnormalised Sylvester Hadamard matrix (entries +-1) of order ``m``."""
    if m < 1 or m & (m - 1):
        raise GameError(f"Hadamard order must be a power of two, got {m}")
    h = np.array([[1]], dtype=object)
    while h.shape[0] < m:
        h = np.block([[h, h], [h, -h]])
    return h


def _normalise(mat: np.ndarray) -> list[list[Fraction]]:
    total = sum(abs(v) for v in mat.ravel())
    if total == 0:
        raise GameError("generated game matrix is identically zero")
    return [[Fraction(v) / total for v in row] for row in mat]


def gen_nlc(m: int, diagonal: Sequence) -> Family:
    """Game matrix diagonal in the Hadamard basis: ``H diag(d) H`` rescaled so
    the absolute entries sum to 1."""
    if m not in (2, 4, 8, 16):
        raise GameError(f"NLC generator supports m in {{2, 4, 8, 16}}, got {m}")
    d = [to_fraction(v) for v in diagonal]
    if len(d) != m:
        raise GameError(f"diagonal must have {m} entries")
    h = hadamard(m)
    mat = h @ np.diag(np.array(d, dtype=object)) @ h
    game = _from_exact(_normalise(mat))
    return Family("nlc", {"m": m, "diagonal": d}, frozenset({"cor1", "thm1"}), game)


def _symmetric_circulant_rows(m: int):
    """First rows ``c`` of symmetric circulant +-1 matrices (``c_k = c_{m-k}``)."""
    free = list(range(m // 2 + 1))
    for choice in itertools.product((1, -1), repeat=len(free)):
        c = [0] * m
        for k, s in zip(free, choice):
            c[k] = s
            c[(m - k) % m] = s
        yield c


def gen_symmetric_row_sum(m: int, row_sum: int) -> Family:
    """A symmetric +-1 matrix with every row summing to ``row_sum >= m/2``,
    chosen so the all-ones vector is a top singular vector (uniform game).

    The search runs over symmetric circulants in a fixed order and keeps the
    first one whose spectral radius equals the row sum.
    """
    if m < 1:
        raise GameError("m must be positive")
    if 2 * row_sum < m:
        raise GameError(f"row sum {row_sum} is below m/2 = {m / 2}")
    if row_sum > m or (m - row_sum) % 2:
        raise GameError(f"no +-1 row of length {m} sums to {row_sum}")
    for c in _symmetric_circulant_rows(m):
        if sum(c) != row_sum:
            continue
        phi = np.array([[c[(y - x) % m] for y in range(m)] for x in range(m)])
        if np.max(np.abs(np.linalg.eigvalsh(phi))) <= row_sum + 1e-9:
            game = validate_game(phi.tolist())
            return Family(
                "symmetric_row_sum",
                {"m": m, "row_sum": row_sum, "first_row": c},
                frozenset({"cor1", "thm1", "class1"}),
                game,
            )
    raise GameError(f"no symmetric circulant with m={m}, row sum {row_sum} has j as top eigenvector")


@dataclass(frozen=True)
class AnticirculantCondition:
    total_sq: Fraction
    alternating_sq: Fraction
    rest_sq: Fraction
    sufficient: Fraction

    @property
    def holds(self) -> bool:
        return max(self.total_sq, self.alternating_sq) >= self.rest_sq

    @property
    def sufficient_holds(self) -> bool:
        return self.sufficient >= 0


def anticirculant_condition(gamma: Sequence) -> AnticirculantCondition:
    g = [to_fraction(v) for v in gamma]
    return AnticirculantCondition(
        total_sq=sum(g) ** 2,
        alternating_sq=(g[0] - g[1] + g[2] - g[3]) ** 2,
        rest_sq=(g[0] - g[2]) ** 2 + (g[1] - g[3]) ** 2,
        sufficient=g[0] * g[2] + g[1] * g[3],
    )


def anticirculant(first_row: Sequence) -> list[list[Fraction]]:
    """Entry ``(x, y)`` is ``first_row[(x + y) mod n]``."""
    g = [to_fraction(v) for v in first_row]
    n = len(g)
    return [[g[(x + y) % n] for y in range(n)] for x in range(n)]


def gen_anticirculant4(gamma: Sequence) -> Family:
    """4x4 anti-circulant game from its first row with ``sum |gamma_i| = 1/4``.

    When the displayed condition holds the top singular value is attained on
    the all-ones or alternating vector, so the game has no quantum advantage.
    """
    g = [to_fraction(v) for v in gamma]
    if len(g) != 4:
        raise GameError("gamma must have four entries")
    if sum(abs(v) for v in g) != Fraction(1, 4):
        raise GameError(f"sum |gamma_i| must be 1/4, got {fraction_str(sum(abs(v) for v in g))}")
    cond = anticirculant_condition(g)
    game = game_from_matrix(anticirculant(g))
    expected = frozenset({"cor1", "thm1"}) if cond.holds else frozenset()
    params = {"gamma": g, "condition": cond.holds, "sufficient_condition": cond.sufficient_holds}
    return Family("anticirculant4", params, expected, game)


def gen_pq_pattern(p, q) -> Family:
    """The anti-circulant pattern with first row ``(p, q, q, -p)``, ``|p| + |q| = 1/8``."""
    p, q = to_fraction(p), to_fraction(q)
    if abs(p) + abs(q) != Fraction(1, 8):
        raise GameError(f"|p| + |q| must be 1/8, got {fraction_str(abs(p) + abs(q))}")
    rows = [
        [p, q, q, -p],
        [q, q, -p, p],
        [q, -p, p, q],
        [-p, p, q, q],
    ]
    game = game_from_matrix(rows)
    return Family("pq_pattern", {"p": p, "q": q}, frozenset({"cor1", "thm1"}), game)


def _kron_exact(a, b) -> list[list[Fraction]]:
    ma, mb = len(a), len(b)
    return [
        [a[x // mb][y // mb] * b[x % mb][y % mb] for y in range(ma * mb)]
        for x in range(ma * mb)
    ]


def _tilde_rows(game: XorGame) -> list[list[Fraction]]:
    return [[game.tilde[x, y] for y in range(game.m)] for x in range(game.m)]


def compose_tensor(f1: Family | XorGame, f2: Family | XorGame) -> Family:
    """Kronecker product of two games; stays a cor1 game when both inputs are."""
    g1 = f1.game if isinstance(f1, Family) else f1
    g2 = f2.game if isinstance(f2, Family) else f2
    signs = [
        [g1.signs[x // g2.m][y // g2.m] * g2.signs[x % g2.m][y % g2.m] for y in range(g1.m * g2.m)]
        for x in range(g1.m * g2.m)
    ]
    probs = _kron_exact(g1.probs, g2.probs)
    game = validate_game(signs, probs)
    inputs_cor1 = all(_is_cor1(f) for f in (f1, f2))
    expected = {"cor1", "thm1"} if inputs_cor1 else set()
    if inputs_cor1 and game.uniform:
        expected.add("class1")
    notes = () if inputs_cor1 else ("inputs not known to satisfy cor1; expectation unknown",)
    return Family("tensor_product", {"m1": g1.m, "m2": g2.m}, frozenset(expected), game, notes)


def _is_cor1(f) -> bool:
    if isinstance(f, Family):
        return "cor1" in f.expected
    from .certificate import cor1_check

    return bool(cor1_check(f).is_pm_one)


def signed_permutation(perm: Sequence[int], signs: Sequence[int]) -> np.ndarray:
    """Matrix ``U`` with ``U[i, perm[i]] = signs[i]``."""
    n = len(perm)
    if sorted(perm) != list(range(n)) or len(signs) != n or any(s not in (1, -1) for s in signs):
        raise GameError("not a signed permutation")
    u = np.zeros((n, n), dtype=int)
    for i, (p, s) in enumerate(zip(perm, signs)):
        u[i, p] = s
    return u


def _check_signed_permutation(u: np.ndarray, m: int) -> None:
    u = np.asarray(u)
    if u.shape != (m, m):
        raise GameError(f"transform must be {m}x{m}")
    if not np.all(np.isin(u, (-1, 0, 1))):
        raise GameError("transform entries must be 0 or +-1")
    if not (np.all(np.abs(u).sum(axis=0) == 1) and np.all(np.abs(u).sum(axis=1) == 1)):
        raise GameError("transform is not a signed permutation")


def transform_orthogonal(f: Family | XorGame, u, v) -> Family:
    """``U T V^T`` for signed permutations ``U`` and ``V``; these map +-1
    vectors to +-1 vectors, so cor1 is preserved."""
    game = f.game if isinstance(f, Family) else f
    u = np.asarray(u, dtype=int)
    v = np.asarray(v, dtype=int)
    _check_signed_permutation(u, game.m)
    _check_signed_permutation(v, game.m)
    t = game.tilde
    rows = (u.astype(object) @ t @ v.T.astype(object)).tolist()
    out = game_from_matrix(rows)
    cor1 = _is_cor1(f)
    expected = {"cor1", "thm1"} if cor1 else set()
    if cor1 and out.uniform:
        expected.add("class1")
    params = {"U": u.tolist(), "V": v.tolist()}
    return Family("orthogonal_transform", params, frozenset(expected), out)


def hadamard_conjugate(f: Family | XorGame) -> Family:
    """``H T H`` rescaled to a game.  Hadamard maps do not in general send
    +-1 vectors to +-1 vectors, so no property is expected."""
    game = f.game if isinstance(f, Family) else f
    h = hadamard(game.m)
    mat = h @ game.tilde @ h
    out = _from_exact(_normalise(mat))
    return Family("orthogonal_transform", {"hadamard": True}, frozenset(), out)


def random_signed_permutation(m: int, rng: np.random.Generator) -> np.ndarray:
    perm = rng.permutation(m).tolist()
    signs = rng.choice([1, -1], size=m).tolist()
    return signed_permutation(perm, signs)


def all_ones(m: int) -> Family:
    game = validate_game([[1] * m for _ in range(m)])
    return Family("symmetric_row_sum", {"m": m, "row_sum": m}, frozenset({"cor1", "thm1", "class1"}), game)


def pq_grid(points: int = 9) -> list[tuple[Fraction, Fraction]]:
    """``points`` values of ``p`` evenly spaced on ``[-1/8, 1/8]`` with
    ``q = 1/8 - |p|``."""
    if points < 2:
        raise ValueError("need at least two grid points")
    step = Fraction(1, 4) / (points - 1)
    out = []
    for k in range(points):
        p = Fraction(-1, 8) + k * step
        out.append((p, Fraction(1, 8) - abs(p)))
    return out


def cor1_uniform_suite(count: int = 60, seed: int = 0) -> list[Family]:
    """Uniform cor1 games with m in {2, 3, 4}: symmetric row-sum matrices,
    tensor products of small ones and random signed-permutation transforms."""
    rng = np.random.default_rng(seed)
    base = [
        all_ones(2),
        all_ones(3),
        gen_symmetric_row_sum(4, 2),
        gen_symmetric_row_sum(4, 4),
        compose_tensor(all_ones(2), all_ones(2)),
    ]
    small = base[0]
    flipped = transform_orthogonal(small, signed_permutation([1, 0], [1, -1]), signed_permutation([0, 1], [-1, 1]))
    base.append(compose_tensor(flipped, small))
    base.append(compose_tensor(small, flipped))
    out = list(base)
    i = 0
    while len(out) < count:
        f = base[i % len(base)]
        m = f.game.m
        out.append(transform_orthogonal(f, random_signed_permutation(m, rng), random_signed_permutation(m, rng)))
        i += 1
    return out


def family_to_dict(f: Family) -> dict:
    from .game import game_to_dict

    d = game_to_dict(f.game)
    d["family"] = f.to_dict()
    d["expected"] = sorted(f.expected)
    return d
