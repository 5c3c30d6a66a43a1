"""Two-party XOR games and their exact classical value.

A game is a sign matrix ``signs[x][y] = (-1)**f(x, y)`` together with an input
distribution ``probs[x][y] = P(x, y)``.  Probabilities are kept as exact
:class:`fractions.Fraction` values so the classical value and everything
derived from optimal classical strategies stays exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

CLASSICAL_CAP = 20

SignVector = tuple[int, ...]


class GameError(ValueError):
    """Raised for malformed game data."""


def to_fraction(value) -> Fraction:
    """Parse ``value`` as an exact rational.

    Accepts ints, Fractions, strings like ``"3/16"`` or ``"0.25"`` and floats
    (converted through their shortest decimal repr so ``0.1`` means 1/10).
    """
    if isinstance(value, bool):
        raise GameError(f"not a number: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise GameError(f"non-finite probability {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise GameError(f"cannot parse rational {value!r}") from exc
    raise GameError(f"not a rational: {value!r}")


def fraction_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, eq=False)
class XorGame:
    """A validated XOR game; build through :func:`validate_game`."""

    m: int
    signs: tuple[tuple[int, ...], ...]
    probs: tuple[tuple[Fraction, ...], ...]
    notes: tuple[str, ...] = field(default=())

    @property
    def uniform(self) -> bool:
        p = Fraction(1, self.m * self.m)
        return all(q == p for row in self.probs for q in row)

    @cached_property
    def tilde(self) -> np.ndarray:
        """Exact game matrix ``signs * probs`` as an object array of Fractions."""
        out = np.empty((self.m, self.m), dtype=object)
        for x in range(self.m):
            for y in range(self.m):
                out[x, y] = self.signs[x][y] * self.probs[x][y]
        return out

    @cached_property
    def tilde_array(self) -> np.ndarray:
        return np.array([[float(q) for q in row] for row in self.tilde], dtype=float)

    @cached_property
    def sign_array(self) -> np.ndarray:
        return np.array(self.signs, dtype=int)

    @property
    def zero_rows(self) -> list[int]:
        return [x for x in range(self.m) if all(q == 0 for q in self.probs[x])]

    @property
    def zero_cols(self) -> list[int]:
        return [y for y in range(self.m) if all(self.probs[x][y] == 0 for x in range(self.m))]

    @property
    def has_zero_line(self) -> bool:
        return bool(self.zero_rows or self.zero_cols)

    @property
    def has_zero_probs(self) -> bool:
        return any(q == 0 for row in self.probs for q in row)

    def is_symmetric(self) -> bool:
        t = self.tilde
        return all(t[x, y] == t[y, x] for x in range(self.m) for y in range(x))

    def __eq__(self, other) -> bool:
        if not isinstance(other, XorGame):
            return NotImplemented
        return (self.m, self.signs, self.probs) == (other.m, other.signs, other.probs)

    def __hash__(self) -> int:
        return hash((self.m, self.signs, self.probs))

    def __repr__(self) -> str:
        kind = "uniform" if self.uniform else "weighted"
        return f"XorGame(m={self.m}, {kind}, signs={self.signs})"


def validate_game(signs, probs=None) -> XorGame:
    """Check raw sign/probability matrices and build an :class:`XorGame`.

    ``probs`` of ``None`` means the uniform distribution.
    """
    rows = [list(r) for r in signs]
    m = len(rows)
    if m == 0:
        raise GameError("game must have at least one input per party")
    if any(len(r) != m for r in rows):
        raise GameError("sign matrix must be square")
    clean_signs = []
    for x, row in enumerate(rows):
        out = []
        for y, s in enumerate(row):
            if isinstance(s, bool) or s not in (1, -1):
                raise GameError(f"sign entry ({x},{y}) = {s!r} is not +1 or -1")
            out.append(int(s))
        clean_signs.append(tuple(out))

    if probs is None:
        p = Fraction(1, m * m)
        clean_probs = tuple(tuple(p for _ in range(m)) for _ in range(m))
    else:
        prow = [list(r) for r in probs]
        if len(prow) != m or any(len(r) != m for r in prow):
            raise GameError(f"probability matrix must be {m}x{m} to match signs")
        clean_probs = tuple(tuple(to_fraction(q) for q in r) for r in prow)
        for x, row in enumerate(clean_probs):
            for y, q in enumerate(row):
                if q < 0:
                    raise GameError(f"probability ({x},{y}) = {q} is negative")
        total = sum(q for row in clean_probs for q in row)
        if total != 1:
            raise GameError(f"probabilities sum to {fraction_str(total)}, not 1")

    notes = []
    game = XorGame(m, tuple(clean_signs), clean_probs)
    if game.has_zero_line:
        notes.append(
            f"game matrix has all-zero rows {game.zero_rows} / columns {game.zero_cols}"
        )
    if game.has_zero_probs:
        notes.append("some input pairs have zero probability")
    if notes:
        game = XorGame(m, game.signs, game.probs, tuple(notes))
    return game


def game_from_matrix(tilde) -> XorGame:
    """Recover a game from its signed probability matrix.

    Zero entries get sign +1 (and are flagged through ``notes``).
    """
    rows = [[to_fraction(v) for v in r] for r in tilde]
    total = sum(abs(v) for r in rows for v in r)
    if total != 1:
        raise GameError(f"sum of |entries| is {fraction_str(total)}, not 1")
    signs = [[-1 if v < 0 else 1 for v in r] for r in rows]
    probs = [[abs(v) for v in r] for r in rows]
    return validate_game(signs, probs)


def strategy_bias(game: XorGame, s_a: Sequence[int], s_b: Sequence[int]) -> Fraction:
    """Exact bias ``s_a^T tilde s_b`` of a deterministic strategy pair."""
    t = game.tilde
    return sum(
        (s_a[x] * t[x, y] * s_b[y] for x in range(game.m) for y in range(game.m)),
        Fraction(0),
    )


@dataclass(frozen=True)
class ClassicalSolution:
    bias: Fraction
    optimal_pairs: tuple[tuple[SignVector, SignVector], ...]

    @property
    def value(self) -> Fraction:
        return (1 + self.bias) / 2

    @property
    def bias_float(self) -> float:
        return float(self.bias)

    @property
    def value_float(self) -> float:
        return float(self.value)


def _integer_tilde(game: XorGame) -> tuple[np.ndarray, int]:
    """Scale the game matrix to integers by the common denominator."""
    denom = 1
    for row in game.probs:
        for q in row:
            denom = math.lcm(denom, q.denominator)
    ints = [[int(v * denom) for v in row] for row in game.tilde]
    # exact int64 products need sum(|entries|) * 1 < 2**63
    if denom < 2**62:
        return np.array(ints, dtype=np.int64), denom
    return np.array(ints, dtype=object), denom


def _sign_vectors(m: int, start: int, stop: int) -> np.ndarray:
    """Sign vectors with first entry +1, indexed by the bits of ``k`` for the rest."""
    k = np.arange(start, stop, dtype=np.int64)
    bits = (k[:, None] >> np.arange(m - 2, -1, -1, dtype=np.int64)[None, :]) & 1
    rest = 1 - 2 * bits
    return np.hstack([np.ones((len(k), 1), dtype=np.int64), rest])


def _expand_ties(col: Sequence[int]) -> list[SignVector]:
    """All sign vectors agreeing with ``sign(col)`` where col is nonzero."""
    choices = [(1, -1) if c == 0 else ((1,) if c > 0 else (-1,)) for c in col]
    out: list[SignVector] = [()]
    for c in choices:
        out = [v + (s,) for v in out for s in c]
    return out


def classical_value(game: XorGame, cap: int = CLASSICAL_CAP, chunk: int = 1 << 15) -> ClassicalSolution:
    """Exact optimal classical bias by enumeration of Alice's sign vectors.

    For each Alice strategy ``s_a`` Bob's best reply gives ``||tilde^T s_a||_1``.
    Only ``s_a`` with a leading +1 is enumerated; the joint flip
    ``(s_a, s_b) -> (-s_a, -s_b)`` accounts for the rest.  Where
    ``tilde^T s_a`` has zero entries both replies are optimal and both are
    listed.
    """
    m = game.m
    if m > cap:
        raise GameError(
            f"m={m} exceeds the exact enumeration cap of {cap}; "
            "stochastic search is not supported"
        )
    t_int, denom = _integer_tilde(game)
    total = 1 << (m - 1)
    best = None
    best_rows: list[np.ndarray] = []
    for start in range(0, total, chunk):
        sa = _sign_vectors(m, start, min(total, start + chunk))
        if t_int.dtype == object:
            sa = sa.astype(object)
        cols = sa @ t_int  # row i holds tilde^T s_a for candidate i
        scores = np.abs(cols).sum(axis=1)
        top = scores.max()
        if best is None or top > best:
            best = top
            best_rows = []
        if top == best:
            best_rows.extend(sa[scores == top])
    pairs = []
    for sa in best_rows:
        s_a = tuple(int(v) for v in sa)
        col = [sum(int(s_a[x]) * int(t_int[x, y]) for x in range(m)) for y in range(m)]
        for s_b in _expand_ties(col):
            pairs.append((s_a, s_b))
    return ClassicalSolution(Fraction(int(best), denom), tuple(pairs))


def game_to_dict(game: XorGame) -> dict:
    out = {"m": game.m, "signs": [list(r) for r in game.signs]}
    if not game.uniform:
        out["probs"] = [[fraction_str(q) for q in r] for r in game.probs]
    return out


def game_from_dict(data: dict) -> XorGame:
    """Parse the game JSON schema ``{"m", "signs", "probs"?}``."""
    if not isinstance(data, dict):
        raise GameError("game JSON must be an object")
    for key in ("m", "signs"):
        if key not in data:
            raise GameError(f"missing field {key!r}")
    m = data["m"]
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise GameError(f"field 'm' must be a positive integer, got {m!r}")
    signs = data["signs"]
    if not isinstance(signs, list) or len(signs) != m:
        raise GameError(f"field 'signs' must be a list of {m} rows")
    for x, row in enumerate(signs):
        if not isinstance(row, list) or len(row) != m:
            raise GameError(f"field 'signs' row {x} must have {m} entries")
    probs = data.get("probs")
    if probs is not None:
        if not isinstance(probs, list) or len(probs) != m:
            raise GameError(f"field 'probs' must be a list of {m} rows")
        for x, row in enumerate(probs):
            if not isinstance(row, list) or len(row) != m:
                raise GameError(f"field 'probs' row {x} must have {m} entries")
    return validate_game(signs, probs)


def load_game(path) -> XorGame:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GameError(f"{path}: line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    return game_from_dict(data)


def sign_vectors(m: int) -> Iterable[SignVector]:
    """Every vector in {+1,-1}^m in lexicographic order (+1 before -1)."""
    for k in range(1 << m):
        yield tuple(1 - 2 * ((k >> (m - 1 - i)) & 1) for i in range(m))
