import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xorgames.game import (
    GameError,
    classical_value,
    game_from_dict,
    game_from_matrix,
    game_to_dict,
    load_game,
    sign_vectors,
    strategy_bias,
    validate_game,
)


def brute_force_bias(game):
    """Oracle: every (s_a, s_b) pair, exact rationals."""
    best, pairs = None, []
    for s_a in itertools.product((1, -1), repeat=game.m):
        for s_b in itertools.product((1, -1), repeat=game.m):
            b = strategy_bias(game, s_a, s_b)
            if best is None or b > best:
                best, pairs = b, []
            if b == best:
                pairs.append((s_a, s_b))
    return best, set(pairs)


@st.composite
def games(draw, m_max=4, uniform=None):
    m = draw(st.integers(1, m_max))
    signs = draw(st.lists(st.lists(st.sampled_from([1, -1]), min_size=m, max_size=m), min_size=m, max_size=m))
    if uniform is None:
        uniform = draw(st.booleans())
    if uniform:
        return validate_game(signs)
    weights = draw(st.lists(st.integers(0, 5), min_size=m * m, max_size=m * m))
    if sum(weights) == 0:
        weights[0] = 1
    total = sum(weights)
    probs = [[Fraction(weights[x * m + y], total) for y in range(m)] for x in range(m)]
    return validate_game(signs, probs)


def test_chsh_exact():
    g = validate_game([[1, 1], [1, -1]])
    sol = classical_value(g)
    assert sol.bias == Fraction(1, 2)
    assert sol.value == Fraction(3, 4)
    assert len(sol.optimal_pairs) == 4


@settings(max_examples=80, deadline=None)
@given(games())
def test_classical_matches_brute_force(game):
    sol = classical_value(game)
    bias, pairs = brute_force_bias(game)
    assert sol.bias == bias
    # every reported pair is optimal and dedup under the joint flip covers all
    reported = set(sol.optimal_pairs)
    for s_a, s_b in reported:
        assert strategy_bias(game, s_a, s_b) == bias
    flipped = {(tuple(-v for v in a), tuple(-v for v in b)) for a, b in reported}
    assert reported | flipped == pairs


@settings(max_examples=40, deadline=None)
@given(games(uniform=True), st.data())
def test_value_invariances(game, data):
    m = game.m
    base = classical_value(game).bias
    t = game.tilde
    assert classical_value(game_from_matrix(t.T)).bias == base
    perm = data.draw(st.permutations(range(m)))
    flips = data.draw(st.lists(st.sampled_from([1, -1]), min_size=m, max_size=m))
    moved = [[flips[x] * t[perm[x], y] for y in range(m)] for x in range(m)]
    assert classical_value(game_from_matrix(moved)).bias == base
    assert classical_value(game_from_matrix(-t)).bias == base


def test_rank_one_iff_value_one():
    rng = np.random.default_rng(3)
    for m in (2, 3, 4):
        u, v = rng.choice([1, -1], size=m), rng.choice([1, -1], size=m)
        g = validate_game(np.outer(u, v).tolist())
        assert classical_value(g).value == 1
        signs = np.outer(u, v)
        signs[0, 0] *= -1
        assert classical_value(validate_game(signs.tolist())).value < 1


def test_ties_expand_both_replies():
    g = validate_game([[1, 1], [1, 1]], [[Fraction(1, 2), 0], [Fraction(1, 2), 0]])
    sol = classical_value(g)
    assert sol.bias == 1
    assert ((1, 1), (1, 1)) in sol.optimal_pairs and ((1, 1), (1, -1)) in sol.optimal_pairs
    assert g.zero_cols == [1] and g.has_zero_line


def test_validation_errors():
    with pytest.raises(GameError, match="not \\+1 or -1"):
        validate_game([[1, 0], [1, 1]])
    with pytest.raises(GameError, match="square"):
        validate_game([[1, 1], [1]])
    with pytest.raises(GameError, match="sum to"):
        validate_game([[1]], [["1/2"]])
    with pytest.raises(GameError, match="negative"):
        validate_game([[1, 1], [1, 1]], [["-1/4", "1/2"], ["1/2", "1/4"]])
    with pytest.raises(GameError, match="cap"):
        classical_value(validate_game([[1] * 21 for _ in range(21)]))


def test_json_round_trip_and_diagnostics(tmp_path):
    g = validate_game([[1, -1], [-1, 1]], [["1/8", "3/8"], ["1/4", "1/4"]])
    d = game_to_dict(g)
    assert d["probs"][0] == ["1/8", "3/8"]
    assert game_from_dict(json.loads(json.dumps(d))) == g
    p = tmp_path / "g.json"
    p.write_text('{"m": 2,\n "signs": [[1, 1], [1, -1]],,}')
    with pytest.raises(GameError, match="line 2"):
        load_game(p)
    with pytest.raises(GameError, match="missing field 'signs'"):
        game_from_dict({"m": 2})
    with pytest.raises(GameError, match="row 1"):
        game_from_dict({"m": 2, "signs": [[1, 1], [1]]})


def test_sign_vectors_enumeration():
    vs = list(sign_vectors(3))
    assert len(vs) == 8 and vs[0] == (1, 1, 1) and vs[-1] == (-1, -1, -1)
