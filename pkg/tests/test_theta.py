import math

import numpy as np
import pytest

from xorgames import families
from xorgames.game import GameError, validate_game
from xorgames.graph import build_graph_rules, independence_number
from xorgames.theta import class1_certify, closed_form_witness, formula_alpha, lovasz_theta


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_all_ones_witness(m):
    game = families.all_ones(m).game
    g = build_graph_rules(game.signs)
    alpha = independence_number(g, cap=64).size
    assert alpha == m * m == formula_alpha(game)
    w = closed_form_witness(g, alpha)
    assert w.valid and w.candidates_equal_alpha
    assert lovasz_theta(g.adjacency).value == pytest.approx(alpha, abs=1e-6)


def test_witness_fails_for_chsh():
    g = build_graph_rules(families.gen_chsh().game.signs)
    w = closed_form_witness(g, 3)
    assert w.pattern_ok
    assert not w.valid
    assert w.lambda_max > 3 + 1e-3


def test_example_ex_class1_without_witness():
    cap = class1_certify(families.gen_example_ex().game)
    assert cap.alpha == 14 and cap.class1
    assert cap.theta_witness is None
    assert cap.alpha_source == "branch_and_bound"


def test_chsh_not_class1_and_sandwich():
    cap = class1_certify(families.gen_chsh().game)
    assert cap.alpha == 3
    assert cap.theta == pytest.approx(2 + math.sqrt(2), abs=1e-6)
    assert not cap.class1 and cap.sandwich_ok


def test_formula_alpha_above_cap():
    game = families.gen_symmetric_row_sum(4, 2).game
    cap = class1_certify(game, alpha_cap=16)
    assert cap.alpha_source == "formula" and cap.alpha == 12 and cap.class1


def test_sandwich_random():
    rng = np.random.default_rng(6)
    for _ in range(10):
        m = int(rng.integers(2, 4))
        game = validate_game(rng.choice([1, -1], size=(m, m)).tolist())
        cap = class1_certify(game)
        assert cap.sandwich_ok


def test_errors():
    with pytest.raises(ValueError):
        lovasz_theta(np.array([[0, 1], [0, 0]]))
    weighted = validate_game([[1, 1], [1, 1]], [["1/2", "1/6"], ["1/6", "1/6"]])
    with pytest.raises(GameError):
        class1_certify(weighted)
