from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xorgames import families
from xorgames.certificate import (
    CertificateError,
    cor1_check,
    is_optimal_pair,
    no_advantage,
    sigma_lambda,
    symmetric_reduction_check,
    thm1_certificate,
)
from xorgames.game import classical_value, game_from_matrix, strategy_bias, validate_game
from xorgames.quantum import quantum_value

sign_matrix = st.integers(2, 4).flatmap(
    lambda m: st.lists(st.lists(st.sampled_from([1, -1]), min_size=m, max_size=m), min_size=m, max_size=m)
)


def test_example_ex_exact_sigma_lambda():
    game = families.gen_example_ex().game
    verdict = no_advantage(game)
    want = (Fraction(1, 4), Fraction(1, 8), Fraction(1, 8), Fraction(1, 4))
    passing = [c for c in verdict.certificates if c.passes]
    assert passing
    assert all(c.sigma_diag == want and c.lambda_diag == want for c in passing)
    assert verdict.consistent
    assert abs(passing[0].rho - 1) <= 1e-7


def test_chsh_fails_and_is_consistent():
    verdict = no_advantage(families.gen_chsh().game)
    assert not verdict.no_advantage
    assert verdict.consistent
    assert verdict.quantum_gap > 0.1


def test_all_plus_one_passes():
    for m in (1, 2, 3, 5):
        game = validate_game([[1] * m for _ in range(m)])
        verdict = no_advantage(game)
        assert verdict.no_advantage and verdict.consistent
        assert cor1_check(game).is_pm_one


@settings(max_examples=60, deadline=None)
@given(sign_matrix)
def test_trace_identity_and_block_psd(signs):
    game = validate_game(signs)
    c = classical_value(game)
    for pair in c.optimal_pairs:
        cert = thm1_certificate(game, pair, classical=c)
        assert sum(cert.sigma_diag) == c.bias == sum(cert.lambda_diag)
        assert all(v >= 0 for v in cert.sigma_diag + cert.lambda_diag)
        if cert.passes:
            # the dual point (Sigma/2, Lambda/2) is feasible and attains the classical bias
            assert np.linalg.eigvalsh(cert.block_matrix(game)).min() >= -1e-7
            assert cert.dual_y().sum() == pytest.approx(float(c.bias))


@settings(max_examples=40, deadline=None)
@given(sign_matrix, st.data())
def test_flip_invariance(signs, data):
    game = validate_game(signs)
    m = game.m
    d = data.draw(st.lists(st.sampled_from([1, -1]), min_size=m, max_size=m))
    e = data.draw(st.lists(st.sampled_from([1, -1]), min_size=m, max_size=m))
    flipped = game_from_matrix([[d[x] * game.tilde[x, y] * e[y] for y in range(m)] for x in range(m)])
    for s_a, s_b in classical_value(game).optimal_pairs[:2]:
        t_a = tuple(d[i] * s_a[i] for i in range(m))
        t_b = tuple(e[i] * s_b[i] for i in range(m))
        assert sigma_lambda(game, s_a, s_b) == sigma_lambda(flipped, t_a, t_b)
        assert thm1_certificate(game, (s_a, s_b)).passes == thm1_certificate(flipped, (t_a, t_b)).passes


def test_cor1_implies_thm1():
    for f in families.cor1_uniform_suite(40, seed=3):
        c1 = cor1_check(f.game)
        assert c1.is_pm_one
        assert is_optimal_pair(f.game, c1.matched_strategy)
        assert no_advantage(f.game, cross_check=False).no_advantage


def test_symmetric_reduction_agrees_with_thm1():
    rng = np.random.default_rng(8)
    checked = 0
    for _ in range(60):
        m = int(rng.integers(2, 5))
        s = rng.choice([1, -1], size=(m, m))
        s = np.triu(s) + np.triu(s, 1).T
        game = validate_game(s.tolist())
        c = classical_value(game)
        for a, b in c.optimal_pairs:
            if a == b or a == tuple(-v for v in b):
                red = symmetric_reduction_check(game, (a, b))
                assert red.passes == thm1_certificate(game, (a, b), classical=c).passes
                checked += 1
    assert checked > 20


def test_certificate_errors():
    chsh = families.gen_chsh().game
    with pytest.raises(CertificateError, match="optimal classical bias"):
        thm1_certificate(chsh, ((1, 1), (-1, -1)))
    with pytest.raises(CertificateError, match="\\+-1 vectors"):
        thm1_certificate(chsh, ((1, 0), (1, 1)))
    zero = validate_game([[1, 1], [1, 1]], [[Fraction(1, 2), 0], [Fraction(1, 2), 0]])
    with pytest.raises(CertificateError, match="all-zero"):
        thm1_certificate(zero, ((1, 1), (1, 1)))
    with pytest.raises(CertificateError, match="symmetric"):
        symmetric_reduction_check(validate_game([[1, -1], [1, 1]]), ((1, 1), (1, 1)))


def test_weighted_games_agree_with_sdp():
    rng = np.random.default_rng(12)
    for _ in range(40):
        m = int(rng.integers(2, 4))
        w = rng.integers(1, 6, size=(m, m))
        probs = [[Fraction(int(v), int(w.sum())) for v in row] for row in w]
        game = validate_game(rng.choice([1, -1], size=(m, m)).tolist(), probs)
        v = no_advantage(game)
        assert v.consistent, (game, v.notes)


def test_strategy_bias_of_cor1_match():
    game = families.gen_symmetric_row_sum(4, 2).game
    c1 = cor1_check(game)
    assert c1.degeneracy >= 2
    assert strategy_bias(game, *c1.matched_strategy) == classical_value(game).bias
    assert cor1_check(game, max_degeneracy=1).is_pm_one is None
    assert quantum_value(game).value == pytest.approx(float(classical_value(game).value), abs=1e-7)
