import itertools
import re

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xorgames import families
from xorgames.game import classical_value, validate_game
from xorgames.graph import (
    GraphError,
    build_graph_operator,
    build_graph_rules,
    expand_multiset,
    independence_number,
    predicted_spectrum,
    spectrum_formula,
    structural_checks,
    to_dot,
    vertex_index,
)

signs_st = st.integers(1, 4).flatmap(
    lambda m: st.lists(st.lists(st.sampled_from([1, -1]), min_size=m, max_size=m), min_size=m, max_size=m)
)


def brute_alpha(adj):
    n = adj.shape[0]
    for k in range(n, 0, -1):
        for sub in itertools.combinations(range(n), k):
            if not any(adj[u, v] for u, v in itertools.combinations(sub, 2)):
                return k
    return 0


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 11).flatmap(lambda n: st.lists(st.booleans(), min_size=n * n, max_size=n * n).map(
    lambda bits: np.array(bits, dtype=int).reshape(n, n))))
def test_alpha_matches_brute_force_on_random_graphs(raw):
    adj = np.triu(raw, 1)
    adj = adj + adj.T
    res = independence_number(adj)
    assert res.size == brute_alpha(adj)
    assert len(res.witness) == res.size


@settings(max_examples=40, deadline=None)
@given(signs_st)
def test_constructions_agree_and_structure(signs):
    g1, g2 = build_graph_rules(signs), build_graph_operator(signs)
    assert np.array_equal(g1.adjacency, g2.adjacency)
    st_ = structural_checks(g1)
    assert st_.ok and st_.degree == 2 * len(signs) - 1


@settings(max_examples=30, deadline=None)
@given(signs_st)
def test_spectrum_formula(signs):
    rep = spectrum_formula(signs)
    assert rep.matches
    assert len(expand_multiset(predicted_spectrum(signs))) == 2 * len(signs) ** 2


@settings(max_examples=25, deadline=None)
@given(signs_st.filter(lambda s: len(s) <= 3))
def test_alpha_equals_m2_omega_c(signs):
    game = validate_game(signs)
    g = build_graph_rules(signs)
    assert independence_number(g).size == game.m**2 * classical_value(game).value


def test_known_alphas():
    assert independence_number(build_graph_rules([[1]])).size == 1
    assert independence_number(build_graph_rules(families.gen_chsh().game.signs)).size == 3
    assert independence_number(build_graph_rules(families.gen_example_ex().game.signs)).size == 14


def test_dot_export_chsh():
    g = build_graph_rules(families.gen_chsh().game.signs)
    dot = to_dot(g)
    assert len(re.findall(r"--", dot)) == 12
    assert '[label="1,0,1"]' in dot
    assert dot.count("label=") == 8
    # each edge labelled pair (x,y,a)-(x,y,1-a) belongs to the matching
    assert g.adjacency[vertex_index(2, 1, 0, 0), vertex_index(2, 1, 0, 1)] == 1


def test_single_edge_toy():
    g = build_graph_rules([[-1]])
    assert g.edges() == [(0, 1)]
    assert to_dot(g).count("--") == 1


def test_errors():
    with pytest.raises(GraphError):
        build_graph_rules([[1, 0], [1, 1]])
    with pytest.raises(GraphError, match="cap"):
        independence_number(np.zeros((60, 60), dtype=int), cap=50)
