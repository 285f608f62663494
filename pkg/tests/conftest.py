"""Shared fixtures: hand-built reference instances used across the suite."""

import pytest

from copelandbench.instance import PreferenceInstance, PreferenceTriple


def make_instance(n, triples):
    return PreferenceInstance(
        n=n,
        triples={pair: PreferenceTriple(*t) for pair, t in triples.items()},
    )


@pytest.fixture(scope="session")
def counterexample():
    # Three arms, every canonical pair (1/2, 1/4, 1/4). Unique winner 1 with
    # score gaps d_2 = 1 and d_3 = 2; no indifferent modes anywhere.
    t = (0.5, 0.25, 0.25)
    return make_instance(3, {(1, 2): t, (1, 3): t, (2, 3): t})


@pytest.fixture(scope="session")
def all_indifferent_3():
    t = (0.2, 0.6, 0.2)
    return make_instance(3, {(1, 2): t, (1, 3): t, (2, 3): t})


@pytest.fixture()
def two_arm_deterministic():
    return make_instance(2, {(1, 2): (1.0, 0.0, 0.0)})


def linear_order_instance(n, p=0.8):
    """Lower-indexed arm wins with probability p; strict total order."""
    c = (1.0 - p) / 2.0
    triples = {}
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            triples[(i, j)] = (p, c, c)
    return make_instance(n, triples)


def rock_paper_scissors():
    """Cyclic strict preferences: 1 beats 2 beats 3 beats 1."""
    return make_instance(
        3,
        {
            (1, 2): (0.6, 0.1, 0.3),
            (1, 3): (0.3, 0.1, 0.6),
            (2, 3): (0.6, 0.1, 0.3),
        },
    )
