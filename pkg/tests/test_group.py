import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from plcg import examples
from plcg.group import (
    GroupElement,
    center,
    centralizer,
    conjugate_subgroup,
    double_coset_reps,
    find_conjugator,
    generated,
    normalizer,
    transporter,
    validate_presentation,
    whole_group,
)
from conftest import group

NAMES = ["d8-finite", "inv-torus", "nonsplit-j2", "j2-quarter-trivial", "j2-trivial", "central-z4z4", "p3-perm"]


def rand_elem(G, level, rng):
    return next(itertools.islice(G.elements_at(level), rng.randrange(G.size_at(level)), None))


@pytest.mark.parametrize("name", NAMES)
def test_corpus_presentations_validate(name):
    assert validate_presentation(group(name)).ok


def test_bad_cocycle_rejected_with_witness():
    rep = validate_presentation(examples.bad_cocycle())
    assert not rep.ok
    name, witness = rep.first_failure()
    assert "j" in witness


@pytest.mark.parametrize("name", ["nonsplit-j2", "central-z4z4", "p3-perm"])
@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_group_law(name, seed):
    G = group(name)
    rng = random.Random(seed)
    a, b, c = (rand_elem(G, 3, rng) for _ in range(3))
    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    assert G.mul(a, G.inv(a)) == G.identity
    assert G.mul(G.identity, a) == a == G.mul(a, G.identity)


def test_nonsplit_relations():
    G = group("nonsplit-j2")
    half = G.element(["1/2"])
    # every element of the nontrivial component squares to the central 1/2
    for t in ["0", "1/4", "3/8"]:
        a = G.element([t], 1)
        assert G.mul(a, a) == half
    assert G.conj(G.sec(1), G.element(["1/8"])) == G.element(["7/8"])


def test_conjugate_subgroup_by_torus():
    G = group("nonsplit-j2")
    P = generated(G, [], [G.sec(1)])
    Q = conjugate_subgroup(G, G.element(["1/8"]), P)
    assert Q == generated(G, [], [G.element(["1/4"], 1)])
    assert find_conjugator(G, P, Q, 3) is not None


def test_center_of_nonsplit():
    G = group("nonsplit-j2")
    Z = center(G, whole_group(G), 3)
    assert Z.dim == 0
    assert {g.t for g in Z.elements_at(3)} == {G.element(["0"]).t, G.element(["1/2"]).t}


@pytest.mark.parametrize("name", ["d8-finite", "nonsplit-j2", "central-z4z4"])
def test_element_order_by_iteration(name):
    G = group(name)
    for g in G.elements_at(2):
        h, n = g, 1
        while h != G.identity:
            h, n = G.mul(h, g), n + 1
        assert G.element_order(g) == n


def _finite_subgroups(G, level, count, seed=0):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        gens = [rand_elem(G, level, rng) for _ in range(rng.randint(1, 2))]
        out.append(generated(G, [], gens))
    return out


@pytest.mark.parametrize("name", ["nonsplit-j2", "central-z4z4", "d8-finite"])
def test_centralizer_normalizer_brute_force(name):
    G = group(name)
    # subgroups of level 1 have normalizers visible by level 2; compare at 3
    level = 3
    for P in _finite_subgroups(G, 1, 6):
        Pel = list(P.elements_at(level))
        C = {g for g in G.elements_at(level) if all(G.mul(g, r) == G.mul(r, g) for r in Pel)}
        N = {g for g in G.elements_at(level) if all(P.contains(G.conj(g, r)) for r in Pel)}
        assert set(centralizer(G, P, level).elements_at(level)) == C
        assert set(normalizer(G, P, level).elements_at(level)) == N


def test_transporter_and_double_cosets_brute_force():
    G = group("central-z4z4")
    level = 3
    subs = _finite_subgroups(G, 1, 4, seed=3)
    for P in subs:
        for Q in subs:
            brute = {Q.canon(g) for g in G.elements_at(level) if all(Q.contains(G.conj(g, r)) for r in P.reps)}
            got = set(transporter(G, P, Q, level).elements)
            assert got == brute
    # double cosets N_S(Q) \ N_S(P,Q) / C_S(P), counted by brute force
    P, Q = subs[0], subs[0]
    NQ, CP = normalizer(G, Q, level), centralizer(G, P, level)
    items = sorted(transporter(G, P, Q, level).elements, key=GroupElement.sort_key)
    orbits = set()
    nq, cp = list(NQ.elements_at(level)), list(CP.elements_at(level))
    for a in items:
        orbit = frozenset(Q.canon(G.mul(G.mul(n, a), c)) for n in nq for c in cp)
        orbits.add(orbit)
    assert len(double_coset_reps(G, P, Q, NQ, CP, level)) == len(orbits)
