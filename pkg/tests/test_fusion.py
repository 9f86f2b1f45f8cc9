import pytest

from plcg import examples
from plcg.adams import GroupAutomorphism, construct_psi_zeta
from plcg.fusion import (
    FusionSystem,
    bullet_suite,
    is_fusion_preserving,
    small_subgroups,
    validate_fusion,
)
from plcg.group import find_conjugator, transporter
from plcg.torus import PAdicUnitApprox
from conftest import group, pipeline, section


def d8_flip(G):
    """r -> r, s -> rs: swaps the two Klein four subgroups of D8."""
    phi = (0, 1, 2, 3, 5, 6, 7, 4)
    return GroupAutomorphism(G, (), None, tuple(G.zero for _ in range(8)), phi)


def test_d8_subgroup_classes():
    # D8 has 8 conjugacy classes of subgroups; the centric ones are C4, the two Klein fours and D8
    F = FusionSystem(group("d8-finite"))
    assert len(F.universe) == 8
    assert sorted(len(P.reps) for P in F.centric_universe) == [4, 4, 4, 8]
    assert validate_fusion(F).ok


@pytest.mark.parametrize("name", ["inv-torus", "nonsplit-j2", "central-z4z4"])
def test_universe_against_bullets_of_small_subgroups(name):
    G = group(name)
    F = FusionSystem(G)
    U = F.universe
    for P in U:
        assert F.bullet(P) == P
    for i, P in enumerate(U):
        for Q in U[i + 1 :]:
            assert find_conjugator(G, P, Q, F.level) is None
    for P in small_subgroups(G, 2, limit=25):
        B = F.bullet(P)
        assert any(find_conjugator(G, B, R, F.level) is not None for R in U)


def test_universe_sizes():
    sizes = {n: (len(pipeline(n)[1].universe), len(pipeline(n)[1].centric_universe)) for n in
             ["inv-torus", "nonsplit-j2", "central-z4z4", "j2-trivial"]}
    assert sizes == {"inv-torus": (6, 4), "nonsplit-j2": (6, 4), "central-z4z4": (15, 11), "j2-trivial": (2, 1)}


def test_centric_brute_force():
    # P is centric iff every element of S[4] centralizing P lies in P
    G, F = pipeline("inv-torus")[:2]
    for P in F.universe:
        Pel = list(P.elements_at(4))
        C = [g for g in G.elements_at(4) if all(G.mul(g, r) == G.mul(r, g) for r in Pel)]
        assert F.is_centric(P) == all(P.contains(g) for g in C)


@pytest.mark.parametrize("name", ["d8-finite", "central-z4z4"])
def test_hom_reps_count_brute_force(name):
    G, F, L, data = pipeline(name)[:4]
    level = 1 if G.rank else 0
    for P in data.objects[:6]:
        for Q in data.objects[:6]:
            homs = {tuple(G.conj(g, r) for r in P.reps) for g in transporter(G, P, Q, level).elements}
            nq = [g for g in G.elements_at(level) if all(Q.contains(G.conj(g, q)) for q in Q.reps)]
            orbits = {frozenset(tuple(Q.canon(G.conj(n, x)) for x in h) for n in nq) for h in
                      {tuple(Q.canon(x) for x in h) for h in homs}}
            assert len(data.M[(P, Q)]) == len(orbits)
            if P.is_subgroup_of(Q):
                assert data.M[(P, Q)][0].is_inclusion()


def test_s4_type_fusion():
    G = group("d8-finite")
    F = examples.d8_s4_fusion(G)
    assert validate_fusion(F).ok
    V = F.generators[0].source
    # Aut_F(V) is the full automorphism group of the Klein four group
    assert len(F.homs(V, V)) == 6
    flip = d8_flip(G)
    assert not flip.hom_defects()
    assert not is_fusion_preserving(flip, F).preserving
    assert is_fusion_preserving(flip, FusionSystem(G)).preserving


@pytest.mark.parametrize("name", ["d8-finite", "inv-torus", "nonsplit-j2"])
def test_bullet_suite(name):
    G, F, L, data, sigma, kg = pipeline(name)
    psi = None
    if G.rank:
        psi = construct_psi_zeta(G, section(name), PAdicUnitApprox(G.p, 8, 1 + G.p ** max(kg.kf.k_S, 1)))
    rep = bullet_suite(F, psi)
    assert rep.ok, rep.lines()


def test_psi_is_fusion_preserving():
    G, F, L, data, sigma, kg = pipeline("nonsplit-j2")
    psi = construct_psi_zeta(G, sigma, PAdicUnitApprox(2, 8, 9))
    assert is_fusion_preserving(psi, F, data).preserving
