import random

import pytest

from plcg.adams import NotInGamma
from plcg.operation import (
    build_aF,
    build_aG,
    lambda_phi,
    lift_data,
    ordering_check,
    sample_morphisms,
    verify_choice_independence,
    verify_functor,
    verify_homomorphism,
)
from plcg.torus import PAdicUnitApprox
from conftest import pipeline

# (k_S, k_F, k_G), frozen after the independent m-set enumeration below agreed
GOLDEN_K = {
    "d8-finite": (0, 0, 0),
    "inv-torus": (0, 2, 3),
    "nonsplit-j2": (1, 2, 3),
    "central-z4z4": (2, 2, 2),
    "j2-trivial": (0, 0, 0),
    "j2-quarter-trivial": (0, 3, 3),
    "p3-perm": (1, 2, 2),
}


def U(G, a, prec=8):
    return PAdicUnitApprox(G.p, prec if G.p == 2 else 4, a)


def torus_order(t):
    n, s = 1, t
    while not s.is_zero():
        s, n = s + t, n + 1
    return n


def brute_kF(G, data, sigma):
    m = set()
    for (P, Q), fs in data.M.items():
        for f in fs:
            x = f.via if f.via is not None else G.identity
            for r in P.reps:
                m.add(G.conj(x, r))
    top = max((torus_order(g.t - sigma.values[g.x]) for g in m), default=1)
    k = 0
    while G.p**k < top:
        k += 1
    return max(k, sigma.log_order())


@pytest.mark.parametrize("name", sorted(GOLDEN_K))
def test_k_values(name):
    G, F, L, data, sigma, kg = pipeline(name)
    assert (kg.kf.k_S, kg.kf.k_F, kg.k_G) == GOLDEN_K[name]
    assert brute_kF(G, data, sigma) == kg.kf.k_F
    assert ordering_check(kg, sigma.log_order())


def test_lambda_identities():
    G, F, L, data, sigma, kg = pipeline("nonsplit-j2")
    lift = lift_data(L, data)
    ag = build_aG(F, U(G, 9), L=L, data=data, sigma=sigma, kg=kg)
    for P in lift.centric:
        for n in lift.n[P]:
            lam, ap = lambda_phi(L, lift, P, P, G.identity, n)
            assert lam == n and ap == G.identity
        for Q in lift.centric:
            for a in lift.Mt[(P, Q)]:
                for g in P.reps:
                    lam, ap = lambda_phi(L, lift, P, Q, a, g)
                    assert lam == G.conj(a, g) and ap == a
                for n in lift.n[P]:
                    lam, _ = lambda_phi(L, lift, P, Q, a, n)
                    lam2, _ = lambda_phi(L, lift, P, Q, a, ag.psi.apply(n))
                    assert lam2 == ag.psi.apply(lam)


@pytest.mark.parametrize("name,zeta", [("inv-torus", 9), ("nonsplit-j2", 17), ("central-z4z4", 5), ("p3-perm", 10)])
def test_psi_fixes_lifted_representatives(name, zeta):
    G, F, L, data, sigma, kg = pipeline(name)
    ag = build_aG(F, U(G, zeta), L=L, data=data, sigma=sigma, kg=kg)
    for (P, Q), reps in ag.lift.Mt.items():
        for a in reps:
            f = L.hat(P, Q, a)
            assert ag.Psi.mor(f) == f


@pytest.mark.parametrize("name", ["d8-finite", "inv-torus", "central-z4z4"])
def test_degree_one_gives_identity_functor(name):
    G, F, L, data, sigma, kg = pipeline(name)
    ag = build_aG(F, U(G, 1), L=L, data=data, sigma=sigma, kg=kg)
    rng = random.Random(0)
    for P in L.objects():
        assert ag.Psi.obj(P) == P
        for Q in L.objects():
            for f in sample_morphisms(L, P, Q, 4, 4, rng):
                assert ag.Psi.mor(f) == f


def test_refusals():
    G, F, L, data, sigma, kg = pipeline("inv-torus")
    # 5 is in Gamma_2 = Gamma_{k_F} but not in Gamma_3 = Gamma_{k_G}
    assert build_aF(F, U(G, 5), data, sigma, kg.kf).report.ok
    with pytest.raises(NotInGamma):
        build_aG(F, U(G, 5), L=L, data=data, sigma=sigma, kg=kg)
    with pytest.raises(NotInGamma):
        build_aF(F, U(G, 3), data, sigma, kg.kf)


@pytest.mark.parametrize("name,zeta", [("d8-finite", 3), ("inv-torus", 9), ("nonsplit-j2", 9), ("central-z4z4", 13)])
def test_functor_laws(name, zeta):
    G, F, L, data, sigma, kg = pipeline(name)
    ag = build_aG(F, U(G, zeta), L=L, data=data, sigma=sigma, kg=kg)
    for rep in (verify_functor(ag, level=4, per_set=4), verify_choice_independence(ag, level=4, per_set=3)):
        assert rep.ok, rep.lines()


@pytest.mark.parametrize("name,z1,z2", [("inv-torus", 9, 17), ("central-z4z4", 5, 13), ("p3-perm", 10, 19)])
def test_homomorphism(name, z1, z2):
    G, F, L, data, sigma, kg = pipeline(name)
    rep = verify_homomorphism(F, U(G, z1), U(G, z2), level=3, L=L, data=data, sigma=sigma, kg=kg)
    assert rep.ok, rep.lines()
