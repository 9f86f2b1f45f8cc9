import pytest

from plcg import examples
from plcg.group import generated, whole_group
from plcg.io import linking_from_json, linking_to_json
from plcg.linking import (
    FactorizationError,
    TablesLinking,
    bullet_lift,
    check_mono_epi,
    factor_iso,
    factor_left,
    factor_suite,
    validate_linking,
)
from conftest import pipeline


@pytest.fixture(scope="module")
def ex1():
    G, F, L = pipeline("d8-finite")[:3]
    return G, F, L, TablesLinking.from_transporter(L)


@pytest.mark.parametrize("model", [0, 1])
def test_ex1_exhaustive(ex1, model):
    L = ex1[2 + model]
    for rep in (validate_linking(L), factor_suite(L), check_mono_epi(L)):
        assert rep.ok, rep.lines()


def test_ex1_morphism_counts(ex1):
    # |Mor(P, Q)| = |N_S(P, Q)| in the transporter model; the top object has 8 automorphisms
    G, F, L, T = ex1
    S = max(L.objects(), key=lambda P: len(P.reps))
    assert len(L.mor(S, S)) == 8
    for P in L.objects():
        for Q in L.objects():
            assert len(T.mor(P, Q)) == len(L.mor(P, Q))


def test_corrupt_pi_detected(ex1):
    G, F, L, T = ex1
    bad = linking_from_json(F, examples.corrupt_pi(linking_to_json(T)))
    rep = validate_linking(bad)
    assert not rep.ok
    failed = {name for name, ok, _ in rep.checks if not ok}
    assert any(name.startswith("(B)") or name.startswith("(A)") for name in failed)


def test_composition_collision_detected(ex1):
    G, F, L, T = ex1
    S = max(T.objects(), key=lambda P: len(P.reps))
    m = T.mor(S, S)
    comp = dict(T.comp)
    # make two distinct automorphisms compose with the same b to the same result
    comp[(m[1].label, m[2].label)] = comp[(m[1].label, m[3].label)]
    bad = TablesLinking(F, T.objects(), T.endpoints, comp, T.delta, T.pi)
    assert not check_mono_epi(bad).ok
    assert not validate_linking(bad).ok


def test_factor_left_rejects_wrong_projection(ex1):
    G, F, L, T = ex1
    S = max(L.objects(), key=lambda P: len(P.reps))
    beta, gamma = L.identity(S), L.mor(S, S)[1]
    with pytest.raises(FactorizationError):
        factor_left(L, beta, gamma, L.project(L.identity(S)))


def test_ex2_sampled_axioms():
    L = pipeline("inv-torus")[2]
    rep = validate_linking(L, samples=6, seed=1)
    assert rep.ok, rep.lines()


def test_iso_factorization_on_ex2():
    G, F, L = pipeline("nonsplit-j2")[:3]
    for P in L.objects():
        for Q in L.objects():
            for phi in L.mor(P, Q, 2):
                f, Pp = factor_iso(L, phi)
                assert L.compose(L.iota(Pp, Q), f) == phi


def test_bullet_lift_dihedral_type():
    # <(0, j), 1/8> is dihedral of order 16; its bullet is all of S
    G, F, L = pipeline("inv-torus")[:3]
    P = generated(G, [], [G.sec(1), G.element(["1/8"])])
    S = whole_group(G)
    assert F.bullet(P) == S
    for g in [G.identity, G.sec(1), G.element(["1/16"]), G.element(["3/16"], 1)]:
        if not all(P.contains(G.conj(g, r)) for r in P.reps):
            continue
        lifted = bullet_lift(L, L.hat(P, P, g))
        assert lifted == L.hat(S, S, g)


@pytest.mark.parametrize("name", ["d8-finite", "inv-torus"])
def test_hat_is_its_own_bullet(name):
    G, F, L = pipeline(name)[:3]
    for P in L.objects():
        for Q in L.objects():
            for f in L.mor(P, Q, 2)[:6]:
                Pb, Qb = F.bullet(P), F.bullet(Q)
                assert bullet_lift(L, f) == L.hat(Pb, Qb, f.g)
