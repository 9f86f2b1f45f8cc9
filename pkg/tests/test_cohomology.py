import pytest

from plcg.cohomology import (
    aut_extension_nonempty,
    brute_force_class_order,
    brute_force_h1_order,
    d1,
    extension_class_order,
    h1_compute,
    is_coboundary,
    scale2,
    sub2,
)
from plcg.torus import TorusElement
from conftest import group

# class orders from the exhaustive oracle; p = 3 enumerates at a lower level
ORACLE_LEVEL = {2: 16, 3: 4}


@pytest.mark.parametrize(
    "name", ["d8-finite", "inv-torus", "nonsplit-j2", "j2-quarter-trivial", "j2-trivial", "central-z4z4", "p3-perm"]
)
def test_class_order_matches_brute_force(name):
    G = group(name)
    w = extension_class_order(G)
    assert w.order == brute_force_class_order(G, ORACLE_LEVEL[G.p])
    # the certificate solves p^m delta = dc exactly
    assert sub2(scale2(G.cocycle, w.order), d1(G, w.certificate)) == scale2(G.cocycle, 0)


def test_known_class_orders():
    assert extension_class_order(group("inv-torus")).order == 1
    assert extension_class_order(group("nonsplit-j2")).order == 2
    assert extension_class_order(group("central-z4z4")).order == 4
    assert extension_class_order(group("p3-perm")).order == 3


def test_quarter_cocycle_splits():
    # trivial action: 2 c(j) = 1/4 has the solution c(j) = 1/8
    G = group("j2-quarter-trivial")
    c = is_coboundary(G, G.cocycle)
    assert c is not None
    assert c[1].scale(2) == TorusElement.parse(2, ["1/4"])


@pytest.mark.parametrize(
    "name,level,extra",
    [
        ("inv-torus", 2, 3),
        ("nonsplit-j2", 2, 3),
        ("j2-trivial", 2, 3),
        ("central-z4z4", 2, 2),
        ("p3-perm", 1, 2),
    ],
)
def test_h1_matches_brute_force(name, level, extra):
    G = group(name)
    assert h1_compute(G).order == brute_force_h1_order(G, level, extra)


def test_h1_values():
    assert h1_compute(group("inv-torus")).order == 1
    assert h1_compute(group("j2-trivial")).order == 2
    assert h1_compute(group("central-z4z4")).invariant_factors == (4, 4)


def test_extension_of_power_maps():
    # the zeta-power map extends to S (inducing the identity on Gamma) iff (zeta - 1) delta is a coboundary
    G = group("central-z4z4")
    ident = list(range(16))
    assert not aut_extension_nonempty(G, [[3]], ident).exists
    assert aut_extension_nonempty(G, [[5]], ident).exists
    assert aut_extension_nonempty(group("nonsplit-j2"), [[3]], [0, 1]).exists
    # a non-homomorphism of Gamma is rejected before any solving
    assert not aut_extension_nonempty(G, [[5]], [1] + list(range(1, 16))).compatible
