"""Builders for the shipped example corpus.

d8-finite            dihedral group of order 8, rank 0
inv-torus            Z/2^oo semidirect Z/2 (inversion), split
nonsplit-j2          inversion action, delta(j, j) = 1/2 (class order 2)
j2-quarter-trivial   trivial action, delta(j, j) = 1/4 (splits: class order 1)
j2-trivial           trivial action, delta = 0 (H^1 = Z/2)
central-z4z4         Z/4 x Z/4 acting trivially on Z/2^oo, bilinear cocycle (class order 4)
p3-perm              p = 3, rank 2, Z/3 rotating the A2 torus, nonsplit (class order 3)
"""
from __future__ import annotations

from .group import PToralGroup


def cyclic_table(n: int) -> list[list[int]]:
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def dihedral8_table() -> tuple[list[list[int]], list[str]]:
    """r^i s^e stored at index i + 4e, with s r s = r^-1."""

    def mul(a: int, b: int) -> int:
        i, e = a % 4, a // 4
        j, f = b % 4, b // 4
        k = (i + (-j if e else j)) % 4
        return k + 4 * ((e + f) % 2)

    names = ["1", "r", "r2", "r3", "s", "rs", "r2s", "r3s"]
    return [[mul(a, b) for b in range(8)] for a in range(8)], names


def d8_finite(level: int = 1) -> PToralGroup:
    table, names = dihedral8_table()
    return PToralGroup.build("d8-finite", 2, 0, table, level=level, names=names)


def inv_torus(level: int = 8) -> PToralGroup:
    return PToralGroup.build(
        "inv-torus", 2, 1, cyclic_table(2), action=[[[1]], [[-1]]], level=level, names=["1", "j"]
    )


def nonsplit_j2(level: int = 8) -> PToralGroup:
    return PToralGroup.build(
        "nonsplit-j2",
        2,
        1,
        cyclic_table(2),
        action=[[[1]], [[-1]]],
        cocycle={(1, 1): ["1/2"]},
        level=level,
        names=["1", "j"],
    )


def j2_quarter_trivial(level: int = 8) -> PToralGroup:
    return PToralGroup.build(
        "j2-quarter-trivial", 2, 1, cyclic_table(2), cocycle={(1, 1): ["1/4"]}, level=level, names=["1", "j"]
    )


def j2_trivial(level: int = 8) -> PToralGroup:
    return PToralGroup.build("j2-trivial", 2, 1, cyclic_table(2), level=level, names=["1", "j"])


def z4z4_index(a: int, b: int) -> int:
    return (a % 4) + 4 * (b % 4)


def central_z4z4(level: int = 8) -> PToralGroup:
    table = [[z4z4_index(x % 4 + y % 4, x // 4 + y // 4) for y in range(16)] for x in range(16)]
    cocycle = {}
    for x in range(16):
        for y in range(16):
            xb, ya = x // 4, y % 4
            if (xb * ya) % 4:
                cocycle[(x, y)] = [f"{(xb * ya) % 4}/4"]
    names = [f"a{x % 4}b{x // 4}" for x in range(16)]
    return PToralGroup.build("central-z4z4", 2, 1, table, cocycle=cocycle, level=level, names=names)


P3_ROTATION = [[0, -1], [1, -1]]


def p3_perm(level: int = 3) -> PToralGroup:
    A = P3_ROTATION
    A2 = [[-1, 1], [-1, 0]]
    I = [[1, 0], [0, 1]]
    v = ["2/3", "1/3"]
    cocycle = {(a, b): v for a in range(3) for b in range(3) if a + b >= 3}
    return PToralGroup.build(
        "p3-perm", 3, 2, cyclic_table(3), action=[I, A, A2], cocycle=cocycle, level=level, names=["1", "x", "x2"]
    )


BUILDERS = {
    "d8-finite": d8_finite,
    "inv-torus": inv_torus,
    "nonsplit-j2": nonsplit_j2,
    "j2-quarter-trivial": j2_quarter_trivial,
    "j2-trivial": j2_trivial,
    "central-z4z4": central_z4z4,
    "p3-perm": p3_perm,
}


def by_name(name: str, level: int | None = None) -> PToralGroup:
    b = BUILDERS[name]
    return b() if level is None else b(level)


def bad_cocycle(level: int = 8) -> PToralGroup:
    """Inversion action with delta(j, j) = 1/4: violates the cocycle identity at (j, j, j)."""
    return PToralGroup.build(
        "bad-cocycle",
        2,
        1,
        cyclic_table(2),
        action=[[[1]], [[-1]]],
        cocycle={(1, 1): ["1/4"]},
        level=level,
        names=["1", "j"],
    )


def d8_s4_fusion(G: PToralGroup | None = None):
    """F_S(D8) plus an order-3 automorphism of the Klein four group {1, r2, s, r2s}."""
    from .fusion import FusionSystem, hom_from_table
    from .group import generated

    G = G or d8_finite()
    el = [G.sec(i) for i in range(8)]
    V = generated(G, [], [el[2], el[4]])
    tau = hom_from_table(V, V, {el[0]: el[0], el[2]: el[4], el[4]: el[6], el[6]: el[2]})
    return FusionSystem(G, generators=[tau], name="S4-type fusion on D8")


def corpus_documents() -> dict[str, dict]:
    """JSON documents of the shipped corpus, by file name."""
    from .fusion import FusionSystem
    from .io import fusion_to_json, group_to_json, linking_to_json
    from .linking import TablesLinking, TransporterLinking

    docs: dict[str, dict] = {}
    for name in ["d8-finite", "inv-torus", "nonsplit-j2", "j2-quarter-trivial", "j2-trivial", "central-z4z4", "p3-perm"]:
        G = by_name(name)
        docs[f"{name}.group.json"] = group_to_json(G)
        docs[f"{name}.fusion.json"] = {"universe": "auto-close", "generators": [], "weyl": [[list(r) for r in m] for m in G.weyl_matrices]}
        manifest = {"group": f"{name}.group.json", "fusion": f"{name}.fusion.json", "level": G.level}
        if G.rank == 0:
            T = TablesLinking.from_transporter(TransporterLinking(FusionSystem(G)))
            docs[f"{name}.linking.json"] = linking_to_json(T)
            manifest["precision"] = 8
        else:
            docs[f"{name}.linking.json"] = {"model": "transporter"}
            manifest["precision"] = 8 if G.p == 2 else 4
        manifest["linking"] = f"{name}.linking.json"
        docs[f"{name}.manifest.json"] = manifest
    # S4-type fusion over D8 (no linking system shipped)
    F4 = d8_s4_fusion()
    docs["d8-s4.fusion.json"] = fusion_to_json(F4)
    docs["d8-s4.manifest.json"] = {"group": "d8-finite.group.json", "fusion": "d8-s4.fusion.json", "level": 1}
    # corrupted linking tables: pi of one automorphism of D8 replaced by the identity
    bad = corrupt_pi(docs["d8-finite.linking.json"])
    docs["d8-corrupt.linking.json"] = bad
    docs["d8-corrupt.manifest.json"] = {
        "group": "d8-finite.group.json",
        "fusion": "d8-finite.fusion.json",
        "linking": "d8-corrupt.linking.json",
        "level": 1,
    }
    docs["bad-cocycle.group.json"] = group_to_json(bad_cocycle())
    docs["bad-cocycle.manifest.json"] = {"group": "bad-cocycle.group.json", "level": 8}
    return docs


def corrupt_pi(doc: dict) -> dict:
    """Copy of a tables linking document whose first non-identity endomorphism of the top object projects to the identity."""
    import copy

    d = copy.deepcopy(doc)
    t = d["tables"]
    top = 0
    for lab, (i, j) in enumerate(t["morphisms"]):
        if i == top and j == top and t["pi"][lab] != t["pi"][0]:
            t["pi"][lab] = list(t["pi"][0])
            break
    return d


def write_corpus(directory) -> list[str]:
    from pathlib import Path

    from .io import dumps

    out = []
    for name, doc in sorted(corpus_documents().items()):
        path = Path(directory) / name
        path.write_text(dumps(doc))
        out.append(name)
    return out
