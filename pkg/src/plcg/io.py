"""JSON files: group presentations, fusion data, linking data and manifests.

Torus values are lists of strings "a/p^k"; group elements are {"t": [...], "x": i};
subgroups are {"basis": [[...]], "reps": [element, ...]}.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .fusion import FusionSystem, GroupHom
from .group import GroupElement, PToralGroup, Subgroup
from .linking import LinkingSystem, TablesLinking, TransporterLinking
from .torus import TorusElement


class InputError(ValueError):
    """Malformed or missing input (CLI exit code 2)."""


def dumps(obj: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _read(path: Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"missing file: {path}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e})") from None


# ---------------------------------------------------------------- elements and subgroups


def element_from_json(G: PToralGroup, d: dict) -> GroupElement:
    return GroupElement(TorusElement.parse(G.p, d["t"]), int(d["x"]))


def subgroup_from_json(G: PToralGroup, d: dict) -> Subgroup:
    return Subgroup(G, d.get("basis", []), [element_from_json(G, e) for e in d.get("reps", [])])


def subgroup_to_json(P: Subgroup) -> dict:
    return {"basis": [list(b) for b in P.basis], "reps": [g.to_json() for g in P.reps]}


def hom_from_json(G: PToralGroup, d: dict) -> GroupHom:
    """{"source", "target", "matrix"?, "map": [[element, image], ...]} covering the source reps."""
    P = subgroup_from_json(G, d["source"])
    Q = subgroup_from_json(G, d["target"])
    table = {}
    for a, b in d["map"]:
        table[P.canon(element_from_json(G, a))] = element_from_json(G, b)
    missing = [r for r in P.reps if r not in table]
    if missing:
        raise InputError(f"hom map does not cover the representative {missing[0]}")
    M = d.get("matrix", [[int(i == j) for j in range(G.rank)] for i in range(G.rank)] if G.rank else [])
    return GroupHom(P, Q, M, [table[r] for r in P.reps])


def hom_to_json(f: GroupHom) -> dict:
    return {
        "source": subgroup_to_json(f.source),
        "target": subgroup_to_json(f.target),
        "matrix": [list(r) for r in f.matrix],
        "map": [[r.to_json(), img.to_json()] for r, img in zip(f.source.reps, f.images)],
    }


# ---------------------------------------------------------------- groups


def group_to_json(G: PToralGroup) -> dict:
    cocycle = []
    n = G.gamma.order
    for x in range(n):
        for y in range(n):
            v = G.cocycle[x][y]
            if v.level:
                cocycle.append([x, y, v.to_json()])
    return {
        "name": G.name,
        "p": G.p,
        "rank": G.rank,
        "level": G.level,
        "gamma": [list(r) for r in G.gamma.table],
        "gamma_names": list(G.gamma.names),
        "action": [[list(r) for r in m] for m in G.action],
        "cocycle": cocycle,
    }


def group_from_json(d: dict, level: int | None = None) -> PToralGroup:
    try:
        p, rank = int(d["p"]), int(d["rank"])
        table = d["gamma"]
        cocycle = {(int(x), int(y)): v for x, y, v in d.get("cocycle", [])}
        lvl = int(d.get("level", 8)) if level is None else level
        if lvl < 1:
            raise InputError("level must be at least 1")
        return PToralGroup.build(
            d.get("name", "group"),
            p,
            rank,
            table,
            action=d.get("action"),
            cocycle=cocycle,
            level=lvl,
            names=d.get("gamma_names", ()),
        )
    except (KeyError, TypeError) as e:
        raise InputError(f"group file: missing or malformed field {e}") from None


def load_group(path, level: int | None = None) -> PToralGroup:
    return group_from_json(_read(Path(path)), level)


# ---------------------------------------------------------------- fusion


def fusion_to_json(F: FusionSystem, with_universe: bool = False) -> dict:
    out: dict = {
        "name": F.name,
        "universe": [subgroup_to_json(P) for P in F.universe] if with_universe else "auto-close",
        "generators": [hom_to_json(f) for f in F.generators],
        "weyl": [[list(r) for r in m] for m in F.W],
    }
    return out


def fusion_from_json(G: PToralGroup, d: dict, level: int | None = None) -> FusionSystem:
    uni = d.get("universe", "auto-close")
    universe = None if uni == "auto-close" else [subgroup_from_json(G, s) for s in uni]
    gens = [hom_from_json(G, h) for h in d.get("generators", [])]
    W = d.get("weyl")
    return FusionSystem(G, W=W, generators=gens, universe=universe, level=level, name=d.get("name", ""))


def load_fusion(G: PToralGroup, path, level: int | None = None) -> FusionSystem:
    return fusion_from_json(G, _read(Path(path)), level)


# ---------------------------------------------------------------- linking


def linking_to_json(L: LinkingSystem) -> dict:
    if isinstance(L, TransporterLinking):
        return {"model": "transporter"}
    assert isinstance(L, TablesLinking)
    objs = L.objects()
    idx = {P: i for i, P in enumerate(objs)}
    delta = [[idx[P], idx[Q], g.to_json(), lab] for (P, Q, g), lab in L.delta.items()]
    delta.sort(key=lambda e: e[3])
    return {
        "model": "tables",
        "tables": {
            "objects": [subgroup_to_json(P) for P in objs],
            "morphisms": [[idx[P], idx[Q]] for P, Q in L.endpoints],
            "composition": sorted([b, a, c] for (b, a), c in L.comp.items()),
            "delta": delta,
            "pi": [[img.to_json() for img in f.images] for f in L.pi],
        },
    }


def linking_from_json(F: FusionSystem, d: dict) -> LinkingSystem:
    model = d.get("model", "transporter")
    if model == "transporter":
        return TransporterLinking(F)
    if model != "tables":
        raise InputError(f"unknown linking model {model!r}")
    G = F.G
    if G.rank:
        raise InputError("the tables model is for finite S only")
    t = d["tables"]
    objs = [subgroup_from_json(G, s) for s in t["objects"]]
    endpoints = [(objs[i], objs[j]) for i, j in t["morphisms"]]
    comp = {(int(b), int(a)): int(c) for b, a, c in t["composition"]}
    delta = {(objs[i], objs[j], element_from_json(G, e)): int(lab) for i, j, e, lab in t["delta"]}
    pi = []
    for lab, imgs in enumerate(t["pi"]):
        P, Q = endpoints[lab]
        pi.append(GroupHom(P, Q, (), [element_from_json(G, e) for e in imgs]))
    return TablesLinking(F, objs, endpoints, comp, delta, pi)


def load_linking(F: FusionSystem, path) -> LinkingSystem:
    return linking_from_json(F, _read(Path(path)))


# ---------------------------------------------------------------- manifests


@dataclass
class Manifest:
    path: Path
    group: Path
    fusion: Path | None = None
    linking: Path | None = None
    level: int | None = None
    precision: int | None = None
    options: dict = field(default_factory=dict)

    @staticmethod
    def load(path) -> "Manifest":
        path = Path(path)
        d = _read(path)
        base = path.parent
        if "group" not in d:
            raise InputError(f"{path}: manifest has no group file")

        def rel(key):
            return base / d[key] if d.get(key) else None

        m = Manifest(
            path,
            base / d["group"],
            rel("fusion"),
            rel("linking"),
            d.get("level"),
            d.get("precision"),
            {k: v for k, v in d.items() if k not in ("group", "fusion", "linking", "level", "precision")},
        )
        for p in (m.group, m.fusion, m.linking):
            if p is not None and not p.exists():
                raise InputError(f"missing file: {p}")
        if m.level is not None and int(m.level) < 1:
            raise InputError("level must be at least 1")
        return m

    def load_all(self, level: int | None = None):
        lvl = level if level is not None else self.level
        G = load_group(self.group, lvl)
        F = load_fusion(G, self.fusion) if self.fusion else FusionSystem(G)
        L = load_linking(F, self.linking) if self.linking else (TransporterLinking(F) if F.model == "conjugation" else None)
        return G, F, L
