"""Fusion systems over S on a finite universe of bullet-closed subgroups.

Two kinds are supported. The fusion system F_S(S) of S-conjugations, in any
rank, with morphisms addressed through transporter elements. And, for finite
S only, the fusion system generated by F_S(S) and extra injective
homomorphisms, with every Hom-set materialized by closure.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from . import linalg
from .group import (
    GroupElement,
    LevelTooLow,
    PToralGroup,
    Report,
    Subgroup,
    _UnionFind,
    center,
    centralizer,
    conjugate_subgroup,
    conjugates_into,
    double_coset_reps,
    find_conjugator,
    generated,
    normalizer,
    product_subgroup,
    trivial_subgroup,
)
from .torus import TorusElement

Mat = tuple[tuple[int, ...], ...]


# ---------------------------------------------------------------- homomorphisms


class GroupHom:
    """f: P -> Q given by a matrix on P0 and images of the coset representatives of P0 in P.

    f((u, 1) r) = (M u, 1) f(r) for u in P0 and r a representative.
    """

    __slots__ = ("source", "target", "matrix", "images", "via", "_key")

    def __init__(self, source: Subgroup, target: Subgroup, matrix, images: Sequence[GroupElement], via=None):
        self.source = source
        self.target = target
        self.matrix: Mat = tuple(tuple(int(v) for v in row) for row in matrix)
        self.images: tuple[GroupElement, ...] = tuple(images)
        self.via = via  # the conjugating element when f = c_g
        torus_part = tuple(tuple(linalg.matvec(self.matrix, b)) for b in source.basis)
        self._key = (source.key, target.key, torus_part, self.images)

    @property
    def G(self) -> PToralGroup:
        return self.source.G

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupHom) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        via = f" via {self.via}" if self.via is not None else ""
        return f"GroupHom({self.source!r} -> {self.target!r}{via})"

    def sort_key(self) -> tuple:
        return tuple(g.sort_key() for g in self.images) + (self.matrix,)

    def apply(self, g: GroupElement) -> GroupElement:
        P, G = self.source, self.G
        r = P.canon(g)
        i = P.reps.index(r)
        img = self.images[i]
        u = g.t - r.t
        if u.level == 0:
            return img
        return G.mul(G.torus(u.apply_matrix(self.matrix)), img)

    __call__ = apply

    def compose(self, other: "GroupHom") -> "GroupHom":
        """self o other."""
        M = linalg.matmul(self.matrix, other.matrix) if self.G.rank else ()
        via = None
        if self.via is not None and other.via is not None:
            via = self.G.mul(self.via, other.via)
        return GroupHom(other.source, self.target, M, [self.apply(g) for g in other.images], via)

    def restrict(self, P: Subgroup, Q: Subgroup | None = None) -> "GroupHom":
        return GroupHom(P, Q or self.target, self.matrix, [self.apply(g) for g in P.reps], self.via)

    def with_target(self, Q: Subgroup) -> "GroupHom":
        return GroupHom(self.source, Q, self.matrix, self.images, self.via)

    def image(self) -> Subgroup:
        basis = [linalg.matvec(self.matrix, b) for b in self.source.basis]
        return Subgroup(self.G, basis, self.images)

    def is_inclusion(self) -> bool:
        return self.source.is_subgroup_of(self.target) and self == inclusion(self.source, self.target)

    def inverse(self) -> "GroupHom":
        """Inverse of an isomorphism onto its image (the target must be that image)."""
        G = self.G
        Q = self.target
        if self.image() != Q:
            raise ValueError("not an isomorphism onto the target")
        Minv = linalg.inverse_unimodular([list(r) for r in self.matrix]) if G.rank else ()
        via = G.inv(self.via) if self.via is not None else None
        shell = GroupHom(Q, self.source, Minv, [G.identity] * len(Q.reps))
        imgs = []
        for q in Q.reps:
            # find the preimage: q = (M u, 1) f(r) for a rep r and u in P0
            found = None
            for r, fr in zip(self.source.reps, self.images):
                diff = G.mul(q, G.inv(fr))
                if diff.x == 0 and Q.contains(diff):
                    u = diff.t.apply_matrix(Minv) if G.rank and diff.t.level else diff.t
                    cand = G.mul(G.torus(u), r)
                    if self.apply(cand) == q:
                        found = cand
                        break
            if found is None:
                raise ValueError("preimage not found")
            imgs.append(found)
        return GroupHom(Q, self.source, shell.matrix, imgs, via)

    def is_injective(self, level: int) -> bool:
        for K in (level, level + 1):
            seen = set()
            for g in self.source.elements_at(K):
                h = self.apply(g)
                if h in seen:
                    return False
                seen.add(h)
        return True

    def multiplicativity_witness(self, level: int, samples: int = 200, seed: int = 0):
        P, G = self.source, self.G
        elems = list(P.elements_at(level))
        if len(elems) <= 64:
            pairs: Iterable = itertools.product(elems, repeat=2)
        else:
            rng = random.Random(seed)
            pairs = ((rng.choice(elems), rng.choice(elems)) for _ in range(samples))
        for a, b in pairs:
            if self.apply(G.mul(a, b)) != G.mul(self.apply(a), self.apply(b)):
                return a, b
        return None

    def to_json(self) -> dict:
        return {
            "torus_matrix": [list(r) for r in self.matrix],
            "rep_images": [g.to_json() for g in self.images],
            "via": self.via.to_json() if self.via is not None else None,
        }


def conj_hom(G: PToralGroup, g: GroupElement, P: Subgroup, Q: Subgroup | None = None) -> GroupHom:
    """c_g: P -> Q, h -> g h g^-1."""
    if Q is None:
        Q = conjugate_subgroup(G, g, P)
    M = G.action[g.x] if G.rank else ()
    return GroupHom(P, Q, M, [G.conj(g, r) for r in P.reps], g)


def inclusion(P: Subgroup, Q: Subgroup) -> GroupHom:
    G = P.G
    return conj_hom(G, G.identity, P, Q)


def hom_from_table(P: Subgroup, Q: Subgroup, table: dict) -> GroupHom:
    """A homomorphism of finite groups given on every element of P."""
    return GroupHom(P, Q, (), [table[r] for r in P.reps])


# ---------------------------------------------------------------- bullet construction


def fixed_subgroup(G: PToralGroup, mats: Sequence[Mat], level: int) -> Subgroup:
    """S0^W for a finite set of matrices W: identity component exactly, finite part stabilized."""
    r = G.rank
    rows: list[list[int]] = []
    for A in mats:
        for i in range(r):
            rows.append([A[i][j] - int(i == j) for j in range(r)])
    T = linalg.rational_kernel(rows, r) if r else []
    shell = Subgroup(G, T, [])
    found = []
    for K in (level, level + 1):
        s = set()
        for t in shell.complement_points(K):
            if all(t.apply_matrix(A) == t for A in mats):
                s.add(GroupElement(t, 0))
        found.append(s)
    if found[0] != found[1]:
        raise LevelTooLow("fixed subgroup: new points appear one level up")
    return Subgroup(G, shell.basis, found[0], canonical=True)


def power_subgroup_data(G: PToralGroup, P: Subgroup) -> tuple[list[list[int]], list[TorusElement]]:
    """Generators of <P^[m]> = <g^(p^m) : g in P> (p^m = |Gamma|): the lattice of P0 and r^(p^m)."""
    e = G.gamma.order
    return [list(b) for b in P.basis], P.power_torus_generators(e)


def weyl_centralizer(G: PToralGroup, W: Sequence[Mat], P: Subgroup) -> list[Mat]:
    """C_W(P^[m]): elements of W fixing P^[m] pointwise."""
    basis, pts = power_subgroup_data(G, P)
    out = []
    for A in W:
        if any(linalg.matvec(A, b) != list(b) for b in basis):
            continue
        if all(t.apply_matrix(A) == t for t in pts if t.level):
            out.append(A)
    return out


def bullet(G: PToralGroup, W: Sequence[Mat], P: Subgroup, level: int | None = None) -> Subgroup:
    """P^bullet = P * I(P^[m]) with I(Q) = S0^(C_W(Q))."""
    if G.rank == 0:
        return P
    level = G.level if level is None else level
    I = fixed_subgroup(G, weyl_centralizer(G, W, P), level)
    return product_subgroup(G, P, I)


# ---------------------------------------------------------------- fusion systems


class FusionSystem:
    """A fusion system over S with its finite object universe of class representatives.

    With no extra generators this is F_S(S) and W must be Aut_S(S0). Extra
    generators are accepted for finite S only.
    """

    def __init__(
        self,
        G: PToralGroup,
        W: Sequence[Mat] | None = None,
        generators: Sequence[GroupHom] = (),
        universe: Sequence[Subgroup] | None = None,
        level: int | None = None,
        name: str = "",
    ):
        self.G = G
        self.level = G.level if level is None else level
        self.W = tuple(sorted(set(tuple(tuple(r) for r in m) for m in (W if W is not None else G.weyl_matrices))))
        self.generators = tuple(generators)
        self.name = name or f"F_S({G.name})"
        if self.generators and G.rank:
            raise NotImplementedError("extra fusion generators are supported for finite S only")
        self._universe = tuple(universe) if universe is not None else None
        self._explicit: dict | None = None

    @property
    def model(self) -> str:
        return "explicit" if self.generators else "conjugation"

    # ---- objects
    @cached_property
    def universe(self) -> tuple[Subgroup, ...]:
        if self._universe is not None:
            return self._universe
        return auto_close(self.G, self.W, self.level)

    def bullet(self, P: Subgroup) -> Subgroup:
        cache = self.__dict__.setdefault("_bullets", {})
        if P not in cache:
            cache[P] = bullet(self.G, self.W, P, self.level)
        return cache[P]

    def locate(self, P: Subgroup) -> tuple[Subgroup, GroupElement]:
        """(R, g) with R the universe representative S-conjugate to P and g P g^-1 = R."""
        for R in self.universe:
            g = find_conjugator(self.G, P, R, self.level)
            if g is not None:
                return R, g
        raise LookupError(f"{P!r} is not S-conjugate to a universe object")

    # ---- explicit model (finite S)
    def _all_subgroups(self) -> list[Subgroup]:
        return all_subgroups_finite(self.G)

    def _explicit_isos(self) -> dict:
        """Iso_F(P, P') for all subgroups, closed under composition, inverses and restriction."""
        if self._explicit is not None:
            return self._explicit
        G = self.G
        subs = self._all_subgroups()
        elems = list(G.elements_at(0))
        isos: dict[tuple, set[GroupHom]] = {}

        def add(f: GroupHom) -> bool:
            f = f.with_target(f.image())
            key = (f.source, f.target)
            s = isos.setdefault(key, set())
            if f in s:
                return False
            s.add(f)
            return True

        seeds: list[GroupHom] = []
        for P in subs:
            for g in elems:
                seeds.append(conj_hom(G, g, P))
        for f in self.generators:
            for P in subs:
                if P.is_subgroup_of(f.source):
                    seeds.append(f.restrict(P).with_target(f.restrict(P).image()))
        queue = []
        for f in seeds:
            if add(f):
                queue.append(f.with_target(f.image()))
        while queue:
            f = queue.pop()
            new = [f.inverse()]
            for (A, B), s in list(isos.items()):
                if A == f.target:
                    new.extend(h.compose(f) for h in list(s))
            for P in subs:
                if P != f.source and P.is_subgroup_of(f.source):
                    r = f.restrict(P)
                    new.append(r.with_target(r.image()))
            for h in new:
                h = h.with_target(h.image())
                if add(h):
                    queue.append(h)
        self._explicit = isos
        return isos

    # ---- morphism sets
    def homs(self, P: Subgroup, Q: Subgroup, level: int | None = None) -> list[GroupHom]:
        """Hom_F(P, Q) (morphisms of level <= level in the conjugation model)."""
        G = self.G
        if self.model == "explicit":
            out = set()
            for (A, B), s in self._explicit_isos().items():
                if A == P and B.is_subgroup_of(Q):
                    out.update(f.with_target(Q) for f in s)
            return sorted(out, key=GroupHom.sort_key)
        level = self.level if level is None else level
        seen: dict = {}
        for K in range(level + 1):
            for g in _transporter_full(G, P, Q, K):
                f = conj_hom(G, g, P, Q)
                seen.setdefault(f, f)
        return sorted(seen.values(), key=GroupHom.sort_key)

    def contains(self, f: GroupHom) -> GroupElement | GroupHom | None:
        """A witness that f lies in F (a conjugating element or an explicit morphism), else None."""
        G = self.G
        P, Q = f.source, f.target
        if f.via is not None and conjugates_into(G, f.via, P, Q) and conj_hom(G, f.via, P, Q) == f:
            if self.model == "conjugation":
                return f.via
        if self.model == "explicit":
            for h in self.homs(P, Q):
                if h == f:
                    return h
            return None
        return _conjugation_witness(G, f, self.level)

    def hom_reps(self, P: Subgroup, Q: Subgroup) -> list[GroupHom]:
        """M_{P,Q}: one morphism per N_S(Q)-orbit of Hom_F(P, Q), inclusion first when P <= Q."""
        G = self.G
        NQ = normalizer(G, Q, self.level)
        if self.model == "conjugation":
            CP = centralizer(G, P, self.level)
            reps = double_coset_reps(G, P, Q, NQ, CP, self.level)
            homs = [conj_hom(G, g, P, Q) for g in reps]
        else:
            all_h = self.homs(P, Q)
            nq = list(NQ.elements_at(0))
            uf = _HomUF(all_h)
            idx = set(all_h)
            for f in all_h:
                for n in nq:
                    h = conj_hom(G, n, Q, Q).compose(f)
                    if h in idx:
                        uf.union(f, h)
            homs = sorted({uf.find(f) for f in all_h}, key=GroupHom.sort_key)
        if P.is_subgroup_of(Q):
            inc = inclusion(P, Q)
            same = [h for h in homs if _same_orbit(G, NQ, h, inc, self)]
            if not same:
                raise AssertionError("inclusion not represented")
            homs = [inc] + [h for h in homs if h is not same[0]]
        return homs

    # ---- properties
    def is_centric(self, P: Subgroup) -> bool:
        G = self.G
        for Pp in self.f_conjugates(P):
            C = centralizer(G, Pp, self.level)
            if C != center(G, Pp, self.level):
                return False
        return True

    def f_conjugates(self, P: Subgroup) -> list[Subgroup]:
        """F-conjugates of P up to S-conjugacy (one subgroup per class met)."""
        if self.model == "conjugation":
            return [P]
        out: list[Subgroup] = []
        for (A, B), s in self._explicit_isos().items():
            if A == P and all(find_conjugator(self.G, B, C, 0) is None for C in out):
                out.append(B)
        return out

    @cached_property
    def centric_universe(self) -> tuple[Subgroup, ...]:
        return tuple(P for P in self.universe if self.is_centric(P))


class _HomUF(_UnionFind):
    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra.sort_key() <= rb.sort_key():
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def _same_orbit(G, NQ, h: GroupHom, inc: GroupHom, F: FusionSystem) -> bool:
    """Whether h = c_n o inc for some n in N_S(Q)."""
    if h == inc:
        return True
    if F.model == "conjugation":
        # orbit roots are minimal elements, so the identity is the root of its own orbit
        return False
    return any(conj_hom(G, n, inc.target, inc.target).compose(inc) == h for n in NQ.elements_at(0))


def _transporter_full(G: PToralGroup, P: Subgroup, Q: Subgroup, level: int):
    """All g in S[level] (exact level) with g P g^-1 <= Q."""
    for g in G.elements_at(level):
        if g.t.level == level and conjugates_into(G, g, P, Q):
            yield g


def _conjugation_witness(G: PToralGroup, f: GroupHom, level: int) -> GroupElement | None:
    """Some g with c_g = f on P, searching S[level + 1]; candidates are taken modulo C_S(P)."""
    P = f.source
    C = centralizer(G, P, level)
    for x in range(G.gamma.order):
        if G.rank and any(
            linalg.matvec(G.action[x], b) != linalg.matvec(f.matrix, b) for b in P.basis
        ):
            continue
        A = G.action[x]
        shell = Subgroup(G, [linalg.matvec(A, b) for b in C.basis], [])
        for K in range(level + 2):
            for t in shell.complement_points(K):
                if t.level < K:
                    continue
                g = GroupElement(t, x)
                if all(G.conj(g, r) == fr for r, fr in zip(P.reps, f.images)):
                    return g
    return None


def all_subgroups_finite(G: PToralGroup) -> list[Subgroup]:
    """Every subgroup of a finite S (rank 0), by closure under adjoining elements."""
    if G.rank:
        raise ValueError("only for finite S")
    elems = list(G.elements_at(0))
    start = trivial_subgroup(G)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for P in frontier:
            for g in elems:
                if P.contains(g):
                    continue
                Q = generated(G, [], list(P.reps) + [g])
                if Q not in seen:
                    seen.add(Q)
                    nxt.append(Q)
        frontier = nxt
    return sorted(seen, key=Subgroup.sort_key)


# ---------------------------------------------------------------- universe


def _add_class(G: PToralGroup, reps: list[Subgroup], P: Subgroup, level: int) -> bool:
    for R in reps:
        if R == P or find_conjugator(G, P, R, level) is not None:
            return False
    reps.append(P)
    return True


def _orbit_moves(G: PToralGroup, R: Subgroup, level: int, L0: int):
    N = normalizer(G, R, level)
    ns = N.torus_generators(L0) + [n for n in N.rep_generators if n.t.level <= L0]
    moves = [lambda h, r=r: G.mul(r, h) for r in R.rep_generators if r.t.level <= L0]
    moves += [lambda h, n=n: G.conj(n, h) for n in ns]
    return moves


def _mark_orbit(R: Subgroup, g: GroupElement, moves, covered: set, L0: int) -> None:
    # marking is only a shortcut, so the walk may stop at candidates of level > L0
    stack = [g]
    covered.add(g)
    while stack:
        a = stack.pop()
        for mv in moves:
            b = R.canon(mv(a))
            if b.t.level <= L0 and b not in covered:
                covered.add(b)
                stack.append(b)


def _close_at(G: PToralGroup, W: Sequence[Mat], level: int, L0: int) -> list[Subgroup]:
    start = bullet(G, W, trivial_subgroup(G), level)
    reps = [start]
    queue = [start]
    seen_gen: set[Subgroup] = set()
    seen_bullet: set[Subgroup] = {start}
    while queue:
        R = queue.pop(0)
        # the class of <R, g> only depends on g up to left multiplication by R
        # and conjugation by N_S(R); mark each orbit once
        moves = _orbit_moves(G, R, level, L0)
        covered: set[GroupElement] = set()
        for g in R.left_coset_candidates(L0):
            if g in covered or R.contains(g):
                continue
            _mark_orbit(R, g, moves, covered, L0)
            H = generated(G, R.basis, list(R.rep_generators) + [g])
            if H in seen_gen:
                continue
            seen_gen.add(H)
            P = bullet(G, W, H, level)
            if P in seen_bullet:
                continue
            seen_bullet.add(P)
            if _add_class(G, reps, P, level):
                queue.append(P)
    return reps


def auto_close(G: PToralGroup, W: Sequence[Mat], level: int, max_level: int | None = None) -> tuple[Subgroup, ...]:
    """Representatives of the S-classes of bullet subgroups.

    Bullets of <R, g> for R already found and g in S[L0] are added, with L0
    starting where p^m-th powers of level-L0 elements still have level >= 2
    (>= 1 for odd p), and increased until the class count agrees at L0 and L0 + 1.
    """
    if G.rank == 0:
        subs = all_subgroups_finite(G)
        reps: list[Subgroup] = []
        for P in subs:
            _add_class(G, reps, P, 0)
        return tuple(sorted(reps, key=Subgroup.sort_key))
    max_level = level if max_level is None else max_level
    prev = None
    start = G.gamma.log_order + (2 if G.p == 2 else 1)
    for L0 in range(start, max(max_level, start + 1) + 1):
        cur = _close_at(G, W, level, L0)
        if prev is not None and len(cur) == len(prev):
            return tuple(sorted(prev, key=Subgroup.sort_key))
        prev = cur
    raise LevelTooLow("bullet universe did not stabilize")


# ---------------------------------------------------------------- validation


def validate_fusion(F: FusionSystem) -> Report:
    G = F.G
    rep = Report(True)
    L = F.level
    bad = ""
    for f in F.generators:
        if not f.is_injective(L):
            bad = f"generator {f!r} is not injective"
            break
        w = f.multiplicativity_witness(L)
        if w is not None:
            bad = f"generator {f!r} is not multiplicative at {w}"
            break
    rep.add("generators are injective homomorphisms", not bad, bad)
    if G.rank:
        want = set(G.weyl_matrices)
        okW = set(F.W) == want if F.model == "conjugation" else True
        rep.add("W = Aut_F(S0)", okW, "" if okW else f"W has {len(F.W)} elements, Aut_S(S0) has {len(want)}")
    objs = F.universe
    # axiom 1: Hom_S(P, Q) inside Hom_F(P, Q)
    bad = ""
    for P in objs:
        for Q in objs:
            for g in _transporter_full(G, P, Q, min(L, 2)) if G.rank else G.elements_at(0):
                if not conjugates_into(G, g, P, Q):
                    continue
                if F.contains(conj_hom(G, g, P, Q)) is None:
                    bad = f"c_{g} in Hom_S({P!r}, {Q!r}) missing from F"
                    break
            if bad:
                break
        if bad:
            break
    rep.add("Hom_S(P,Q) in Hom_F(P,Q)", not bad, bad)
    # axiom 2: every morphism is an isomorphism followed by an inclusion
    bad = ""
    for P in objs:
        for Q in objs:
            for f in F.hom_reps(P, Q):
                im = f.image()
                iso = f.with_target(im)
                if F.contains(iso) is None or not im.is_subgroup_of(Q):
                    bad = f"{f!r} does not factor through F"
                    break
                back = iso.inverse()
                if F.contains(back) is None:
                    bad = f"inverse of {iso!r} missing from F"
                    break
            if bad:
                break
        if bad:
            break
    rep.add("iso-then-inclusion factorization", not bad, bad)
    return rep


# ---------------------------------------------------------------- representative data


@dataclass
class RepresentativeData:
    objects: tuple[Subgroup, ...]
    centric: tuple[Subgroup, ...]
    r: dict[Subgroup, tuple[GroupElement, ...]]
    n: dict[Subgroup, tuple[GroupElement, ...]]
    M: dict[tuple[Subgroup, Subgroup], list[GroupHom]] = field(default_factory=dict)

    def index(self, P: Subgroup) -> int:
        return self.objects.index(P)

    def to_json(self) -> dict:
        names = {P: f"P{i}" for i, P in enumerate(self.objects)}
        return {
            "objects": [subgroup_json(P) | {"name": names[P]} for P in self.objects],
            "centric": [names[P] for P in self.centric],
            "r": {names[P]: [g.to_json() for g in v] for P, v in self.r.items()},
            "n": {names[P]: [g.to_json() for g in v] for P, v in self.n.items()},
            "M": {
                f"{names[P]}->{names[Q]}": [f.to_json() for f in fs] for (P, Q), fs in sorted(
                    self.M.items(), key=lambda kv: (names[kv[0][0]], names[kv[0][1]])
                )
            },
        }


def subgroup_json(P: Subgroup) -> dict:
    return {"basis": [list(b) for b in P.basis], "reps": [g.to_json() for g in P.reps]}


def coset_reps_in_normalizer(G: PToralGroup, P: Subgroup, level: int) -> tuple[GroupElement, ...]:
    """n_P: representatives of N_S(P)/P, identity first; requires N_S(P)/P finite."""
    N = normalizer(G, P, level)
    if N.dim != P.dim:
        raise ValueError(f"N_S(P)/P is infinite for {P!r}")
    items = list(N.reps)
    uf = _UnionFind(items)
    index = set(items)
    for a in items:
        for r in P.reps:
            b = N.canon(G.mul(a, r))
            if b in index:
                uf.union(a, b)
    roots = sorted({uf.find(a) for a in items}, key=GroupElement.sort_key)
    if roots[0] != G.identity:
        raise AssertionError("identity does not represent P in N_S(P)/P")
    return tuple(roots)


def representative_data(F: FusionSystem, with_M: bool = True) -> RepresentativeData:
    G = F.G
    objs = tuple(sorted(F.universe, key=Subgroup.sort_key))
    cen = tuple(P for P in objs if F.is_centric(P))
    r = {P: P.reps for P in objs}
    n = {P: coset_reps_in_normalizer(G, P, F.level) for P in cen}
    data = RepresentativeData(objs, cen, r, n)
    if with_M:
        for P in objs:
            for Q in objs:
                data.M[(P, Q)] = F.hom_reps(P, Q)
    return data


# ---------------------------------------------------------------- fusion preservation


@dataclass
class FusionPreservation:
    preserving: bool
    witness: str
    object_map: dict[Subgroup, Subgroup]
    morphism_map: dict[GroupHom, GroupHom]


def transport_hom(psi, f: GroupHom) -> GroupHom:
    """psi o f o psi^-1 : psi(P) -> psi(Q)."""
    P2 = psi.image_subgroup(f.source)
    Q2 = psi.image_subgroup(f.target)
    M = f.matrix
    if f.G.rank:
        # on the torus psi acts by the (power-commuting) matrix part; conjugate by it
        Mp = [list(r) for r in psi.aut.matrix] if hasattr(psi, "aut") else [list(r) for r in psi.matrix]
        M = linalg.matmul(linalg.matmul(Mp, M), linalg.inverse_unimodular(Mp))
    imgs = []
    inv = psi.inverse()
    for r in P2.reps:
        imgs.append(psi.apply(f.apply(inv.apply(r))))
    via = psi.apply(f.via) if f.via is not None else None
    return GroupHom(P2, Q2, M, imgs, via)


def is_fusion_preserving(psi, F: FusionSystem, data: RepresentativeData | None = None) -> FusionPreservation:
    """Check psi o f o psi^-1 in F for the generating morphisms of F on the universe.

    Generating morphisms: the representatives M_{P,Q}, conjugations by n_P
    elements, and any extra generators.
    """
    data = data or representative_data(F)
    obj_map: dict[Subgroup, Subgroup] = {}
    mor_map: dict[GroupHom, GroupHom] = {}
    tests: list[GroupHom] = []
    for fs in data.M.values():
        tests.extend(fs)
    tests.extend(F.generators)
    for f in tests:
        for X in (f.source, f.target):
            if X not in obj_map:
                obj_map[X] = psi.image_subgroup(X)
        h = transport_hom(psi, f)
        mor_map[f] = h
        if F.contains(h) is None:
            return FusionPreservation(False, f"psi o {f!r} o psi^-1 is not in F", obj_map, mor_map)
    return FusionPreservation(True, "", obj_map, mor_map)


# ---------------------------------------------------------------- bullet suite


def small_subgroups(G: PToralGroup, level: int, limit: int = 40) -> list[Subgroup]:
    """Distinct subgroups generated by one or two elements of S[level], in enumeration order."""
    elems = list(G.elements_at(level))
    out: list[Subgroup] = []
    seen: set[Subgroup] = set()
    for i, a in enumerate(elems):
        for b in elems[i:]:
            H = generated(G, [], [a, b])
            if H not in seen:
                seen.add(H)
                out.append(H)
                if len(out) >= limit:
                    return out
    return out


def bullet_suite(F: FusionSystem, psi=None, subgroups: Sequence[Subgroup] | None = None, level: int = 2) -> Report:
    """(P*)* = P*, P <= Q implies P* <= Q*, and psi(P*) = psi(P)* when psi is given."""
    G = F.G
    subs = list(F.universe) + (list(subgroups) if subgroups is not None else small_subgroups(G, level))
    rep = Report(True)
    bad = next((P for P in subs if F.bullet(F.bullet(P)) != F.bullet(P)), None)
    rep.add("(P*)* = P*", bad is None, repr(bad) if bad is not None else "")
    bad = ""
    for P in subs:
        for Q in subs:
            if P.is_subgroup_of(Q) and not F.bullet(P).is_subgroup_of(F.bullet(Q)):
                bad = f"{P!r} <= {Q!r} but not for bullets"
                break
        if bad:
            break
    rep.add("P <= Q implies P* <= Q*", not bad, bad)
    if psi is not None:
        bad = next((P for P in subs if psi.image_subgroup(F.bullet(P)) != F.bullet(psi.image_subgroup(P))), None)
        rep.add("psi(P*) = psi(P)*", bad is None, repr(bad) if bad is not None else "")
    return rep
