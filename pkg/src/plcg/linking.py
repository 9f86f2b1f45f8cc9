"""Centric linking systems as categorical data.

The transporter model (F = F_S(S)) has Mor(P, Q) = N_S(P, Q) with composition
the product in S, pi(g) = c_g and hat(g) = g. The tables model stores labels,
a composition table, the distinguished maps delta and the projection pi, and
is used for finite S (including deliberately corrupted inputs).
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .fusion import FusionSystem, GroupHom, conj_hom
from .group import (
    GroupElement,
    PToralGroup,
    Report,
    Subgroup,
    center,
    conjugates_into,
)


class FactorizationError(RuntimeError):
    pass


# ---------------------------------------------------------------- morphisms


@dataclass(frozen=True)
class LMor:
    """A morphism P -> Q of the transporter model: an element g with g P g^-1 <= Q."""

    source: Subgroup
    target: Subgroup
    g: GroupElement

    def __repr__(self) -> str:
        return f"[{self.g}]"

    def to_json(self) -> dict:
        return self.g.to_json()


@dataclass(frozen=True)
class TMor:
    """A morphism of the tables model: an opaque label with its endpoints."""

    source: Subgroup
    target: Subgroup
    label: int

    def __repr__(self) -> str:
        return f"<{self.label}>"

    def to_json(self) -> int:
        return self.label


class LinkingSystem:
    """Common interface: objects, mor, compose, hat, project."""

    model = "abstract"
    F: FusionSystem

    @property
    def G(self) -> PToralGroup:
        return self.F.G

    @property
    def finite(self) -> bool:
        return self.G.rank == 0

    def objects(self) -> list[Subgroup]:
        raise NotImplementedError

    def mor(self, P: Subgroup, Q: Subgroup) -> list:
        raise NotImplementedError

    def compose(self, b, a):
        """b o a."""
        raise NotImplementedError

    def hat(self, P: Subgroup, Q: Subgroup, g: GroupElement):
        raise NotImplementedError

    def project(self, f) -> GroupHom:
        raise NotImplementedError

    def identity(self, P: Subgroup):
        return self.hat(P, P, self.G.identity)

    def iota(self, P: Subgroup, Q: Subgroup):
        return self.hat(P, Q, self.G.identity)


class TransporterLinking(LinkingSystem):
    model = "transporter"

    def __init__(self, F: FusionSystem, objects: Sequence[Subgroup] | None = None, level: int | None = None):
        if F.model != "conjugation":
            raise ValueError("the transporter model needs F = F_S(S)")
        self.F = F
        self.level = F.level if level is None else level
        self._objects = list(objects) if objects is not None else list(F.centric_universe)
        self._mor_cache: dict = {}

    def objects(self) -> list[Subgroup]:
        return self._objects

    def add_object(self, P: Subgroup) -> None:
        if P not in self._objects:
            self._objects.append(P)

    def mor(self, P: Subgroup, Q: Subgroup, level: int | None = None) -> list[LMor]:
        """All of N_S(P, Q) for finite S; otherwise its elements of level <= level."""
        level = (0 if self.finite else self.level) if level is None else level
        key = (P, Q, level)
        if key not in self._mor_cache:
            G = self.G
            out = [LMor(P, Q, g) for g in G.elements_at(level) if conjugates_into(G, g, P, Q)]
            self._mor_cache[key] = sorted(out, key=lambda m: m.g.sort_key())
        return self._mor_cache[key]

    def compose(self, b: LMor, a: LMor) -> LMor:
        if a.target != b.source:
            raise ValueError("morphisms are not composable")
        return LMor(a.source, b.target, self.G.mul(b.g, a.g))

    def hat(self, P: Subgroup, Q: Subgroup, g: GroupElement) -> LMor:
        if not conjugates_into(self.G, g, P, Q):
            raise ValueError(f"{g} is not in N_S(P, Q)")
        return LMor(P, Q, g)

    def project(self, f: LMor) -> GroupHom:
        return conj_hom(self.G, f.g, f.source, f.target)

    def element(self, f: LMor) -> GroupElement:
        return f.g


class TablesLinking(LinkingSystem):
    """Explicit finite linking system; build with from_transporter and optionally corrupt."""

    model = "tables"

    def __init__(self, F: FusionSystem, objects, endpoints, comp, delta, pi):
        self.F = F
        self._objects = list(objects)
        self.endpoints: list[tuple[Subgroup, Subgroup]] = list(endpoints)
        self.comp: dict[tuple[int, int], int] = dict(comp)
        self.delta: dict[tuple[Subgroup, Subgroup, GroupElement], int] = dict(delta)
        self.pi: list[GroupHom] = list(pi)
        self._by_pair: dict = {}
        for i, (P, Q) in enumerate(self.endpoints):
            self._by_pair.setdefault((P, Q), []).append(i)

    @staticmethod
    def from_transporter(L: TransporterLinking) -> "TablesLinking":
        if not L.finite:
            raise ValueError("tables model is for finite S")
        objs = L.objects()
        endpoints, elems, pi = [], [], []
        delta = {}
        for P in objs:
            for Q in objs:
                for f in L.mor(P, Q):
                    delta[(P, Q, f.g)] = len(endpoints)
                    endpoints.append((P, Q))
                    elems.append(f.g)
                    pi.append(L.project(f))
        comp = {}
        G = L.G
        for a, (P, Q) in enumerate(endpoints):
            for b, (Q2, R) in enumerate(endpoints):
                if Q2 == Q:
                    comp[(b, a)] = delta[(P, R, G.mul(elems[b], elems[a]))]
        return TablesLinking(L.F, objs, endpoints, comp, delta, pi)

    def _m(self, i: int) -> TMor:
        P, Q = self.endpoints[i]
        return TMor(P, Q, i)

    def objects(self) -> list[Subgroup]:
        return self._objects

    def mor(self, P: Subgroup, Q: Subgroup, level: int | None = None) -> list[TMor]:
        return [self._m(i) for i in self._by_pair.get((P, Q), [])]

    def compose(self, b: TMor, a: TMor) -> TMor:
        if a.target != b.source:
            raise ValueError("morphisms are not composable")
        return self._m(self.comp[(b.label, a.label)])

    def hat(self, P: Subgroup, Q: Subgroup, g: GroupElement) -> TMor:
        return self._m(self.delta[(P, Q, g)])

    def project(self, f: TMor) -> GroupHom:
        return self.pi[f.label]


# ---------------------------------------------------------------- validation


def _pairs(L: LinkingSystem, objs) -> Iterable[tuple[Subgroup, Subgroup]]:
    return itertools.product(objs, repeat=2)


def _sample(items: list, k: int | None, rng: random.Random) -> list:
    if k is None or len(items) <= k:
        return items
    return rng.sample(items, k)


def validate_linking(
    L: LinkingSystem, samples: int | None = None, seed: int = 0, objects: Sequence[Subgroup] | None = None
) -> Report:
    """Axioms (A), (B), (C), delta coherence and identities.

    Exhaustive when samples is None; otherwise at most `samples` morphisms per
    Hom-set (and as many elements per group) are drawn with the given seed.
    """
    G = L.G
    rng = random.Random(seed)
    objs = list(objects) if objects is not None else L.objects()
    rep = Report(True)
    lvl = 0 if L.finite else getattr(L, "level", G.level)
    zs = {P: list(center(G, P, lvl).elements_at(lvl)) for P in objs}

    # identities
    bad = ""
    for P, Q in _pairs(L, objs):
        for f in _sample(L.mor(P, Q), samples, rng):
            if L.compose(L.identity(Q), f) != f or L.compose(f, L.identity(P)) != f:
                bad = f"identity law fails at {f!r}"
                break
        if bad:
            break
    rep.add("iota_P^P = Id_P", not bad, bad)

    # (A) free action of Z(P) and bijection Mor(P,Q)/Z(P) -> Hom_F(P,Q)
    bad_free, bad_bij = "", ""
    for P, Q in _pairs(L, objs):
        mors = L.mor(P, Q)
        if not mors:
            continue
        hats_z = [L.hat(P, P, z) for z in zs[P]]
        by_proj: dict = {}
        for f in mors:
            by_proj.setdefault(L.project(f), []).append(f)
        for f in _sample(mors, samples, rng):
            orbit = [L.compose(f, hz) for hz in hats_z]
            if len(set(orbit)) != len(orbit):
                bad_free = f"Z(P) does not act freely on {f!r}"
                break
            if L.finite:
                fibre = set(by_proj[L.project(f)])
                if set(orbit) != fibre:
                    bad_bij = f"fibre of pi through {f!r} is not one Z(P)-orbit"
                    break
            elif any(L.project(o) != L.project(f) for o in orbit):
                bad_bij = f"pi not constant on the Z(P)-orbit of {f!r}"
                break
        if bad_free or bad_bij:
            break
        if L.finite:
            want = set(L.F.homs(P, Q))
            if set(by_proj) != want:
                bad_bij = f"pi(Mor(P,Q)) != Hom_F(P,Q) for {P!r} -> {Q!r}"
                break
    rep.add("(A) Z(P) acts freely", not bad_free, bad_free)
    rep.add("(A) Mor(P,Q)/Z(P) = Hom_F(P,Q)", not bad_bij, bad_bij)

    # (B) pi(delta_P(g)) = c_g
    bad = ""
    for P in objs:
        for g in _sample(list(P.elements_at(lvl)), samples, rng):
            if L.project(L.hat(P, P, g)) != conj_hom(G, g, P, P):
                bad = f"pi(delta_P({g})) != c_g on {P!r}"
                break
        if bad:
            break
    rep.add("(B) pi o delta_P = c", not bad, bad)

    # (C) f o delta_P(g) = delta_Q(pi(f)(g)) o f
    bad = ""
    for P, Q in _pairs(L, objs):
        elems = _sample(list(P.elements_at(lvl)), samples, rng)
        for f in _sample(L.mor(P, Q), samples, rng):
            pf = L.project(f)
            for g in elems:
                if L.compose(f, L.hat(P, P, g)) != L.compose(L.hat(Q, Q, pf.apply(g)), f):
                    bad = f"square (C) fails for f={f!r}, g={g}"
                    break
            if bad:
                break
        if bad:
            break
    rep.add("(C) f o delta_P(g) = delta_Q(f(g)) o f", not bad, bad)

    # delta coherence and pi(delta_{P,Q}(x)) = c_x
    bad = ""
    for P, Q in _pairs(L, objs):
        for R in objs:
            xs = _sample(L.mor(Q, R), samples, rng)
            ys = _sample(L.mor(P, Q), samples, rng)
            for x in xs:
                for y in ys:
                    gx, gy = _hat_element(L, x), _hat_element(L, y)
                    if gx is None or gy is None:
                        continue
                    if L.compose(L.hat(Q, R, gx), L.hat(P, Q, gy)) != L.hat(P, R, G.mul(gx, gy)):
                        bad = f"delta(x) o delta(y) != delta(xy) for x={gx}, y={gy}"
                        break
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    rep.add("delta coherence", not bad, bad)
    bad = ""
    for P, Q in _pairs(L, objs):
        for f in _sample(L.mor(P, Q), samples, rng):
            g = _hat_element(L, f)
            if g is not None and L.project(L.hat(P, Q, g)) != conj_hom(G, g, P, Q):
                bad = f"pi(delta(x)) != c_x for x={g}"
                break
        if bad:
            break
    rep.add("pi(delta_{P,Q}(x)) = c_x", not bad, bad)
    return rep


def _hat_element(L: LinkingSystem, f) -> GroupElement | None:
    if isinstance(f, LMor):
        return f.g
    # tables model: recover the element from delta
    for (P, Q, g), lab in L.delta.items():  # type: ignore[attr-defined]
        if lab == f.label and (P, Q) == (f.source, f.target):
            return g
    return None


# ---------------------------------------------------------------- factorization


def factor_left(L: LinkingSystem, beta, gamma, a: GroupHom, exhaustive: bool | None = None):
    """The unique alpha: P -> Q with [alpha] = a and beta o alpha = gamma."""
    P, Q = gamma.source, beta.source
    if exhaustive is None:
        exhaustive = L.finite
    if exhaustive:
        sols = [al for al in L.mor(P, Q) if L.project(al) == a and L.compose(beta, al) == gamma]
        return _unique(sols, "left factorization")
    G = L.G
    g = G.mul(G.inv(beta.g), gamma.g)
    al = L.hat(P, Q, g)
    if L.project(al) != a or L.compose(beta, al) != gamma:
        raise FactorizationError("left factorization: candidate fails")
    return al


def factor_right(L: LinkingSystem, alpha, gamma, R: Subgroup | None = None, exhaustive: bool | None = None):
    """The unique beta: Q -> R with beta o alpha = gamma."""
    Q = alpha.target
    R = gamma.target if R is None else R
    if exhaustive is None:
        exhaustive = L.finite
    if exhaustive:
        sols = [b for b in L.mor(Q, R) if L.compose(b, alpha) == gamma]
        return _unique(sols, "right factorization")
    G = L.G
    g = G.mul(gamma.g, G.inv(alpha.g))
    try:
        b = L.hat(Q, R, g)
    except ValueError as e:
        raise FactorizationError(f"right factorization: {e}") from None
    if L.compose(b, alpha) != gamma:
        raise FactorizationError("right factorization: candidate fails")
    return b


def factor_iso(L: LinkingSystem, phi, exhaustive: bool | None = None):
    """(phi', P') with phi = iota_{P'}^Q o phi' and phi' an isomorphism P -> P'."""
    P, Q = phi.source, phi.target
    Pp = L.project(phi).image()
    if exhaustive is None:
        exhaustive = L.finite
    if isinstance(L, TablesLinking):
        Pp = next((X for X in L.objects() if X == Pp), Pp)
    iota = L.iota(Pp, Q)
    if exhaustive:
        sols = [f for f in L.mor(P, Pp) if L.compose(iota, f) == phi]
        return _unique(sols, "iso factorization"), Pp
    f = L.hat(P, Pp, phi.g)
    if L.compose(iota, f) != phi:
        raise FactorizationError("iso factorization: candidate fails")
    return f, Pp


def _unique(sols: list, what: str):
    if not sols:
        raise FactorizationError(f"{what}: no solution")
    if len(sols) > 1:
        raise FactorizationError(f"{what}: {len(sols)} solutions")
    return sols[0]


def factor_suite(L: LinkingSystem, objects: Sequence[Subgroup] | None = None) -> Report:
    """The three factorization properties, with uniqueness, over every tuple of the model.

    For P -a-> Q -b-> R in F, beta over b and gamma over b o a: a unique alpha
    over a with beta o alpha = gamma; for each alpha over a a unique beta' with
    beta' o alpha = gamma; and every phi is iota o (an isomorphism onto its image).
    """
    F = L.F
    objs = list(objects) if objects is not None else L.objects()
    rep = Report(True)
    bad = {1: "", 2: "", 3: ""}
    counts = {1: 0, 2: 0, 3: 0}
    lifts: dict = {}

    def over(P, Q, f):
        key = (P, Q)
        if key not in lifts:
            table: dict = {}
            for m in L.mor(P, Q):
                table.setdefault(L.project(m), []).append(m)
            lifts[key] = table
        return lifts[key].get(f, [])

    for P, Q, R in itertools.product(objs, repeat=3):
        for a in F.homs(P, Q):
            for b in F.homs(Q, R):
                ba = b.compose(a)
                for beta in over(Q, R, b):
                    for gamma in over(P, R, ba):
                        try:
                            factor_left(L, beta, gamma, a)
                            counts[1] += 1
                        except FactorizationError as e:
                            bad[1] = bad[1] or f"{e} for beta={beta!r}, gamma={gamma!r}"
                for gamma in over(P, R, ba):
                    for alpha in over(P, Q, a):
                        try:
                            factor_right(L, alpha, gamma, R)
                            counts[2] += 1
                        except FactorizationError as e:
                            bad[2] = bad[2] or f"{e} for alpha={alpha!r}, gamma={gamma!r}"
    for P, Q in itertools.product(objs, repeat=2):
        for phi in L.mor(P, Q):
            try:
                factor_iso(L, phi)
                counts[3] += 1
            except FactorizationError as e:
                bad[3] = bad[3] or f"{e} for {phi!r}"
    rep.add("lift of a through beta (unique)", not bad[1], bad[1] or f"{counts[1]} tuples")
    rep.add("beta with beta o alpha = gamma (unique)", not bad[2], bad[2] or f"{counts[2]} tuples")
    rep.add("iota o isomorphism factorization (unique)", not bad[3], bad[3] or f"{counts[3]} morphisms")
    return rep


def check_mono_epi(L: LinkingSystem, objects: Sequence[Subgroup] | None = None) -> Report:
    """Left and right cancellation on all composable pairs of the (finite) model."""
    objs = list(objects) if objects is not None else L.objects()
    rep = Report(True)
    mono, epi = "", ""
    for P, Q, R in itertools.product(objs, repeat=3):
        A = L.mor(P, Q)
        B = L.mor(Q, R)
        if not A or not B:
            continue
        for b in B:
            imgs = [L.compose(b, a) for a in A]
            if len(set(imgs)) != len(imgs):
                mono = f"{b!r} is not a monomorphism on Mor({P!r}, {Q!r})"
                break
        for a in A:
            imgs = [L.compose(b, a) for b in B]
            if len(set(imgs)) != len(imgs):
                epi = f"{a!r} is not an epimorphism into Mor({Q!r}, {R!r})"
                break
        if mono or epi:
            break
    rep.add("monomorphisms", not mono, mono)
    rep.add("epimorphisms", not epi, epi)
    return rep


# ---------------------------------------------------------------- bullet lift and extension


def bullet_lift(L: LinkingSystem, phi):
    """phi^bullet: the unique morphism with phi^bullet o iota_P^{P*} = iota_Q^{Q*} o phi."""
    F = L.F
    P, Q = phi.source, phi.target
    Pb, Qb = F.bullet(P), F.bullet(Q)
    gamma = L.compose(L.iota(Q, Qb), phi)
    return factor_right(L, L.iota(P, Pb), gamma, Qb)


@dataclass
class Functor:
    """A functor given by its object and morphism maps."""

    obj: Callable[[Subgroup], Subgroup]
    mor: Callable[[object], object]


def extend_functor(L: LinkingSystem, Phi_b: Functor, psi, psi_star: Callable[[GroupHom], GroupHom]) -> Functor:
    """Extend a functor on the bullet subcategory covering psi to all of L.

    Phi(phi) is the unique morphism with [Phi(phi)] = psi_*[phi] and
    Phi_b(phi^bullet) o iota = iota o Phi(phi).
    """
    F = L.F
    images: dict = {}

    def obj(P: Subgroup) -> Subgroup:
        if P not in images:
            images[P] = psi.image_subgroup(P)
        return images[P]

    def mor(phi):
        P, Q = phi.source, phi.target
        Pb, Qb = F.bullet(P), F.bullet(Q)
        if P == Pb and Q == Qb:
            return Phi_b.mor(phi)
        phib = bullet_lift(L, phi)
        top = Phi_b.mor(phib)
        psiP, psiQ = obj(P), obj(Q)
        psiPb, psiQb = Phi_b.obj(Pb), Phi_b.obj(Qb)
        if F.bullet(psiP) != psiPb or F.bullet(psiQ) != psiQb:
            raise FactorizationError("psi does not commute with the bullet construction")
        gamma = L.compose(top, L.iota(psiP, psiPb))
        beta = L.iota(psiQ, psiQb)
        return factor_left(L, beta, gamma, psi_star(L.project(phi)))

    return Functor(obj, mor)
