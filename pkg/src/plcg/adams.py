"""Automorphisms of S, sections, and Adams automorphisms psi_zeta.

An automorphism is stored as psi(t, x) = (M(zeta t) + c(x), phi(x)) with M a
unimodular integer matrix, zeta an optional p-adic unit (power map), c the
images of the canonical section values and phi an automorphism of Gamma.
Power maps are kept apart from matrices so degrees are read off exactly.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import linalg
from .cohomology import extension_class_order, scale2, solve_coboundary, level2
from .group import GroupElement, PToralGroup, Subgroup
from .torus import (
    PAdicUnitApprox,
    TorusElement,
    one_minus,
    power_map,
    solve_root,
    torus_points,
    valuation_gamma,
)

Mat = tuple[tuple[int, ...], ...]


class NotInGamma(ValueError):
    """zeta is outside the group Gamma_k(p) a construction needs."""

    def __init__(self, p: int, k: int, zeta: PAdicUnitApprox):
        self.p, self.k, self.zeta = p, k, zeta
        super().__init__(f"require ζ ≡ 1 mod {p**k} (got ζ = {zeta.residue})")


def _ident(r: int) -> Mat:
    return tuple(tuple(int(i == j) for j in range(r)) for i in range(r))


def _mat(m) -> Mat:
    return tuple(tuple(int(v) for v in row) for row in m)


def _det(m: Sequence[Sequence[int]]) -> int:
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([row[:j] + row[j + 1 :] for row in m[1:]]) for j in range(n))


def _zmul(a: PAdicUnitApprox | None, b: PAdicUnitApprox | None) -> PAdicUnitApprox | None:
    if a is None:
        return b
    if b is None:
        return a
    return a * b


@dataclass(frozen=True, eq=False)
class GroupAutomorphism:
    G: PToralGroup
    matrix: Mat
    zeta: PAdicUnitApprox | None
    images: tuple[TorusElement, ...]
    phi: tuple[int, ...]

    # ---- evaluation
    def torus_map(self, t: TorusElement) -> TorusElement:
        if t.level == 0:
            return t
        if self.zeta is not None:
            t = power_map(t, self.zeta)
        if self.matrix != _ident(self.G.rank):
            t = t.apply_matrix(self.matrix)
        return t

    def apply(self, g: GroupElement) -> GroupElement:
        return GroupElement(self.torus_map(g.t) + self.images[g.x], self.phi[g.x])

    __call__ = apply

    def image_subgroup(self, P: Subgroup) -> Subgroup:
        # a power map preserves every rational line, so only M moves the torus part
        basis = [linalg.matvec(self.matrix, b) for b in P.basis]
        return Subgroup(self.G, basis, [self.apply(g) for g in P.reps])

    # ---- algebra
    def compose(self, other: "GroupAutomorphism") -> "GroupAutomorphism":
        """self o other."""
        M = _mat(linalg.matmul(self.matrix, other.matrix)) if self.G.rank else ()
        imgs = tuple(self.torus_map(other.images[x]) + self.images[other.phi[x]] for x in range(self.G.gamma.order))
        phi = tuple(self.phi[other.phi[x]] for x in range(self.G.gamma.order))
        return GroupAutomorphism(self.G, M, _zmul(self.zeta, other.zeta), imgs, phi)

    def inverse(self) -> "GroupAutomorphism":
        G = self.G
        n = G.gamma.order
        phi_inv = [0] * n
        for x in range(n):
            phi_inv[self.phi[x]] = x
        Minv = _mat(linalg.inverse_unimodular([list(r) for r in self.matrix])) if G.rank else ()
        zinv = self.zeta.inverse() if self.zeta is not None else None
        shell = GroupAutomorphism(G, Minv, zinv, tuple(G.zero for _ in range(n)), tuple(range(n)))
        imgs = tuple(-shell.torus_map(self.images[phi_inv[y]]) for y in range(n))
        return GroupAutomorphism(G, Minv, zinv, imgs, tuple(phi_inv))

    def same_as(self, other: "GroupAutomorphism", level: int | None = None) -> bool:
        """Equality as maps on S[level] (level defaults to the zeta precision or G.level)."""
        if self.phi != other.phi or self.images != other.images:
            return False
        G = self.G
        if level is None:
            precs = [z.precision for z in (self.zeta, other.zeta) if z is not None]
            level = min(precs) if precs else G.level
        for i in range(G.rank):
            e = TorusElement.make(G.p, level, [int(i == j) for j in range(G.rank)])
            if self.torus_map(e) != other.torus_map(e):
                return False
        return True

    # ---- validation
    def hom_defects(self) -> list[str]:
        """Exact obstructions to psi being an automorphism (empty list means valid).

        psi is a homomorphism iff M A_x = A_phi(x) M and
        A_phi(x) c(y) - c(xy) + c(x) = lam delta(x, y) - delta(phi x, phi y).
        """
        G = self.G
        n, r = G.gamma.order, G.rank
        names = G.gamma.names
        out: list[str] = []
        mul = G.gamma.mul
        if sorted(self.phi) != list(range(n)):
            return ["phi is not a permutation of Gamma"]
        for x in range(n):
            for y in range(n):
                if self.phi[mul(x, y)] != mul(self.phi[x], self.phi[y]):
                    return [f"phi not multiplicative at ({names[x]}, {names[y]})"]
        if r:
            if abs(_det([list(row) for row in self.matrix])) != 1:
                out.append("torus matrix is not unimodular")
            for x in range(n):
                if linalg.matmul(self.matrix, G.action[x]) != linalg.matmul(G.action[self.phi[x]], self.matrix):
                    out.append(f"M A_{names[x]} != A_phi({names[x]}) M")
                    return out
        if not self.images[0].is_zero():
            out.append("c(1) != 0")
        d = G.cocycle
        for x in range(n):
            for y in range(n):
                lhs = G.act(self.phi[x], self.images[y]) - self.images[mul(x, y)] + self.images[x]
                rhs = self.torus_map(d[x][y]) - d[self.phi[x]][self.phi[y]]
                if lhs != rhs:
                    out.append(f"multiplicativity fails on sigma({names[x]}) sigma({names[y]})")
                    return out
        return out

    def sweep(self, level: int, samples: int | None = 200, seed: int = 0) -> tuple[GroupElement, GroupElement] | None:
        """Direct check psi(gh) = psi(g)psi(h) on S[level] pairs (all pairs if samples is None)."""
        G = self.G
        if samples is None:
            elems = list(G.elements_at(level))
            pairs: Iterable = itertools.product(elems, repeat=2)
        else:
            rng = random.Random(seed)
            pairs = ((_random_element(G, level, rng), _random_element(G, level, rng)) for _ in range(samples))
        for g, h in pairs:
            if self.apply(G.mul(g, h)) != G.mul(self.apply(g), self.apply(h)):
                return g, h
        return None

    def to_json(self) -> dict:
        return {
            "torus_matrix": [list(r) for r in self.matrix],
            "power_degree": self.zeta.to_json() if self.zeta is not None else None,
            "section_images": [c.to_json() for c in self.images],
            "gamma_map": list(self.phi),
        }


def _random_element(G: PToralGroup, level: int, rng: random.Random) -> GroupElement:
    mod = G.p**level
    return GroupElement(
        TorusElement.make(G.p, level, [rng.randrange(mod) for _ in range(G.rank)]), rng.randrange(G.gamma.order)
    )


def random_element(G: PToralGroup, level: int, rng: random.Random) -> GroupElement:
    return _random_element(G, level, rng)


def identity_automorphism(G: PToralGroup) -> GroupAutomorphism:
    n = G.gamma.order
    return GroupAutomorphism(G, _ident(G.rank), None, tuple(G.zero for _ in range(n)), tuple(range(n)))


def inner_automorphism(G: PToralGroup, g: GroupElement) -> GroupAutomorphism:
    """c_g(h) = g h g^-1."""
    n = G.gamma.order
    imgs = []
    phi = []
    for x in range(n):
        h = G.conj(g, G.sec(x))
        imgs.append(h.t)
        phi.append(h.x)
    M = G.action[g.x] if G.rank else ()
    return GroupAutomorphism(G, M, None, tuple(imgs), tuple(phi))


def power_automorphism_raw(G: PToralGroup, zeta: PAdicUnitApprox, a: Sequence[TorusElement]) -> GroupAutomorphism:
    """(s, x) -> (zeta s + (1 - zeta) a(x), x): the candidate psi_zeta for the section a, unchecked."""
    n = G.gamma.order
    imgs = tuple(a[x] - power_map(a[x], zeta) for x in range(n))
    return GroupAutomorphism(G, _ident(G.rank), zeta, imgs, tuple(range(n)))


# ---------------------------------------------------------------- classification


@dataclass(frozen=True)
class Classification:
    is_adams: bool
    degree: PAdicUnitApprox | str | None  # "indeterminate" in rank 0
    normal: bool


def scalar_degree(f: GroupAutomorphism, precision: int | None = None) -> PAdicUnitApprox | None:
    """The unit z with f|S0 = z-power map, or None when f|S0 is not a power map."""
    G = f.G
    M = f.matrix
    k = M[0][0]
    if any(M[i][j] != (k if i == j else 0) for i in range(G.rank) for j in range(G.rank)) or k % G.p == 0:
        return None
    if f.zeta is not None:
        return PAdicUnitApprox(G.p, f.zeta.precision, k * f.zeta.residue)
    return PAdicUnitApprox(G.p, precision or G.level, k)


def classify_automorphism(f: GroupAutomorphism) -> Classification:
    normal = f.phi == tuple(range(f.G.gamma.order))
    if f.G.rank == 0:
        return Classification(True, "indeterminate", normal)
    z = scalar_degree(f)
    if z is None:
        return Classification(False, None, normal)
    return Classification(True, z, normal)


# ---------------------------------------------------------------- sections


@dataclass(frozen=True)
class Section:
    """sigma(x) = (a(x), x)."""

    G: PToralGroup
    values: tuple[TorusElement, ...]

    def __call__(self, x: int) -> GroupElement:
        return GroupElement(self.values[x], x)

    def cocycle(self) -> tuple[tuple[TorusElement, ...], ...]:
        """delta_sigma(x, y) = sigma(x) sigma(y) sigma(xy)^-1, computed by group multiplication."""
        G = self.G
        n = G.gamma.order
        rows = []
        for x in range(n):
            row = []
            for y in range(n):
                g = G.mul(G.mul(self(x), self(y)), G.inv(self(G.gamma.mul(x, y))))
                if g.x != 0:
                    raise AssertionError("delta_sigma left S0")
                row.append(g.t)
            rows.append(tuple(row))
        return tuple(rows)

    def max_order(self) -> int:
        return max((v.order() for row in self.cocycle() for v in row), default=1)

    def log_order(self) -> int:
        o, k = self.max_order(), 0
        while o > 1:
            o //= self.G.p
            k += 1
        return k

    def theta(self, g: GroupElement) -> TorusElement:
        return g.t - self.values[g.x]

    def to_json(self) -> list:
        return [v.to_json() for v in self.values]


def canonical_section(G: PToralGroup) -> Section:
    return Section(G, tuple(G.zero for _ in range(G.gamma.order)))


def normalize_section(G: PToralGroup, m: int | None = None) -> Section:
    """A section whose cocycle is p^m-torsion, p^m the order of the extension class.

    Solves p^m delta = dc at the smallest level that works and sets a = -c / p^m.
    """
    if m is None:
        m = extension_class_order(G).m
    target = scale2(G.cocycle, G.p**m)
    top = level2(G.cocycle) + G.gamma.log_order
    c = None
    for N in range(max(level2(target), 0), top + 1):
        c = solve_coboundary(G, target, N)
        if c is not None:
            break
    if c is None:
        raise AssertionError(f"p^{m} delta is not a coboundary; cohomology bug")
    unit = PAdicUnitApprox.one(G.p, max(1, max(v.level for v in c)))
    a = tuple(-solve_root(v, m, unit) if v.level else G.zero for v in c)
    sec = Section(G, a)
    if sec.max_order() > G.p**m:
        raise AssertionError("normalized section certificate failed")
    return sec


# ---------------------------------------------------------------- Adams automorphisms


@dataclass(frozen=True, eq=False)
class AdamsAutomorphism:
    aut: GroupAutomorphism
    degree: PAdicUnitApprox | None  # None in rank 0 (indeterminate)
    normal: bool
    section: Section | None = None

    @property
    def G(self) -> PToralGroup:
        return self.aut.G

    def apply(self, g: GroupElement) -> GroupElement:
        return self.aut.apply(g)

    __call__ = apply

    def inverse(self) -> "AdamsAutomorphism":
        deg = self.degree.inverse() if self.degree is not None else None
        return AdamsAutomorphism(self.aut.inverse(), deg, self.normal, self.section)

    def compose(self, other: "AdamsAutomorphism") -> "AdamsAutomorphism":
        deg = _zmul(self.degree, other.degree) if self.degree is not None and other.degree is not None else None
        return AdamsAutomorphism(self.aut.compose(other.aut), deg, self.normal and other.normal)

    def image_subgroup(self, P: Subgroup) -> Subgroup:
        return self.aut.image_subgroup(P)

    def to_json(self) -> dict:
        out = self.aut.to_json()
        out["degree"] = self.degree.to_json() if self.degree is not None else "indeterminate"
        out["normal"] = self.normal
        if self.section is not None:
            out["fixed_section"] = self.section.to_json()
        return out


def as_adams(f: GroupAutomorphism) -> AdamsAutomorphism:
    cl = classify_automorphism(f)
    if not cl.is_adams:
        raise ValueError("restriction to S0 is not a power map")
    deg = cl.degree if isinstance(cl.degree, PAdicUnitApprox) else None
    return AdamsAutomorphism(f, deg, cl.normal)


def find_fixed_section(psi: AdamsAutomorphism) -> Section:
    """A section fixed by a normal Adams automorphism of degree != 1."""
    G = psi.G
    if not psi.normal:
        raise ValueError("automorphism is not normal")
    if G.rank == 0:
        return canonical_section(G)
    z = psi.degree if psi.degree is not None else scalar_degree(psi.aut)
    m, u = one_minus(z)
    vals = []
    for x in range(G.gamma.order):
        c = psi.aut.images[x]
        # psi(a, x) = (z a + c, x) = (a, x)  <=>  (1 - z) a = c
        vals.append(solve_root(c, m, u) if c.level else G.zero)
    sec = Section(G, tuple(vals))
    for x in range(G.gamma.order):
        if psi.apply(sec(x)) != sec(x):
            raise AssertionError(f"section value at {G.gamma.names[x]} is not fixed")
    rng = random.Random(1)
    for x in range(G.gamma.order):
        t = _random_element(G, min(z.precision, G.level), rng).t
        g = G.mul(G.torus(t), sec(x))
        if psi.apply(g) != G.mul(G.torus(power_map(t, z)), sec(x)):
            raise AssertionError("psi(t sigma(x)) != t^zeta sigma(x)")
    return sec


def construct_psi_zeta(G: PToralGroup, sigma: Section, zeta: PAdicUnitApprox, sweep_level: int | None = None) -> AdamsAutomorphism:
    """psi_zeta(t sigma(x)) = t^zeta sigma(x); refuses zeta outside Gamma_k, p^k = max ord delta_sigma."""
    n = G.gamma.order
    if G.rank == 0:
        return AdamsAutomorphism(identity_automorphism(G), None, True, sigma)
    k = sigma.log_order()
    if not valuation_gamma(zeta, k).member:
        raise NotInGamma(G.p, k, zeta)
    aut = power_automorphism_raw(G, zeta, sigma.values)
    bad = aut.hom_defects()
    if bad:
        raise AssertionError(f"psi_zeta failed verification: {bad[0]}")
    for x in range(n):
        if aut.apply(sigma(x)) != sigma(x):
            raise AssertionError("psi_zeta does not fix the section")
    if sweep_level is not None:
        w = aut.sweep(min(sweep_level, zeta.precision), samples=100)
        if w is not None:
            raise AssertionError(f"psi_zeta not multiplicative on {w}")
    return AdamsAutomorphism(aut, zeta, True, sigma)


# ---------------------------------------------------------------- Ad_1 modulo Aut_S0(S)


@dataclass(frozen=True)
class Ad1Result:
    count: int
    representatives: tuple[GroupAutomorphism, ...]
    level: int


def _degree_one_normal(G: PToralGroup, K: int, cap: int) -> list[GroupAutomorphism]:
    """All automorphisms (t, x) -> (t + c(x), x) with c valued in S0[p^K], by enumeration."""
    gam = G.gamma
    n = gam.order
    gens = gam.small_generating_set()
    pts = list(torus_points(G.p, G.rank, K))
    if len(pts) ** len(gens) > cap:
        raise RuntimeError("degree-one enumeration exceeds cap")
    # words for each element in the generators
    words: dict[int, tuple[int, int]] = {0: (0, -1)}
    frontier = [0]
    order = []
    while frontier:
        nxt = []
        for a in frontier:
            for i, g in enumerate(gens):
                b = gam.mul(a, g)
                if b not in words:
                    words[b] = (a, i)
                    order.append(b)
                    nxt.append(b)
        frontier = nxt
    out = []
    ident = _ident(G.rank)
    for vals in itertools.product(pts, repeat=len(gens)):
        c = [G.zero] * n
        for b in order:
            a, i = words[b]
            # psi(sigma(a) sigma(g)) = psi(sigma(a)) psi(sigma(g)) determines c on sigma(b)
            c[b] = c[a] + G.act(a, vals[i])
        f = GroupAutomorphism(G, ident, None, tuple(c), tuple(range(n)))
        if not f.hom_defects():
            out.append(f)
    return out


def enumerate_ad1_mod_inner(G: PToralGroup, level: int | None = None, cap: int = 1 << 20) -> Ad1Result:
    """Degree-one normal Adams automorphisms modulo conjugation by S0, by exhaustive enumeration.

    Enumerated at level K = max(1, log_p|Gamma|) and K + 1 (counts must agree);
    inner automorphisms by torus elements t of increasing level until the set
    of those landing in level K stabilizes.
    """
    if G.rank == 0 or G.gamma.order == 1:
        return Ad1Result(1, (identity_automorphism(G),), 0)
    K0 = max(1, G.gamma.log_order) if level is None else level
    results = []
    for K in (K0, K0 + 1):
        auts = _degree_one_normal(G, K, cap)
        keyed = {f.images: f for f in auts}
        inner: set[tuple[TorusElement, ...]] = set()
        prev = -1
        Kp = K
        while True:
            for t in torus_points(G.p, G.rank, Kp):
                # c_t o psi has images c(x) + t - A_x t
                d = tuple(t - G.act(x, t) for x in range(G.gamma.order))
                if all(v.level <= K for v in d):
                    inner.add(d)
            if len(inner) == prev:
                break
            prev = len(inner)
            Kp += 1
        seen: set = set()
        reps = []
        for imgs in sorted(keyed, key=lambda c: tuple(v.sort_key() for v in c)):
            if imgs in seen:
                continue
            reps.append(keyed[imgs])
            for d in inner:
                seen.add(tuple(a + b for a, b in zip(imgs, d)))
        results.append((len(reps), tuple(reps), K))
    if results[0][0] != results[1][0]:
        raise RuntimeError("degree-one count not stable between levels")
    return Ad1Result(*results[0])
