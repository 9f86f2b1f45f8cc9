"""Discrete p-toral groups presented as extensions of a finite p-group by a discrete torus.

An element is a pair (t, x) with t in S0 and x in Gamma, standing for
t * sigma0(x) where sigma0 is the canonical set-theoretic section. The product is

    (t1, x1)(t2, x2) = (t1 + A_x1 t2 + delta(x1, x2), x1 x2).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Iterator, Sequence

from . import linalg
from .torus import TorusElement, p_log


class LevelTooLow(RuntimeError):
    """An enumerative result changed between the working level and the next one."""


class ParentMismatch(ValueError):
    pass


# ---------------------------------------------------------------- component group


@dataclass(frozen=True)
class ComponentGroup:
    p: int
    table: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.names:
            object.__setattr__(self, "names", tuple(str(i) for i in range(len(self.table))))

    @property
    def order(self) -> int:
        return len(self.table)

    @cached_property
    def log_order(self) -> int:
        return p_log(self.order, self.p)

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    @cached_property
    def inverses(self) -> tuple[int, ...]:
        inv = []
        for x in range(self.order):
            inv.append(next(y for y in range(self.order) if self.table[x][y] == 0))
        return tuple(inv)

    def inv(self, x: int) -> int:
        return self.inverses[x]

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = self.inv(x), -k
        out = 0
        for _ in range(k):
            out = self.table[out][x]
        return out

    def element_order(self, x: int) -> int:
        n, y = 1, x
        while y != 0:
            y = self.table[y][x]
            n += 1
        return n

    def validate(self) -> list[str]:
        """Problems with the table, empty when it is a group of p-power order with identity 0."""
        n = self.order
        errs: list[str] = []
        try:
            p_log(n, self.p)
        except ValueError:
            errs.append(f"order {n} is not a power of {self.p}")
        for row in self.table:
            if len(row) != n or any(not 0 <= v < n for v in row):
                return errs + ["table is not square with entries in range"]
        for x in range(n):
            if self.table[0][x] != x or self.table[x][0] != x:
                return errs + [f"index 0 is not the identity (fails at {self.names[x]})"]
        for x in range(n):
            if sorted(self.table[x]) != list(range(n)):
                return errs + [f"row {self.names[x]} is not a permutation"]
        for x, y, z in itertools.product(range(n), repeat=3):
            if self.table[self.table[x][y]][z] != self.table[x][self.table[y][z]]:
                return errs + [f"associativity fails at ({self.names[x]}, {self.names[y]}, {self.names[z]})"]
        return errs

    def generated(self, gens: Iterable[int]) -> frozenset[int]:
        out = {0}
        frontier = [0]
        gens = list(gens)
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = self.table[a][g]
                    if b not in out:
                        out.add(b)
                        nxt.append(b)
            frontier = nxt
        return frozenset(out)

    def conjugacy_class(self, x: int) -> frozenset[int]:
        return frozenset(self.table[self.table[g][x]][self.inv(g)] for g in range(self.order))

    def small_generating_set(self) -> list[int]:
        gens: list[int] = []
        span = frozenset({0})
        for x in sorted(range(self.order), key=lambda y: (-self.element_order(y), y)):
            if x not in span:
                gens.append(x)
                span = self.generated(gens)
            if len(span) == self.order:
                break
        return gens

    def automorphisms(self) -> list[tuple[int, ...]]:
        """All automorphisms as permutation tuples, found from images of a generating set."""
        gens = self.small_generating_set()
        n = self.order
        # express every element as a word in gens via BFS
        words: dict[int, list[int]] = {0: []}
        frontier = [0]
        while frontier:
            nxt = []
            for a in frontier:
                for i, g in enumerate(gens):
                    b = self.table[a][g]
                    if b not in words:
                        words[b] = words[a] + [i]
                        nxt.append(b)
            frontier = nxt
        out = []
        for imgs in itertools.product(range(n), repeat=len(gens)):
            if any(self.element_order(imgs[i]) != self.element_order(g) for i, g in enumerate(gens)):
                continue
            perm = [0] * n
            for a, w in words.items():
                v = 0
                for i in w:
                    v = self.table[v][imgs[i]]
                perm[a] = v
            if len(set(perm)) != n:
                continue
            if all(perm[self.table[a][b]] == self.table[perm[a]][perm[b]] for a in range(n) for b in range(n)):
                out.append(tuple(perm))
        return sorted(out)


# ---------------------------------------------------------------- elements


@dataclass(frozen=True, slots=True)
class GroupElement:
    t: TorusElement
    x: int

    def sort_key(self) -> tuple:
        return (self.t.level, self.x, self.t.nums)

    def to_json(self) -> dict:
        return {"t": self.t.to_json(), "x": self.x}

    def __repr__(self) -> str:
        return f"({', '.join(str(c) for c in self.t.coords())}; {self.x})"


Mat = tuple[tuple[int, ...], ...]


def _is_identity(m: Mat) -> bool:
    return all(m[i][j] == int(i == j) for i in range(len(m)) for j in range(len(m)))


@dataclass(frozen=True, eq=False)
class PToralGroup:
    """S presented by (Gamma, action, normalized 2-cocycle) with a working level."""

    name: str
    p: int
    rank: int
    gamma: ComponentGroup
    action: tuple[Mat, ...]
    cocycle: tuple[tuple[TorusElement, ...], ...]
    level: int = 8

    # ---- construction helpers
    @staticmethod
    def build(
        name: str,
        p: int,
        rank: int,
        table: Sequence[Sequence[int]],
        action: Sequence[Sequence[Sequence[int]]] | None = None,
        cocycle: dict[tuple[int, int], Sequence] | None = None,
        level: int = 8,
        names: Sequence[str] = (),
    ) -> "PToralGroup":
        gamma = ComponentGroup(p, tuple(tuple(r) for r in table), tuple(names))
        n = gamma.order
        if action is None:
            action = [[[int(i == j) for j in range(rank)] for i in range(rank)] for _ in range(n)]
        act = tuple(tuple(tuple(int(v) for v in row) for row in m) for m in action)
        zero = TorusElement.zero(p, rank)
        delta = [[zero] * n for _ in range(n)]
        for (x, y), val in (cocycle or {}).items():
            delta[x][y] = val if isinstance(val, TorusElement) else TorusElement.parse(p, val)
        return PToralGroup(name, p, rank, gamma, act, tuple(tuple(r) for r in delta), level)

    def with_level(self, level: int) -> "PToralGroup":
        return PToralGroup(self.name, self.p, self.rank, self.gamma, self.action, self.cocycle, level)

    def with_cocycle(self, cocycle: Sequence[Sequence[TorusElement]]) -> "PToralGroup":
        return PToralGroup(
            self.name, self.p, self.rank, self.gamma, self.action, tuple(tuple(r) for r in cocycle), self.level
        )

    @cached_property
    def _identity_flags(self) -> tuple[bool, ...]:
        return tuple(_is_identity(m) for m in self.action)

    @cached_property
    def zero(self) -> TorusElement:
        return TorusElement.zero(self.p, self.rank)

    @cached_property
    def identity(self) -> GroupElement:
        return GroupElement(self.zero, 0)

    @cached_property
    def cocycle_level(self) -> int:
        return max((v.level for row in self.cocycle for v in row), default=0)

    # ---- arithmetic
    def act(self, x: int, t: TorusElement) -> TorusElement:
        if self._identity_flags[x] or t.level == 0:
            return t
        return t.apply_matrix(self.action[x])

    def mul(self, g: GroupElement, h: GroupElement) -> GroupElement:
        x1, x2 = g.x, h.x
        t = g.t + self.act(x1, h.t)
        d = self.cocycle[x1][x2]
        if d.level:
            t = t + d
        return GroupElement(t, self.gamma.table[x1][x2])

    def inv(self, g: GroupElement) -> GroupElement:
        xi = self.gamma.inv(g.x)
        s = g.t + self.cocycle[g.x][xi]
        return GroupElement(-self.act(xi, s), xi)

    def pow(self, g: GroupElement, k: int) -> GroupElement:
        if k < 0:
            g, k = self.inv(g), -k
        out = self.identity
        base = g
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def conj(self, g: GroupElement, h: GroupElement) -> GroupElement:
        """g h g^-1."""
        return self.mul(self.mul(g, h), self.inv(g))

    def torus(self, t: TorusElement) -> GroupElement:
        return GroupElement(t, 0)

    def sec(self, x: int) -> GroupElement:
        return GroupElement(self.zero, x)

    def element(self, coords: Sequence, x: int = 0) -> GroupElement:
        return GroupElement(TorusElement.parse(self.p, [str(c) for c in coords]), x)

    def element_order(self, g: GroupElement) -> int:
        ox = self.gamma.element_order(g.x)
        h = self.pow(g, ox)
        return ox * h.t.order()

    def elements_at(self, level: int) -> Iterator[GroupElement]:
        from .torus import torus_points

        for x in range(self.gamma.order):
            for t in torus_points(self.p, self.rank, level):
                yield GroupElement(t, x)

    def size_at(self, level: int) -> int:
        return self.gamma.order * self.p ** (level * self.rank)

    # ---- structural data
    @cached_property
    def weyl_matrices(self) -> tuple[Mat, ...]:
        """Distinct matrices A_x: the image of Gamma in Aut(S0), i.e. Aut_S(S0)."""
        seen: dict[Mat, None] = {}
        for m in self.action:
            seen.setdefault(m, None)
        return tuple(sorted(seen))

    def is_faithful(self) -> bool:
        return len(set(self.action)) == self.gamma.order


def theta(G: PToralGroup, g: GroupElement, section: Sequence[TorusElement] | None = None) -> TorusElement:
    """Torus part of g relative to the section x -> (a(x), x); canonical section when omitted."""
    if section is None:
        return g.t
    return g.t - section[g.x]


# ---------------------------------------------------------------- validation


@dataclass
class Report:
    ok: bool
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    def add(self, name: str, passed: bool, witness: str = "") -> None:
        self.checks.append((name, passed, witness))
        if not passed:
            self.ok = False

    def first_failure(self) -> tuple[str, str] | None:
        for name, passed, witness in self.checks:
            if not passed:
                return name, witness
        return None

    def lines(self) -> list[str]:
        out = []
        for name, passed, witness in self.checks:
            out.append(f"[{'PASS' if passed else 'FAIL'}] {name}" + (f": {witness}" if witness else ""))
        return out

    def merge(self, other: "Report", prefix: str = "") -> None:
        for name, passed, witness in other.checks:
            self.add(prefix + name, passed, witness)


def _mat_mul(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(v) for v in linalg.matmul(a, b))


def validate_presentation(G: PToralGroup) -> Report:
    rep = Report(True)
    errs = G.gamma.validate()
    rep.add("component group", not errs, "; ".join(errs))
    if errs:
        return rep
    n = G.gamma.order
    names = G.gamma.names
    ok = len(G.action) == n and all(len(m) == G.rank and all(len(r) == G.rank for r in m) for m in G.action)
    rep.add("action shape", ok, "" if ok else "need one r x r matrix per element")
    if not ok:
        return rep
    ident = _is_identity(G.action[0]) if G.rank else True
    rep.add("A_1 = identity", ident, "" if ident else "matrix of the identity is not the identity")
    witness = ""
    for x in range(n):
        for y in range(n):
            if _mat_mul(G.action[x], G.action[y]) != G.action[G.gamma.mul(x, y)]:
                witness = f"(x, y) = ({names[x]}, {names[y]})"
                break
        if witness:
            break
    rep.add("A_x A_y = A_xy", not witness, witness)
    witness = ""
    for x in range(n):
        if G.rank and _det([list(r) for r in G.action[x]]) % G.p == 0:
            witness = f"A_{names[x]} is not invertible mod {G.p}"
            break
    rep.add("A_x invertible", not witness, witness)
    bad = ""
    if len(G.cocycle) != n or any(len(r) != n for r in G.cocycle):
        bad = "cocycle table has wrong shape"
    else:
        for x in range(n):
            for v in G.cocycle[x]:
                if v.p != G.p or v.rank != G.rank:
                    bad = "cocycle value with wrong prime or rank"
        for y in range(n):
            if not G.cocycle[0][y].is_zero():
                bad = f"delta(1, {names[y]}) != 0"
            if not G.cocycle[y][0].is_zero():
                bad = f"delta({names[y]}, 1) != 0"
    rep.add("cocycle normalized", not bad, bad)
    if bad:
        return rep
    witness = ""
    d = G.cocycle
    mul = G.gamma.mul
    for x, y, z in itertools.product(range(n), repeat=3):
        lhs = G.act(x, d[y][z]) - d[mul(x, y)][z] + d[x][mul(y, z)] - d[x][y]
        if not lhs.is_zero():
            witness = f"(x, y, z) = ({names[x]}, {names[y]}, {names[z]})"
            break
    rep.add("2-cocycle identity", not witness, witness)
    rep.add("level >= 1", G.level >= 1, f"level {G.level}")
    rep.add(
        "level covers cocycle",
        G.level >= G.cocycle_level,
        f"cocycle needs level {G.cocycle_level}",
    )
    return rep


def associativity_sweep(G: PToralGroup, level: int) -> tuple[GroupElement, GroupElement, GroupElement] | None:
    """First triple violating associativity among S[level], None if associative."""
    els = list(G.elements_at(level))
    for a in els:
        for b in els:
            ab = G.mul(a, b)
            for c in els:
                if G.mul(ab, c) != G.mul(a, G.mul(b, c)):
                    return a, b, c
    return None


# ---------------------------------------------------------------- subgroups


def _det(m: list[list[int]]) -> int:
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([row[:j] + row[j + 1 :] for row in m[1:]]) for j in range(n))


class Subgroup:
    """P <= S given by a saturated lattice spanning P0 and canonical coset representatives of P/P0.

    Representatives are canonical: each is reduced modulo P0 so its torus
    coordinates vanish on a fixed set of pivot coordinates. Two descriptors
    compare equal exactly when they describe the same subgroup.
    """

    __slots__ = ("G", "basis", "reps", "_pivots", "_reducer", "_key", "_hash", "__dict__")

    def __init__(self, G: PToralGroup, basis: Sequence[Sequence[int]], reps: Iterable[GroupElement], *, canonical=False):
        self.G = G
        r = G.rank
        basis = [list(b) for b in basis if any(b)]
        if basis:
            basis, _ = linalg.saturated_span(basis, r)
        self.basis: tuple[tuple[int, ...], ...] = tuple(tuple(b) for b in basis)
        self._setup_reducer()
        if canonical:
            rs = set(reps)
        else:
            rs = {self.canon(g) for g in reps}
        rs.add(G.identity)
        self.reps: tuple[GroupElement, ...] = tuple(sorted(rs, key=GroupElement.sort_key))
        self._key = (linalg.rref_key(self.basis, r), frozenset(self.reps))
        self._hash = hash(self._key)

    # ---- canonical reduction modulo P0
    def _setup_reducer(self) -> None:
        r, k, p = self.G.rank, len(self.basis), self.G.p
        if k == 0:
            self._pivots = ()
            self._reducer = None
            return
        b = self.basis
        for J in itertools.combinations(range(r), k):
            sub = [[b[c][i] for c in range(k)] for i in J]
            d = _det(sub)
            if d % p:
                break
        else:  # pragma: no cover - saturated lattices always have a unit minor
            raise ValueError("basis is not p-saturated")
        self._pivots = J
        # reducer R (r x k, rational with p-unit denominators) = B * B_J^-1
        inv = _rational_inverse(sub)
        R = [[sum(Fraction(b[c][i]) * inv[c][jj] for c in range(k)) for jj in range(k)] for i in range(r)]
        den = 1
        for row in R:
            for v in row:
                den = den * v.denominator // _gcd(den, v.denominator)
        self._reducer = ([[int(v * den) for v in row] for row in R], den)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def canon_torus(self, t: TorusElement) -> TorusElement:
        if self._reducer is None or t.level == 0:
            return t
        R, den = self._reducer
        mod = t.p**t.level
        dinv = pow(den, -1, mod)
        tJ = [t.nums[i] for i in self._pivots]
        nums = [(t.nums[i] - dinv * sum(R[i][j] * tJ[j] for j in range(len(tJ)))) for i in range(t.rank)]
        return TorusElement.make(t.p, t.level, nums)

    def canon(self, g: GroupElement) -> GroupElement:
        return GroupElement(self.canon_torus(g.t), g.x)

    # ---- identity and comparison
    @property
    def key(self):
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Subgroup(dim={self.dim}, |P/P0|={len(self.reps)}, comps={sorted(self.components)})"

    def sort_key(self) -> tuple:
        return (
            -self.dim,
            -len(self.reps),
            tuple(sorted(self.components)),
            self.basis,
            tuple(g.sort_key() for g in self.reps),
        )

    @cached_property
    def components(self) -> frozenset[int]:
        return frozenset(g.x for g in self.reps)

    @cached_property
    def rep_by_component(self) -> dict[int, list[GroupElement]]:
        out: dict[int, list[GroupElement]] = {}
        for g in self.reps:
            out.setdefault(g.x, []).append(g)
        return out

    def contains(self, g: GroupElement) -> bool:
        if g.x not in self.components:
            return False
        return self.canon(g) in self._rep_set

    @cached_property
    def _rep_set(self) -> frozenset[GroupElement]:
        return frozenset(self.reps)

    @cached_property
    def rep_generators(self) -> tuple[GroupElement, ...]:
        """Representatives generating P/P0 (greedy, in sort order)."""
        G = self.G
        gens: list[GroupElement] = []
        seen = {G.identity}
        for r in self.reps:
            if r in seen:
                continue
            gens.append(r)
            frontier = list(seen)
            while frontier:
                a = frontier.pop()
                for g in gens:
                    b = self.canon(G.mul(a, g))
                    if b not in seen:
                        seen.add(b)
                        frontier.append(b)
        return tuple(gens)

    def contains_torus_span(self, cols: Iterable[Sequence[int]]) -> bool:
        return all(linalg.in_span(c, self.basis, self.G.rank) for c in cols)

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        if self.dim > other.dim or not self.components <= other.components:
            return False
        if not other.contains_torus_span(self.basis):
            return False
        return all(other.contains(g) for g in self.reps)

    def is_finite(self) -> bool:
        return self.dim == 0

    def rep_level(self) -> int:
        return max(g.t.level for g in self.reps)

    @cached_property
    def _invariants(self) -> tuple:
        gam = self.G.gamma
        cls = sorted(min(gam.conjugacy_class(x)) for x in self.components)
        if self.dim:
            return (self.dim, len(self.reps), tuple(cls))
        # finite P: multiset of (component class, element order) is a conjugacy invariant
        orders = sorted((min(gam.conjugacy_class(g.x)), self.G.element_order(g)) for g in self.reps)
        return (0, len(self.reps), tuple(cls), tuple(orders))

    def invariants(self) -> tuple:
        return self._invariants

    # ---- enumeration
    def elements_at(self, level: int) -> Iterator[GroupElement]:
        """All elements of P whose torus part has level <= level."""
        p, k = self.G.p, self.dim
        mod = p**level
        for r in self.reps:
            if r.t.level > level:
                continue
            if k == 0:
                yield r
                continue
            base = r.t.at_level(level)
            for w in itertools.product(range(mod), repeat=k):
                nums = [base[i] + sum(self.basis[c][i] * w[c] for c in range(k)) for i in range(self.G.rank)]
                yield GroupElement(TorusElement.make(p, level, nums), r.x)

    def torus_generators(self, level: int) -> list[GroupElement]:
        p = self.G.p
        return [GroupElement(TorusElement.make(p, level, b), 0) for b in self.basis]

    def generators(self, level: int) -> list[GroupElement]:
        """Generators of the finite group P[level] (reps of level <= level and torus generators)."""
        G = self.G
        gens: list[GroupElement] = []
        seen = {G.identity}
        for r in self.reps:
            if r.t.level > level or r in seen:
                continue
            # keep r only if it is new modulo P0 and the reps already chosen
            gens.append(r)
            frontier = list(seen)
            while frontier:
                a = frontier.pop()
                for g in gens:
                    b = self.canon(G.mul(a, g))
                    if b not in seen:
                        seen.add(b)
                        frontier.append(b)
        return self.torus_generators(level) + gens

    def size_at(self, level: int) -> int:
        return sum(1 for r in self.reps if r.t.level <= level) * self.G.p ** (level * self.dim)

    def complement_points(self, level: int) -> Iterator[TorusElement]:
        """Canonical representatives of (S0 / P0)[level]: vectors vanishing on the pivot coordinates."""
        p, r = self.G.p, self.G.rank
        free = [i for i in range(r) if i not in self._pivots]
        mod = p**level
        for vals in itertools.product(range(mod), repeat=len(free)):
            nums = [0] * r
            for i, v in zip(free, vals):
                nums[i] = v
            yield TorusElement.make(p, level, nums)

    def left_coset_candidates(self, level: int) -> Iterator[GroupElement]:
        """One element of each left P0-coset in S[level] (P0 g = P0 g' iff same canonical form)."""
        pts = list(self.complement_points(level))
        for x in range(self.G.gamma.order):
            for t in pts:
                yield GroupElement(t, x)

    # ---- power subgroup used by the bullet construction
    def power_torus_generators(self, e: int) -> list[TorusElement]:
        return [self.G.pow(r, e).t for r in self.reps]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _rational_inverse(m: list[list[int]]) -> list[list[Fraction]]:
    n = len(m)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [v / pv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


# ---------------------------------------------------------------- constructors


def whole_group(G: PToralGroup) -> Subgroup:
    r = G.rank
    basis = [[int(i == j) for i in range(r)] for j in range(r)]
    return Subgroup(G, basis, [G.sec(x) for x in range(G.gamma.order)])


def torus_subgroup(G: PToralGroup, basis: Sequence[Sequence[int]] | None = None) -> Subgroup:
    r = G.rank
    if basis is None:
        basis = [[int(i == j) for i in range(r)] for j in range(r)]
    return Subgroup(G, basis, [])


def trivial_subgroup(G: PToralGroup) -> Subgroup:
    return Subgroup(G, [], [])


def generated(G: PToralGroup, torus_basis: Sequence[Sequence[int]], gens: Iterable[GroupElement], cap: int = 200000) -> Subgroup:
    """The subgroup generated by the divisible hull of torus_basis and the elements gens."""
    gens = [g for g in gens]
    comps = G.gamma.generated(g.x for g in gens)
    cols = [list(b) for b in torus_basis if any(b)]
    # close the identity component under the action of the generated components
    if cols:
        span, _ = linalg.saturated_span(cols, G.rank)
        while True:
            more = [linalg.matvec(G.action[x], b) for x in comps for b in span]
            new, _ = linalg.saturated_span(span + more, G.rank)
            if len(new) == len(span):
                break
            span = new
        cols = span
    shell = Subgroup(G, cols, [])
    gens = [shell.canon(g) for g in gens]
    seen = {G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = shell.canon(G.mul(a, g))
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
                    if len(seen) > cap:
                        raise RuntimeError("generated subgroup exceeds enumeration cap")
        frontier = nxt
    return Subgroup(G, cols, seen, canonical=True)


def conjugate_subgroup(G: PToralGroup, g: GroupElement, P: Subgroup) -> Subgroup:
    """g P g^-1."""
    A = G.action[g.x]
    basis = [linalg.matvec(A, b) for b in P.basis]
    return Subgroup(G, basis, [G.conj(g, r) for r in P.reps])


def product_subgroup(G: PToralGroup, P: Subgroup, Q: Subgroup) -> Subgroup:
    """The subgroup generated by P and Q (equal to PQ when one normalizes the other)."""
    return generated(G, list(P.basis) + list(Q.basis), list(P.reps) + list(Q.reps))


def conjugates_into(G: PToralGroup, g: GroupElement, P: Subgroup, Q: Subgroup) -> bool:
    """Whether g P g^-1 <= Q."""
    A = G.action[g.x]
    if not Q.contains_torus_span(linalg.matvec(A, b) for b in P.basis):
        return False
    return all(Q.contains(G.conj(g, r)) for r in P.rep_generators)


def centralizes(G: PToralGroup, g: GroupElement, P: Subgroup) -> bool:
    A = G.action[g.x]
    for b in P.basis:
        if linalg.matvec(A, b) != list(b):
            return False
    return all(G.mul(g, r) == G.mul(r, g) for r in P.rep_generators)


# ---------------------------------------------------------------- centralizers and normalizers


def _stable_search(
    G: PToralGroup,
    torus_basis: Sequence[Sequence[int]],
    pred: Callable[[GroupElement], bool],
    level: int,
    what: str,
) -> Subgroup:
    """Subgroup containing the torus T=span(torus_basis) whose elements satisfy pred.

    pred must be invariant under left multiplication by T. Candidates are one
    per left T-coset at the given level; the answer is recomputed one level up
    and must agree.
    """
    shell = Subgroup(G, torus_basis, [])
    found: list[set[GroupElement]] = []
    for K in (level, level + 1):
        s = set()
        for g in shell.left_coset_candidates(K):
            if pred(g):
                s.add(g)
        found.append(s)
    if found[0] != found[1]:
        extra = sorted(found[1] - found[0], key=GroupElement.sort_key)[:1]
        raise LevelTooLow(f"{what}: new coset {extra} appears at level {level + 1}")
    return Subgroup(G, shell.basis, found[0], canonical=True)


def _fixed_torus_basis(G: PToralGroup, comps: Iterable[int]) -> list[list[int]]:
    r = G.rank
    rows: list[list[int]] = []
    for x in comps:
        A = G.action[x]
        for i in range(r):
            rows.append([A[i][j] - int(i == j) for j in range(r)])
    return linalg.rational_kernel(rows, r) if r else []


def centralizer(G: PToralGroup, P: Subgroup, level: int | None = None) -> Subgroup:
    level = G.level if level is None else level
    cache = G.__dict__.setdefault("_centralizer_cache", {})
    if (P, level) not in cache:
        cache[(P, level)] = _centralizer(G, P, level)
    return cache[(P, level)]


def _centralizer(G: PToralGroup, P: Subgroup, level: int) -> Subgroup:
    T = _fixed_torus_basis(G, P.components)
    return _stable_search(G, T, lambda g: centralizes(G, g, P), level, "centralizer")


def normalizer(G: PToralGroup, P: Subgroup, level: int | None = None) -> Subgroup:
    level = G.level if level is None else level
    cache = G.__dict__.setdefault("_normalizer_cache", {})
    if (P, level) not in cache:
        cache[(P, level)] = _normalizer(G, P, level)
    return cache[(P, level)]


def _normalizer(G: PToralGroup, P: Subgroup, level: int) -> Subgroup:
    r = G.rank
    if r:
        U = linalg.complete_basis([list(b) for b in P.basis], r) if P.basis else linalg.identity(r)
        Uinv = linalg.inverse_unimodular(U)
        proj = Uinv[P.dim :]
        rows: list[list[int]] = []
        for x in P.components:
            A = G.action[x]
            IA = [[int(i == j) - A[i][j] for j in range(r)] for i in range(r)]
            rows.extend(linalg.matmul(proj, IA))
        T = linalg.rational_kernel(rows, r)
    else:
        T = []
    return _stable_search(G, T, lambda g: conjugates_into(G, g, P, P), level, "normalizer")


def intersection(G: PToralGroup, P: Subgroup, Q: Subgroup, level: int | None = None) -> Subgroup:
    level = G.level if level is None else level
    r = G.rank
    if P.dim and Q.dim:
        k1 = P.dim
        mat = [[P.basis[c][i] for c in range(k1)] + [-Q.basis[c][i] for c in range(Q.dim)] for i in range(r)]
        ker = linalg.rational_kernel(mat, k1 + Q.dim)
        T = [[sum(P.basis[c][i] * v[c] for c in range(k1)) for i in range(r)] for v in ker]
    else:
        T = []
    shell = Subgroup(G, T, [])
    found = []
    for K in (level, level + 1):
        found.append({shell.canon(g) for g in P.elements_at(K) if Q.contains(g)})
    if found[0] != found[1]:
        raise LevelTooLow("intersection: new coset appears one level up")
    return Subgroup(G, shell.basis, found[0], canonical=True)


def center(G: PToralGroup, P: Subgroup, level: int | None = None) -> Subgroup:
    return intersection(G, centralizer(G, P, level), P, level)


# ---------------------------------------------------------------- transporters


@dataclass
class Transporter:
    """N_S(P, Q) truncated at a level, stored modulo left multiplication by Q0."""

    P: Subgroup
    Q: Subgroup
    level: int
    elements: tuple[GroupElement, ...]

    def __contains__(self, g: GroupElement) -> bool:
        return conjugates_into(self.P.G, g, self.P, self.Q)


def _torus_conj(G: PToralGroup, t: TorusElement, b: GroupElement) -> GroupElement:
    """(t, 1) b (t, 1)^-1."""
    if G._identity_flags[b.x] or t.level == 0:
        return b
    return GroupElement(b.t + t - G.act(b.x, t), b.x)


def transporter(G: PToralGroup, P: Subgroup, Q: Subgroup, level: int | None = None) -> Transporter:
    level = G.level if level is None else level
    out = []
    if P.dim > Q.dim or (P.dim == Q.dim and len(P.reps) > len(Q.reps)):
        return Transporter(P, Q, level, ())
    A_ok = [x for x in range(G.gamma.order) if Q.contains_torus_span(linalg.matvec(G.action[x], b) for b in P.basis)]
    pts = list(Q.complement_points(level))
    for x in A_ok:
        # (t, x) r (t, x)^-1 = (s + t - A_y t, y) where (s, y) = (0, x) r (0, x)^-1
        base = [G.conj(G.sec(x), r) for r in P.rep_generators]
        for t in pts:
            if all(Q.contains(_torus_conj(G, t, b)) for b in base):
                out.append(GroupElement(t, x))
    out.sort(key=GroupElement.sort_key)
    return Transporter(P, Q, level, tuple(out))


class _UnionFind:
    def __init__(self, items):
        self.parent = {a: a for a in items}

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra.sort_key() <= rb.sort_key():
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def double_coset_reps(
    G: PToralGroup,
    P: Subgroup,
    Q: Subgroup,
    left: Subgroup,
    right: Subgroup,
    level: int | None = None,
) -> list[GroupElement]:
    """Representatives of left \\ N_S(P,Q) / right, the minimal element of each orbit.

    left must normalize Q and contain Q0; right must normalize P. Orbits are
    computed at the level and at level + 1 and must agree in number.
    """
    level = G.level if level is None else level
    counts = []
    reps_at: list[list[GroupElement]] = []
    for K in (level, level + 1):
        tr = transporter(G, P, Q, K)
        items = sorted({Q.canon(g) for g in tr.elements}, key=GroupElement.sort_key)
        lg = left.generators(K)
        rg = right.generators(K)
        index = set(items)
        seen: set[GroupElement] = set()
        roots = []
        # items are sorted, so the first unseen item is the minimum of its orbit
        for a0 in items:
            if a0 in seen:
                continue
            roots.append(a0)
            seen.add(a0)
            frontier = [a0]
            while frontier:
                a = frontier.pop()
                nbrs = [Q.canon(G.mul(l, a)) for l in lg] + [Q.canon(G.mul(a, rr)) for rr in rg]
                for b in nbrs:
                    if b in index and b not in seen:
                        seen.add(b)
                        frontier.append(b)
        counts.append(len(roots))
        reps_at.append(roots)
    if counts[0] != counts[1]:
        raise LevelTooLow(f"double cosets: {counts[0]} orbits at level {level}, {counts[1]} one level up")
    return reps_at[0]


def find_conjugator(G: PToralGroup, P: Subgroup, Q: Subgroup, level: int | None = None) -> GroupElement | None:
    """Some g with g P g^-1 = Q, searching levels up to level + 1; None if none found."""
    if P == Q:
        return G.identity
    if P.invariants() != Q.invariants():
        return None
    level = G.level if level is None else level
    # translating t by Q0 or by the identity component of S0^(comps of Q) does not change g P g^-1
    shell = Subgroup(G, list(Q.basis) + _fixed_torus_basis(G, Q.components), [])
    for K in range(0, level + 2):
        for x in range(G.gamma.order):
            A = G.action[x]
            if not Q.contains_torus_span(linalg.matvec(A, b) for b in P.basis):
                continue
            if {G.gamma.mul(G.gamma.mul(x, y), G.gamma.inv(x)) for y in P.components} != Q.components:
                continue
            for t in shell.complement_points(K):
                if t.level < K:
                    continue
                g = GroupElement(t, x)
                if all(Q.contains(G.conj(g, r)) for r in P.rep_generators):
                    return g
    return None
