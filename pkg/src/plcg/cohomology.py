"""Low-degree cohomology of Gamma with coefficients in the discrete torus S0.

All linear systems are solved over Z/p^N after clearing the common
denominator p^N. Solvability statements about the infinite module S0 are
reduced to a finite level by the exponent bound: if a normalized 2-cochain f
of order p^l is a coboundary, it is the coboundary of a 1-cochain of order at
most p^(l+n), where p^n = |Gamma| (the exponent of H^1 divides |Gamma|).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

from . import linalg
from .group import PToralGroup
from .torus import PAdicUnitApprox, TorusElement, power_map

Cochain1 = tuple[TorusElement, ...]
Cochain2 = tuple[tuple[TorusElement, ...], ...]
ActionFn = Callable[[int], Sequence[Sequence[int]]]


def _apply(mat, t: TorusElement) -> TorusElement:
    if t.level == 0:
        return t
    return t.apply_matrix(mat)


def zero_cochain1(G: PToralGroup) -> Cochain1:
    return tuple(G.zero for _ in range(G.gamma.order))


def d0(G: PToralGroup, m: TorusElement, action: ActionFn | None = None) -> Cochain1:
    act = action or (lambda x: G.action[x])
    return tuple(_apply(act(x), m) - m for x in range(G.gamma.order))


def d1(G: PToralGroup, c: Sequence[TorusElement], action: ActionFn | None = None) -> Cochain2:
    """(dc)(x, y) = x.c(y) - c(xy) + c(x)."""
    act = action or (lambda x: G.action[x])
    n = G.gamma.order
    mul = G.gamma.mul
    return tuple(tuple(_apply(act(x), c[y]) - c[mul(x, y)] + c[x] for y in range(n)) for x in range(n))


def scale2(f: Cochain2, k: int) -> Cochain2:
    return tuple(tuple(v.scale(k) for v in row) for row in f)


def sub2(f: Cochain2, g: Cochain2) -> Cochain2:
    return tuple(tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(f, g))


def level2(f: Cochain2) -> int:
    return max((v.level for row in f for v in row), default=0)


def is_cocycle1(G: PToralGroup, c: Sequence[TorusElement], action: ActionFn | None = None) -> bool:
    return all(v.is_zero() for row in d1(G, c, action) for v in row)


def _coboundary_matrix(G: PToralGroup, action: ActionFn) -> list[list[int]]:
    n, r = G.gamma.order, G.rank
    mul = G.gamma.mul
    rows: list[list[int]] = []
    ncols = (n - 1) * r
    for x in range(1, n):
        A = action(x)
        for y in range(1, n):
            xy = mul(x, y)
            for i in range(r):
                row = [0] * ncols
                for j in range(r):
                    row[(y - 1) * r + j] += A[i][j]
                if xy:
                    row[(xy - 1) * r + i] -= 1
                row[(x - 1) * r + i] += 1
                rows.append(row)
    return rows


def solve_coboundary(
    G: PToralGroup, target: Cochain2, N: int, action: ActionFn | None = None
) -> Cochain1 | None:
    """A normalized 1-cochain c with values in S0[p^N] and dc = target, or None.

    None is a certificate that no such c of order dividing p^N exists.
    """
    act = action or (lambda x: G.action[x])
    n, r, p = G.gamma.order, G.rank, G.p
    if r == 0 or n == 1:
        return zero_cochain1(G) if all(v.is_zero() for row in target for v in row) else None
    if level2(target) > N:
        return None
    rhs: list[int] = []
    for x in range(1, n):
        for y in range(1, n):
            rhs.extend(target[x][y].at_level(N))
    mat = _coboundary_matrix(G, act)
    sol = linalg.solve_mod(mat, rhs, p, N)
    if sol is None:
        return None
    c = [G.zero] + [TorusElement.make(p, N, sol[(x - 1) * r : x * r]) for x in range(1, n)]
    if d1(G, c, act) != tuple(tuple(row) for row in target):
        raise AssertionError("coboundary solver produced a non-solution")
    return tuple(c)


@dataclass(frozen=True)
class CohomologyClassWitness:
    level: int
    cocycle: Cochain2
    order: int
    m: int
    certificate: Cochain1  # c with p^m delta = dc

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "order": self.order,
            "certificate": [c.to_json() for c in self.certificate],
        }


def extension_class_order(G: PToralGroup) -> CohomologyClassWitness:
    """Order p^m of the class of the defining cocycle, with a certificate for p^m delta = dc.

    Minimality: for every m' < m the system p^m' delta = dc is inconsistent
    at level l + n and again at l + n + 1.
    """
    delta = G.cocycle
    n = G.gamma.log_order
    N = level2(delta) + n
    for m in range(0, n + 1):
        target = scale2(delta, G.p**m)
        c = solve_coboundary(G, target, N)
        c2 = solve_coboundary(G, target, N + 1)
        if (c is None) != (c2 is None):
            raise AssertionError("coboundary solvability changed between levels")
        if c is not None:
            return CohomologyClassWitness(N, delta, G.p**m, m, c)
    raise AssertionError("class order exceeds |Gamma|; cohomology bug")


def is_coboundary(G: PToralGroup, f: Cochain2, action: ActionFn | None = None) -> Cochain1 | None:
    """Solve df = f in S0 (not just a truncation), using the exponent bound."""
    return solve_coboundary(G, f, level2(f) + G.gamma.log_order, action)


# ---------------------------------------------------------------- H^1


@dataclass(frozen=True)
class H1Result:
    invariant_factors: tuple[int, ...]
    generators: tuple[Cochain1, ...]  # one derivation per cyclic factor
    level: int

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out


def _pval(x: int, p: int) -> int:
    x = abs(x)
    v = 0
    while x and x % p == 0:
        x //= p
        v += 1
    return v


def h1_compute(G: PToralGroup, action: ActionFn | None = None) -> H1Result:
    """H^1(Gamma, S0) as Der / PDer.

    Every class has a representative of order dividing p^e (e = log_p|Gamma|),
    so Der is taken at level e. A principal derivation d0(m) lies at level e
    exactly when (A_x - 1)(p^e m) = 0 for all x; m is allowed arbitrary level,
    handled exactly through an integer Smith form of the stacked (A_x - 1).
    """
    act = action or (lambda x: G.action[x])
    n, r, p = G.gamma.order, G.rank, G.p
    e = G.gamma.log_order
    if r == 0 or n == 1:
        return H1Result((), (), e)
    mat = _coboundary_matrix(G, act)
    ker = linalg.smith_mod(mat, p, e).kernel_gens()
    s = len(ker)
    # principal derivations landing in level e
    D = []
    for x in range(1, n):
        A = act(x)
        for i in range(r):
            D.append([A[i][j] - int(i == j) for j in range(r)])
    snf = linalg.smith_int(D)
    vals = [_pval(d, p) for d in snf.diag]
    E = max(vals, default=0)
    vcols = linalg.columns(snf.V)
    mod = p**e
    bgens: list[list[int]] = []
    for i in range(len(vcols)):
        scale = p ** max(E - vals[i], 0) if i < len(vals) else 1
        mu = [scale * v for v in vcols[i]]
        vec = []
        for row in D:
            val = sum(row[j] * mu[j] for j in range(r))
            assert val % p**E == 0
            vec.append((val // p**E) % mod)
        if any(vec):
            bgens.append(vec)
    # express B' in the kernel generators
    kmat = linalg.from_columns(ker, len(mat[0])) if ker else []
    rel_cols: list[list[int]] = []
    if s:
        ksnf = linalg.smith_mod(kmat, p, e)
        for g in ksnf.kernel_gens():
            rel_cols.append(g)
        for b in bgens:
            a = ksnf.solve(b)
            if a is None:
                raise AssertionError("principal derivation outside the derivation group")
            rel_cols.append(a)
        for i in range(s):
            rel_cols.append([mod * int(i == j) for j in range(s)])
        R = linalg.from_columns(rel_cols, s)
        rs = linalg.smith_int(R)
        Uinv = linalg.inverse_unimodular(rs.U)
        factors = []
        gens = []
        for i, d in enumerate(rs.diag):
            d = p ** _pval(d, p)
            if d > 1:
                factors.append(d)
                a = [Uinv[k][i] for k in range(s)]
                vec = [sum(ker[j][q] * a[j] for j in range(s)) % mod for q in range(len(mat[0]))]
                gens.append(tuple([G.zero] + [TorusElement.make(p, e, vec[(x - 1) * r : x * r]) for x in range(1, n)]))
    else:
        factors, gens = [], []
    order = 1
    for d in factors:
        order *= d
    der_size = linalg.smith_mod(kmat, p, e).image_size() if s else 1
    b_size = linalg.smith_mod(linalg.from_columns(bgens, len(mat[0])), p, e).image_size() if bgens else 1
    if order * b_size != der_size:
        raise AssertionError("H^1 order disagrees with |Der| / |PDer|")
    for gcoch in gens:
        if not is_cocycle1(G, gcoch, act):
            raise AssertionError("H^1 representative is not a derivation")
    order_sorted = sorted(zip(factors, gens), key=lambda fg: fg[0])
    return H1Result(tuple(f for f, _ in order_sorted), tuple(g for _, g in order_sorted), e)


# ---------------------------------------------------------------- automorphism extension test


@dataclass(frozen=True)
class ExtensionTest:
    exists: bool
    compatible: bool
    section_images: Cochain1 | None  # c with psi(t, x) = (lam t + c(x), phi x)
    reason: str = ""


def _lam_apply(lam, t: TorusElement) -> TorusElement:
    if isinstance(lam, PAdicUnitApprox):
        return power_map(t, lam)
    return _apply(lam, t)


def _lam_compatible(G: PToralGroup, lam, phi: Sequence[int]) -> str:
    n = G.gamma.order
    for x in range(n):
        if isinstance(lam, PAdicUnitApprox):
            if G.action[x] != G.action[phi[x]]:
                return f"lambda A_{G.gamma.names[x]} != A_phi(x) lambda"
        else:
            if linalg.matmul(lam, G.action[x]) != linalg.matmul(G.action[phi[x]], lam):
                return f"lambda A_{G.gamma.names[x]} != A_phi(x) lambda"
    return ""


def aut_extension_nonempty(G: PToralGroup, lam, phi: Sequence[int]) -> ExtensionTest:
    """Whether some automorphism of S restricts to lam on S0 and induces phi on Gamma.

    lam is an integer matrix or a PAdicUnitApprox (power map); phi is a permutation of Gamma.
    """
    n = G.gamma.order
    mul = G.gamma.mul
    if any(phi[mul(x, y)] != mul(phi[x], phi[y]) for x in range(n) for y in range(n)) or sorted(phi) != list(range(n)):
        return ExtensionTest(False, False, None, "phi is not an automorphism of Gamma")
    bad = _lam_compatible(G, lam, phi) if G.rank else ""
    if bad:
        return ExtensionTest(False, False, None, bad)
    d = G.cocycle
    target = tuple(tuple(_lam_apply(lam, d[x][y]) - d[phi[x]][phi[y]] for y in range(n)) for x in range(n))
    c = is_coboundary(G, target, action=lambda x: G.action[phi[x]])
    if c is None:
        return ExtensionTest(False, True, None, "phi^*[S] != lambda_*[S]")
    return ExtensionTest(True, True, c)


# ---------------------------------------------------------------- brute force oracles


def _words(G: PToralGroup, gens: Sequence[int]) -> dict[int, list[int]]:
    words: dict[int, list[int]] = {0: []}
    frontier = [0]
    while frontier:
        nxt = []
        for a in frontier:
            for i, g in enumerate(gens):
                b = G.gamma.mul(a, g)
                if b not in words:
                    words[b] = words[a] + [i]
                    nxt.append(b)
        frontier = nxt
    return words


def brute_force_coboundary(
    G: PToralGroup, f: Cochain2, N: int, action: ActionFn | None = None, first_only: bool = False
) -> list[Cochain1]:
    """All normalized 1-cochains c with values in S0[p^N] and dc = f, by enumeration.

    A solution is determined by its values on a generating set. For each
    generator g the cyclic relation c(g^ord(g)) = 0 is imposed first (an exact
    necessary condition), then every surviving combination is checked on all
    pairs. Arithmetic is on integer numerators over p^N.
    """
    act = action or (lambda x: G.action[x])
    n, r, p = G.gamma.order, G.rank, G.p
    mod = p**N
    mul = G.gamma.mul
    if level2(f) > N:
        return []
    F = [[f[x][y].at_level(N) for y in range(n)] for x in range(n)]
    mats = [act(x) for x in range(n)]

    def apply(x, v):
        A = mats[x]
        return [sum(A[i][j] * v[j] for j in range(r)) for i in range(r)]

    gens = G.gamma.small_generating_set()
    words = _words(G, gens)
    survivors: list[list[tuple[int, ...]]] = []
    for g in gens:
        k = G.gamma.element_order(g)
        # c(g^k) = M c(g) - b with M = sum_i A_{g^i}, b = sum_i f(g^i, g)
        M = [[0] * r for _ in range(r)]
        b = [0] * r
        gi = 0
        for _ in range(k):
            for i in range(r):
                for j in range(r):
                    M[i][j] += mats[gi][i][j]
                b[i] += F[gi][g][i]
            gi = mul(gi, g)
        ok = []
        for v in itertools.product(range(mod), repeat=r):
            if all((sum(M[i][j] * v[j] for j in range(r)) - b[i]) % mod == 0 for i in range(r)):
                ok.append(v)
        survivors.append(ok)
    order = sorted((a for a in words if a), key=lambda a: len(words[a]))
    steps = []
    for a in order:
        w = words[a]
        prev = 0
        for i in w[:-1]:
            prev = mul(prev, gens[i])
        steps.append((a, prev, w[-1]))
    out = []
    for combo in itertools.product(*survivors):
        c = [None] * n
        c[0] = [0] * r
        for a, prev, gi in steps:
            av = apply(prev, combo[gi])
            fv = F[prev][gens[gi]]
            c[a] = [(c[prev][i] + av[i] - fv[i]) % mod for i in range(r)]
        good = True
        for x in range(1, n):
            for y in range(1, n):
                xy = mul(x, y)
                av = apply(x, c[y])
                if any((av[i] - c[xy][i] + c[x][i] - F[x][y][i]) % mod for i in range(r)):
                    good = False
                    break
            if not good:
                break
        if good:
            out.append(tuple(TorusElement.make(p, N, v) for v in c))
            if first_only:
                break
    return out


def brute_force_class_order(G: PToralGroup, N: int) -> int:
    """Smallest p^m with p^m delta a coboundary of some c in S0[p^N], by enumeration."""
    for m in range(0, G.gamma.log_order + 1):
        if brute_force_coboundary(G, scale2(G.cocycle, G.p**m), N, first_only=True):
            return G.p**m
    return -1


def brute_force_h1_order(G: PToralGroup, level: int, extra: int) -> int:
    """|Der(Gamma, S0[p^level]) / {d0 m : m in S0[p^(level+extra)]} restricted to level|.

    With extra large enough this is |H^1(Gamma, S0)| once level >= log_p|Gamma|.
    """
    from .torus import torus_points

    zero2 = tuple(tuple(G.zero for _ in range(G.gamma.order)) for _ in range(G.gamma.order))
    ders = set(brute_force_coboundary(G, zero2, level))
    princ = set()
    for m in torus_points(G.p, G.rank, level + extra):
        c = d0(G, m)
        if all(v.level <= level for v in c):
            princ.add(c)
    return len(ders) // len(princ)
