"""Small exact integer linear algebra: Smith forms over Z and over Z/p^N.

Matrices are lists of lists of Python ints (row-major). Everything here is
sized for desk-scale problems (a few hundred rows, tens of columns).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(a))]


def matvec(a: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [sum(row[j] * v[j] for j in range(len(v))) for row in a]


def transpose(a: Sequence[Sequence[int]], ncols: int | None = None) -> Matrix:
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*a)]


def columns(a: Sequence[Sequence[int]]) -> list[list[int]]:
    return transpose(a)


def from_columns(cols: Sequence[Sequence[int]], nrows: int) -> Matrix:
    if not cols:
        return [[] for _ in range(nrows)]
    return [[c[i] for c in cols] for i in range(nrows)]


def inverse_unimodular(a: Sequence[Sequence[int]]) -> Matrix:
    """Exact inverse of an integer matrix with determinant +-1."""
    n = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    out = []
    for row in aug:
        vals = row[n:]
        if any(v.denominator != 1 for v in vals):
            raise ValueError("matrix is not unimodular")
        out.append([int(v) for v in vals])
    return out


def _val(x: int, p: int, cap: int) -> int:
    if x == 0:
        return cap
    v = 0
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v


@dataclass
class SmithModP:
    """U A V = diag(p^v_0, p^v_1, ...) mod p^N with U, V invertible mod p^N."""

    p: int
    N: int
    U: Matrix
    V: Matrix
    vals: list[int]  # one per diagonal slot, N meaning zero
    nrows: int
    ncols: int

    def solve(self, b: Sequence[int]) -> list[int] | None:
        """Some x with A x = b mod p^N, or None if the system is inconsistent."""
        mod = self.p**self.N
        ub = [x % mod for x in matvec(self.U, b)]
        y = [0] * self.ncols
        for i in range(self.nrows):
            v = self.vals[i] if i < len(self.vals) else self.N
            if v >= self.N:
                if ub[i] % mod:
                    return None
                continue
            pv = self.p**v
            if ub[i] % pv:
                return None
            y[i] = ub[i] // pv
        return [x % mod for x in matvec(self.V, y)]

    def kernel_gens(self) -> list[list[int]]:
        """Generators of {x : A x = 0 mod p^N}."""
        mod = self.p**self.N
        gens = []
        vcols = columns(self.V)
        for j in range(self.ncols):
            v = self.vals[j] if j < len(self.vals) else 0
            if j >= self.nrows:
                v = 0
            scale = self.p ** (self.N - v) if j < min(self.nrows, self.ncols) else 1
            if scale % mod == 0:
                continue
            gens.append([(scale * x) % mod for x in vcols[j]])
        return gens

    def kernel_size(self) -> int:
        size = 1
        for j in range(self.ncols):
            if j < min(self.nrows, self.ncols):
                size *= self.p ** self.vals[j]
            else:
                size *= self.p**self.N
        return size

    def image_size(self) -> int:
        size = 1
        for v in self.vals:
            size *= self.p ** (self.N - v)
        return size


def smith_mod(a: Sequence[Sequence[int]], p: int, N: int, ncols: int | None = None) -> SmithModP:
    mod = p**N
    rows = len(a)
    cols = len(a[0]) if rows else (ncols or 0)
    m = [[x % mod for x in row] for row in a]
    U = identity(rows)
    V = identity(cols)
    vals: list[int] = []
    for k in range(min(rows, cols)):
        best = None
        for i in range(k, rows):
            for j in range(k, cols):
                if m[i][j]:
                    v = _val(m[i][j], p, N)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            vals.extend([N] * (min(rows, cols) - k))
            break
        v, i, j = best
        m[k], m[i] = m[i], m[k]
        U[k], U[i] = U[i], U[k]
        for row in m:
            row[k], row[j] = row[j], row[k]
        for row in V:
            row[k], row[j] = row[j], row[k]
        pv = p**v
        unit = m[k][k] // pv
        inv = pow(unit, -1, mod)
        m[k] = [(x * inv) % mod for x in m[k]]
        U[k] = [(x * inv) % mod for x in U[k]]
        for i2 in range(rows):
            if i2 != k and m[i2][k]:
                f = m[i2][k] // pv
                m[i2] = [(x - f * y) % mod for x, y in zip(m[i2], m[k])]
                U[i2] = [(x - f * y) % mod for x, y in zip(U[i2], U[k])]
        for j2 in range(cols):
            if j2 != k and m[k][j2]:
                f = m[k][j2] // pv
                for row in m:
                    row[j2] = (row[j2] - f * row[k]) % mod
                for row in V:
                    row[j2] = (row[j2] - f * row[k]) % mod
        vals.append(v)
    return SmithModP(p, N, U, V, vals, rows, cols)


def solve_mod(a: Sequence[Sequence[int]], b: Sequence[int], p: int, N: int, ncols: int | None = None) -> list[int] | None:
    return smith_mod(a, p, N, ncols).solve(b)


@dataclass
class SmithZ:
    """U A V = D over Z with U, V unimodular and D diagonal, d_i | d_{i+1} not enforced."""

    U: Matrix
    V: Matrix
    diag: list[int]
    rank: int


def smith_int(a: Sequence[Sequence[int]], ncols: int | None = None) -> SmithZ:
    rows = len(a)
    cols = len(a[0]) if rows else (ncols or 0)
    m = [list(row) for row in a]
    U = identity(rows)
    V = identity(cols)
    diag: list[int] = []
    k = 0
    while k < min(rows, cols):
        nz = [(abs(m[i][j]), i, j) for i in range(k, rows) for j in range(k, cols) if m[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        m[k], m[i] = m[i], m[k]
        U[k], U[i] = U[i], U[k]
        for row in m:
            row[k], row[j] = row[j], row[k]
        for row in V:
            row[k], row[j] = row[j], row[k]
        done = True
        piv = m[k][k]
        for i2 in range(k + 1, rows):
            if m[i2][k]:
                q = m[i2][k] // piv
                m[i2] = [x - q * y for x, y in zip(m[i2], m[k])]
                U[i2] = [x - q * y for x, y in zip(U[i2], U[k])]
                if m[i2][k]:
                    done = False
        for j2 in range(k + 1, cols):
            if m[k][j2]:
                q = m[k][j2] // piv
                for row in m:
                    row[j2] -= q * row[k]
                for row in V:
                    row[j2] -= q * row[k]
                if m[k][j2]:
                    done = False
        if not done:
            continue
        if piv < 0:
            m[k] = [-x for x in m[k]]
            U[k] = [-x for x in U[k]]
        diag.append(m[k][k])
        k += 1
    return SmithZ(U, V, diag, len(diag))


def saturated_span(cols: Sequence[Sequence[int]], r: int) -> tuple[list[list[int]], Matrix]:
    """Saturated basis of (Q-span of cols) intersected with Z^r, and a unimodular completion.

    Returns (basis, completion) where completion is an r x r unimodular matrix
    whose first len(basis) columns are the basis.
    """
    if not cols or all(all(x == 0 for x in c) for c in cols):
        return [], identity(r)
    a = from_columns(cols, r)
    snf = smith_int(a)
    uinv = inverse_unimodular(snf.U)
    basis = [list(c) for c in columns(uinv)[: snf.rank]]
    return basis, uinv


def complete_basis(basis: Sequence[Sequence[int]], r: int) -> Matrix:
    """Unimodular r x r matrix whose first columns are the given saturated basis."""
    if not basis:
        return identity(r)
    a = from_columns(basis, r)
    snf = smith_int(a)
    if any(abs(d) != 1 for d in snf.diag):
        raise ValueError("basis is not saturated")
    uinv = inverse_unimodular(snf.U)
    # U A V = I_k (padded) so A = U^-1 [I_k; 0] V^-1; replace first k columns by A itself
    k = len(basis)
    out = [row[:] for row in uinv]
    for i in range(r):
        for j in range(k):
            out[i][j] = a[i][j]
    return out


def rational_kernel(rows_: Sequence[Sequence[int]], r: int) -> list[list[int]]:
    """Saturated integer basis of {v in Q^r : M v = 0}."""
    rows_ = [list(row) for row in rows_ if any(row)]
    if not rows_:
        return [[int(i == j) for i in range(r)] for j in range(r)]
    snf = smith_int(rows_)
    vcols = columns(snf.V)
    return [list(c) for c in vcols[snf.rank :]]


def rref_key(basis: Sequence[Sequence[int]], r: int) -> tuple:
    """Canonical key of the Q-span of the given vectors (reduced row echelon form)."""
    rows_ = [[Fraction(x) for x in v] for v in basis]
    out = []
    lead = 0
    for c in range(r):
        piv = next((i for i in range(lead, len(rows_)) if rows_[i][c] != 0), None)
        if piv is None:
            continue
        rows_[lead], rows_[piv] = rows_[piv], rows_[lead]
        pv = rows_[lead][c]
        rows_[lead] = [x / pv for x in rows_[lead]]
        for i in range(len(rows_)):
            if i != lead and rows_[i][c] != 0:
                f = rows_[i][c]
                rows_[i] = [x - f * y for x, y in zip(rows_[i], rows_[lead])]
        lead += 1
    for row in rows_[:lead]:
        out.append(tuple((x.numerator, x.denominator) for x in row))
    return tuple(out)


def in_span(v: Sequence[int], basis: Sequence[Sequence[int]], r: int) -> bool:
    """Whether v lies in the Q-span of basis."""
    if not any(v):
        return True
    return len(rref_key(list(basis) + [list(v)], r)) == len(rref_key(basis, r))
