"""Exact arithmetic in the discrete p-torus (Z/p^oo)^r and in truncated p-adic units.

A point of the torus is stored as a tuple of numerators over a common
denominator ``p**level``; the level is always reduced to the smallest value
that still represents the point, so equality and hashing are structural.
The group law is written additively: ``t + s`` and ``zeta * t`` stand for the
product and the zeta-power map of the multiplicative notation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence


class PrecisionError(ValueError):
    """Raised when a p-adic approximation is too coarse to decide a question."""


def valuation(n: int, p: int) -> int | None:
    """p-adic valuation of an integer; ``None`` for zero."""
    if n == 0:
        return None
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def p_log(n: int, p: int) -> int:
    """Exponent k with p**k == n; n must be a power of p."""
    k = 0
    while n > 1:
        if n % p:
            raise ValueError(f"{n} is not a power of {p}")
        n //= p
        k += 1
    return k


@dataclass(frozen=True, slots=True)
class TorusElement:
    p: int
    level: int
    nums: tuple[int, ...]

    @staticmethod
    def make(p: int, level: int, nums: Iterable[int]) -> "TorusElement":
        if level <= 0:
            return TorusElement(p, 0, tuple(0 for _ in nums))
        mod = p**level
        vals = [a % mod for a in nums]
        while level > 0:
            for a in vals:
                if a % p:
                    return TorusElement(p, level, tuple(vals))
            vals = [a // p for a in vals]
            level -= 1
        return TorusElement(p, 0, tuple(vals))

    @staticmethod
    def zero(p: int, rank: int) -> "TorusElement":
        return TorusElement(p, 0, (0,) * rank)

    @staticmethod
    def from_fractions(p: int, coords: Sequence[Fraction | int | str]) -> "TorusElement":
        fr = [Fraction(c) for c in coords]
        level = 0
        for f in fr:
            d = f.denominator
            k = p_log(d, p)
            level = max(level, k)
        mod = p**level
        return TorusElement.make(p, level, [(f.numerator * (mod // f.denominator)) for f in fr])

    @staticmethod
    def parse(p: int, items: Sequence[str]) -> "TorusElement":
        return TorusElement.from_fractions(p, [_parse_coord(s, p) for s in items])

    @property
    def rank(self) -> int:
        return len(self.nums)

    def coords(self) -> tuple[Fraction, ...]:
        d = self.p**self.level
        return tuple(Fraction(a, d) for a in self.nums)

    def at_level(self, level: int) -> tuple[int, ...]:
        """Numerators over p**level (level must be at least self.level)."""
        if level < self.level:
            raise PrecisionError(f"element of level {self.level} does not live at level {level}")
        s = self.p ** (level - self.level)
        return tuple(a * s for a in self.nums)

    def is_zero(self) -> bool:
        return self.level == 0

    def __add__(self, other: "TorusElement") -> "TorusElement":
        if self.level >= other.level:
            s = self.p ** (self.level - other.level)
            return TorusElement.make(self.p, self.level, [a + b * s for a, b in zip(self.nums, other.nums)])
        return other + self

    def __neg__(self) -> "TorusElement":
        return TorusElement.make(self.p, self.level, [-a for a in self.nums])

    def __sub__(self, other: "TorusElement") -> "TorusElement":
        return self + (-other)

    def scale(self, n: int) -> "TorusElement":
        """Integer multiple n*t (the n-th power in multiplicative notation)."""
        return TorusElement.make(self.p, self.level, (a * n for a in self.nums))

    def apply_matrix(self, mat: Sequence[Sequence[int]]) -> "TorusElement":
        nums = self.nums
        return TorusElement.make(
            self.p, self.level, [sum(c * a for c, a in zip(row, nums)) for row in mat]
        )

    def order(self) -> int:
        return self.p**self.level

    def sort_key(self) -> tuple:
        return (self.level, self.nums)

    def to_json(self) -> list[str]:
        out = []
        for a in self.nums:
            f = Fraction(a, self.p**self.level)
            if f == 0:
                out.append("0")
            else:
                k = p_log(f.denominator, self.p)
                out.append(f"{f.numerator}/{self.p}^{k}")
        return out

    def __repr__(self) -> str:
        return "T(" + ", ".join(str(c) for c in self.coords()) + ")"


def _parse_coord(s, p: int) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    s = str(s).strip()
    if "/" not in s:
        return Fraction(int(s))
    num, den = s.split("/")
    den = den.strip()
    if "^" in den:
        base, exp = den.split("^")
        if int(base) != p:
            raise ValueError(f"denominator {den} is not a power of {p}")
        return Fraction(int(num), int(base) ** int(exp))
    return Fraction(int(num), int(den))


def element_order(t: TorusElement) -> int:
    """Smallest p^k with p^k * t = 0."""
    return t.order()


def torus_points(p: int, rank: int, level: int) -> Iterator[TorusElement]:
    """All points of the p^level-torsion subgroup (p^level)^rank of them."""
    mod = p**level
    if rank == 0:
        yield TorusElement.zero(p, 0)
        return
    idx = [0] * rank
    while True:
        yield TorusElement.make(p, level, idx)
        i = 0
        while i < rank:
            idx[i] += 1
            if idx[i] < mod:
                break
            idx[i] = 0
            i += 1
        if i == rank:
            return


@dataclass(frozen=True, slots=True)
class PAdicUnitApprox:
    """The coset zeta + p^N Z_p of a p-adic unit, stored as its residue mod p^N."""

    p: int
    precision: int
    residue: int

    def __post_init__(self) -> None:
        if self.precision < 1:
            raise ValueError("precision must be at least 1")
        r = self.residue % self.p**self.precision
        object.__setattr__(self, "residue", r)
        if r % self.p == 0:
            raise ValueError(f"{self.residue} is not a unit mod {self.p}")

    @staticmethod
    def one(p: int, precision: int) -> "PAdicUnitApprox":
        return PAdicUnitApprox(p, precision, 1)

    @property
    def modulus(self) -> int:
        return self.p**self.precision

    def _check(self, other: "PAdicUnitApprox") -> None:
        if self.p != other.p or self.precision != other.precision:
            raise PrecisionError(
                f"incompatible approximations (p={self.p}, N={self.precision}) vs (p={other.p}, N={other.precision})"
            )

    def __mul__(self, other: "PAdicUnitApprox") -> "PAdicUnitApprox":
        self._check(other)
        return PAdicUnitApprox(self.p, self.precision, self.residue * other.residue)

    def inverse(self) -> "PAdicUnitApprox":
        return PAdicUnitApprox(self.p, self.precision, pow(self.residue, -1, self.modulus))

    def __pow__(self, n: int) -> "PAdicUnitApprox":
        return PAdicUnitApprox(self.p, self.precision, pow(self.residue, n, self.modulus))

    def is_one(self) -> bool:
        return self.residue == 1

    def to_json(self) -> dict:
        return {"p": self.p, "precision": self.precision, "residue": self.residue}

    @staticmethod
    def from_json(d: dict) -> "PAdicUnitApprox":
        return PAdicUnitApprox(int(d["p"]), int(d["precision"]), int(d["residue"]))

    def __repr__(self) -> str:
        return f"{self.residue} (mod {self.p}^{self.precision})"


@dataclass(frozen=True)
class GammaMembership:
    """nu_p of a difference; ``at_least`` means the residues agree so only nu >= nu is known."""

    nu: int
    at_least: bool
    member: bool


def valuation_gamma(
    zeta: PAdicUnitApprox, m: int, other: PAdicUnitApprox | None = None
) -> GammaMembership:
    """Valuation of zeta - other (other defaults to 1) and membership of zeta in Gamma_m(p)."""
    if other is None:
        other = PAdicUnitApprox.one(zeta.p, zeta.precision)
    zeta._check(other)
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m >= zeta.precision:
        raise PrecisionError(f"cannot decide membership in Gamma_{m} at precision {zeta.precision}")
    diff = (zeta.residue - other.residue) % zeta.modulus
    v = valuation(diff, zeta.p)
    if v is None:
        return GammaMembership(zeta.precision, True, True)
    return GammaMembership(v, False, v >= m)


def nu_minus_one(zeta: PAdicUnitApprox) -> int:
    """nu_p(zeta - 1), with precision N standing in for 'at least N'."""
    v = valuation((zeta.residue - 1) % zeta.modulus, zeta.p)
    return zeta.precision if v is None else v


def power_map(t: TorusElement, zeta: PAdicUnitApprox) -> TorusElement:
    """t^zeta computed coordinatewise; well defined once p^N kills t."""
    if t.p != zeta.p:
        raise ValueError("prime mismatch")
    if t.level > zeta.precision:
        raise PrecisionError(
            f"precision {zeta.precision} cannot act on an element of order {t.p}^{t.level}"
        )
    return t.scale(zeta.residue)


def solve_root(t: TorusElement, m: int, unit: PAdicUnitApprox) -> TorusElement:
    """Canonical s with (p^m * unit) * s = t.

    The unit is divided out exactly, then the p^m-th root with the smallest
    nonnegative numerator in each coordinate is taken. The full solution set is
    this s plus the p^m-torsion subgroup.
    """
    if unit.p != t.p:
        raise ValueError("prime mismatch")
    if t.level > unit.precision:
        raise PrecisionError(
            f"unit known mod {t.p}^{unit.precision}; need precision {t.level} to divide"
        )
    s = t.scale(unit.inverse().residue)
    return TorusElement.make(t.p, s.level + m, s.nums)


def one_minus(zeta: PAdicUnitApprox) -> tuple[int, PAdicUnitApprox]:
    """Write 1 - zeta = p^m * u and return (m, u) with u known mod p^(N-m)."""
    d = (1 - zeta.residue) % zeta.modulus
    v = valuation(d, zeta.p)
    if v is None or v >= zeta.precision:
        raise PrecisionError(f"zeta = 1 at precision {zeta.precision}; cannot certify zeta != 1")
    prec = zeta.precision - v
    return v, PAdicUnitApprox(zeta.p, prec, (d // zeta.p**v) % zeta.p**prec)
