"""Cyclic number fields of odd prime degree p and conductor n.

A field is admissible when n = p1*...*ps (p unramified, s >= 1) or
n = p^2*p1*...*ps (p ramified, s >= 0) with distinct primes pi = 1 mod p.
Elements are integer (or p-denominator rational) coordinate vectors over
the integral basis; all traces are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from .errors import (
    BadConductor,
    EvenOrTwo,
    FieldMismatch,
    MissingDerivedData,
    NotPrime,
)

Rat = Union[int, Fraction]

CLOSED_FORM = "closed-form"
DERIVED_NUMERIC = "derived-numeric"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization by trial division, ascending."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


@dataclass(frozen=True)
class FieldSpec:
    """Validated degree/conductor pair with its ramification data."""

    p: int
    n: int
    ramified: bool
    primes: tuple[int, ...]  # distinct primes pi != p, ascending
    s: int
    u: Optional[int]  # n / p^2 in the ramified case, else None

    def discriminant(self) -> int:
        return self.n ** (self.p - 1)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "ramified": self.ramified,
            "u": self.u,
            "s": self.s,
            "primes": list(self.primes),
        }


def validate_field(p: int, n: int) -> FieldSpec:
    """Check (p, n) admissibility and return the populated FieldSpec.

    Raises NotPrime / EvenOrTwo for a bad degree and BadConductor with the
    first failing shape rule for a bad conductor.
    """
    if not isinstance(p, int) or not isinstance(n, int):
        raise TypeError("p and n must be integers")
    if p < 2 or not is_prime(p):
        raise NotPrime(p)
    if p == 2:
        raise EvenOrTwo(p)
    if n < 2:
        raise BadConductor(n, "conductor must be at least 2")

    factors = factorize(n)
    for q, e in factors:
        if q != p and q % p != 1:
            raise BadConductor(n, f"factor {q} is not congruent to 1 mod {p}")
    for q, e in factors:
        if q != p and e > 1:
            raise BadConductor(n, f"repeated factor {q} (exponent {e})")
    vp = next((e for q, e in factors if q == p), 0)
    if vp not in (0, 2):
        raise BadConductor(
            n, f"valuation of {p} in {n} is {vp}, must be 0 or exactly 2")

    primes = tuple(q for q, _ in factors if q != p)
    ramified = vp == 2
    if not ramified and not primes:
        raise BadConductor(n, "unramified conductor needs at least one prime factor")
    u = n // (p * p) if ramified else None
    return FieldSpec(p=p, n=n, ramified=ramified, primes=primes,
                     s=len(primes), u=u)


@dataclass(frozen=True)
class Element:
    """Field element as exact coordinates over the integral basis.

    Ramified basis: (1, c(t), c^2(t), ..., c^{p-1}(t)) where t is the
    period generator and c the Galois generator; the dependent element t
    itself is always stored as (0, -1, ..., -1).  Unramified basis:
    (t, c(t), ..., c^{p-1}(t)).
    """

    field: FieldSpec
    coords: tuple[Rat, ...]

    def __post_init__(self):
        if len(self.coords) != self.field.p:
            raise ValueError(
                f"need exactly {self.field.p} coordinates, got {len(self.coords)}")

    def is_integral(self) -> bool:
        return all(Fraction(c).denominator == 1 for c in self.coords)

    def is_rational_integer(self) -> bool:
        """True iff the element lies in Z."""
        if self.field.ramified:
            return all(c == 0 for c in self.coords[1:])
        return len(set(self.coords)) == 1

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __add__(self, other: "Element") -> "Element":
        _same_field(self, other)
        return Element(self.field,
                       tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Element") -> "Element":
        _same_field(self, other)
        return Element(self.field,
                       tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Element":
        return Element(self.field, tuple(-a for a in self.coords))

    def __rmul__(self, k: Rat) -> "Element":
        return Element(self.field, tuple(k * a for a in self.coords))

    def galois_shift(self) -> "Element":
        """Apply the Galois generator c to the element, in coordinates."""
        p = self.field.p
        c = self.coords
        if not self.field.ramified:
            return Element(self.field, (c[-1],) + c[:-1])
        # c(t^i) indices shift up by one; the overflow lands on t, which
        # redistributes as -(sum of all basis conjugates).
        last = c[-1]
        new = [c[0]] + [Fraction(0)] * (p - 1)
        for j in range(2, p):
            new[j] = c[j - 1] - last
        new[1] = -last
        return Element(self.field, tuple(_normalize(x) for x in new))


def _normalize(x: Rat) -> Rat:
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def _same_field(x: Element, y: Element):
    if x.field != y.field:
        raise FieldMismatch(f"elements live in different fields: "
                            f"{x.field.to_dict()} vs {y.field.to_dict()}")


def basis_element(field: FieldSpec, i: int) -> Element:
    coords = [0] * field.p
    coords[i] = 1
    return Element(field, tuple(coords))


def one(field: FieldSpec) -> Element:
    """The rational unit 1 as an element."""
    if field.ramified:
        return basis_element(field, 0)
    # 1 = (-1)^s * (t + c(t) + ... + c^{p-1}(t))
    v = (-1) ** field.s
    return Element(field, tuple([v] * field.p))

def period_element(field: FieldSpec) -> Element:
    """The period generator t in integral-basis coordinates."""
    if not field.ramified:
        return basis_element(field, 0)
    return Element(field, tuple([0] + [-1] * (field.p - 1)))


@dataclass(frozen=True)
class TraceTable:
    """Exact traces of integral-basis products, with provenance flags."""

    field: FieldSpec
    tr_one: int
    tr_theta: int        # trace of any conjugate of the period generator
    tr_pair_diag: int    # trace of t^2
    tr_pair_off: int     # trace of t * c^k(t), k != 0 mod p
    pair_provenance: str = CLOSED_FORM

    def to_dict(self) -> dict:
        base = CLOSED_FORM
        return {
            "tr_one": {"value": self.tr_one, "provenance": base},
            "tr_theta": {"value": self.tr_theta, "provenance": base},
            "tr_pair_diag": {"value": self.tr_pair_diag,
                             "provenance": self.pair_provenance},
            "tr_pair_off": {"value": self.tr_pair_off,
                            "provenance": self.pair_provenance},
        }


@lru_cache(maxsize=None)
def trace_table(field: FieldSpec, derive: bool = True) -> TraceTable:
    """Exact trace table of the field.

    Ramified entries all come from closed forms.  Unramified pair traces
    are derived from the Gaussian-period engine (integrality-checked and
    invariant across character choices); pass derive=False to forbid that
    and get MissingDerivedData instead.
    """
    p, n = field.p, field.n
    if field.ramified:
        return TraceTable(field, tr_one=p, tr_theta=0,
                          tr_pair_diag=n * (p - 1) // p,
                          tr_pair_off=-(n // p))
    if not derive:
        raise MissingDerivedData(
            "unramified pair traces need the periods engine (derive=True)")
    from . import periods  # deferred: periods depends on this module

    diag, off = periods.derived_pair_traces(field)
    return TraceTable(field, tr_one=p, tr_theta=(-1) ** field.s,
                      tr_pair_diag=diag, tr_pair_off=off,
                      pair_provenance=DERIVED_NUMERIC)


@lru_cache(maxsize=None)
def integral_basis_gram(field: FieldSpec) -> tuple[tuple[int, ...], ...]:
    """Exact Gram matrix of the integral basis under the trace form."""
    t = trace_table(field)
    p = field.p
    g = [[0] * p for _ in range(p)]
    if field.ramified:
        g[0][0] = t.tr_one
        for i in range(1, p):
            for j in range(1, p):
                g[i][j] = t.tr_pair_diag if i == j else t.tr_pair_off
    else:
        for i in range(p):
            for j in range(p):
                g[i][j] = t.tr_pair_diag if i == j else t.tr_pair_off
    return tuple(tuple(row) for row in g)


def trace_linear(x: Element) -> Rat:
    """Trace of x, exact."""
    f = x.field
    if f.ramified:
        return _normalize(f.p * x.coords[0])
    return _normalize((-1) ** f.s * sum(x.coords))


def trace_bilinear(x: Element, y: Element) -> Rat:
    """Trace of the product x*y, expanded bilinearly over the trace table.

    Never forms the product element; symmetric in its arguments.
    """
    _same_field(x, y)
    g = integral_basis_gram(x.field)
    p = x.field.p
    acc = 0
    for i in range(p):
        xi = x.coords[i]
        if xi == 0:
            continue
        row = g[i]
        acc += xi * sum(y.coords[j] * row[j] for j in range(p) if y.coords[j] != 0)
    return _normalize(acc)
