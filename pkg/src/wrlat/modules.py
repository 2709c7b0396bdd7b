"""Submodule families of the ring of integers and their lattice data.

Each family is realized as an explicit integer coordinate matrix over the
integral basis (rows = basis vectors).  Gram matrices, indices, ideal
tests, literal trace-form expansions, closed-form minima and center
densities are all exact; the specialized closed-form density is evaluated
for comparison only and disagreements are flagged, never corrected.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from . import intlin
from .errors import (
    BadIndex,
    BadParams,
    FieldMismatch,
    NotApplicable,
    NotFound,
    PrecisionLoss,
    UnsupportedFamily,
    VerificationFailed,
    WrongCase,
)
from .fields import (
    Element,
    FieldSpec,
    basis_element,
    integral_basis_gram,
    trace_bilinear,
    trace_linear,
)

# family labels
OK = "ok"
MM_UNRAMIFIED = "mm-unramified"
MM_RAMIFIED = "mm-ramified"
MMC = "mmc"
ORBIT = "orbit"
BJ = "bj"
B_RAMIFIED = "b-ramified"
CUSTOM = "custom"


def _ensure(cond: bool, msg: str):
    if not cond:
        raise VerificationFailed(msg)


@dataclass(frozen=True)
class ModuleBasis:
    """A rank-p submodule given by basis rows over the integral basis."""

    field: FieldSpec
    label: str
    params: tuple[tuple[str, int], ...]
    coords: tuple[tuple[int, ...], ...]

    def param(self, key: str, default=None):
        for k, v in self.params:
            if k == key:
                return v
        return default

    def det(self) -> int:
        return _basis_det(self)

    def index(self) -> int:
        """Index in the full ring, computed as |det| of the coordinates."""
        return abs(self.det())

    def row_elements(self) -> list[Element]:
        return [Element(self.field, row) for row in self.coords]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "params": {k: v for k, v in self.params},
            "rows": [[str(c) for c in row] for row in self.coords],
            "det": str(self.det()),
            "index": str(self.index()),
        }


@lru_cache(maxsize=None)
def _basis_det(basis: ModuleBasis) -> int:
    return intlin.bareiss_det(basis.coords)


@dataclass(frozen=True)
class GramMatrix:
    """Exact symmetric positive definite Gram of a module basis."""

    entries: tuple[tuple[int, ...], ...]
    basis: ModuleBasis

    def det(self) -> int:
        return _gram_det(self)

    def dim(self) -> int:
        return len(self.entries)

    def quadratic_form(self, x) -> int:
        n = len(self.entries)
        return sum(x[i] * self.entries[i][j] * x[j]
                   for i in range(n) for j in range(n))

    def to_dict(self) -> dict:
        return {
            "entries": [[str(c) for c in row] for row in self.entries],
            "det": str(self.det()),
        }

    def to_csv(self) -> str:
        return "\n".join(",".join(str(c) for c in row)
                         for row in self.entries) + "\n"


@lru_cache(maxsize=None)
def _gram_det(gram: GramMatrix) -> int:
    return intlin.bareiss_det(gram.entries)


# ------------------------------------------------------------ constructors

def _finish(field, label, params, rows, want_det: Optional[int]) -> ModuleBasis:
    basis = ModuleBasis(field=field, label=label, params=tuple(params),
                        coords=tuple(tuple(int(c) for c in row) for row in rows))
    d = basis.det()
    _ensure(d != 0, f"{label} basis is rank deficient")
    if want_det is not None:
        _ensure(abs(d) == want_det,
                f"{label} determinant {abs(d)} != expected {want_det}")
    pred = _membership_functional(basis)
    if pred is not None:
        for row in basis.coords:
            _ensure(pred(row) == 0,
                    f"{label} basis row {row} fails its membership predicate")
    return basis


def build_ok(field: FieldSpec) -> ModuleBasis:
    """The full ring of integers (identity coordinate matrix)."""
    p = field.p
    rows = [[1 if i == j else 0 for j in range(p)] for i in range(p)]
    return _finish(field, OK, (), rows, 1)


def build_mm_unramified(field: FieldSpec, m: int) -> ModuleBasis:
    """Trace-divisibility module {x : Tr(x) = 0 mod m}, unramified case.

    Basis rows: m*t and the differences c^i(t) - t; the coordinate sum of
    every member vanishes mod m.
    """
    if field.ramified:
        raise WrongCase("unramified constructor called on a ramified field")
    if m < 1:
        raise BadParams(f"m must be positive, got {m}")
    p = field.p
    rows = [[m] + [0] * (p - 1)]
    for i in range(1, p):
        row = [-1] + [0] * (p - 1)
        row[i] = 1
        rows.append(row)
    return _finish(field, MM_UNRAMIFIED, (("m", m),), rows, m)


def build_mmc(field: FieldSpec, m: int, c: int) -> ModuleBasis:
    """Congruence module {a0 + c*(a1+...+a_{p-1}) = 0 mod m}, ramified case."""
    if not field.ramified:
        raise WrongCase("congruence-family constructor needs a ramified field")
    if m < 1:
        raise BadParams(f"m must be positive, got {m}")
    if not 0 <= c < m:
        raise BadParams(f"need 0 <= c < m, got c={c}, m={m}")
    p = field.p
    rows = [[m] + [0] * (p - 1)]
    for i in range(1, p):
        row = [c] + [0] * (p - 1)
        row[i] = -1
        rows.append(row)
    return _finish(field, MMC, (("m", m), ("c", c)), rows, m)


def build_mm_ramified(field: FieldSpec, m: int) -> ModuleBasis:
    """Trace-divisibility module {x : Tr(x) = 0 mod m}, ramified case.

    When p | m the first basis vector is the rational integer m/p, and the
    determinant comes out m/p rather than m; the index is always recorded
    from the determinant.
    """
    if not field.ramified:
        raise WrongCase("ramified constructor called on an unramified field")
    if m < 2:
        raise BadParams(f"m must be at least 2, got {m}")
    p = field.p
    p_divides = (m % p == 0)
    rows = [[m // p if p_divides else m] + [0] * (p - 1)]
    for i in range(1, p):
        row = [m] + [0] * (p - 1)
        row[i] = -1
        rows.append(row)
    want = m // p if p_divides else m
    return _finish(field, MM_RAMIFIED,
                   (("m", m), ("p_divides_m", int(p_divides))), rows, want)


def build_orbit(field: FieldSpec, m: int) -> ModuleBasis:
    """Galois-orbit module spanned by {m - c^i(t) : i = 0..p-1} (ramified,
    p coprime to m).  The dependent generator m - t is normalized through
    t = -(sum of the other conjugates); the determinant is p*m."""
    if not field.ramified:
        raise WrongCase("orbit constructor needs a ramified field")
    if m < 1:
        raise BadParams(f"m must be positive, got {m}")
    if m % field.p == 0:
        raise BadParams(f"orbit family needs p coprime to m, got m={m}")
    p = field.p
    rows = [[m] + [1] * (p - 1)]
    for i in range(1, p):
        row = [m] + [0] * (p - 1)
        row[i] = -1
        rows.append(row)
    return _finish(field, ORBIT, (("m", m),), rows, p * m)


def build_bj_unramified(field: FieldSpec, j: int) -> ModuleBasis:
    """The prime module above the j-th conductor prime (1-based)."""
    if field.ramified:
        raise WrongCase("prime-above-pj constructor needs an unramified field")
    if not 1 <= j <= field.s:
        raise BadIndex(f"j must lie in 1..{field.s}, got {j}")
    pj = field.primes[j - 1]
    base = build_mm_unramified(field, pj)
    return ModuleBasis(field=field, label=BJ,
                       params=(("j", j), ("m", pj)), coords=base.coords)


def build_b_ramified(field: FieldSpec) -> ModuleBasis:
    """The unique prime module above p in the ramified case: the
    congruence module with m = p and the residue found by find_ell."""
    if not field.ramified:
        raise WrongCase("prime-above-p constructor needs a ramified field")
    ell = find_ell(field)
    base = build_mmc(field, field.p, ell)
    return ModuleBasis(field=field, label=B_RAMIFIED,
                       params=(("m", field.p), ("c", ell)), coords=base.coords)


def build_custom(field: FieldSpec, rows) -> ModuleBasis:
    basis = ModuleBasis(field=field, label=CUSTOM, params=(),
                        coords=tuple(tuple(int(c) for c in row) for row in rows))
    _ensure(len(basis.coords) == field.p, "custom basis needs p rows")
    _ensure(basis.det() != 0, "custom basis is rank deficient")
    return basis


# ------------------------------------------------------------ predicates

def _membership_functional(basis: ModuleBasis):
    """Residue functional on coordinates: zero iff the vector satisfies
    the family's congruence.  None for span-only families."""
    label = basis.label
    if label == OK:
        return lambda row: 0
    if label in (MM_UNRAMIFIED, BJ):
        m = basis.param("m")
        return lambda row: sum(row) % m
    if label == MM_RAMIFIED:
        m = basis.param("m")
        p = basis.field.p
        return lambda row: (p * row[0]) % m
    if label in (MMC, B_RAMIFIED):
        m = basis.param("m")
        c = basis.param("c")
        return lambda row: (row[0] + c * sum(row[1:])) % m
    return None


def membership(x: Element, basis: ModuleBasis) -> bool:
    """Exact span membership: is x an integer combination of the rows?"""
    if x.field != basis.field:
        raise FieldMismatch("element and basis belong to different fields")
    if not x.is_integral():
        return False
    return intlin.in_row_span(basis.coords, x.coords)


def same_span(a: ModuleBasis, b: ModuleBasis) -> bool:
    return intlin.hnf(a.coords) == intlin.hnf(b.coords)


def quotient_diagonal(basis: ModuleBasis) -> tuple[int, ...]:
    """Diagonal of the Hermite form: elementary divisors of the quotient
    as seen by the echelon pivots."""
    return intlin.hnf_diagonal(basis.coords)


# ------------------------------------------------------------ gram

@lru_cache(maxsize=None)
def gram(basis: ModuleBasis) -> GramMatrix:
    """Exact Gram matrix of the basis rows under the trace form.

    Checks the volume identity det(Gram) = det(coords)^2 * disc exactly.
    """
    rows = basis.row_elements()
    p = basis.field.p
    entries = [[0] * len(rows) for _ in rows]
    for i in range(len(rows)):
        for j in range(i, len(rows)):
            v = trace_bilinear(rows[i], rows[j])
            _ensure(isinstance(v, int) or v.denominator == 1,
                    "gram entry is not an integer")
            entries[i][j] = entries[j][i] = int(v)
    g = GramMatrix(entries=tuple(tuple(r) for r in entries), basis=basis)
    _ensure(g.det() == basis.det() ** 2 * basis.field.discriminant(),
            "gram determinant violates the volume identity")
    _ensure(intlin.leading_minors_positive(g.entries),
            "gram matrix is not positive definite")
    return g


# ------------------------------------------------------------ ideal tests

def ideal_test(basis: ModuleBasis) -> bool:
    """Decide closure under multiplication by the integral basis.

    Trace-defined families reduce to a bilinear-trace congruence on the
    products.  The congruence families need actual product coordinates,
    which come from the validated structure constants of the field.
    """
    label = basis.label
    field = basis.field
    p = field.p
    if label == OK:
        return True
    if label in (MM_UNRAMIFIED, MM_RAMIFIED, BJ):
        m = basis.param("m")
        for b in basis.row_elements():
            for e in range(p):
                if trace_bilinear(b, basis_element(field, e)) % m != 0:
                    return False
        return True
    if label in (MMC, B_RAMIFIED):
        from . import periods

        m = basis.param("m")
        c = basis.param("c")
        for row in basis.coords:
            for e in range(p):
                unit = [0] * p
                unit[e] = 1
                prod = periods.product_coords(field, row, unit)
                if (prod[0] + c * sum(prod[1:])) % m != 0:
                    return False
        return True
    raise UnsupportedFamily(f"no membership predicate for family {label!r}")


@lru_cache(maxsize=None)
def find_ell(field: FieldSpec) -> int:
    """The unique residue l with the prime above p equal to the (p, l)
    congruence module.

    Found by scanning c = 0..p-1 for the unique c whose module passes the
    multiplicative closure test; cross-checked against divisibility of
    the exact norm N(t - c) by p.
    """
    if not field.ramified:
        raise WrongCase("the prime above p exists only in the ramified case")
    from . import periods

    p = field.p
    passers = [c for c in range(p) if ideal_test(build_mmc(field, p, c))]
    if len(passers) != 1:
        raise NotFound(
            f"expected exactly one closed congruence module, got c in {passers}")
    norm_hits = [c for c in range(p)
                 if periods.norm_of_t_minus(field, c) % p == 0]
    _ensure(norm_hits == passers,
            f"closure scan {passers} disagrees with norm test {norm_hits}")
    return passers[0]


def lambda_generator(field: FieldSpec) -> Element:
    """Generator of the prime above p when the conductor is exactly p^2.

    Computed numerically as the norm-style product of (1 - zeta^(r^(jp)))
    over j, solved back to integral coordinates, then verified: clean
    rounding, membership in the (p, l) congruence module, and absolute
    norm p.
    """
    if not (field.ramified and field.s == 0):
        raise WrongCase("generator construction needs conductor exactly p^2")
    from . import periods

    p, n = field.p, field.n
    r = periods.smallest_primitive_root(n)
    choice = periods.default_choice(field)
    g = periods.coset_generator(choice)
    exponents = [pow(r, j * p, n) for j in range(1, p)]

    conj = []
    for i in range(p):
        gi = pow(g, i, n)
        val = complex(1.0, 0.0)
        for ex in exponents:
            a = ex * gi % n
            val *= 1.0 - cmath.exp(2j * math.pi * a / n)
        if abs(val.imag) > 1e-9:
            raise PrecisionLoss(
                f"conjugate {i} of the generator has imaginary part {val.imag:.3e}")
        conj.append(val.real)

    coords = periods.solve_integer_coords(field, conj, choice)
    lam = Element(field, coords)

    ell = find_ell(field)
    if (coords[0] + ell * sum(coords[1:])) % p != 0:
        raise VerificationFailed(
            f"generator {coords} is not in the (p, {ell}) congruence module")
    norm_abs = abs(math.prod(conj))
    if abs(norm_abs - p) > 1e-6 * p:
        raise VerificationFailed(
            f"generator norm {norm_abs!r} is not p = {p}")
    return lam


# ------------------------------------------------- literal trace forms

def _check_coeffs(field: FieldSpec, a):
    if len(a) != field.p:
        raise BadParams(f"coefficient vector needs length {field.p}")


def trace_sq_mmc(field: FieldSpec, m: int, c: int, a) -> int:
    """Literal trace of alpha^2 for alpha given by coefficients over the
    (m, c) congruence basis."""
    if not field.ramified:
        raise WrongCase("congruence trace form needs a ramified field")
    _check_coeffs(field, a)
    p, u = field.p, field.u
    s = sum(a[1:])
    sq = sum(x * x for x in a[1:])
    return p * ((a[0] * m + c * s) ** 2 + u * (p * sq - s * s))


def trace_sq_mm_pdiv(field: FieldSpec, m: int, a) -> int:
    """Literal trace form over the {m/p, m - c^i(t)} basis (p | m)."""
    if not field.ramified:
        raise WrongCase("ramified trace form on an unramified field")
    if m % field.p != 0:
        raise BadParams(f"this form needs p | m, got m={m}")
    _check_coeffs(field, a)
    p, u = field.p, field.u
    s = sum(a[1:])
    sq = sum(x * x for x in a[1:])
    return p * ((a[0] * (m // p) + m * s) ** 2 + u * (p * sq - s * s))


def trace_sq_mm_pcoprime(field: FieldSpec, m: int, a) -> int:
    """Literal trace form over the {m, m - c^i(t)} basis (p coprime to m)."""
    if not field.ramified:
        raise WrongCase("ramified trace form on an unramified field")
    if m % field.p == 0:
        raise BadParams(f"this form needs p coprime to m, got m={m}")
    _check_coeffs(field, a)
    p, u = field.p, field.u
    s = sum(a[1:])
    sq = sum(x * x for x in a[1:])
    return p * (m * m * (a[0] + s) ** 2 + u * (p * sq - s * s))


def trace_sq_orbit(field: FieldSpec, m: int, a) -> int:
    """Literal trace form over the orbit basis {m - c^i(t) : i = 0..p-1}."""
    if not field.ramified:
        raise WrongCase("orbit trace form needs a ramified field")
    _check_coeffs(field, a)
    p, u = field.p, field.u
    s = sum(a)
    sq = sum(x * x for x in a)
    return p * (u * p * sq + (m * m - u) * s * s)


# ------------------------------------------------- closed forms

def closed_form_minimum(basis: ModuleBasis) -> int:
    """Published closed-form minimum for the ramified families.

    Evaluated literally; whether it matches the true (enumerated) minimum
    is for the verification layer to decide.
    """
    field = basis.field
    p, u = field.p, field.u
    if basis.label == MM_RAMIFIED:
        m = basis.param("m")
        if m % p == 0:
            return min(m * m // p, u * p * (p - 1))
        return min(p * m * m, u * p * (p - 1))
    if basis.label == ORBIT:
        m = basis.param("m")
        return p * (u * (p - 1) + m * m)
    raise UnsupportedFamily(
        f"no closed-form minimum for family {basis.label!r}")


def wr_window_unramified(field: FieldSpec, m: int) -> bool:
    """Well-roundedness window for the unramified trace modules.

    Only defined for m = 1 mod p; the comparison runs on m^2 so no
    radicals are needed.
    """
    if field.ramified:
        raise WrongCase("the window applies to unramified fields")
    if m % field.p != 1:
        raise NotApplicable(f"window requires m = 1 mod p, got m={m}")
    n, p = field.n, field.p
    return m * m * (p + 1) >= n and m * m <= n * (p + 1)


# ------------------------------------------------- center density

_PAPER_DENSITY_FAMILIES = (MM_RAMIFIED, ORBIT)


@dataclass(frozen=True)
class DensityReport:
    """Exact and closed-form center density of one lattice."""

    minimum: int
    volume_sq: int          # det(Gram)
    index: int              # computed as |det(coords)|
    index_claimed: Optional[int]
    index_flag: bool
    delta_sq: Fraction      # exact delta^2 = min^p / (4^p det(Gram))
    delta_computed: float
    delta_paper: Optional[float]
    discrepancy_flag: bool

    def to_dict(self) -> dict:
        return {
            "minimum": str(self.minimum),
            "volume_sq": str(self.volume_sq),
            "index": str(self.index),
            "index_claimed": None if self.index_claimed is None
            else str(self.index_claimed),
            "index_flag": self.index_flag,
            "delta_sq": {"num": str(self.delta_sq.numerator),
                         "den": str(self.delta_sq.denominator)},
            "delta_computed": self.delta_computed,
            "delta_paper": self.delta_paper,
            "discrepancy_flag": self.discrepancy_flag,
        }


def center_density(basis: ModuleBasis, minimum: int) -> DensityReport:
    """Center density from the exact Gram determinant.

    delta^2 is kept as an exact rational; the specialized closed-form
    value (which divides by m) is evaluated for the families that have
    one and compared within 1e-12.
    """
    field = basis.field
    p, n = field.p, field.n
    g = gram(basis)
    det_g = g.det()
    delta_sq = Fraction(minimum ** p, 4 ** p * det_g)
    _ensure(delta_sq * 4 ** p * det_g == minimum ** p,
            "exact density identity failed")
    delta_c = math.sqrt(delta_sq.numerator / delta_sq.denominator)

    index = basis.index()
    claimed = basis.param("m") if basis.label in (
        MM_UNRAMIFIED, MM_RAMIFIED, MMC, ORBIT, BJ, B_RAMIFIED) else (
        1 if basis.label == OK else None)
    index_flag = claimed is not None and claimed != index

    delta_p = None
    if basis.label in _PAPER_DENSITY_FAMILIES:
        m = basis.param("m")
        cf = closed_form_minimum(basis)
        delta_p = math.sqrt(float(cf) ** p) / (2 ** p * math.sqrt(float(n) ** (p - 1)) * m)
    discrepancy = delta_p is not None and abs(delta_p - delta_c) > 1e-12
    return DensityReport(minimum=minimum, volume_sq=det_g, index=index,
                         index_claimed=claimed, index_flag=index_flag,
                         delta_sq=delta_sq, delta_computed=delta_c,
                         delta_paper=delta_p, discrepancy_flag=discrepancy)
