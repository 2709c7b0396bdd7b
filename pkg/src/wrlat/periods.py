"""Gaussian periods, degree-p characters and the canonical embedding.

The real conjugates of the period generator t are coset sums of n-th
roots of unity.  Everything numeric runs in IEEE doubles with Kahan
summation by default; pass bits > 53 for an mpmath-backed high-precision
mode.  All integer results obtained by rounding are residual-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import mpmath

from .errors import InconsistentTraces, PrecisionLoss
from .fields import FieldSpec, Element, integral_basis_gram, trace_bilinear

TOL_IMAG = 1e-9
TOL_ROUND = 1e-6

F64_BITS = 53


def kahan_sum(values) -> float:
    """Compensated summation in a fixed iteration order."""
    total = 0.0
    comp = 0.0
    for v in values:
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def _is_primitive_root(g: int, q: int, order: int, order_factors) -> bool:
    if math.gcd(g, q) != 1:
        return False
    return all(pow(g, order // r, q) != 1 for r in order_factors)


def smallest_primitive_root(q: int) -> int:
    """Smallest primitive root modulo q, for q an odd prime or prime square."""
    from .fields import factorize

    if q % 2 == 0:
        raise ValueError("only odd moduli supported")
    fac = factorize(q)
    if len(fac) != 1 or fac[0][1] > 2:
        raise ValueError(f"{q} is not a prime or prime square")
    base = fac[0][0]
    phi = q - 1 if fac[0][1] == 1 else base * (base - 1)
    facs = [r for r, _ in factorize(phi)]
    for g in range(2, q):
        if _is_primitive_root(g, q, phi, facs):
            return g
    raise ValueError(f"no primitive root mod {q}")


@lru_cache(maxsize=None)
def _is_prime_cached(q: int) -> bool:
    from .fields import is_prime

    return is_prime(q)


@dataclass(frozen=True)
class CharacterChoice:
    """A degree-p character of the units mod n, given by its kernel.

    generators[i] is a unit generating the i-th cyclic component (lifted
    through the CRT); exponent_vector[i] in 0..p-1 is the character value
    on it, additively.  kernel_H lists the residues where the character
    vanishes; the fixed field of kernel_H is the working field.
    """

    field: FieldSpec
    generators: tuple[int, ...]
    exponent_vector: tuple[int, ...]
    kernel_H: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "generators": list(self.generators),
            "exponent_vector": list(self.exponent_vector),
            "kernel_size": len(self.kernel_H),
            "kernel_head": list(self.kernel_H[:12]),
        }


@lru_cache(maxsize=None)
def _unit_group_context(field: FieldSpec):
    """Component moduli, lifted generators and dlog tables for (Z/nZ)*."""
    p, n = field.p, field.n
    moduli = ([p * p] if field.ramified else []) + list(field.primes)
    gens_local = [smallest_primitive_root(q) for q in moduli]
    # CRT lift: generator g_i == local root mod q_i, == 1 elsewhere
    gens = []
    for i, q in enumerate(moduli):
        rest = n // q
        if rest == 1:
            gens.append(gens_local[i] % n)
            continue
        inv = pow(rest, -1, q)
        g = (1 + rest * ((gens_local[i] - 1) * inv % q)) % n
        gens.append(g)
    # dlog tables per component
    dlogs = []
    for q, g in zip(moduli, gens_local):
        phi = q - 1 if _is_prime_cached(q) else p * (p - 1)
        table = {}
        x = 1
        for k in range(phi):
            table[x] = k
            x = x * g % q
        dlogs.append(table)
    units = tuple(a for a in range(1, n) if math.gcd(a, n) == 1)
    return moduli, tuple(gens), tuple(dlogs), units


def _char_value(a: int, field: FieldSpec, exponents, ctx) -> int:
    moduli, _, dlogs, _ = ctx
    p = field.p
    total = 0
    for q, table, e in zip(moduli, dlogs, exponents):
        if e:
            total += e * table[a % q]
    return total % p


@lru_cache(maxsize=None)
def enumerate_characters(field: FieldSpec) -> tuple[CharacterChoice, ...]:
    """All index-p kernels with conductor exactly n, deterministically ordered.

    Kernels are enumerated through exponent vectors on the component
    generators (first nonzero exponent scaled to 1, so each subgroup
    appears once), then filtered by conductor exactness: the kernel must
    not contain the reduction kernel mod n/q for any prime q | n.
    """
    import itertools

    p, n = field.p, field.n
    ctx = _unit_group_context(field)
    moduli, gens, dlogs, units = ctx
    k = len(moduli)
    n_prime_factors = ([field.p] if field.ramified else []) + list(field.primes)

    found = []
    for exps in itertools.product(range(p), repeat=k):
        first = next((e for e in exps if e), None)
        if first != 1:
            continue
        kernel = tuple(a for a in units
                       if _char_value(a, field, exps, ctx) == 0)
        assert len(units) == p * len(kernel), "kernel index must be exactly p"
        assert (n - 1) in kernel, "-1 must fix the field (totally real)"
        if not _conductor_exact(field, kernel, n_prime_factors, units):
            continue
        found.append(CharacterChoice(field=field, generators=gens,
                                     exponent_vector=exps, kernel_H=kernel))
    found.sort(key=lambda c: c.kernel_H)
    return tuple(found)


def _conductor_exact(field: FieldSpec, kernel, n_prime_factors, units) -> bool:
    n = field.n
    kset = set(kernel)
    for q in n_prime_factors:
        d = n // q
        if d == 1:
            # reduction to the trivial group: kernel would have to be all units
            if len(kset) == len(units):
                return False
            continue
        reduction_kernel = (a for a in units if a % d == 1)
        if all(a in kset for a in reduction_kernel):
            return False
    return True


def default_choice(field: FieldSpec, index: int = 0) -> CharacterChoice:
    choices = enumerate_characters(field)
    if not 0 <= index < len(choices):
        raise IndexError(
            f"character choice {index} out of range (field has {len(choices)})")
    return choices[index]


# --------------------------------------------------------------- periods

def coset_generator(choice: CharacterChoice) -> int:
    """Smallest positive residue generating the quotient by the kernel."""
    kset = set(choice.kernel_H)
    _, _, _, units = _unit_group_context(choice.field)
    for a in units:
        if a not in kset:
            return a
    raise AssertionError("kernel cannot be the full unit group")


@lru_cache(maxsize=None)
def _cosets(choice: CharacterChoice) -> tuple[tuple[int, ...], ...]:
    n = choice.field.n
    g = coset_generator(choice)
    out = []
    cur = 1
    for _ in range(choice.field.p):
        out.append(tuple(sorted(cur * h % n for h in choice.kernel_H)))
        cur = cur * g % n
    return tuple(out)


@lru_cache(maxsize=None)
def gaussian_periods(choice: CharacterChoice, bits: int = F64_BITS) -> tuple:
    """The p real conjugates of the period generator, eta_0 = t first.

    eta_i sums cos(2*pi*a/n) over the i-th coset in a fixed order; the
    imaginary residuals (sine sums) must stay below tolerance.
    """
    n = choice.field.n
    cosets = _cosets(choice)
    if bits <= F64_BITS:
        two_pi = 2.0 * math.pi
        etas = []
        for cos_set in cosets:
            re = kahan_sum(math.cos(two_pi * a / n) for a in cos_set)
            im = kahan_sum(math.sin(two_pi * a / n) for a in cos_set)
            if abs(im) > TOL_IMAG:
                raise PrecisionLoss(
                    f"imaginary residual {im:.3e} exceeds {TOL_IMAG} for n={n}")
            etas.append(re)
        return tuple(etas)
    with mpmath.workprec(bits):
        two_pi = 2 * mpmath.pi
        etas = []
        for cos_set in cosets:
            re = mpmath.fsum(mpmath.cos(two_pi * a / n) for a in cos_set)
            im = mpmath.fsum(mpmath.sin(two_pi * a / n) for a in cos_set)
            if abs(im) > TOL_IMAG:
                raise PrecisionLoss(
                    f"imaginary residual {float(im):.3e} exceeds {TOL_IMAG}")
            etas.append(re)
        return tuple(etas)


@dataclass(frozen=True)
class EmbeddingMatrix:
    """p x p matrix of real conjugates of the integral basis, row per
    basis element, column per embedding."""

    field: FieldSpec
    choice: CharacterChoice
    entries: tuple[tuple, ...]
    precision_bits: int

    def det_abs(self) -> float:
        return abs(_det_float([list(r) for r in self.entries]))

    def to_csv(self) -> str:
        lines = []
        for row in self.entries:
            lines.append(",".join(f"{float(x):.17g}" for x in row))
        return "\n".join(lines) + "\n"


def _det_float(m):
    n = len(m)
    det = 1.0 if not m or not isinstance(m[0][0], mpmath.mpf) else mpmath.mpf(1)
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(m[r][c]))
        if m[piv][c] == 0:
            return 0.0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            for k in range(c, n):
                m[r][k] -= f * m[c][k]
    return det


def _solve_float(matrix, rhs):
    """Solve matrix * x = rhs with partial pivoting (float or mpf)."""
    n = len(matrix)
    m = [list(matrix[i]) + [rhs[i]] for i in range(n)]
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(m[r][c]))
        if m[piv][c] == 0:
            raise ZeroDivisionError("singular system")
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            for k in range(c, n + 1):
                m[r][k] -= f * m[c][k]
    x = [0] * n
    for i in range(n - 1, -1, -1):
        acc = m[i][n] - sum(m[i][j] * x[j] for j in range(i + 1, n))
        x[i] = acc / m[i][i]
    return x


@lru_cache(maxsize=None)
def embedding_matrix(choice: CharacterChoice, bits: int = F64_BITS) -> EmbeddingMatrix:
    """Canonical embedding of the integral basis.

    Row j holds the p real conjugates of the j-th basis element; each
    period row is a cyclic shift of the period vector.  The squared
    determinant is validated against the field discriminant.
    """
    field = choice.field
    p, n = field.p, field.n
    eta = gaussian_periods(choice, bits)
    rows = []
    if field.ramified:
        rows.append(tuple(1.0 if bits <= F64_BITS else mpmath.mpf(1)
                          for _ in range(p)))
        shifts = range(1, p)
    else:
        shifts = range(0, p)
    for j in shifts:
        rows.append(tuple(eta[(i + j) % p] for i in range(p)))
    emb = EmbeddingMatrix(field=field, choice=choice,
                          entries=tuple(rows), precision_bits=bits)
    expected = float(n) ** ((p - 1) / 2.0)
    if abs(emb.det_abs() - expected) > TOL_ROUND * max(1.0, expected):
        raise PrecisionLoss(
            f"embedding determinant {emb.det_abs():.6e} deviates from "
            f"sqrt(disc) = {expected:.6e}")
    return emb


def conjugate_vector(x: Element, choice: Optional[CharacterChoice] = None,
                     bits: int = F64_BITS):
    """sigma(x): the vector of real conjugates of x."""
    field = x.field
    if choice is None:
        choice = default_choice(field)
    emb = embedding_matrix(choice, bits)
    p = field.p
    if bits <= F64_BITS:
        coords = [float(c) for c in x.coords]
        return [kahan_sum(coords[k] * float(emb.entries[k][i]) for k in range(p))
                for i in range(p)]
    with mpmath.workprec(bits):
        coords = [mpmath.mpf(c.numerator) / c.denominator
                  if hasattr(c, "denominator") and c.denominator != 1
                  else mpmath.mpf(int(c)) for c in x.coords]
        return [mpmath.fsum(coords[k] * emb.entries[k][i] for k in range(p))
                for i in range(p)]


def numeric_gram(choice: CharacterChoice, bits: int = F64_BITS):
    """Numeric Gram of the integral basis from the embedding rows."""
    emb = embedding_matrix(choice, bits)
    p = choice.field.p
    rows = emb.entries
    return [[kahan_sum(float(rows[a][k]) * float(rows[b][k]) for k in range(p))
             for b in range(p)] for a in range(p)]


# ------------------------------------------------- derived pair traces

def derive_unramified_pair_traces(choice: CharacterChoice,
                                  bits: int = F64_BITS) -> tuple[int, int]:
    """(trace of t^2, trace of t*c^k(t)) for an unramified field.

    Computed as period inner products, rounded with residual checks; the
    off-diagonal value must be independent of the shift k and the
    resulting basis Gram must be positive definite.
    """
    from .intlin import leading_minors_positive

    field = choice.field
    if field.ramified:
        raise InconsistentTraces("pair-trace derivation is for unramified fields")
    p = field.p
    eta = [float(e) for e in gaussian_periods(choice, bits)]
    diag_f = kahan_sum(e * e for e in eta)
    diag = _round_checked(diag_f, "trace of t^2")
    offs = []
    for k in range(1, p):
        off_f = kahan_sum(eta[i] * eta[(i + k) % p] for i in range(p))
        offs.append(_round_checked(off_f, f"trace of t*c^{k}(t)"))
    if len(set(offs)) != 1:
        raise InconsistentTraces(f"shift-dependent pair traces: {offs}")
    off = offs[0]
    gram = [[diag if i == j else off for j in range(p)] for i in range(p)]
    if diag <= 0 or not leading_minors_positive(gram):
        raise InconsistentTraces(
            f"derived pair traces (diag={diag}, off={off}) are not positive definite")
    return diag, off


def _round_checked(value: float, what: str) -> int:
    r = round(value)
    if abs(value - r) > TOL_ROUND:
        raise PrecisionLoss(f"{what} = {value!r} is not within {TOL_ROUND} of an integer")
    return int(r)


@lru_cache(maxsize=None)
def derived_pair_traces(field: FieldSpec) -> tuple[int, int]:
    """Choice-invariant pair traces: derived for every character choice
    of the field and asserted identical."""
    choices = enumerate_characters(field)
    results = {derive_unramified_pair_traces(c) for c in choices}
    if len(results) != 1:
        raise InconsistentTraces(
            f"pair traces differ across character choices: {sorted(results)}")
    return results.pop()


# ------------------------------------------------- exact derived helpers

@lru_cache(maxsize=None)
def period_power_sums(field: FieldSpec, count: Optional[int] = None) -> tuple[int, ...]:
    """Exact power sums sum_i eta_i^k for k = 1..count (rounded, checked)."""
    p = field.p
    count = count or p
    choice = default_choice(field)
    eta = [float(e) for e in gaussian_periods(choice)]
    out = []
    for k in range(1, count + 1):
        val = kahan_sum(e ** k for e in eta)
        out.append(_round_checked(val, f"power sum of order {k}"))
    return tuple(out)


@lru_cache(maxsize=None)
def period_char_poly(field: FieldSpec) -> tuple[int, ...]:
    """Elementary symmetric functions e_0..e_p of the periods (exact),
    via Newton's identities on the rounded power sums."""
    p = field.p
    s = period_power_sums(field, p)
    e = [1]
    for k in range(1, p + 1):
        acc = 0
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * s[i - 1]
        if acc % k != 0:
            raise PrecisionLoss(f"Newton identity failed at order {k}")
        e.append(acc // k)
    return tuple(e)


def norm_of_t_minus(field: FieldSpec, c: int) -> int:
    """Exact norm N(t - c) = prod_i (eta_i - c)."""
    p = field.p
    e = period_char_poly(field)
    f_at_c = sum((-1) ** k * e[k] * c ** (p - k) for k in range(p + 1))
    return -f_at_c if p % 2 == 1 else f_at_c


@lru_cache(maxsize=None)
def structure_constants(field: FieldSpec) -> tuple:
    """Integer coordinates of all basis products b_i * b_j.

    Obtained by componentwise multiplication in the embedding and an
    exact-rounding solve; every entry is residual-checked and the trace
    of each product is cross-checked against the bilinear trace form.
    """
    choice = default_choice(field)
    emb = embedding_matrix(choice)
    p = field.p
    rows = [[float(v) for v in r] for r in emb.entries]
    at = [list(col) for col in zip(*rows)]  # solve coords^T * E = vec
    from .fields import basis_element, trace_table

    tt = trace_table(field)
    tr_basis = ([tt.tr_one] + [tt.tr_theta] * (p - 1)) if field.ramified \
        else [tt.tr_theta] * p
    sc = [[None] * p for _ in range(p)]
    for i in range(p):
        for j in range(i, p):
            vec = [rows[i][k] * rows[j][k] for k in range(p)]
            coords = _solve_float(at, vec)
            ints = []
            for v in coords:
                r = round(v)
                if abs(v - r) > TOL_ROUND:
                    raise PrecisionLoss(
                        f"basis product ({i},{j}) coordinate {v!r} is not integral")
                ints.append(int(r))
            expect = trace_bilinear(basis_element(field, i), basis_element(field, j))
            got = sum(c * t for c, t in zip(ints, tr_basis))
            if got != expect:
                raise PrecisionLoss(
                    f"trace of basis product ({i},{j}) came out {got}, "
                    f"expected {expect}")
            sc[i][j] = sc[j][i] = tuple(ints)
    return tuple(tuple(row) for row in sc)


def product_coords(field: FieldSpec, x_coords, y_coords) -> tuple[int, ...]:
    """Exact coordinates of a product of two integral elements, through
    the validated structure constants."""
    sc = structure_constants(field)
    p = field.p
    out = [0] * p
    for i in range(p):
        xi = x_coords[i]
        if xi == 0:
            continue
        for j in range(p):
            yj = y_coords[j]
            if yj == 0:
                continue
            row = sc[i][j]
            f = xi * yj
            for k in range(p):
                out[k] += f * row[k]
    return tuple(out)


def solve_integer_coords(field: FieldSpec, conjugates,
                         choice: Optional[CharacterChoice] = None,
                         bits: int = F64_BITS) -> tuple[int, ...]:
    """Integer basis coordinates of an element given by its conjugate
    vector; raises PrecisionLoss if rounding is not clean."""
    if choice is None:
        choice = default_choice(field)
    emb = embedding_matrix(choice, bits)
    p = field.p
    rows = [[float(v) for v in r] for r in emb.entries]
    at = [list(col) for col in zip(*rows)]
    coords = _solve_float(at, [float(v) for v in conjugates])
    out = []
    for v in coords:
        r = round(v)
        if abs(v - r) > TOL_ROUND:
            raise PrecisionLoss(f"coordinate {v!r} did not round to an integer")
        out.append(int(r))
    return tuple(out)
