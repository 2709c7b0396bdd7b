"""Exception types raised across the library.

Domain errors (bad inputs) and verification errors (numerics that failed
their self-checks) share the common base so callers can catch one type.
"""


class WrlatError(Exception):
    """Base class for all library errors."""


# --- field validation ---------------------------------------------------

class NotPrime(WrlatError):
    def __init__(self, p):
        super().__init__(f"degree {p} is not a prime number")
        self.p = p


class EvenOrTwo(WrlatError):
    def __init__(self, p):
        super().__init__(f"degree {p} must be an odd prime (p >= 3)")
        self.p = p


class BadConductor(WrlatError):
    def __init__(self, n, reason):
        super().__init__(f"conductor {n} is not admissible: {reason}")
        self.n = n
        self.reason = reason


# --- trace / element plumbing -------------------------------------------

class MissingDerivedData(WrlatError):
    """Unramified pair traces requested but derivation was disabled."""


class FieldMismatch(WrlatError):
    """Operands belong to different fields."""


# --- module constructors -------------------------------------------------

class WrongCase(WrlatError):
    """Constructor called on a field of the wrong ramification type."""


class BadParams(WrlatError):
    """Module parameters out of range (e.g. c >= m)."""


class BadIndex(WrlatError):
    """Prime index j outside 1..s."""


class UnsupportedFamily(WrlatError):
    """Operation undefined for this module family."""


class NotFound(WrlatError):
    """An exhaustive scan found no (or no unique) candidate."""


# --- numerics -------------------------------------------------------------

class PrecisionLoss(WrlatError):
    """A floating-point result failed its rounding or residual check."""


class InconsistentTraces(WrlatError):
    """Derived pair traces depend on the shift, which must not happen."""


class VerificationFailed(WrlatError):
    """A constructed object failed one of its mandatory self-checks."""


# --- enumeration ----------------------------------------------------------

class DimensionTooLarge(WrlatError):
    def __init__(self, dim, limit=13):
        super().__init__(f"enumeration dimension {dim} exceeds desk-scale limit {limit}")


class NotPositiveDefinite(WrlatError):
    """Gram matrix is not positive definite."""


class AlphaRational(WrlatError):
    """Orbit construction needs an element outside the rational integers."""


class NotApplicable(WrlatError):
    """Predicate precondition violated (e.g. m not 1 mod p for the window)."""
