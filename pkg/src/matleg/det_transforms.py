"""Functions of the determinant F(x) = phi(det x) on square matrices, with
their analytic gradients and closed-form Legendre transforms.

Three closed families are provided:

* ``detpower``: F(x) = (n/p) |det x|^(p/n), p not in {0, 1}; the dual is
  the same family with the conjugate exponent q = p/(p-1);
* ``detroot``:  F(x) = n |det x|^(1/n) (the p = 1 case); its gradient maps
  onto the manifold {|det y| = 1} where the transform is identically 0;
* ``logdet``:   F(x) = ln|det x| + shift; the dual is ln|det y| + (n - shift),
  self-dual at shift = n/2.

Sign branches: phi'(t) carries sgn(t), the gradient-determinant map is
s = |t|^(p-1) sgn(t) and its inverse is |s|^(1/(p-1)) sgn(s), so every
identity holds on both signs of the determinant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend, matrix_core
from .errors import (
    DimensionError,
    DomainError,
    NotInvertibleError,
    OffManifoldError,
    ParseError,
    SingularGradientError,
)
from .matrix_core import Matrix

DET_POWER = "detpower"
DET_ROOT = "detroot"
LOG_DET = "logdet"
ZERO_MANIFOLD = "zeromanifold"

_KINDS = (DET_POWER, DET_ROOT, LOG_DET, ZERO_MANIFOLD)

#: membership tolerance for the unit-determinant manifold {|det y| = 1}
UNIT_DET_TOL = 1e-8


@dataclass(frozen=True)
class DetFamily:
    """Descriptor of one determinant family (see module docstring)."""

    kind: str
    n: int
    p: float | None = None
    shift: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParseError(f"unknown determinant family kind {self.kind!r}")
        if self.n < 2:
            raise DomainError(f"family needs matrix size n >= 2, got {self.n}")
        if self.kind == DET_POWER:
            if self.p is None:
                raise DomainError("detpower requires an exponent p")
            if self.p in (0.0, 1.0):
                raise DomainError(f"detpower exponent p={self.p} not invertible (p in {{0, 1}})")
        elif self.p is not None:
            raise DomainError(f"{self.kind} takes no exponent")
        if self.kind != LOG_DET and self.shift != 0.0:
            raise DomainError(f"{self.kind} takes no shift")

    def to_json_dict(self) -> dict:
        d: dict = {"kind": self.kind, "n": self.n}
        if self.kind == DET_POWER:
            d["p"] = float(self.p)
        if self.kind == LOG_DET and self.shift != 0.0:
            d["shift"] = float(self.shift)
        return d

    @staticmethod
    def from_json_dict(d: dict) -> "DetFamily":
        if not isinstance(d, dict) or "kind" not in d:
            raise ParseError("family JSON must be an object with a 'kind' key")
        kind = d["kind"]
        allowed = {"kind", "n"}
        if kind == DET_POWER:
            allowed.add("p")
        if kind == LOG_DET:
            allowed.add("shift")
        extra = set(d) - allowed
        if extra:
            raise ParseError(f"unknown keys for {kind}: {sorted(extra)}")
        if "n" not in d or not isinstance(d["n"], int):
            raise ParseError("family JSON needs an integer 'n'")
        if kind == DET_POWER and "p" not in d:
            raise ParseError("detpower family JSON needs an exponent 'p'")
        try:
            return DetFamily(
                kind=kind,
                n=d["n"],
                p=float(d["p"]) if "p" in d else None,
                shift=float(d.get("shift", 0.0)),
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, (DomainError, ParseError)):
                raise
            raise ParseError(f"bad family JSON: {e}") from None


def det_power(n: int, p: float) -> DetFamily:
    return DetFamily(DET_POWER, n, p=p)


def det_root(n: int) -> DetFamily:
    return DetFamily(DET_ROOT, n)


def log_det(n: int, shift: float = 0.0) -> DetFamily:
    return DetFamily(LOG_DET, n, shift=shift)


def zero_on_unit_det(n: int) -> DetFamily:
    """The constant-zero function on the manifold {|det y| = 1}."""
    return DetFamily(ZERO_MANIFOLD, n)


@dataclass(frozen=True)
class DomainWindow:
    """Open interval (lo, hi) restricting the admissible determinant."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"window needs lo < hi, got ({self.lo}, {self.hi})")

    def contains(self, t: float) -> bool:
        return self.lo < t < self.hi

    def validate_for(self, fam: DetFamily) -> None:
        """Reject windows that straddle det = 0 for families singular there."""
        if self.lo < 0.0 < self.hi:
            ok = fam.kind == DET_POWER and fam.p / fam.n >= 1.0
            if not ok:
                raise DomainError(
                    f"window ({self.lo}, {self.hi}) contains 0, where {fam.kind} is not defined"
                )


def _checked_det(fam: DetFamily, m: Matrix, window: DomainWindow | None) -> float:
    if not m.is_square or m.rows != fam.n:
        raise DimensionError(f"family expects a {fam.n}x{fam.n} matrix, got {m.rows}x{m.cols}")
    t = matrix_core.det(m)
    if window is not None:
        window.validate_for(fam)
        if not window.contains(t):
            raise DomainError(f"det = {t} outside window ({window.lo}, {window.hi})", value=t)
    return t


def _phi(fam: DetFamily, t: float) -> float:
    if fam.kind == DET_POWER:
        if t == 0.0 and fam.p < 0:
            raise DomainError("detpower with p < 0 is undefined at det = 0", value=t)
        return (fam.n / fam.p) * abs(t) ** (fam.p / fam.n)
    if fam.kind == DET_ROOT:
        return fam.n * abs(t) ** (1.0 / fam.n)
    if fam.kind == LOG_DET:
        if t == 0.0:
            raise DomainError("logdet is undefined at det = 0", value=t)
        return math.log(abs(t)) + fam.shift
    raise DomainError(f"{fam.kind} has no pointwise evaluation off its manifold")


def _phi_prime(fam: DetFamily, t: float) -> float:
    if t == 0.0:
        raise SingularGradientError(f"{fam.kind} gradient is singular at det = 0", value=t)
    if fam.kind == DET_POWER:
        return abs(t) ** (fam.p / fam.n - 1.0) * math.copysign(1.0, t)
    if fam.kind == DET_ROOT:
        return abs(t) ** (1.0 / fam.n - 1.0) * math.copysign(1.0, t)
    if fam.kind == LOG_DET:
        return 1.0 / t
    raise NotInvertibleError("the zero-on-manifold descriptor has no gradient (constant on its manifold)")


def evaluate(fam: DetFamily, x: Matrix, window: DomainWindow | None = None) -> float:
    """F(x) for the family; domain errors carry the offending determinant."""
    t = _checked_det(fam, x, window)
    if fam.kind == ZERO_MANIFOLD:
        defect = abs(abs(t) - 1.0)
        if defect > UNIT_DET_TOL:
            raise OffManifoldError(f"|det| = {abs(t)} is not 1", defect=defect)
        return 0.0
    return _phi(fam, t)


def _gradient_array(fam: DetFamily, a: np.ndarray) -> np.ndarray:
    """K x N dual-paired gradient as a raw array; a must be n x n float64."""
    t = float(backend.det(a))
    dphi = _phi_prime(fam, t)
    return dphi * backend.cofactor_matrix(a).T


def gradient(fam: DetFamily, x: Matrix, window: DomainWindow | None = None) -> Matrix:
    """Gradient as the dual-paired K x N object: y[k, n] = phi'(det x) * cof(x)[n, k].

    Pairs with x under <x, y> = sum x[n,k] y[k,n]; in particular
    <x, gradient(x)> = n * phi'(det x) * det x.
    """
    _checked_det(fam, x, window)
    return Matrix(_gradient_array(fam, x.data))


def gradient_det(fam: DetFamily, x: Matrix) -> float:
    """det(gradient(x)) in closed form: phi'(t)^n * t^(n-1) with t = det x."""
    t = _checked_det(fam, x, None)
    if t == 0.0:
        raise SingularGradientError(f"{fam.kind} gradient is singular at det = 0", value=t)
    if fam.kind == DET_POWER:
        return abs(t) ** (fam.p - 1.0) * math.copysign(1.0, t)
    if fam.kind == DET_ROOT:
        return math.copysign(1.0, t)
    if fam.kind == LOG_DET:
        return 1.0 / t
    raise NotInvertibleError("the zero-on-manifold descriptor has no gradient")


def invert_gradient_det(fam: DetFamily, s: float) -> float:
    """Inverse of t -> phi'(t)^n * t^(n-1): recovers det x from det y = s.

    detpower: t = |s|^(1/(p-1)) sgn(s); logdet: t = 1/s.  detroot is not
    invertible (its image is the unit-determinant manifold).
    """
    if fam.kind in (DET_ROOT, ZERO_MANIFOLD):
        raise NotInvertibleError(
            f"{fam.kind}: gradient-determinant map is constant (image is the unit manifold)"
        )
    if s == 0.0:
        raise DomainError("gradient determinant s = 0 is outside the image", value=s)
    if fam.kind == DET_POWER:
        return abs(s) ** (1.0 / (fam.p - 1.0)) * math.copysign(1.0, s)
    return 1.0 / s  # logdet


def conjugate_exponent(p: float) -> float:
    """q with 1/p + 1/q = 1."""
    return p / (p - 1.0)


def legendre(fam: DetFamily, y: Matrix, window: DomainWindow | None = None) -> float:
    """Closed-form Legendre transform evaluated at the dual point y.

    detpower p -> (n/q) |det y|^(q/n) with q = p/(p-1); detroot -> 0 on
    {|det y| = 1}; logdet(shift) -> n + ln|det y| - shift.
    """
    s = _checked_det(fam, y, window)
    if fam.kind == DET_POWER:
        if s == 0.0:
            raise DomainError("dual argument has det = 0, outside the image manifold", value=s)
        q = conjugate_exponent(fam.p)
        return (fam.n / q) * abs(s) ** (q / fam.n)
    if fam.kind == DET_ROOT:
        defect = abs(abs(s) - 1.0)
        if defect > UNIT_DET_TOL:
            raise OffManifoldError(
                f"detroot dual argument must satisfy |det y| = 1, got |det y| = {abs(s)}",
                defect=defect,
            )
        return 0.0
    if fam.kind == LOG_DET:
        if s == 0.0:
            raise DomainError("dual argument has det = 0", value=s)
        return fam.n + math.log(abs(s)) - fam.shift
    raise NotInvertibleError(
        "the zero-on-manifold descriptor has no Legendre transform of its own"
    )


def dual_family(fam: DetFamily) -> DetFamily:
    """Family descriptor of the Legendre transform.

    detpower(p) -> detpower(q); detroot -> zero-on-manifold; logdet(shift)
    -> logdet(n - shift).  Applying the map twice returns the original
    family (exact on logdet shifts, to rounding on detpower exponents).
    """
    if fam.kind == DET_POWER:
        return det_power(fam.n, conjugate_exponent(fam.p))
    if fam.kind == DET_ROOT:
        return zero_on_unit_det(fam.n)
    if fam.kind == LOG_DET:
        return log_det(fam.n, shift=fam.n - fam.shift)
    raise NotInvertibleError("the zero-on-manifold descriptor has no dual family here")
