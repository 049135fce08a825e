"""Functions of the 2x2 cofactors of 3-row matrices and their duals.

Two closed families:

* ``sumpower`` on 3x3 matrices: F(x) = [sum_k (sum_n c[n,k])^alpha]^beta
  over the signed cofactor array c of x.  Its sensitivity matrix
  dF/d(cofactor) has rank one everywhere, so the cofactors of the gradient
  collapse onto a 3-dimensional subspace (each column of the dual cofactor
  pattern is constant) and the transform has a closed form there.
* ``areapower`` on 3x2 matrices: F(x) = [d1^alpha + d2^alpha + d3^alpha]^beta
  over the three 2x2 row-pair minors d.  At (alpha, beta) = (2, 1/2) this
  is the parallelogram-area functional and is its own Legendre transform.

Both are homogeneous of degree p = 2*alpha*beta; the transform is
homogeneous of the conjugate degree q = p/(p-1) and reads

    F^L(y) = (p - 1) * (alpha*beta)^(-q) * [sum_k D_k^(alpha/(alpha-1))]^(beta*(alpha-1)/(p-1))

where D_k are the dual cofactors of y.  Gradients run through
matrix_core.minor_gradient rather than hand-expanded sign tables.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend, matrix_core
from .errors import (
    DimensionError,
    DomainError,
    OffManifoldError,
    ParseError,
    SingularGradientError,
)
from .matrix_core import IndexSet, Matrix

SUM_POWER = "sumpower"
AREA_POWER = "areapower"

#: relative tolerance for membership in the image manifold of the gradient
MANIFOLD_TOL = 1e-8


@dataclass(frozen=True)
class CofactorFamily:
    """Descriptor of one cofactor family; see module docstring."""

    kind: str
    alpha: float
    beta: float

    def __post_init__(self):
        if self.kind not in (SUM_POWER, AREA_POWER):
            raise ParseError(f"unknown cofactor family kind {self.kind!r}")
        if self.alpha in (0.0, 1.0):
            raise DomainError(f"alpha={self.alpha} not allowed (alpha in {{0, 1}})")
        if 2.0 * self.alpha * self.beta in (0.0, 1.0):
            raise DomainError(
                f"2*alpha*beta = {2.0 * self.alpha * self.beta} makes the dual exponents infinite"
            )

    @property
    def degree(self) -> float:
        """Homogeneity degree in the matrix entries: p = 2*alpha*beta."""
        return 2.0 * self.alpha * self.beta

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "alpha": float(self.alpha), "beta": float(self.beta)}

    @staticmethod
    def from_json_dict(d: dict) -> "CofactorFamily":
        extra = set(d) - {"kind", "alpha", "beta"}
        if extra:
            raise ParseError(f"unknown keys for {d.get('kind')}: {sorted(extra)}")
        try:
            return CofactorFamily(kind=d["kind"], alpha=float(d["alpha"]), beta=float(d["beta"]))
        except KeyError as e:
            raise ParseError(f"cofactor family JSON missing key {e.args[0]!r}") from None
        except (TypeError, ValueError) as e:
            if isinstance(e, (DomainError, ParseError)):
                raise
            raise ParseError(f"bad cofactor family JSON: {e}") from None


def sum_power(alpha: float, beta: float) -> CofactorFamily:
    return CofactorFamily(SUM_POWER, alpha, beta)


def area_power(alpha: float, beta: float) -> CofactorFamily:
    return CofactorFamily(AREA_POWER, alpha, beta)


def area_functional() -> CofactorFamily:
    """The self-dual area family (alpha, beta) = (2, 1/2)."""
    return area_power(2.0, 0.5)


@dataclass(frozen=True, eq=False)
class DualCofactorGrid:
    """Dual cofactors of a point on the dual side.

    For a 3x3 argument, ``values`` is the 3x3 signed cofactor array; for a
    2x3 argument it is the 3-vector of 2x2 column-pair minors, where entry
    n is the minor omitting column n+1.
    """

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def _is_even_integer(a: float) -> bool:
    return float(a).is_integer() and int(a) % 2 == 0


def _pow_checked(base: float, expo: float, what: str) -> float:
    """Real power with explicit domain errors instead of complex results."""
    if float(expo).is_integer():
        if base == 0.0 and expo < 0.0:
            raise SingularGradientError(f"zero base for negative exponent in {what}", value=base)
        return base ** int(expo)
    if base < 0.0:
        raise DomainError(
            f"negative base for non-integer exponent {expo} in {what}", value=base
        )
    if base == 0.0 and expo < 0.0:
        raise SingularGradientError(f"zero base for negative exponent in {what}", value=base)
    return base**expo


def _check_shape(fam: CofactorFamily, x: Matrix) -> None:
    want = (3, 3) if fam.kind == SUM_POWER else (3, 2)
    if (x.rows, x.cols) != want:
        raise DimensionError(
            f"{fam.kind} expects a {want[0]}x{want[1]} matrix, got {x.rows}x{x.cols}"
        )


_AREA_ROW_PAIRS = ((2, 3), (1, 3), (1, 2))  # row pairs for d1, d2, d3


def _area_minors(a: np.ndarray) -> np.ndarray:
    """The three 2x2 row-pair minors (d1, d2, d3) of a 3x2 array."""
    return np.array(
        [
            a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0],
            a[0, 0] * a[2, 1] - a[0, 1] * a[2, 0],
            a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0],
        ]
    )


def _bases(fam: CofactorFamily, a: np.ndarray) -> np.ndarray:
    """The inner power bases: column cofactor sums (sumpower) or minors (areapower)."""
    if fam.kind == SUM_POWER:
        return backend.cofactor_matrix(a).sum(axis=0)
    return _area_minors(a)


def _phi_of_bases(fam: CofactorFamily, s: np.ndarray) -> float:
    total = 0.0
    for i, v in enumerate(s):
        total += _pow_checked(float(v), fam.alpha, f"base #{i + 1} of {fam.kind}")
    return _pow_checked(total, fam.beta, f"outer power of {fam.kind}")


def evaluate(fam: CofactorFamily, x: Matrix) -> float:
    """F(x); raises a domain error naming the offending base when a real
    power of a negative quantity would be required."""
    _check_shape(fam, x)
    return _phi_of_bases(fam, _bases(fam, x.data))


def _sensitivity(fam: CofactorFamily, a: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """(F value, inner bases, dF/d(cofactor) array).

    For sumpower the sensitivity is returned as the full 3x3 array laid out
    like the cofactor array of x; rows are identical, which is the rank-one
    structure everything downstream relies on.  For areapower it is the
    3-vector of dF/d(minor).
    """
    s = _bases(fam, a)
    total = 0.0
    for i, v in enumerate(s):
        total += _pow_checked(float(v), fam.alpha, f"base #{i + 1} of {fam.kind}")
    value = _pow_checked(total, fam.beta, f"outer power of {fam.kind}")
    outer = fam.beta * _pow_checked(total, fam.beta - 1.0, f"outer power of {fam.kind}")
    inner = np.array(
        [
            fam.alpha * _pow_checked(float(v), fam.alpha - 1.0, f"base #{i + 1} of {fam.kind}")
            for i, v in enumerate(s)
        ]
    )
    sens = outer * inner
    if fam.kind == SUM_POWER:
        return value, s, np.tile(sens, (3, 1))
    return value, s, sens


def gradient(fam: CofactorFamily, x: Matrix) -> Matrix:
    """Dual-paired gradient (K x N): chain rule through the signed cofactors.

    Satisfies the homogeneity pairing <x, gradient(x)> = 2*alpha*beta * F(x).
    """
    _check_shape(fam, x)
    a = x.data
    _, _, sens = _sensitivity(fam, a)
    gx = np.zeros_like(a)
    if fam.kind == SUM_POWER:
        for i in range(3):
            for j in range(3):
                rows = np.asarray([r for r in range(3) if r != i], dtype=np.intp)
                cols = np.asarray([c for c in range(3) if c != j], dtype=np.intp)
                sign = -1.0 if (i + j) & 1 else 1.0
                gx += sens[i, j] * sign * backend.minor_gradient(a, rows, cols)
    else:
        for n, (r1, r2) in enumerate(_AREA_ROW_PAIRS):
            rows = np.asarray([r1 - 1, r2 - 1], dtype=np.intp)
            cols = np.asarray([0, 1], dtype=np.intp)
            gx += sens[n] * backend.minor_gradient(a, rows, cols)
    return Matrix(gx.T)


def rank_one_defect(fam: CofactorFamily, x: Matrix) -> float:
    """Largest |2x2 minor| of the sensitivity matrix dF/d(cofactor).

    Identically zero (to rounding) for sumpower, whose sensitivity matrix
    has rank one by construction.
    """
    if fam.kind != SUM_POWER:
        raise DomainError("the rank condition concerns the 3x3 sensitivity matrix of sumpower")
    _check_shape(fam, x)
    _, _, sens = _sensitivity(fam, x.data)
    return max_abs_2x2_minor(sens)


def max_abs_2x2_minor(arr: np.ndarray) -> float:
    """max |a[i1,j1] a[i2,j2] - a[i1,j2] a[i2,j1]| over all row/column pairs."""
    a = np.asarray(arr, dtype=np.float64)
    n, k = a.shape
    worst = 0.0
    for i1 in range(n):
        for i2 in range(i1 + 1, n):
            for j1 in range(k):
                for j2 in range(j1 + 1, k):
                    v = abs(a[i1, j1] * a[i2, j2] - a[i1, j2] * a[i2, j1])
                    if v > worst:
                        worst = v
    return worst


def dual_cofactors(y: Matrix) -> DualCofactorGrid:
    """Dual cofactors of a point y on the dual side.

    3x3 input: the full signed cofactor array.  2x3 input: the three 2x2
    column-pair minors, entry n omitting column n+1 (so the layout matches
    the primal row-pair minors of a 3x2 matrix under transposition).
    """
    if (y.rows, y.cols) == (3, 3):
        return DualCofactorGrid(backend.cofactor_matrix(y.data))
    if (y.rows, y.cols) == (2, 3):
        a = y.data
        vals = np.array(
            [
                a[0, 1] * a[1, 2] - a[1, 1] * a[0, 2],
                a[0, 0] * a[1, 2] - a[1, 0] * a[0, 2],
                a[0, 0] * a[1, 1] - a[1, 0] * a[0, 1],
            ]
        )
        return DualCofactorGrid(vals)
    raise DimensionError(f"dual cofactors need a 3x3 or 2x3 matrix, got {y.rows}x{y.cols}")


def dual_relation_residual(fam: CofactorFamily, x: Matrix) -> float:
    """Max relative error in the dual-cofactor identity D = deg * sens * F.

    Computes y = gradient(x) and its dual cofactors D, then compares them
    against deg * dF/d(cofactor) * F(x) with deg = alpha*beta (the
    homogeneity degree of the outer function in the cofactors).
    """
    _check_shape(fam, x)
    value, _, sens = _sensitivity(fam, x.data)
    y = gradient(fam, x)
    measured = dual_cofactors(y).values
    deg = fam.alpha * fam.beta
    predicted = deg * sens * value
    if fam.kind == SUM_POWER:
        measured = measured.T  # D[k, n] pairs with the sensitivity entry [n, k]
    scale = 1.0 + float(np.max(np.abs(predicted)))
    return float(np.max(np.abs(measured - predicted))) / scale


def manifold_defect(values: np.ndarray) -> float:
    """Relative spread of each dual-cofactor row across its three columns.

    Zero exactly when the 3x3 dual cofactor array lies on the image
    subspace of the sumpower gradient map (each row constant).
    """
    v = np.asarray(values, dtype=np.float64)
    spread = float(np.max(np.abs(v - v[:, :1])))
    return spread / (1.0 + float(np.max(np.abs(v))))


def _closed_form(fam: CofactorFamily, common: np.ndarray) -> float:
    p = fam.degree
    q = p / (p - 1.0)
    scale = (p - 1.0) * _pow_checked(fam.alpha * fam.beta, -q, "dual scale")
    inner_expo = fam.alpha / (fam.alpha - 1.0)
    outer_expo = fam.beta * (fam.alpha - 1.0) / (p - 1.0)
    total = 0.0
    for i, v in enumerate(common):
        total += _pow_checked(float(v), inner_expo, f"dual cofactor #{i + 1}")
    return scale * _pow_checked(total, outer_expo, "outer dual power")


def legendre(fam: CofactorFamily, y: Matrix) -> float:
    """Closed-form Legendre transform at a dual point y.

    sumpower: y must be 3x3 with its cofactor rows constant to within
    MANIFOLD_TOL (the image subspace); the common row values feed the
    closed form.  areapower: y is 2x3 and its three column-pair minors
    feed the same closed form.
    """
    if fam.kind == SUM_POWER:
        if (y.rows, y.cols) != (3, 3):
            raise DimensionError(f"sumpower dual point must be 3x3, got {y.rows}x{y.cols}")
        d = dual_cofactors(y).values
        defect = manifold_defect(d)
        if defect > MANIFOLD_TOL:
            raise OffManifoldError(
                "dual point is off the image subspace (cofactor rows not constant)",
                defect=defect,
            )
        common = d.mean(axis=1)
    else:
        if (y.rows, y.cols) != (2, 3):
            raise DimensionError(f"areapower dual point must be 2x3, got {y.rows}x{y.cols}")
        common = dual_cofactors(y).values
    return _closed_form(fam, common)


@dataclass(frozen=True)
class CofactorDual:
    """Closed-form descriptor of the transform of a cofactor family.

    F^L(y) = scale * [sum_k D_k^alpha]^beta over the dual cofactors D of y,
    with the conjugate homogeneity degrees p (primal) and q (dual).
    """

    kind: str
    alpha: float
    beta: float
    scale: float
    p: float
    q: float

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "alpha": self.alpha,
            "beta": self.beta,
            "scale": self.scale,
            "p": self.p,
            "q": self.q,
        }


def dual_exponent_map(alpha: float, beta: float) -> tuple[float, float]:
    """(alpha, beta) of the transform; an involution on the exponent pairs."""
    p = 2.0 * alpha * beta
    return alpha / (alpha - 1.0), beta * (alpha - 1.0) / (p - 1.0)


def dual_exponents(fam: CofactorFamily) -> CofactorDual:
    """Exponent map and closed-form constant of the transform of ``fam``."""
    p = fam.degree
    q = p / (p - 1.0)
    a2, b2 = dual_exponent_map(fam.alpha, fam.beta)
    scale = (p - 1.0) * (fam.alpha * fam.beta) ** (-q)
    return CofactorDual(kind=fam.kind + "_dual", alpha=a2, beta=b2, scale=scale, p=p, q=q)
