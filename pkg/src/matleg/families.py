"""Uniform access to determinant and cofactor families.

JSON (de)serialization and a small isinstance dispatch so the verification
engine and the CLI can treat every family through the same four verbs:
evaluate, gradient, legendre, dual descriptor.
"""
from __future__ import annotations

from typing import Union

from . import cofactor_transforms as cof
from . import det_transforms as det
from .errors import ParseError
from .matrix_core import Matrix

Family = Union[det.DetFamily, cof.CofactorFamily]

_DET_KINDS = {det.DET_POWER, det.DET_ROOT, det.LOG_DET, det.ZERO_MANIFOLD}
_COF_KINDS = {cof.SUM_POWER, cof.AREA_POWER}


def parse_family(d: dict) -> Family:
    """Parse a family descriptor dict, rejecting unknown kinds and keys."""
    if not isinstance(d, dict):
        raise ParseError("family descriptor must be a JSON object")
    kind = d.get("kind")
    if kind in _DET_KINDS:
        return det.DetFamily.from_json_dict(d)
    if kind in _COF_KINDS:
        return cof.CofactorFamily.from_json_dict(d)
    raise ParseError(f"unknown family kind {kind!r}")


def family_to_dict(fam: Family) -> dict:
    return fam.to_json_dict()


def family_shape(fam: Family) -> tuple[int, int]:
    """(rows, cols) of the primal argument."""
    if isinstance(fam, det.DetFamily):
        return fam.n, fam.n
    return (3, 3) if fam.kind == cof.SUM_POWER else (3, 2)


def evaluate(fam: Family, x: Matrix) -> float:
    if isinstance(fam, det.DetFamily):
        return det.evaluate(fam, x)
    return cof.evaluate(fam, x)


def gradient(fam: Family, x: Matrix) -> Matrix:
    if isinstance(fam, det.DetFamily):
        return det.gradient(fam, x)
    return cof.gradient(fam, x)


def legendre(fam: Family, y: Matrix) -> float:
    if isinstance(fam, det.DetFamily):
        return det.legendre(fam, y)
    return cof.legendre(fam, y)


def dual_descriptor_dict(fam: Family) -> dict:
    """JSON descriptor of the transform: a det family, or the cofactor
    exponent map with its closed-form constant."""
    if isinstance(fam, det.DetFamily):
        return det.dual_family(fam).to_json_dict()
    return cof.dual_exponents(fam).to_json_dict()
