"""Seeded numerical verification of the duality identities.

Each check draws deterministic samples (sample i comes from a
counter-derived substream of the seed, so results do not depend on
evaluation order or parallelism), evaluates one residual per sample, and
reduces them in fixed index order.  Per-sample domain errors are tallied
as skips, never fatal.  Checks may run on a thread pool capped by
MATLEG_THREADS; the report bytes are identical regardless of schedule.
"""
from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import backend, cofactor_transforms as cof, det_transforms as det, families, matrix_core
from .errors import MatlegError, ParseError, SamplingError
from .families import Family
from .matrix_core import Matrix

DEFAULT_TOL_ROUNDTRIP = 1e-8
DEFAULT_TOL_GRADIENT_INVERSE = 1e-6
DEFAULT_TOL_INVOLUTION = 1e-10
DEFAULT_TOL_FD = 1e-4
DEFAULT_TOL_PARAMETER = 1e-12


@dataclass(frozen=True)
class SampleSpec:
    """Deterministic sampling configuration for one family.

    ``det_window`` bounds |det| (square families) or the largest inner
    cofactor magnitude (cofactor families) after rescaling; ``sign_mix``
    is the fraction of negative-determinant samples requested for square
    families.
    """

    family: Family
    count: int = 200
    seed: int = 0
    det_window: tuple[float, float] = (0.1, 10.0)
    sign_mix: float = 0.5

    def __post_init__(self):
        if self.count < 1:
            raise ParseError(f"sample count must be >= 1, got {self.count}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ParseError(f"seed must be a non-negative integer, got {self.seed!r}")
        lo, hi = self.det_window
        if not (0.0 < lo < hi):
            raise ParseError(f"det_window needs 0 < lo < hi, got ({lo}, {hi})")
        object.__setattr__(self, "det_window", (float(lo), float(hi)))
        if not 0.0 <= self.sign_mix <= 1.0:
            raise ParseError(f"sign_mix must lie in [0, 1], got {self.sign_mix}")

    def to_json_dict(self) -> dict:
        return {
            "family": families.family_to_dict(self.family),
            "count": self.count,
            "seed": self.seed,
            "det_window": [self.det_window[0], self.det_window[1]],
            "sign_mix": self.sign_mix,
        }


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one verification check over a sample set."""

    name: str
    passed: bool
    threshold: float
    max_residual: float | None
    mean_residual: float | None
    worst_index: int | None
    evaluated: int
    skipped: int
    detail: dict

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "threshold": self.threshold,
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
            "worst_index": self.worst_index,
            "evaluated": self.evaluated,
            "skipped": self.skipped,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class DualityReport:
    """Aggregate verdict: overall passes iff every check passed."""

    spec: SampleSpec
    checks: tuple[CheckResult, ...]
    overall_pass: bool

    def to_json_dict(self) -> dict:
        return {
            "config": self.spec.to_json_dict(),
            "checks": [c.to_json_dict() for c in self.checks],
            "overall_pass": self.overall_pass,
        }


# --------------------------------------------------------------------------
# sampling


def _draw_square(fam: det.DetFamily, rng: np.random.Generator, spec: SampleSpec) -> np.ndarray:
    lo, hi = spec.det_window
    n = fam.n
    for _ in range(100):
        a = rng.uniform(-1.0, 1.0, (n, n))
        t = float(backend.det(a))
        # reject nearly singular draws: they would need a huge rescale
        # factor, leaving badly conditioned samples
        if abs(t) < 0.05:
            continue
        target = lo * (hi / lo) ** rng.uniform()
        a = a * (target / abs(t)) ** (1.0 / n)
        want_negative = rng.uniform() < spec.sign_mix
        if want_negative != (t < 0.0):
            a[0] = -a[0]
        return a
    raise SamplingError(f"no admissible {n}x{n} sample after 100 attempts")


def _draw_cofactor(fam: cof.CofactorFamily, rng: np.random.Generator, spec: SampleSpec) -> np.ndarray:
    lo, hi = spec.det_window
    shape = families.family_shape(fam)
    # fractional inner powers need strictly positive bases; keep a relative
    # margin so the downstream negative exponents stay well conditioned
    need_positive = not (float(fam.alpha).is_integer() and int(fam.alpha) % 2 == 0)
    for _ in range(100):
        a = rng.uniform(-1.0, 1.0, shape)
        bases = cof._bases(fam, a)
        m = float(np.max(np.abs(bases)))
        if m < 0.05:
            continue
        if need_positive and not np.all(bases > 1e-3 * m):
            continue
        target = lo * (hi / lo) ** rng.uniform()
        a = a * math.sqrt(target / m)
        if fam.kind == cof.SUM_POWER:
            want_negative = rng.uniform() < spec.sign_mix
            t = float(backend.det(a))
            if t != 0.0 and want_negative != (t < 0.0):
                a = -a  # odd size: flips det, leaves every 2x2 cofactor unchanged
        return a
    raise SamplingError(f"no admissible {fam.kind} sample after 100 attempts")


def sample_matrices(spec: SampleSpec) -> list[Matrix]:
    """Deterministic sample list; sample i depends only on (seed, i)."""
    out = []
    for i in range(spec.count):
        rng = np.random.default_rng([spec.seed, i])
        if isinstance(spec.family, det.DetFamily):
            out.append(Matrix(_draw_square(spec.family, rng, spec)))
        else:
            out.append(Matrix(_draw_cofactor(spec.family, rng, spec)))
    return out


# --------------------------------------------------------------------------
# per-sample execution


def thread_count(threads: int | None = None) -> int:
    """Worker count: explicit argument, else MATLEG_THREADS, else cpu count."""
    if threads is not None:
        if threads < 1:
            raise ParseError(f"thread count must be >= 1, got {threads}")
        return threads
    env = os.environ.get("MATLEG_THREADS")
    if env is not None:
        try:
            v = int(env)
        except ValueError:
            v = 0
        if v < 1:
            raise ParseError(f"MATLEG_THREADS must be a positive integer, got {env!r}")
        return v
    return os.cpu_count() or 1


def _run_per_sample(
    samples: list[Matrix],
    fn: Callable[[int, Matrix], float],
    threads: int | None,
) -> tuple[list[float | None], list[str | None]]:
    residuals: list[float | None] = [None] * len(samples)
    notes: list[str | None] = [None] * len(samples)

    def work(i: int) -> None:
        try:
            residuals[i] = float(fn(i, samples[i]))
        except MatlegError as e:
            notes[i] = f"{type(e).__name__}: {e}"

    t = min(thread_count(threads), len(samples))
    if t <= 1:
        for i in range(len(samples)):
            work(i)
    else:
        with ThreadPoolExecutor(max_workers=t) as pool:
            list(pool.map(work, range(len(samples))))
    return residuals, notes


def _aggregate(
    name: str,
    threshold: float,
    residuals: list[float | None],
    notes: list[str | None],
    detail: dict | None = None,
    passed_override: bool | None = None,
) -> CheckResult:
    evaluated = [(i, r) for i, r in enumerate(residuals) if r is not None]
    skipped = [n for n in notes if n is not None]
    detail = dict(detail or {})
    if skipped:
        detail["skip_notes"] = skipped[:5]
    if not evaluated:
        return CheckResult(
            name=name,
            passed=False if passed_override is None else passed_override,
            threshold=threshold,
            max_residual=None,
            mean_residual=None,
            worst_index=None,
            evaluated=0,
            skipped=len(skipped),
            detail=detail,
        )
    worst_index, max_res = max(evaluated, key=lambda ir: ir[1])
    mean_res = sum(r for _, r in evaluated) / len(evaluated)
    passed = max_res <= threshold if passed_override is None else passed_override
    return CheckResult(
        name=name,
        passed=passed,
        threshold=threshold,
        max_residual=max_res,
        mean_residual=mean_res,
        worst_index=worst_index,
        evaluated=len(evaluated),
        skipped=len(skipped),
        detail=detail,
    )


def _skipped_check(name: str, threshold: float, count: int, reason: str) -> CheckResult:
    return CheckResult(
        name=name,
        passed=True,
        threshold=threshold,
        max_residual=None,
        mean_residual=None,
        worst_index=None,
        evaluated=0,
        skipped=count,
        detail={"skipped_reason": reason},
    )


# --------------------------------------------------------------------------
# finite differences


def fd_gradient(f: Callable[[np.ndarray], float], a: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
    """Central finite differences with per-entry step h = rel_step * (1 + |a|)."""
    g = np.zeros_like(a)
    for idx in np.ndindex(a.shape):
        h = rel_step * (1.0 + abs(a[idx]))
        ap = a.copy()
        ap[idx] += h
        am = a.copy()
        am[idx] -= h
        g[idx] = (f(ap) - f(am)) / (2.0 * h)
    return g


# --------------------------------------------------------------------------
# checks


def check_roundtrip(
    spec: SampleSpec,
    samples: list[Matrix] | None = None,
    tol: float = DEFAULT_TOL_ROUNDTRIP,
    threads: int | None = None,
) -> CheckResult:
    """|F^L(F'(x)) - (<x, F'(x)> - F(x))| / (1 + |F(x)|) <= tol."""
    samples = sample_matrices(spec) if samples is None else samples
    fam = spec.family

    def fn(i: int, x: Matrix) -> float:
        fx = families.evaluate(fam, x)
        y = families.gradient(fam, x)
        lhs = matrix_core.pairing(x, y) - fx
        return abs(families.legendre(fam, y) - lhs) / (1.0 + abs(fx))

    residuals, notes = _run_per_sample(samples, fn, threads)
    return _aggregate("roundtrip", tol, residuals, notes)


def check_gradient_inverse(
    spec: SampleSpec,
    samples: list[Matrix] | None = None,
    tol: float = DEFAULT_TOL_GRADIENT_INVERSE,
    threads: int | None = None,
) -> CheckResult:
    """||(F^L)'(F'(x)) - x||_inf / (1 + ||x||_inf) <= tol.

    Skipped for families whose dual gradient is not defined (the
    unit-determinant manifold constant) or not exposed (cofactor families
    away from the self-dual point).
    """
    samples = sample_matrices(spec) if samples is None else samples
    fam = spec.family
    name = "gradient_inverse"

    if isinstance(fam, det.DetFamily):
        if fam.kind in (det.DET_ROOT, det.ZERO_MANIFOLD):
            return _skipped_check(
                name, tol, len(samples), "dual gradient undefined (constant on manifold)"
            )
        dual = det.dual_family(fam)

        def fn(i: int, x: Matrix) -> float:
            y = det.gradient(fam, x)
            xr = det.gradient(dual, y)
            return float(np.max(np.abs(xr.data - x.data))) / (
                1.0 + float(np.max(np.abs(x.data)))
            )

    else:
        if not (fam.kind == cof.AREA_POWER and fam.alpha == 2.0 and fam.beta == 0.5):
            return _skipped_check(
                name, tol, len(samples), "dual gradient not exposed outside the self-dual case"
            )

        def fn(i: int, x: Matrix) -> float:
            y = cof.gradient(fam, x)
            # self-dual family: F^L(y) = F(y^T), so (F^L)' is the gradient
            # at the transpose, read back in primal orientation
            xr = cof.gradient(fam, Matrix(y.data.T)).data.T
            return float(np.max(np.abs(xr - x.data))) / (1.0 + float(np.max(np.abs(x.data))))

    residuals, notes = _run_per_sample(samples, fn, threads)
    return _aggregate(name, tol, residuals, notes)


def check_involution(
    spec: SampleSpec,
    samples: list[Matrix] | None = None,
    tol: float = DEFAULT_TOL_INVOLUTION,
    threads: int | None = None,
) -> CheckResult:
    """Dual-of-dual returns the original family, on parameters and samples."""
    samples = sample_matrices(spec) if samples is None else samples
    fam = spec.family
    name = "involution"

    if isinstance(fam, det.DetFamily):
        if fam.kind in (det.DET_ROOT, det.ZERO_MANIFOLD):
            return _skipped_check(
                name, tol, len(samples), "transform of the manifold constant is not defined here"
            )
        dd = det.dual_family(det.dual_family(fam))
        if fam.kind == det.DET_POWER:
            param_defect = abs(dd.p - fam.p) / (1.0 + abs(fam.p))
        else:
            param_defect = abs(dd.shift - fam.shift) / (1.0 + abs(fam.shift))

        def fn(i: int, x: Matrix) -> float:
            a = det.evaluate(fam, x)
            b = det.evaluate(dd, x)
            return abs(a - b) / (1.0 + abs(a))

        residuals, notes = _run_per_sample(samples, fn, threads)
        detail = {"parameter_defect": param_defect}
        if fam.kind == det.LOG_DET:
            # the shift map has a self-dual fixed point at n/2
            midpoint = det.log_det(fam.n, shift=fam.n / 2.0)
            detail["self_dual_midpoint_defect"] = abs(
                det.dual_family(midpoint).shift - midpoint.shift
            )
        result = _aggregate(name, tol, residuals, notes, detail)
        passed = result.passed and param_defect <= DEFAULT_TOL_PARAMETER
        return dataclasses.replace(result, passed=passed)

    a2, b2 = cof.dual_exponent_map(*cof.dual_exponent_map(fam.alpha, fam.beta))
    param_defect = max(
        abs(a2 - fam.alpha) / (1.0 + abs(fam.alpha)),
        abs(b2 - fam.beta) / (1.0 + abs(fam.beta)),
    )
    detail = {"parameter_defect": param_defect}
    if fam.kind == cof.AREA_POWER and fam.alpha == 2.0 and fam.beta == 0.5:
        # self-dual: the transform evaluated at y equals the primal formula
        # at the transpose of y
        def fn(i: int, x: Matrix) -> float:
            y = cof.gradient(fam, x)
            a = cof.legendre(fam, y)
            b = cof.evaluate(fam, Matrix(y.data.T))
            return abs(a - b) / (1.0 + abs(a))

        residuals, notes = _run_per_sample(samples, fn, threads)
        result = _aggregate(name, tol, residuals, notes, detail)
        passed = result.passed and param_defect <= DEFAULT_TOL_PARAMETER
        return dataclasses.replace(result, passed=passed)
    detail["note"] = "parameter-level involution only (dual family not evaluatable off-manifold)"
    passed = param_defect <= DEFAULT_TOL_PARAMETER
    return CheckResult(
        name=name,
        passed=passed,
        threshold=tol,
        max_residual=param_defect,
        mean_residual=param_defect,
        worst_index=None,
        evaluated=0,
        skipped=0,
        detail=detail,
    )


def check_gradients_fd(
    spec: SampleSpec,
    samples: list[Matrix] | None = None,
    tol: float = DEFAULT_TOL_FD,
    threads: int | None = None,
) -> CheckResult:
    """Analytic gradient against central finite differences, rel tol 1e-4.

    The detail records an error sweep over steps {1e-4, 1e-6, 1e-8} on the
    first sample; its V shape (minimum in the middle) is the usual
    truncation/rounding trade-off.
    """
    samples = sample_matrices(spec) if samples is None else samples
    fam = spec.family

    def eval_arr(a: np.ndarray) -> float:
        return families.evaluate(fam, Matrix(a))

    def residual_at(x: Matrix, rel_step: float) -> float:
        g = families.gradient(fam, x).data.T
        gfd = fd_gradient(eval_arr, x.data, rel_step)
        return float(np.max(np.abs(g - gfd))) / (1.0 + float(np.max(np.abs(gfd))))

    def fn(i: int, x: Matrix) -> float:
        return residual_at(x, 1e-6)

    residuals, notes = _run_per_sample(samples, fn, threads)
    detail: dict = {}
    for x in samples:
        try:
            detail["step_sweep"] = {
                "1e-04": residual_at(x, 1e-4),
                "1e-06": residual_at(x, 1e-6),
                "1e-08": residual_at(x, 1e-8),
            }
            break
        except MatlegError:
            continue
    return _aggregate("gradients_fd", tol, residuals, notes, detail)


def check_image_manifold(
    spec: SampleSpec,
    samples: list[Matrix] | None = None,
    tol: float | None = None,
    threads: int | None = None,
) -> CheckResult:
    """Family-specific image constraint of the gradient map.

    detroot: | |det F'(x)| - 1 |.  sumpower: relative spread of the dual
    cofactor rows.  Not applicable to other families.
    """
    samples = sample_matrices(spec) if samples is None else samples
    fam = spec.family
    name = "image_manifold"

    if isinstance(fam, det.DetFamily) and fam.kind == det.DET_ROOT:
        tol = 1e-9 if tol is None else tol

        def fn(i: int, x: Matrix) -> float:
            return abs(abs(det.gradient_det(fam, x)) - 1.0)

    elif isinstance(fam, cof.CofactorFamily) and fam.kind == cof.SUM_POWER:
        tol = cof.MANIFOLD_TOL if tol is None else tol

        def fn(i: int, x: Matrix) -> float:
            y = cof.gradient(fam, x)
            return cof.manifold_defect(cof.dual_cofactors(y).values)

    else:
        return _skipped_check(name, tol or 0.0, len(samples), "no image constraint for this family")

    residuals, notes = _run_per_sample(samples, fn, threads)
    return _aggregate(name, tol, residuals, notes)


def check_roundtrip_negative_control(
    spec: SampleSpec,
    samples: list[Matrix] | None = None,
    tol: float = DEFAULT_TOL_ROUNDTRIP,
    corruption: float = 0.1,
    threads: int | None = None,
) -> CheckResult:
    """Corrupted dual exponent must FAIL the round-trip tolerance.

    Proves the suite can detect a wrong transform: passes iff the max
    residual with exponent q + corruption exceeds ``tol``.
    """
    samples = sample_matrices(spec) if samples is None else samples
    fam = spec.family
    name = "roundtrip_negative_control"
    if not (isinstance(fam, det.DetFamily) and fam.kind == det.DET_POWER):
        return _skipped_check(name, tol, len(samples), "negative control defined for detpower only")
    q_bad = det.conjugate_exponent(fam.p) + corruption

    def fn(i: int, x: Matrix) -> float:
        fx = det.evaluate(fam, x)
        y = det.gradient(fam, x)
        lhs = matrix_core.pairing(x, y) - fx
        s = matrix_core.det(y)
        fl_bad = (fam.n / q_bad) * abs(s) ** (q_bad / fam.n)
        return abs(fl_bad - lhs) / (1.0 + abs(fx))

    residuals, notes = _run_per_sample(samples, fn, threads)
    result = _aggregate(name, tol, residuals, notes, detail={"corruption": corruption})
    tripped = result.max_residual is not None and result.max_residual > tol
    return dataclasses.replace(result, passed=tripped)


def run_suite(
    spec: SampleSpec,
    tol_roundtrip: float = DEFAULT_TOL_ROUNDTRIP,
    tol_gradient_inverse: float = DEFAULT_TOL_GRADIENT_INVERSE,
    tol_involution: float = DEFAULT_TOL_INVOLUTION,
    tol_fd: float = DEFAULT_TOL_FD,
    threads: int | None = None,
) -> DualityReport:
    """All checks for one family over a single shared sample set."""
    samples = sample_matrices(spec)
    checks = (
        check_roundtrip(spec, samples, tol_roundtrip, threads),
        check_gradient_inverse(spec, samples, tol_gradient_inverse, threads),
        check_involution(spec, samples, tol_involution, threads),
        check_gradients_fd(spec, samples, tol_fd, threads),
        check_image_manifold(spec, samples, threads=threads),
        check_roundtrip_negative_control(spec, samples, tol_roundtrip, threads=threads),
    )
    return DualityReport(spec=spec, checks=checks, overall_pass=all(c.passed for c in checks))
