"""Critical points of the non-convex energy

    obj(x) = 1/2 (A x, x) - (n/p) |det x|^(p/n) - (f, x)

on n x n matrices, with (.,.) the Frobenius pairing and A a positive
definite quadratic form on the vectorized matrices.

For p < 2 the energy is coercive and is minimized directly.  For p > 2 it
is unbounded below; the solver instead minimizes the coercive dual energy

    dual_obj(y) = 1/2 (A y, y) + (f, y) - (n/q) |det(A y)|^(q/n),
    q = p/(p-1) in (1, 2),

and maps the dual minimizer back through x = y + A^{-1} f, which is a
critical point of the primal energy.  Every converged dual run is
certified by the primal gradient (an oracle independent of the dual
iteration) and ships a witness ray along which the primal energy drops
below the critical value, showing the critical point is not a minimizer.

Both solvers use gradient descent with Armijo backtracking (shrink 0.5,
slope 1e-4), a step safeguard that keeps the relevant determinant away
from the gradient singularity, and a guarded Newton polish once the
gradient is small.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend, det_transforms as det
from .errors import ConvergenceError, DimensionError, DomainError, ParseError
from .matrix_core import Matrix

DET_GUARD = 1e-12
DEFAULT_MAX_ITER = 10000
_NEWTON_START = 0.1  # gradient norm below which the Newton polish engages


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    """SPD quadratic form on vectorized n x n matrices.

    Either a scaled identity (fast path) or a dense SPD matrix; density is
    validated by a Cholesky factorization, which also backs the inverse.
    """

    kind: str  # "scaled" | "dense"
    n: int
    a: float | None = None
    matrix: np.ndarray | None = None
    _chol: np.ndarray | None = None

    @staticmethod
    def scaled(n: int, a: float) -> "QuadraticForm":
        if a <= 0.0:
            raise DomainError(f"scaled form needs a > 0, got {a}")
        return QuadraticForm(kind="scaled", n=n, a=float(a))

    @staticmethod
    def dense(n: int, entries) -> "QuadraticForm":
        try:
            m = np.asarray(entries, dtype=np.float64)
        except (TypeError, ValueError) as e:
            raise ParseError(f"bad dense form entries: {e}") from None
        dim = n * n
        if m.shape != (dim, dim):
            raise DimensionError(f"dense form must be {dim}x{dim}, got {m.shape}")
        if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * (1.0 + np.max(np.abs(m)))):
            raise DomainError("dense form must be symmetric")
        m = 0.5 * (m + m.T)
        try:
            chol = np.linalg.cholesky(m)
        except np.linalg.LinAlgError:
            raise DomainError("dense form is not positive definite") from None
        m.setflags(write=False)
        chol.setflags(write=False)
        return QuadraticForm(kind="dense", n=n, matrix=m, _chol=chol)

    @property
    def dim(self) -> int:
        return self.n * self.n

    def apply(self, x: np.ndarray) -> np.ndarray:
        """A x, with x an n x n array (vectorized row-major internally)."""
        if self.kind == "scaled":
            return self.a * x
        return (self.matrix @ x.reshape(-1)).reshape(self.n, self.n)

    def solve(self, b: np.ndarray) -> np.ndarray:
        """A^{-1} b via the cached Cholesky factor."""
        if self.kind == "scaled":
            return b / self.a
        v = b.reshape(-1)
        z = np.linalg.solve(self._chol, v)
        return np.linalg.solve(self._chol.T, z).reshape(self.n, self.n)

    def to_json_dict(self) -> dict:
        if self.kind == "scaled":
            return {"kind": "scaled", "a": self.a}
        return {"kind": "dense", "entries": [[float(v) for v in row] for row in self.matrix]}

    @staticmethod
    def from_json_dict(n: int, d: dict) -> "QuadraticForm":
        if not isinstance(d, dict) or "kind" not in d:
            raise ParseError("quadratic form JSON must be an object with a 'kind'")
        if d["kind"] == "scaled":
            extra = set(d) - {"kind", "a"}
            if extra:
                raise ParseError(f"unknown quadratic form keys: {sorted(extra)}")
            try:
                return QuadraticForm.scaled(n, float(d["a"]))
            except KeyError:
                raise ParseError("scaled form needs key 'a'") from None
        if d["kind"] == "dense":
            extra = set(d) - {"kind", "entries"}
            if extra:
                raise ParseError(f"unknown quadratic form keys: {sorted(extra)}")
            if "entries" not in d:
                raise ParseError("dense form needs key 'entries'")
            return QuadraticForm.dense(n, d["entries"])
        raise ParseError(f"unknown quadratic form kind {d['kind']!r}")


@dataclass(frozen=True)
class Problem:
    """Critical-point problem data: form A, load f, exponent p, size n."""

    a_form: QuadraticForm
    f: Matrix
    p: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"problem needs n >= 2, got {self.n}")
        if self.p in (0.0, 1.0, 2.0):
            raise DomainError(f"solver paths need p outside {{0, 1, 2}}, got {self.p}")
        if self.a_form.n != self.n:
            raise DimensionError("quadratic form size does not match the problem size")
        if (self.f.rows, self.f.cols) != (self.n, self.n):
            raise DimensionError(f"f must be {self.n}x{self.n}, got {self.f.rows}x{self.f.cols}")

    @property
    def family(self) -> det.DetFamily:
        return det.det_power(self.n, self.p)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "A": self.a_form.to_json_dict(),
            "f": self.f.to_json_dict(),
        }

    @staticmethod
    def from_json_dict(d: dict) -> "Problem":
        extra = set(d) - {"n", "p", "A", "f"}
        if extra:
            raise ParseError(f"unknown problem keys: {sorted(extra)}")
        try:
            n = d["n"]
            p = float(d["p"])
        except KeyError as e:
            raise ParseError(f"problem JSON missing key {e.args[0]!r}") from None
        except (TypeError, ValueError):
            raise ParseError("problem exponent p must be a number") from None
        if not isinstance(n, int):
            raise ParseError("problem size n must be an integer")
        try:
            a_form = QuadraticForm.from_json_dict(n, d["A"])
            f = Matrix.from_json_dict(d["f"])
        except KeyError as e:
            raise ParseError(f"problem JSON missing key {e.args[0]!r}") from None
        return Problem(a_form=a_form, f=f, p=p, n=n)


@dataclass(frozen=True)
class Witness:
    """A point with energy strictly below the critical value."""

    direction: Matrix
    step: float
    objective_value: float

    def to_json_dict(self) -> dict:
        return {
            "direction": self.direction.to_json_dict(),
            "step": self.step,
            "objective_value": self.objective_value,
        }


@dataclass(frozen=True)
class SolveResult:
    converged: bool
    x_star: Matrix
    y_star: Matrix | None
    primal_residual: float
    dual_residual: float | None
    iterations: int
    objective_trace: tuple[float, ...]
    nonminimality_witness: Witness | None
    warnings: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "x_star": self.x_star.to_json_dict(),
            "y_star": self.y_star.to_json_dict() if self.y_star is not None else None,
            "objective_trace": list(self.objective_trace),
            "nonminimality_witness": (
                self.nonminimality_witness.to_json_dict()
                if self.nonminimality_witness is not None
                else None
            ),
            "warnings": list(self.warnings),
        }


# --------------------------------------------------------------------------
# energies and gradients (raw arrays internally, Matrix at the API boundary)


def _det_term_value(n: int, p: float, t: float) -> float:
    if t == 0.0 and p < 0.0:
        raise DomainError("energy undefined at det = 0 for p < 0", value=t)
    return (n / p) * abs(t) ** (p / n)


def _det_term_gradient(n: int, p: float, a: np.ndarray) -> np.ndarray:
    """Frobenius-oriented gradient of (n/p) |det|^(p/n): |t|^(p/n-1) sgn(t) cof."""
    t = float(backend.det(a))
    if t == 0.0 and p < n:
        raise DomainError("det-term gradient singular at det = 0", value=t)
    return abs(t) ** (p / n - 1.0) * np.copysign(1.0, t) * backend.cofactor_matrix(a)


def objective(prob: Problem, x: Matrix) -> float:
    """Primal energy 1/2 (A x, x) - (n/p) |det x|^(p/n) - (f, x)."""
    a = x.data
    if a.shape != (prob.n, prob.n):
        raise DimensionError(f"x must be {prob.n}x{prob.n}")
    t = float(backend.det(a))
    quad = 0.5 * float(np.sum(prob.a_form.apply(a) * a))
    return quad - _det_term_value(prob.n, prob.p, t) - float(np.sum(prob.f.data * a))


def gradient(prob: Problem, x: Matrix) -> Matrix:
    """Primal gradient A x - f - |det x|^(p/n - 1) sgn(det x) cof(x).

    The det term is evaluated through the determinant-family gradient, so
    a zero of this map satisfies the critical-point system by
    construction; matches finite differences of the energy.
    """
    a = x.data
    if a.shape != (prob.n, prob.n):
        raise DimensionError(f"x must be {prob.n}x{prob.n}")
    # cross-module route: the dual-paired family gradient, transposed into
    # the Frobenius orientation used here
    fprime = det._gradient_array(prob.family, a).T
    return Matrix(prob.a_form.apply(a) - prob.f.data - fprime)


def dual_objective(prob: Problem, y: Matrix) -> float:
    """Dual energy 1/2 (A y, y) + (f, y) - (n/q) |det(A y)|^(q/n), q = p/(p-1)."""
    if prob.p <= 2.0:
        raise DomainError(f"the dual path needs p > 2, got {prob.p}")
    a = y.data
    if a.shape != (prob.n, prob.n):
        raise DimensionError(f"y must be {prob.n}x{prob.n}")
    q = det.conjugate_exponent(prob.p)
    ay = prob.a_form.apply(a)
    t = float(backend.det(ay))
    quad = 0.5 * float(np.sum(ay * a))
    return quad + float(np.sum(prob.f.data * a)) - (prob.n / q) * abs(t) ** (q / prob.n)


def dual_gradient(prob: Problem, y: Matrix) -> Matrix:
    """Gradient of the dual energy: A y + f - A (F^L)'(A y), with the
    chain-rule factor A made explicit (A is symmetric)."""
    if prob.p <= 2.0:
        raise DomainError(f"the dual path needs p > 2, got {prob.p}")
    a = y.data
    q = det.conjugate_exponent(prob.p)
    ay = prob.a_form.apply(a)
    g_leg = _det_term_gradient(prob.n, q, ay)
    return Matrix(ay + prob.f.data - prob.a_form.apply(g_leg))


def default_tolerance(prob: Problem) -> float:
    return 1e-9 * (1.0 + float(np.max(np.abs(prob.f.data))))


# --------------------------------------------------------------------------
# descent engine


def _fd_hessian(grad_fn, a: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
    """Column-by-column central differences of the gradient map."""
    dim = a.size
    h_mat = np.empty((dim, dim))
    flat = a.reshape(-1)
    for j in range(dim):
        h = rel_step * (1.0 + abs(flat[j]))
        ap = flat.copy()
        ap[j] += h
        am = flat.copy()
        am[j] -= h
        gp = grad_fn(ap.reshape(a.shape)).reshape(-1)
        gm = grad_fn(am.reshape(a.shape)).reshape(-1)
        h_mat[:, j] = (gp - gm) / (2.0 * h)
    return 0.5 * (h_mat + h_mat.T)


def _minimize(
    value_fn,
    grad_fn,
    x0: np.ndarray,
    tol: float,
    max_iter: int,
    guard_fn=None,
):
    """Armijo gradient descent with a guarded Newton polish.

    ``guard_fn(x)`` must return True for admissible iterates (used to keep
    determinants away from gradient singularities).  Returns
    (x, iterations, trace); the trace is monotone non-increasing since only
    decreasing steps are ever accepted.
    """
    x = x0.copy()
    fx = value_fn(x)
    trace = [fx]
    step = 1.0
    for it in range(1, max_iter + 1):
        g = grad_fn(x)
        gnorm = float(np.max(np.abs(g)))
        if gnorm <= tol:
            return x, it - 1, trace
        moved = False
        if gnorm <= _NEWTON_START:
            try:
                h_mat = _fd_hessian(grad_fn, x)
                delta = np.linalg.solve(h_mat, g.reshape(-1)).reshape(x.shape)
                xn = x - delta
                if (guard_fn is None or guard_fn(xn)):
                    fn_val = value_fn(xn)
                    if fn_val <= fx:
                        x, fx = xn, fn_val
                        trace.append(fx)
                        moved = True
            except (np.linalg.LinAlgError, DomainError):
                pass
        if not moved:
            gsq = float(np.sum(g * g))
            alpha = step
            accepted = False
            for _ in range(80):
                xn = x - alpha * g
                if guard_fn is not None and not guard_fn(xn):
                    alpha *= 0.5
                    continue
                try:
                    fn_val = value_fn(xn)
                except DomainError:
                    alpha *= 0.5
                    continue
                if fn_val <= fx - 1e-4 * alpha * gsq:
                    x, fx = xn, fn_val
                    trace.append(fx)
                    step = min(alpha * 2.0, 1e6)
                    accepted = True
                    break
                alpha *= 0.5
            if not accepted:
                raise ConvergenceError(
                    f"line search stalled at gradient norm {gnorm:.3e} (tol {tol:.3e})",
                    best=(x, it - 1, trace),
                )
        # loop continues; convergence is re-checked at the top
    raise ConvergenceError(
        f"no convergence within {max_iter} iterations", best=(x, max_iter, trace)
    )


def _start_point(n: int) -> np.ndarray:
    return np.eye(n)  # unit determinant, basis independent


def solve_coercive(
    prob: Problem,
    tol: float | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SolveResult:
    """Minimize the coercive primal energy (p < 2) by safeguarded descent."""
    if prob.p >= 2.0:
        raise DomainError(f"the coercive path needs p < 2, got {prob.p}")
    tol = default_tolerance(prob) if tol is None else tol

    guard = None
    if prob.p < prob.n:
        def guard(a: np.ndarray) -> bool:
            return abs(float(backend.det(a))) >= DET_GUARD

    x, iterations, trace = _minimize(
        lambda a: objective(prob, Matrix(a)),
        lambda a: gradient(prob, Matrix(a)).data,
        _start_point(prob.n),
        tol,
        max_iter,
        guard,
    )
    x_star = Matrix(x)
    residual = float(np.max(np.abs(gradient(prob, x_star).data)))
    return SolveResult(
        converged=residual <= tol,
        x_star=x_star,
        y_star=None,
        primal_residual=residual,
        dual_residual=None,
        iterations=iterations,
        objective_trace=tuple(trace),
        nonminimality_witness=None,
        warnings=(),
    )


def _find_witness(prob: Problem, threshold: float) -> Witness | None:
    """Scan the identity ray for a primal value below ``threshold``."""
    direction = Matrix.identity(prob.n)
    t = 1.0
    for _ in range(200):
        value = objective(prob, direction.scaled(t))
        if value < threshold:
            return Witness(direction=direction, step=t, objective_value=value)
        t *= 2.0
    return None


def solve_dual(
    prob: Problem,
    tol: float | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SolveResult:
    """Critical point for p > 2 through the coercive dual energy.

    Minimizes the dual energy from a unit-determinant start, maps back via
    x = y + A^{-1} f, certifies with the primal gradient, and attaches a
    ray witness showing the primal energy drops below the critical value.
    """
    if prob.p <= 2.0:
        raise DomainError(f"the dual path needs p > 2, got {prob.p}")
    tol = default_tolerance(prob) if tol is None else tol

    def guard(a: np.ndarray) -> bool:
        return abs(float(backend.det(prob.a_form.apply(a)))) >= DET_GUARD

    y, iterations, trace = _minimize(
        lambda a: dual_objective(prob, Matrix(a)),
        lambda a: dual_gradient(prob, Matrix(a)).data,
        _start_point(prob.n),
        tol,
        max_iter,
        guard,
    )
    y_star = Matrix(y)
    dual_residual = float(np.max(np.abs(dual_gradient(prob, y_star).data)))
    x_star = Matrix(y + prob.a_form.solve(prob.f.data))
    primal_residual = float(np.max(np.abs(gradient(prob, x_star).data)))

    warnings = []
    if abs(float(backend.det(prob.a_form.apply(y)))) < 10.0 * DET_GUARD:
        warnings.append("degenerate solution: |det(A y)| at the safeguard floor")

    witness = _find_witness(prob, objective(prob, x_star) - 1.0)
    if witness is None:
        warnings.append("no nonminimality witness found on the identity ray")

    return SolveResult(
        converged=dual_residual <= tol and primal_residual <= max(1e-6, tol),
        x_star=x_star,
        y_star=y_star,
        primal_residual=primal_residual,
        dual_residual=dual_residual,
        iterations=iterations,
        objective_trace=tuple(trace),
        nonminimality_witness=witness,
        warnings=tuple(warnings),
    )
