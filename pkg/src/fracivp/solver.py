"""Discretized fixed-point operator and Picard iteration.

Solutions of the IVP coincide with fixed points of

    (M u)(x) = (1/Gamma(a)) * integral_0^x f(s, u(s)) (x-s)^(a-1) ds.

After the substitution s = x*t the operator becomes a quadrature against
the weight t^(-a) (1-t)^(a-1) of the regularized RHS:

    (M u)(x) = (1/Gamma(a)) * integral_0^1 t^(-a) (1-t)^(a-1) h(x t, u(x t)) dt,

which is what apply_m discretizes with a Gauss-Jacobi rule; the weight
absorbs the entire singularity, so the solution grid can stay uniform.
At x = 0 the value is Gamma(1-a) * h(0, u0), which equals u0 exactly when
the compatibility condition holds.

Picard iteration is this artifact's constructive choice; nothing here
guarantees convergence when the Lipschitz constant of h in t exceeds the
critical 1/Gamma(1-a), and non-convergence is reported, never hidden.
"""

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from . import expr
from .fracops import SampledFunction, rl_integral_sampled
from .model import (
    Certificate,
    Problem,
    apriori_bound,
    compatibility_check,
    estimate_growth_constant,
    existence_interval,
)
from .specfun import QuadratureRule, gamma, jacobi_rule

__all__ = [
    "SolverConfig",
    "Solution",
    "DivergenceError",
    "apply_m",
    "apply_m_product",
    "residual",
    "picard_solve",
    "multistart_probe",
    "graded_mesh",
]

InitialGuess = Union[None, float, str, "expr.Expression", Callable, SampledFunction]


class DivergenceError(RuntimeError):
    """Picard iterates exceeded the divergence threshold."""

    def __init__(self, message: str, iterations: int, sup_norm: float):
        super().__init__(message)
        self.iterations = iterations
        self.sup_norm = sup_norm


@dataclass(frozen=True)
class SolverConfig:
    n_grid: int = 129
    n_quad: int = 32
    tol: float = 1e-10
    max_iter: int = 200
    divergence_factor: float = 10.0

    def __post_init__(self) -> None:
        if self.n_grid < 9:
            raise ValueError("n_grid must be >= 9")
        if self.n_quad < 4:
            raise ValueError("n_quad must be >= 4")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.divergence_factor > 1.0:
            raise ValueError("divergence_factor must exceed 1")


@dataclass(frozen=True)
class Solution:
    """Converged or final Picard iterate plus its certification trail."""

    u: SampledFunction
    iterations: int
    converged: bool
    residual_sup: float
    node_residuals: np.ndarray
    certificates: tuple[Certificate, ...]

    def __post_init__(self) -> None:
        if self.converged and not self.residual_sup <= self.threshold_residual:
            raise ValueError("converged solutions must certify their residual")

    @property
    def threshold_residual(self) -> float:
        for cert in self.certificates:
            if cert.kind == "residual":
                return cert.threshold
        return math.inf

    @property
    def grid(self) -> np.ndarray:
        return self.u.grid

    @property
    def values(self) -> np.ndarray:
        return self.u.values


def graded_mesh(t0: float, n: int, grading: float = 3.0) -> np.ndarray:
    """Mesh on [0, t0] clustered at 0: nodes t0 * (i/(n-1))^grading."""
    if n < 2 or t0 <= 0.0 or grading < 1.0:
        raise ValueError("need n >= 2, t0 > 0 and grading >= 1")
    return t0 * np.linspace(0.0, 1.0, n) ** grading


def _evaluate_h(p: Problem, xs: np.ndarray, us: np.ndarray) -> np.ndarray:
    out = np.empty_like(xs)
    for i, (x, u) in enumerate(zip(xs, us)):
        out[i] = p.h(float(x), float(u))
    if not np.all(np.isfinite(out)):
        raise ValueError("RHS evaluation produced a non-finite value")
    return out


def apply_m(u: Union[SampledFunction, Callable], p: Problem, rule: QuadratureRule,
            grid: np.ndarray | None = None) -> SampledFunction:
    """One application of the integral operator, discretized by Gauss-Jacobi.

    u may be a SampledFunction (evaluated through its piecewise-linear
    interpolant) or any callable, in which case the solution grid must be
    supplied explicitly and u is evaluated exactly at the quadrature points.
    """
    if rule.order_a != p.a:
        raise ValueError("quadrature rule was built for a different order")
    if isinstance(u, SampledFunction):
        if grid is None:
            grid = u.grid
        u_at = lambda pts: np.interp(pts, u.grid, u.values)
    else:
        if grid is None:
            raise ValueError("an explicit grid is required for callable input")
        u_at = lambda pts: np.asarray(u(pts), dtype=float)
    grid = np.asarray(grid, dtype=float)

    points = grid[1:, None] * rule.nodes[None, :]
    u_values = u_at(points.ravel())
    h_values = _evaluate_h(p, points.ravel(), u_values).reshape(points.shape)
    values = np.empty_like(grid)
    values[0] = gamma(1.0 - p.a) * p.h(0.0, p.u0)
    values[1:] = h_values @ rule.weights / gamma(p.a)
    return SampledFunction(grid=grid, values=values)


def apply_m_product(u: SampledFunction, p: Problem) -> SampledFunction:
    """Reference route for the same operator via product integration.

    The singular factor is peeled analytically: with h0 = h(0, u0),

        (M u)(x) = Gamma(1-a) h0
                 + (1/Gamma(a)) * integral_0^x g(s) (x-s)^(a-1) ds,
        g(s)     = s^(-a) * (h(s, u(s)) - h0),

    and g (which vanishes at 0 for continuous u with u(0) = u0) is fed to
    the piecewise-linear product rule on u's own grid.  Use a graded mesh:
    g retains an x^(1-a)-type derivative singularity at the origin.
    """
    h0 = p.h(0.0, p.u0)
    x = u.grid
    g = np.zeros_like(x)
    h_vals = _evaluate_h(p, x[1:], u.values[1:])
    g[1:] = (h_vals - h0) / x[1:] ** p.a
    correction = rl_integral_sampled(SampledFunction(grid=x, values=g), p.a)
    return SampledFunction(grid=x, values=gamma(1.0 - p.a) * h0 + correction.values)


def residual(u: Union[SampledFunction, Callable], p: Problem, rule: QuadratureRule,
             grid: np.ndarray | None = None) -> float:
    """Sup-norm defect sup |u - M u| over the grid.

    This is the artifact's definition of a numerical solution; no numerical
    differentiation is involved anywhere.
    """
    mu = apply_m(u, p, rule, grid=grid)
    if isinstance(u, SampledFunction):
        u_values = u.values
    else:
        u_values = np.asarray(u(mu.grid), dtype=float)
    return float(np.max(np.abs(u_values - mu.values)))


def _initial_values(u_init: InitialGuess, grid: np.ndarray, u0: float) -> np.ndarray:
    if u_init is None:
        return np.full_like(grid, u0)
    if isinstance(u_init, (int, float)):
        return np.full_like(grid, float(u_init))
    if isinstance(u_init, str):
        u_init = expr.parse(u_init)
    if isinstance(u_init, (expr.Num, expr.Var, expr.Neg, expr.BinOp, expr.Call)):
        node = u_init
        free = expr.variables(node)
        if not free <= {"x"}:
            raise ValueError("initial guess may only depend on x")
        return np.array([expr.evaluate(node, float(x), 0.0) for x in grid])
    if isinstance(u_init, SampledFunction):
        return np.interp(grid, u_init.grid, u_init.values)
    return np.asarray(u_init(grid), dtype=float)


def solve_horizon(p: Problem, r: float = 1.0) -> tuple[Certificate, Certificate]:
    """Growth and interval certificates fixing the solution horizon T0."""
    growth = estimate_growth_constant(p, r)
    interval = existence_interval(growth.estimate, r, p.T, p.a)
    return growth, interval


def picard_solve(p: Problem, cfg: SolverConfig = SolverConfig(),
                 u_init: InitialGuess = None, t0: float | None = None,
                 r: float = 1.0, compat_tol: float = 1e-9) -> Solution:
    """Picard iteration u_{k+1} = M u_k on a uniform grid over [0, T0].

    Stops on iterate sup-difference <= tol; convergence is declared only if
    the final residual sup |u - M u| is also <= 10*tol, so stagnation is
    never reported as success.  Divergence (sup norm exceeding
    divergence_factor times the a-priori bound) raises DivergenceError.
    """
    compat = compatibility_check(p, tol=compat_tol)
    if not compat.passed:
        raise ValueError(
            f"compatibility condition fails: deviation {compat.estimate!r} "
            f"exceeds {compat.threshold!r}"
        )
    certificates = [compat]
    if t0 is None:
        growth, interval = solve_horizon(p, r)
        certificates += [growth, interval]
        t0 = interval.estimate
    elif not (0.0 < t0 <= p.T):
        raise ValueError("t0 must lie in (0, T]")
    apriori = apriori_bound(p)
    certificates.append(apriori)
    divergence_level = cfg.divergence_factor * apriori.estimate

    rule = jacobi_rule(p.a, cfg.n_quad)
    grid = np.linspace(0.0, t0, cfg.n_grid)
    current = SampledFunction(grid=grid, values=_initial_values(u_init, grid, p.u0))

    iterations = 0
    stopped = False
    for iterations in range(1, cfg.max_iter + 1):
        nxt = apply_m(current, p, rule)
        diff = float(np.max(np.abs(nxt.values - current.values)))
        current = nxt
        if current.sup_norm() > divergence_level:
            raise DivergenceError(
                f"iterate sup-norm {current.sup_norm()!r} exceeded "
                f"{cfg.divergence_factor} x a-priori bound after {iterations} iterations",
                iterations,
                current.sup_norm(),
            )
        if diff <= cfg.tol:
            stopped = True
            break

    final_m = apply_m(current, p, rule)
    node_residuals = np.abs(current.values - final_m.values)
    residual_sup = float(node_residuals.max())
    converged = stopped and residual_sup <= 10.0 * cfg.tol
    certificates.append(
        Certificate(
            kind="residual",
            passed=converged,
            estimate=residual_sup,
            threshold=10.0 * cfg.tol,
            samples=cfg.n_grid,
            tolerance=0.0,
            notes=f"sup |u - Mu| after {iterations} iterations"
                  + ("" if stopped else "; iteration budget exhausted"),
        )
    )
    return Solution(
        u=current,
        iterations=iterations,
        converged=converged,
        residual_sup=residual_sup,
        node_residuals=node_residuals,
        certificates=tuple(certificates),
    )


@dataclass(frozen=True)
class ProbeReport:
    """Outcome of the multi-start nonuniqueness probe.

    solutions[k] is the run started from init start_indices[k]; cluster
    members and diverged entries refer to the original start indices.
    """

    solutions: tuple[Solution, ...]
    start_indices: tuple[int, ...]
    cluster_members: tuple[tuple[int, ...], ...]
    representatives: tuple[Solution, ...]
    diverged: tuple[int, ...]

    @property
    def cluster_count(self) -> int:
        return len(self.representatives)


def multistart_probe(p: Problem, cfg: SolverConfig,
                     inits: Sequence[InitialGuess], t0: float | None = None,
                     r: float = 1.0) -> ProbeReport:
    """Run Picard from several starts and cluster the converged solutions.

    Converged solutions with pairwise sup-distance <= 100*tol share a
    cluster; two or more clusters is numerical evidence of nonuniqueness.
    Raises if every start diverges.
    """
    if len(inits) < 2:
        raise ValueError("the probe needs at least 2 initial functions")
    solutions: list[Solution] = []
    start_index: list[int] = []
    diverged: list[int] = []
    for index, guess in enumerate(inits):
        try:
            solutions.append(picard_solve(p, cfg, u_init=guess, t0=t0, r=r))
            start_index.append(index)
        except DivergenceError:
            diverged.append(index)
    if not solutions and diverged:
        raise DivergenceError(
            "all probe starts diverged", 0, math.nan
        )

    clusters: list[list[int]] = []
    representatives: list[Solution] = []
    for index, sol in zip(start_index, solutions):
        if not sol.converged:
            continue
        for rep, members in zip(representatives, clusters):
            if float(np.max(np.abs(sol.values - rep.values))) <= 100.0 * cfg.tol:
                members.append(index)
                break
        else:
            clusters.append([index])
            representatives.append(sol)
    return ProbeReport(
        solutions=tuple(solutions),
        start_indices=tuple(start_index),
        cluster_members=tuple(tuple(m) for m in clusters),
        representatives=tuple(representatives),
        diverged=tuple(diverged),
    )
