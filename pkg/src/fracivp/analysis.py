"""Mean-value lambda finder, worked-example catalog, candidate certification.

The mean value identity for the fractional derivative reads

    u(x) = Gamma(1-a) * lam^a * (D[a]u)(lam)   for some lam in (0, x),

and mvt_lambda locates such a lam for power-sum u by a sign-bracket scan
plus bisection, with D[a]u evaluated exactly (never numerically).

The catalog ships the closed-form examples the toolkit reproduces:

  unique_linear  h(x,t) = t/Gamma(1-a), u0 = 1; the sampled Lipschitz
                 constant sits exactly at the critical threshold and the
                 unique solution is u = 1.
  beta_family    h(x,t) = C*(t + k) with C = Gamma(b+1)/Gamma(1-a+b); the
                 threshold is exceeded for every b > 0 and uniqueness
                 fails.  Candidate solutions are u = 1 + c*x^b: the exact
                 termwise calculus confirms them for every b > 0, while
                 the form 1 + c*x (c != 0) satisfies the equation only at
                 b = 1.  Note the Gauss-Jacobi residual oracle resolves
                 1e-9 only for candidates whose quadrature integrand is
                 polynomial (b in {1, 2, ...}); for fractional b it is
                 limited by quadrature error (about 1e-4 at n_quad = 32,
                 decreasing as n_quad grows).
  remark3        u = 1 + x^2 with its induced t-independent RHS; the mean
                 value point is lam = sqrt((1-a)(2-a)/2) * x exactly.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import expr
from .fracops import PowerSum, rl_derivative
from .model import Certificate, Problem, RegularizedRHS
from .solver import residual
from .specfun import QuadratureRule, gamma

__all__ = [
    "NamedExample",
    "MvtResult",
    "RootBracketError",
    "mvt_lambda",
    "mvt_report",
    "catalog",
    "catalog_names",
    "verify_candidate",
    "expression_to_powersum",
]

CATALOG_NAMES = ("unique_linear", "beta_family", "remark3")

CANDIDATE_SLOPES = (-2.0, -1.0, 0.0, 1.0, 2.0)


class RootBracketError(RuntimeError):
    """The scan found no sign change and the identity is not degenerate."""


@dataclass(frozen=True)
class NamedExample:
    name: str
    problem: Problem
    known_solutions: tuple[PowerSum, ...]
    notes: str


@dataclass(frozen=True)
class MvtResult:
    lam: float
    ratio: float
    identity_residual: float
    degenerate: bool


def mvt_report(u: PowerSum, a: float, x: float, scan_points: int = 1024) -> MvtResult:
    """Mean value point lam in (0, x) for a power sum u, with diagnostics.

    Locates the smallest bracketed root of

        phi(lam) = Gamma(1-a) lam^a (D[a]u)(lam) - u(x)

    by scanning scan_points interior points and bisecting the first sign
    change.  If phi vanishes across the whole scan (constant u, say), the
    conventional lam = x/2 is returned with the degenerate flag set.

    Raises:
        ValueError: for x <= 0 or exponents below 0.
        RootBracketError: no bracket found and phi not identically zero.
    """
    if not x > 0.0:
        raise ValueError("evaluation point x must be positive")
    if u.terms and u.terms[0][1] < 0.0:
        raise ValueError("mean value identity requires exponents >= 0")
    du = rl_derivative(u, a)
    target = float(u(x))
    g1a = gamma(1.0 - a)
    tol = 1e-11 * (1.0 + abs(target))

    def phi(lam: float) -> float:
        return g1a * lam**a * float(du(lam)) - target

    def result(lam: float, degenerate: bool = False) -> MvtResult:
        return MvtResult(
            lam=lam,
            ratio=lam / x,
            identity_residual=abs(phi(lam)),
            degenerate=degenerate,
        )

    scan = np.linspace(0.0, x, scan_points + 2)[1:-1]
    values = np.array([phi(lam) for lam in scan])
    if np.all(np.abs(values) <= tol):
        return result(x / 2.0, degenerate=True)

    bracket = None
    for i in range(scan.size):
        if abs(values[i]) <= tol:
            return result(float(scan[i]))
        if i + 1 < scan.size and values[i] * values[i + 1] < 0.0:
            bracket = (float(scan[i]), float(scan[i + 1]))
            break
    if bracket is None:
        raise RootBracketError(
            f"no sign change over {scan_points} scan points; "
            f"min |phi| = {float(np.min(np.abs(values))):.3e}, "
            f"phi range [{values.min():.3e}, {values.max():.3e}]"
        )

    lo, hi = bracket
    flo = phi(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = phi(mid)
        if abs(fmid) <= tol:
            return result(mid)
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
        if hi - lo <= 4.0 * np.finfo(float).eps * x:
            break
    mid = 0.5 * (lo + hi)
    if abs(phi(mid)) > tol:
        raise RootBracketError(
            f"bisection stalled at lam = {mid!r} with |phi| = {abs(phi(mid)):.3e}"
        )
    return result(mid)


def mvt_lambda(u: PowerSum, a: float, x: float, scan_points: int = 1024) -> float:
    """Mean value point lam in (0, x); see mvt_report for the mechanics."""
    return mvt_report(u, a, x, scan_points=scan_points).lam


def _family_constants(beta_exp: float, a: float) -> tuple[float, float]:
    c = gamma(beta_exp + 1.0) / gamma(1.0 - a + beta_exp)
    k = (gamma(beta_exp - a + 1.0) - gamma(1.0 + beta_exp) * gamma(1.0 - a)) / (
        gamma(1.0 + beta_exp) * gamma(1.0 - a)
    )
    return c, k


def catalog(name: str, **params: float) -> NamedExample:
    """Look up a worked example by name.

    Accepted parameters: a (order, default 0.5), T (horizon, default 1.0),
    and beta (family exponent, default 1.0, beta_family only).
    """
    known = {"a", "T"} | ({"beta"} if name == "beta_family" else set())
    unknown = set(params) - known
    if unknown:
        raise ValueError(f"unknown parameter(s) for {name!r}: {sorted(unknown)}")
    a = float(params.get("a", 0.5))
    horizon = float(params.get("T", 1.0))

    if name == "unique_linear":
        problem = Problem(
            a=a, u0=1.0, T=horizon,
            h=RegularizedRHS.from_text(f"t/gamma({1.0 - a!r})"),
        )
        return NamedExample(
            name=name,
            problem=problem,
            known_solutions=(PowerSum([(1.0, 0.0)]),),
            notes="Lipschitz constant sits exactly at the critical threshold "
                  "1/Gamma(1-a); unique solution u = 1",
        )
    if name == "beta_family":
        beta_exp = float(params.get("beta", 1.0))
        if beta_exp <= 0.0:
            raise ValueError("beta must be positive")
        slope, k = _family_constants(beta_exp, a)
        problem = Problem(
            a=a, u0=1.0, T=horizon,
            h=RegularizedRHS.from_text(f"{slope!r}*(t + {k!r})"),
        )
        solutions = tuple(
            PowerSum([(1.0, 0.0), (c, beta_exp)]) for c in CANDIDATE_SLOPES
        )
        return NamedExample(
            name=name,
            problem=problem,
            known_solutions=solutions,
            notes=f"slope {slope!r} exceeds the uniqueness threshold "
                  f"{1.0 / gamma(1.0 - a)!r}; candidates u = 1 + c*x^beta "
                  f"(beta={beta_exp!r}, k={k!r}); the linear form 1 + c*x with "
                  "c != 0 solves the equation only at beta = 1",
        )
    if name == "remark3":
        problem = Problem(
            a=a, u0=1.0, T=horizon,
            h=RegularizedRHS.from_text(
                f"1/gamma({1.0 - a!r}) + 2*x^2/gamma({3.0 - a!r})"
            ),
        )
        return NamedExample(
            name=name,
            problem=problem,
            known_solutions=(PowerSum([(1.0, 0.0), (1.0, 2.0)]),),
            notes="u = 1 + x^2; mean value point lam/x = sqrt((1-a)(2-a)/2)",
        )
    raise ValueError(f"unknown example {name!r}; available: {', '.join(CATALOG_NAMES)}")


def catalog_names() -> dict[str, str]:
    """Example names with one-line descriptions, for listings."""
    return {
        "unique_linear": "critical-slope RHS with the unique solution u = 1",
        "beta_family": "above-threshold RHS family with nonunique solutions "
                       "u = 1 + c*x^beta (params: beta, a, T)",
        "remark3": "u = 1 + x^2 and its induced RHS, for mean-value checks",
    }


def verify_candidate(u: PowerSum, p: Problem, rule: QuadratureRule,
                     n_dense: int = 513, threshold: float = 1e-8) -> Certificate:
    """Certify an analytic candidate through the fixed-point residual.

    The candidate is evaluated exactly at the quadrature points (no
    interpolation), on a dense uniform grid over [0, T].

    Raises:
        ValueError: if u(0) does not match the initial value to 1e-12.
    """
    u0 = u.value_at_zero()
    if not abs(u0 - p.u0) <= 1e-12:
        raise ValueError(
            f"candidate has u(0) = {u0!r} but the problem requires {p.u0!r}"
        )
    dense = np.linspace(0.0, p.T, n_dense)
    value = residual(u, p, rule, grid=dense)
    return Certificate(
        kind="residual",
        passed=value <= threshold,
        estimate=value,
        threshold=threshold,
        samples=n_dense,
        tolerance=0.0,
        notes="analytic candidate through sup |u - Mu| on a dense grid",
    )


def expression_to_powersum(e: "expr.Expression") -> PowerSum:
    """Convert an expression in x to a power sum, or raise ValueError.

    Supported: literals, x, + - * and unary -, division by a constant,
    x^const, constant^const, nonnegative-integer powers of sums, and calls
    on constant arguments (which are folded numerically).
    """
    if not expr.variables(e) <= {"x"}:
        raise ValueError("only expressions in x can be converted to a power sum")
    return _to_powersum(e)


def _fold_constant(e: "expr.Expression") -> float:
    return expr.evaluate(e, 0.0, 0.0)


def _to_powersum(e: "expr.Expression") -> PowerSum:
    if not expr.variables(e):
        return PowerSum([(_fold_constant(e), 0.0)])
    if isinstance(e, expr.Var):
        return PowerSum([(1.0, 1.0)])
    if isinstance(e, expr.Neg):
        return _to_powersum(e.operand).scaled(-1.0)
    if isinstance(e, expr.BinOp):
        if e.op == "+":
            return _to_powersum(e.left) + _to_powersum(e.right)
        if e.op == "-":
            return _to_powersum(e.left) - _to_powersum(e.right)
        if e.op == "*":
            left = _to_powersum(e.left)
            right = _to_powersum(e.right)
            return PowerSum(
                (cl * cr, el + er) for cl, el in left.terms for cr, er in right.terms
            )
        if e.op == "/":
            if expr.variables(e.right):
                raise ValueError("division is only supported by a constant")
            divisor = _fold_constant(e.right)
            if divisor == 0.0:
                raise ValueError("division by zero")
            return _to_powersum(e.left).scaled(1.0 / divisor)
        # '^'
        if expr.variables(e.right):
            raise ValueError("exponents must be constant")
        exponent = _fold_constant(e.right)
        base = _to_powersum(e.left)
        if len(base.terms) == 1:
            coeff, mu = base.terms[0]
            if coeff < 0.0 and exponent != math.floor(exponent):
                raise ValueError("negative base with non-integer exponent")
            return PowerSum([(math.pow(coeff, exponent), mu * exponent)])
        if exponent != math.floor(exponent) or exponent < 0.0:
            raise ValueError("sums can only be raised to nonnegative integers")
        result = PowerSum([(1.0, 0.0)])
        for _ in range(int(exponent)):
            result = PowerSum(
                (cl * cr, el + er) for cl, el in result.terms for cr, er in base.terms
            )
        return result
    raise ValueError(f"call {e.func!r} on a variable argument is not a power sum")
