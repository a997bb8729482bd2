"""Problem definition and hypothesis checkers.

The initial value problem

    D[a]u(x) = f(x, u(x)),  u(0) = u0 != 0,  0 < a < 1,

is described here entirely through the regularized right-hand side
h(x, t) = x^a f(x, t), which must be continuous on [0, T] x R.  A
continuous solution forces the compatibility value

    h(0, u0) = u0 / Gamma(1 - a),

and the checkers in this module produce sampled-evidence certificates for
that condition, for the growth constant driving the existence interval,
for the Lipschitz-in-t (Nagumo) constant whose critical threshold is
1/Gamma(1-a), and for the a-priori sup bound on solutions.

Certificates are reproducible numerical records, not proofs: suprema are
taken over finite deterministic sample grids and say so.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import expr
from .specfun import gamma

__all__ = [
    "RegularizedRHS",
    "Problem",
    "Certificate",
    "SamplingSpec",
    "compatibility_check",
    "estimate_growth_constant",
    "existence_interval",
    "estimate_nagumo_constant",
    "apriori_bound",
]


class RegularizedRHS:
    """The function h(x, t) = x^a f(x, t); the only way an RHS enters.

    Holding h rather than f keeps every evaluation finite at x = 0 and
    makes the compatibility condition checkable by a point evaluation.
    """

    def __init__(self, fn: Callable[[float, float], float], source: str,
                 expression: "expr.Expression | None" = None):
        self._fn = fn
        self.source = source
        self.expression = expression

    @classmethod
    def from_text(cls, text: str) -> "RegularizedRHS":
        e = expr.parse(text)
        unknown = expr.variables(e) - {"x", "t"}
        if unknown:
            raise ValueError(f"unexpected variables in RHS: {sorted(unknown)}")
        return cls(lambda x, t: expr.evaluate(e, x, t), text, expression=e)

    @classmethod
    def from_expression(cls, e: "expr.Expression") -> "RegularizedRHS":
        return cls(lambda x, t: expr.evaluate(e, x, t), expr.to_string(e), expression=e)

    @classmethod
    def from_callable(cls, fn: Callable[[float, float], float],
                      source: str = "<callable>") -> "RegularizedRHS":
        return cls(fn, source)

    def __call__(self, x: float, t: float) -> float:
        return self._fn(x, t)

    def __repr__(self) -> str:
        return f"RegularizedRHS({self.source!r})"


@dataclass(frozen=True)
class Problem:
    """Full IVP description: order, initial value, horizon, regularized RHS."""

    a: float
    u0: float
    T: float
    h: RegularizedRHS

    def __post_init__(self) -> None:
        if not (0.0 < self.a < 1.0):
            raise ValueError(f"order must satisfy 0 < a < 1, got {self.a!r}")
        if self.u0 == 0.0 or not math.isfinite(self.u0):
            raise ValueError("initial value must be nonzero and finite")
        if not (self.T > 0.0 and math.isfinite(self.T)):
            raise ValueError(f"horizon must be positive, got {self.T!r}")

    @property
    def compat_value(self) -> float:
        """The value h(0, u0) must take: u0 / Gamma(1-a)."""
        return self.u0 / gamma(1.0 - self.a)

    def to_dict(self) -> dict:
        return {"a": self.a, "u0": self.u0, "T": self.T, "h": self.h.source}


@dataclass(frozen=True)
class Certificate:
    """Outcome record of one hypothesis check or residual measurement.

    For estimator kinds, passed == (estimate <= threshold * (1 + tolerance));
    informational kinds (growth, apriori) mirror the estimate into the
    threshold so the same relation holds trivially.  For the interval kind
    the estimate is T0 itself.
    """

    kind: str
    passed: bool
    estimate: float
    threshold: float
    samples: int
    tolerance: float
    notes: str = ""

    def __post_init__(self) -> None:
        if self.kind not in {"compatibility", "growth", "nagumo", "interval",
                             "apriori", "residual"}:
            raise ValueError(f"unknown certificate kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "estimate": self.estimate,
            "threshold": self.threshold,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "notes": self.notes,
        }


@dataclass(frozen=True)
class SamplingSpec:
    """Deterministic sample grids for the sampled suprema.

    x samples are log-spaced in (eps*T, T]; t samples are uniform.  The
    grids nest under nx -> 2*nx - 1 refinement, which is what the
    monotonicity guarantees of the estimators refer to.
    """

    nx: int = 256
    nt: int = 256
    eps: float = 1e-6

    def __post_init__(self) -> None:
        if self.nx < 2 or self.nt < 2:
            raise ValueError("sampling spec needs at least 2 points per axis")
        if not (0.0 < self.eps < 1.0):
            raise ValueError("eps must lie in (0, 1)")

    def x_samples(self, T: float, include_zero: bool = False) -> np.ndarray:
        xs = T * np.logspace(math.log10(self.eps), 0.0, self.nx)
        if include_zero:
            xs = np.concatenate(([0.0], xs))
        return xs

    def t_samples(self, lo: float, hi: float) -> np.ndarray:
        if not hi > lo:
            raise ValueError("t box must be nondegenerate")
        return np.linspace(lo, hi, self.nt)


def default_t_box(p: Problem, halfwidth: float = 5.0) -> tuple[float, float]:
    return (p.u0 - halfwidth, p.u0 + halfwidth)


def compatibility_check(p: Problem, tol: float = 1e-9) -> Certificate:
    """Check h(0, u0) = u0/Gamma(1-a) to absolute tolerance tol.

    Failure for a problem whose h vanishes at x = 0 (i.e. f continuous at
    the origin, u0 != 0) is the expected rejection: such problems have no
    continuous solution.
    """
    deviation = abs(p.h(0.0, p.u0) - p.compat_value)
    passed = deviation <= tol
    notes = "deviation |h(0,u0) - u0/Gamma(1-a)|"
    if not passed:
        notes += "; no continuous solution can satisfy u(0) = u0"
    return Certificate(
        kind="compatibility",
        passed=passed,
        estimate=deviation,
        threshold=tol,
        samples=1,
        tolerance=0.0,
        notes=notes,
    )


def estimate_growth_constant(p: Problem, r: float,
                             grid: SamplingSpec = SamplingSpec()) -> Certificate:
    """Sampled growth constant M* for the existence-interval bound.

    M* is the sup over (0, T] x [u0-r, u0+r] of

        |h(x, t) - u0/Gamma(1-a)| / max(x, |t - u0|/r).

    Callers should have the compatibility check pass first; otherwise the
    ratio blows up as x -> 0 and the sampled value merely reflects the
    smallest x sample.
    """
    if r <= 0.0:
        raise ValueError("radius r must be positive")
    c = p.compat_value
    xs = grid.x_samples(p.T)
    ts = grid.t_samples(p.u0 - r, p.u0 + r)
    best = 0.0
    for x in xs:
        values = np.array([p.h(x, t) for t in ts])
        denom = np.maximum(x, np.abs(ts - p.u0) / r)
        mask = denom > 0.0
        if not np.any(mask):
            continue
        ratio = np.abs(values[mask] - c) / denom[mask]
        best = max(best, float(ratio.max()))
    return Certificate(
        kind="growth",
        passed=True,
        estimate=best,
        threshold=best,
        samples=int(xs.size * ts.size),
        tolerance=0.0,
        notes=f"M* candidate on (0,T]x[u0-r,u0+r], r={r!r}; sampled evidence, "
              "threshold mirrors the estimate",
    )


def existence_interval(m_star: float, r: float, T: float, a: float) -> Certificate:
    """Existence interval T0 from the growth constant M*.

    T0 = r/(M* Gamma(1-a)) when M* Gamma(1-a) >= r, else T0 = T; the first
    branch is additionally capped at T so the solver grid stays in [0, T].
    """
    if m_star < 0.0:
        raise ValueError("growth constant must be nonnegative")
    if r <= 0.0 or T <= 0.0:
        raise ValueError("r and T must be positive")
    if not (0.0 < a < 1.0):
        raise ValueError(f"order must satisfy 0 < a < 1, got {a!r}")
    product = m_star * gamma(1.0 - a)
    if m_star == 0.0:
        t0 = T
        notes = "degenerate M* = 0; full horizon"
    elif product >= r:
        t0 = min(r / product, T)
        notes = "T0 = r/(M* Gamma(1-a))"
        if r / product > T:
            notes += ", capped at T"
        if product == r:
            notes += "; branch tie M* Gamma(1-a) = r"
    else:
        t0 = T
        notes = "M* Gamma(1-a) <= r; full horizon"
    return Certificate(
        kind="interval",
        passed=True,
        estimate=t0,
        threshold=T,
        samples=0,
        tolerance=0.0,
        notes=notes,
    )


def estimate_nagumo_constant(p: Problem, t_box: tuple[float, float] | None = None,
                             grid: SamplingSpec = SamplingSpec(),
                             tolerance: float = 1e-9) -> Certificate:
    """Sampled Lipschitz-in-t constant of h against the threshold 1/Gamma(1-a).

    The underlying condition quantifies over all of R; the certificate
    samples the finite box recorded in its notes, so a pass is sampled
    evidence for uniqueness, not a proof.
    """
    if t_box is None:
        t_box = default_t_box(p)
    lo, hi = t_box
    xs = grid.x_samples(p.T)
    ts = grid.t_samples(lo, hi)
    dt = np.abs(ts[:, None] - ts[None, :])
    off_diagonal = dt > 0.0
    best = 0.0
    for x in xs:
        values = np.array([p.h(x, t) for t in ts])
        dv = np.abs(values[:, None] - values[None, :])
        ratio = dv[off_diagonal] / dt[off_diagonal]
        best = max(best, float(ratio.max()))
    threshold = 1.0 / gamma(1.0 - p.a)
    return Certificate(
        kind="nagumo",
        passed=best <= threshold * (1.0 + tolerance),
        estimate=best,
        threshold=threshold,
        samples=int(xs.size * ts.size),
        tolerance=tolerance,
        notes=f"Lipschitz-in-t sample over (0,T]x[{lo!r},{hi!r}]; sampled evidence",
    )


def apriori_bound(p: Problem, t_box: tuple[float, float] | None = None,
                  grid: SamplingSpec = SamplingSpec()) -> Certificate:
    """Sampled a-priori sup bound M_h Gamma(1-a) + |u0| on solutions.

    M_h is the sampled sup of |h - u0/Gamma(1-a)|; the sup of |f| itself is
    infinite for this problem class, so the bound uses the deviation of h,
    which is what the boundedness argument actually controls.  The value is
    informational: the solver consumes it for divergence detection.
    """
    if t_box is None:
        t_box = default_t_box(p)
    lo, hi = t_box
    c = p.compat_value
    xs = grid.x_samples(p.T, include_zero=True)
    ts = grid.t_samples(lo, hi)
    m_h = 0.0
    for x in xs:
        values = np.array([p.h(x, t) for t in ts])
        m_h = max(m_h, float(np.max(np.abs(values - c))))
    bound = m_h * gamma(1.0 - p.a) + abs(p.u0)
    return Certificate(
        kind="apriori",
        passed=True,
        estimate=bound,
        threshold=bound,
        samples=int(xs.size * ts.size),
        tolerance=0.0,
        notes=f"M_h Gamma(1-a) + |u0| with sampled M_h over [0,T]x[{lo!r},{hi!r}]; "
              "informational",
    )
