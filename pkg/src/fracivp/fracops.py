"""Riemann-Liouville integral and derivative of order a in (0, 1).

Two representations are supported: finite power sums, on which both
operators act exactly and termwise, and grid samples, for which the
fractional integral is computed by product integration that is exact
whenever the sampled function is piecewise linear.

The operators are

    I[a]u(x) = (1/Gamma(a))   * integral_0^x u(s) (x-s)^(a-1) ds
    D[a]u(x) = d/dx I[1-a]u(x)

and on a single power x^m (m > -1) they reduce to

    I[a]: x^m -> Gamma(m+1)/Gamma(m+1+a) * x^(m+a)
    D[a]: x^m -> Gamma(m+1)/Gamma(m+1-a) * x^(m-a)

with the convention 1/Gamma(0) = 0, so D[a] annihilates x^(a-1).
"""

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .specfun import gamma

__all__ = [
    "PowerSum",
    "SampledFunction",
    "rl_integral",
    "rl_derivative",
    "rl_integral_sampled",
]

# Exponents closer than this are considered equal and their coefficients
# merged; Gamma-ratio arithmetic produces near-duplicate exponents.
EXPONENT_MERGE_TOL = 1e-12

# Termwise results with |coefficient| below this are dropped.
COEFF_PRUNE_TOL = 1e-15

# Interpolation degree of the sampled representation.  The product rule in
# rl_integral_sampled is exact for this class; changing it would change
# the exactness contract everywhere, so it is a constant, not a knob.
INTERPOLATION_DEGREE = 1


@dataclass(frozen=True)
class PowerSum:
    """Finite sum of real powers: sum_i c_i * x^(mu_i) with mu_i > -1.

    Terms are normalized on construction: sorted by exponent, exponents
    within EXPONENT_MERGE_TOL merged, and exact-zero coefficients dropped.
    """

    terms: tuple[tuple[float, float], ...]

    def __init__(self, terms: Iterable[tuple[float, float]]):
        merged: list[list[float]] = []
        for coeff, exponent in sorted(terms, key=lambda ce: ce[1]):
            coeff = float(coeff)
            exponent = float(exponent)
            if exponent <= -1.0:
                raise ValueError(
                    f"exponent must be > -1 for integrability at 0, got {exponent!r}"
                )
            if merged and abs(exponent - merged[-1][1]) <= EXPONENT_MERGE_TOL:
                merged[-1][0] += coeff
            else:
                merged.append([coeff, exponent])
        object.__setattr__(
            self,
            "terms",
            tuple((c, e) for c, e in merged if c != 0.0),
        )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for coeff, exponent in self.terms:
            if exponent == 0.0:
                out = out + coeff
            else:
                out = out + coeff * np.power(x, exponent, where=(x > 0) | (exponent > 0),
                                             out=np.full_like(x, np.inf))
        return out if out.ndim else float(out)

    def value_at_zero(self) -> float:
        """Limit at x = 0: the x^0 coefficient; infinite for negative powers."""
        for coeff, exponent in self.terms:
            if exponent < 0.0:
                return float("inf") if coeff > 0 else float("-inf")
            if exponent == 0.0:
                return coeff
            break
        return 0.0

    def scaled(self, factor: float) -> "PowerSum":
        return PowerSum((factor * c, e) for c, e in self.terms)

    def __add__(self, other: "PowerSum") -> "PowerSum":
        return PowerSum(self.terms + other.terms)

    def __sub__(self, other: "PowerSum") -> "PowerSum":
        return self + other.scaled(-1.0)


@dataclass(frozen=True)
class SampledFunction:
    """Function values on a grid over [0, T], interpolated piecewise linearly."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise ValueError("grid and values must be 1-d, equal length >= 2")
        if grid[0] != 0.0:
            raise ValueError("grid must start at 0")
        if not np.all(np.diff(grid) > 0.0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")

    def __call__(self, x):
        return np.interp(x, self.grid, self.values)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


def _check_order(a: float) -> None:
    if not (0.0 < a < 1.0):
        raise ValueError(f"order must satisfy 0 < a < 1, got {a!r}")


def _reciprocal_gamma(z: float) -> float:
    """1/Gamma(z) for z > -1, with 1/Gamma(0) = 0."""
    if z > 0.0:
        return 1.0 / gamma(z)
    if z == 0.0:
        return 0.0
    return z / gamma(z + 1.0)


def rl_integral(p: PowerSum, a: float) -> PowerSum:
    """Exact fractional integral of order a on a power sum."""
    _check_order(a)
    return PowerSum(
        (c * gamma(e + 1.0) / gamma(e + 1.0 + a), e + a) for c, e in p.terms
    )


def rl_derivative(p: PowerSum, a: float) -> PowerSum:
    """Exact fractional derivative of order a on a power sum.

    The term x^(a-1) is annihilated (its image coefficient carries
    1/Gamma(0) = 0); near-zero image coefficients are pruned.
    """
    _check_order(a)
    out = []
    for c, e in p.terms:
        coeff = c * gamma(e + 1.0) * _reciprocal_gamma(e + 1.0 - a)
        if abs(coeff) >= COEFF_PRUNE_TOL:
            out.append((coeff, e - a))
    return PowerSum(out)


def rl_integral_sampled(u: SampledFunction, a: float) -> SampledFunction:
    """Fractional integral of order a by product integration.

    Integrates the piecewise-linear interpolant of u exactly against the
    kernel (x-s)^(a-1)/Gamma(a), so the result is exact (to roundoff) when
    u is piecewise linear on its own grid.
    """
    _check_order(a)
    x = u.grid
    v = u.values
    slopes = np.diff(v) / np.diff(x)
    out = np.zeros_like(v)
    inv_gamma_a = 1.0 / gamma(a)
    for i in range(1, x.size):
        d0 = x[i] - x[:i]
        d1 = x[i] - x[1 : i + 1]
        p0 = d0**a
        p1 = d1**a
        block = (p0 - p1) / a
        ramp = d0 * block - (d0 * p0 - d1 * p1) / (a + 1.0)
        out[i] = inv_gamma_a * float(np.dot(v[:i], block) + np.dot(slopes[:i], ramp))
    return SampledFunction(grid=x, values=out)
