"""Gamma/Beta special functions and Gauss-Jacobi quadrature.

The quadrature rules generated here integrate against the weight

    w(t) = t^(-a) * (1 - t)^(a - 1)   on (0, 1),  0 < a < 1,

whose total mass is B(1-a, a) = pi / sin(pi*a).  Both exponents lie in
(-1, 0), so the weight is integrable but singular at both endpoints.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["gamma", "beta", "jacobi_rule", "QuadratureRule"]


# 13-term Lanczos rational approximation (Boost.Math's "lanczos13m53",
# g = 6.0246800407767296, accurate to ~1e-16 relative in double precision).
# Coefficients are in ascending order; the denominator is z(z+1)...(z+11).
_LANCZOS_G = 6.024680040776729583740234375
_LANCZOS_NUM = (
    23531376880.410759688572007674451636754734846804940,
    42919803642.649098768957899047001988850926355848959,
    35711959237.355668049440185451547166705960488635843,
    17921034426.037209699919755754458931112671403265390,
    6039542586.3520280050642916443072979210699388420708,
    1439720407.3117216736632230727949123939715485786772,
    248874557.86205415651146038641322942321632125127801,
    31426415.585400194380614231628318205362874684987640,
    2876370.6289353724412254090516208496135991145378768,
    186056.26539522349504029498971604569928220784236328,
    8071.6720023658162106380029022722506138218516325024,
    210.82427775157934587250973392071336271166969580291,
    2.5066282746310002701649081771338373386264310793408,
)
_LANCZOS_DEN = (
    0.0,
    39916800.0,
    120543840.0,
    150917976.0,
    105258076.0,
    45995730.0,
    13339535.0,
    2637558.0,
    357423.0,
    32670.0,
    1925.0,
    66.0,
    1.0,
)


def _lanczos_sum(z: float) -> float:
    num = 0.0
    den = 0.0
    for c_num, c_den in zip(reversed(_LANCZOS_NUM), reversed(_LANCZOS_DEN)):
        num = num * z + c_num
        den = den * z + c_den
    return num / den


def gamma(z: float) -> float:
    """Gamma function for real z > 0.

    Raises:
        ValueError: if z is not a positive finite real.
    """
    if not math.isfinite(z) or z <= 0.0:
        raise ValueError(f"gamma requires z > 0, got {z!r}")
    # Shift small arguments up via Gamma(z) = Gamma(z+1)/z; the rational
    # approximation is used only on [0.5, inf).
    shift = 1.0
    while z < 0.5:
        shift *= z
        z += 1.0
    t = z + (_LANCZOS_G - 0.5)
    return _lanczos_sum(z) * math.pow(t, z - 0.5) * math.exp(-t) / shift


def beta(p: float, q: float) -> float:
    """Beta function B(p, q) = Gamma(p)Gamma(q)/Gamma(p+q) for p, q > 0."""
    if not (math.isfinite(p) and p > 0.0):
        raise ValueError(f"beta requires p > 0, got {p!r}")
    if not (math.isfinite(q) and q > 0.0):
        raise ValueError(f"beta requires q > 0, got {q!r}")
    return gamma(p) * gamma(q) / gamma(p + q)


@dataclass(frozen=True)
class QuadratureRule:
    """Gaussian rule for the weight t^(-a) (1-t)^(a-1) on (0, 1).

    An n-point rule integrates t^k exactly (up to roundoff) against the
    weight for k = 0..2n-1, i.e. it reproduces the moments B(k+1-a, a).
    """

    nodes: np.ndarray
    weights: np.ndarray
    order_a: float
    n: int

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape != (self.n,) or weights.shape != (self.n,):
            raise ValueError("nodes/weights must both have length n")
        if not (np.all(nodes > 0.0) and np.all(nodes < 1.0)):
            raise ValueError("nodes must lie strictly inside (0, 1)")
        if not np.all(np.diff(nodes) > 0.0):
            raise ValueError("nodes must be strictly increasing")
        if not np.all(weights > 0.0):
            raise ValueError("weights must be positive")
        mass = beta(1.0 - self.order_a, self.order_a)
        if abs(float(weights.sum()) - mass) > 1e-12 * mass:
            raise ValueError("total weight does not match B(1-a, a)")

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum for integrand values sampled at the nodes."""
        return float(np.dot(self.weights, values))


def _jacobi_recurrence(alpha: float, beta_exp: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Three-term recurrence coefficients for monic Jacobi polynomials.

    Weight (1-x)^alpha (1+x)^beta_exp on (-1, 1).  Returns (diag, offsq)
    where offsq[0] is the total mass and offsq[i] = b_i for i >= 1.  The
    i = 1 coefficient uses the cancelled form, which stays regular when
    alpha + beta_exp = -1 (our case: the generic formula is 0/0 there).
    """
    ab = alpha + beta_exp
    diag = np.zeros(n)
    offsq = np.zeros(n)
    diag[0] = (beta_exp - alpha) / (ab + 2.0)
    offsq[0] = math.pow(2.0, ab + 1.0) * beta(alpha + 1.0, beta_exp + 1.0)
    if n > 1:
        offsq[1] = 4.0 * (alpha + 1.0) * (beta_exp + 1.0) / ((ab + 2.0) ** 2 * (ab + 3.0))
    for i in range(1, n):
        s = 2.0 * i + ab
        diag[i] = (beta_exp**2 - alpha**2) / (s * (s + 2.0))
        if i >= 2:
            offsq[i] = (
                4.0 * i * (i + alpha) * (i + beta_exp) * (i + ab)
                / (s**2 * (s + 1.0) * (s - 1.0))
            )
    return diag, offsq


def jacobi_rule(a: float, n: int) -> QuadratureRule:
    """n-point Gaussian rule for the weight t^(-a) (1-t)^(a-1) on (0, 1).

    Nodes and weights come from the Golub-Welsch eigen-decomposition of the
    symmetric tridiagonal recurrence matrix for the Jacobi weight
    (1-x)^(a-1) (1+x)^(-a) on (-1, 1), mapped to (0, 1) via t = (1+x)/2.

    Raises:
        ValueError: if a is outside (0, 1) or n < 1.
        RuntimeError: if the eigenvalue solver fails to converge.
    """
    if not (0.0 < a < 1.0):
        raise ValueError(f"order must satisfy 0 < a < 1, got {a!r}")
    if n < 1:
        raise ValueError(f"rule size must be >= 1, got {n!r}")
    diag, offsq = _jacobi_recurrence(a - 1.0, -a, n)
    mass = offsq[0]
    if n == 1:
        x = np.array([diag[0]])
        w = np.array([mass])
    else:
        jacobi_matrix = np.diag(diag) + np.diag(np.sqrt(offsq[1:]), -1) + np.diag(np.sqrt(offsq[1:]), 1)
        try:
            x, vectors = np.linalg.eigh(jacobi_matrix)
        except np.linalg.LinAlgError as exc:
            raise RuntimeError(
                f"Gauss-Jacobi node solver failed for a={a}, n={n}: {exc}"
            ) from exc
        w = mass * vectors[0, :] ** 2
    return QuadratureRule(nodes=(1.0 + x) / 2.0, weights=w, order_a=a, n=n)
