"""Floating-point special functions: complex log-gamma, Bessel J of integer
order with a log-scaled large-order path, Riemann zeta and its derivative by
Euler-Maclaurin, and truncated-contour inverse-Mellin quadrature.

The Bessel routine must work for orders around 1000 where J_(k-1) underflows
double precision by thousands of orders of magnitude; those values are
carried as (sign, log magnitude) pairs and consumed by the moment engine's
truncation certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, jv
from scipy.special import loggamma as _scipy_loggamma

from .errors import ContourSymmetryError, DomainError

BESSEL_ORDER_CAP = 10**4
# below this log-magnitude a double cannot represent the value reliably
_LOG_UNDERFLOW = -640.0

_BERNOULLI_2J = (
    1.0 / 6,
    -1.0 / 30,
    1.0 / 42,
    -1.0 / 30,
    5.0 / 66,
    -691.0 / 2730,
    7.0 / 6,
    -3617.0 / 510,
    43867.0 / 798,
    -174611.0 / 330,
    854513.0 / 138,
    -236364091.0 / 2730,
    8553103.0 / 6,
    -23749461029.0 / 870,
    8615841276005.0 / 14322,
)


def log_gamma(z: complex | np.ndarray) -> complex | np.ndarray:
    """Principal-branch log Gamma for Re z > 0 (scalar or array)."""
    zr = np.asarray(z)
    if np.any(zr.real <= 0):
        raise DomainError("log_gamma: requires Re z > 0")
    out = _scipy_loggamma(z)
    return out


@dataclass(frozen=True)
class LogScaledReal:
    """value = sign * exp(log_magnitude); sign 0 encodes exact zero."""

    sign: int
    log_magnitude: float

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    @classmethod
    def from_float(cls, x: float) -> "LogScaledReal":
        if x == 0.0:
            return cls(0, float("-inf"))
        return cls(1 if x > 0 else -1, math.log(abs(x)))


def bessel_log_envelope(order: int, x: float) -> float:
    """Upper bound for log |J_order(x)|, used by truncation certificates.

    For x < order this is the standard large-order exponential estimate
    order * (log(t/(1+sqrt(1-t^2))) + sqrt(1-t^2)) with t = x/order; in the
    oscillatory range it falls back to Landau's order^(-1/3) bound.  A small
    additive safety margin keeps it an envelope rather than an asymptote.
    """
    if order == 0:
        return 0.0
    if x <= 0.0:
        return float("-inf")
    t = x / order
    landau = math.log(0.8) - math.log(order) / 3.0
    if t >= 1.0:
        return landau
    root = math.sqrt(1.0 - t * t)
    debye = order * (math.log(t / (1.0 + root)) + root)
    return min(debye + 0.5, landau)


def _signed_log_add(s1: int, l1: float, s2: int, l2: float) -> tuple[int, float]:
    if s2 == 0:
        return s1, l1
    if s1 == 0:
        return s2, l2
    if l2 > l1:
        s1, l1, s2, l2 = s2, l2, s1, l1
    d = l2 - l1  # <= 0
    if s1 == s2:
        return s1, l1 + math.log1p(math.exp(d))
    diff = -math.expm1(d)
    if diff <= 0.0:
        return 0, float("-inf")
    return s1, l1 + math.log(diff)


def _bessel_series_logspace(order: int, x: float) -> LogScaledReal:
    """Ascending power series with term recursion carried in log space.

    Fully accurate while the terms are decreasing or mildly growing; in the
    deep-underflow region with strong alternation the returned magnitude is
    a noise-floor overestimate, still far below any double-precision
    threshold, which is all the callers compare against.
    """
    lx = math.log(x / 2.0)
    log_t = order * lx - gammaln(order + 1)
    sign_t = 1
    acc_s, acc_l = 1, log_t
    log_t_prev = log_t
    for j in range(1, 40000):
        log_t += 2.0 * lx - math.log(j) - math.log(order + j)
        sign_t = -sign_t
        acc_s, acc_l = _signed_log_add(acc_s, acc_l, sign_t, log_t)
        if log_t < log_t_prev and log_t < acc_l - 45.0:
            break
        log_t_prev = log_t
    return LogScaledReal(acc_s, acc_l)


def bessel_j(order: int, x: float) -> LogScaledReal:
    """J_order(x) in log-scaled form for non-negative integer order.

    Routes through scipy wherever the value is representable in double
    precision (relative error ~1e-13 there) and through the log-space
    ascending series in the deep-underflow region x << order.
    """
    if order < 0 or order > BESSEL_ORDER_CAP:
        raise DomainError(f"bessel_j: order {order} outside [0, 10^4]")
    if x < 0:
        raise DomainError(f"bessel_j: x={x} must be non-negative")
    if x == 0.0:
        return LogScaledReal(1, 0.0) if order == 0 else LogScaledReal(0, float("-inf"))
    if x >= order or bessel_log_envelope(order, x) > _LOG_UNDERFLOW:
        val = float(jv(order, x))
        if val != 0.0 and abs(val) > 1e-305:
            return LogScaledReal.from_float(val)
    return _bessel_series_logspace(order, x)


def _euler_maclaurin_zeta(s, n_terms: int, corrections: int):
    """Euler-Maclaurin value and a rigorous bound on the dropped remainder.

    Works elementwise for complex array s with Re s > 1.
    """
    s = np.asarray(s, dtype=np.complex128)
    n = np.arange(1, n_terms)
    head = np.exp(-np.multiply.outer(s, np.log(n))).sum(axis=-1)
    logn = math.log(n_terms)
    value = head + np.exp((1.0 - s) * logn) / (s - 1.0) + 0.5 * np.exp(-s * logn)
    poch = s  # prod_{i=0}^{2j-2} (s+i), starts at j=1
    npow = np.exp((-s - 1.0) * logn)
    term = None
    for j in range(1, corrections + 1):
        b = _BERNOULLI_2J[j - 1] / math.factorial(2 * j)
        term = b * poch * npow
        value = value + term
        poch = poch * (s + 2 * j - 1) * (s + 2 * j)
        npow = npow / (n_terms * n_terms)
    jn = corrections + 1
    next_term = abs(_BERNOULLI_2J[jn - 1] / math.factorial(2 * jn)) * np.abs(
        poch
    ) * np.exp((-np.real(s) - 2 * jn + 1) * logn)
    remainder = next_term * np.abs(s + 2 * jn - 1) / (np.real(s) + 2 * jn - 1)
    return value, remainder


def zeta(s: float) -> float:
    """Riemann zeta on the real axis, s >= 1.1, tail bound <= 1e-13."""
    if s < 1.1:
        raise DomainError(f"zeta: s={s} below 1.1 (near-pole range unsupported)")
    n_terms = 24
    while True:
        value, rem = _euler_maclaurin_zeta(complex(s), n_terms, 12)
        if float(rem) < 1e-14 or n_terms > 4096:
            return float(value.real)
        n_terms *= 2


def zeta_deriv(s: float) -> float:
    """zeta'(s) for real s >= 1.1 by the differentiated Euler-Maclaurin series."""
    if s < 1.1:
        raise DomainError(f"zeta_deriv: s={s} below 1.1")
    n_terms, corrections = 48, 12
    while True:
        n = np.arange(2, n_terms)
        ln = np.log(n)
        head = -(ln * n ** (-float(s))).sum()
        logn = math.log(n_terms)
        npow1 = math.exp((1.0 - s) * logn)
        value = head + npow1 * (-logn / (s - 1.0) - 1.0 / (s - 1.0) ** 2)
        value += -0.5 * logn * math.exp(-s * logn)
        poch = s
        dpoch = 1.0  # d/ds of pochhammer product
        npow = math.exp((-s - 1.0) * logn)
        for j in range(1, corrections + 1):
            b = _BERNOULLI_2J[j - 1] / math.factorial(2 * j)
            value += b * npow * (dpoch - poch * logn)
            dpoch = (
                dpoch * (s + 2 * j - 1) * (s + 2 * j)
                + poch * (s + 2 * j)
                + poch * (s + 2 * j - 1)
            )
            poch = poch * (s + 2 * j - 1) * (s + 2 * j)
            npow /= n_terms * n_terms
        jn = corrections + 1
        rem = (
            abs(_BERNOULLI_2J[jn - 1] / math.factorial(2 * jn))
            * abs(dpoch - poch * logn)
            * math.exp((-s - 2 * jn + 1) * logn)
        )
        if rem < 1e-14 or n_terms > 8192:
            return float(value)
        n_terms *= 2


def zeta_complex(s: np.ndarray) -> np.ndarray:
    """zeta(s) for a complex array with Re s >= 1.05 (contour evaluations)."""
    s = np.asarray(s, dtype=np.complex128)
    if np.any(s.real < 1.05):
        raise DomainError("zeta_complex: requires Re s >= 1.05")
    t_max = float(np.max(np.abs(s.imag))) if s.size else 0.0
    n_terms = max(32, int(1.2 * t_max) + 16)
    value, rem = _euler_maclaurin_zeta(s, n_terms, 14)
    if float(np.max(rem)) > 1e-12:
        raise ArithmeticError("zeta_complex: Euler-Maclaurin tail above 1e-12")
    return value


@dataclass(frozen=True)
class ContourSpec:
    """Truncated vertical line Re s = sigma, |Im s| <= height, discretized
    into Gauss-Legendre panels."""

    sigma: float
    height: float
    panels: int
    nodes_per_panel: int

    def __post_init__(self):
        if self.height <= 0 or self.panels < 1 or self.nodes_per_panel < 1:
            raise DomainError("ContourSpec: height and panel counts must be positive")
        if self.panels * self.nodes_per_panel < 8:
            raise DomainError("ContourSpec: needs at least 8 quadrature nodes")


@lru_cache(maxsize=32)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def contour_nodes(contour: ContourSpec) -> tuple[np.ndarray, np.ndarray]:
    """(s, w) with s the complex quadrature nodes on the vertical segment and
    w real weights such that (1/2 pi i) int f(s) ds ~ (1/2 pi) sum w f(s)."""
    x, w = _leggauss(contour.nodes_per_panel)
    edges = np.linspace(-contour.height, contour.height, contour.panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    s = contour.sigma + 1j * t
    return s, weights


def inverse_mellin(integrand, y: float, contour: ContourSpec) -> float:
    """(1/2 pi i) int integrand(s) y^(-s) ds over the truncated vertical line.

    `integrand` is called once with the full complex node array and must
    return an array of values.  The result must be real up to quadrature
    noise; a larger imaginary part signals a non-conjugate-symmetric
    integrand and raises ContourSymmetryError.
    """
    if y <= 0:
        raise DomainError(f"inverse_mellin: y={y} must be positive")
    s, w = contour_nodes(contour)
    vals = np.asarray(integrand(s)) * np.exp(-s * math.log(y))
    total = np.sum(w * vals) / (2.0 * math.pi)
    scale = np.sum(np.abs(w * vals)) / (2.0 * math.pi)
    tol = max(1e-9, 64.0 * np.finfo(float).eps * scale)
    if abs(total.imag) > tol:
        raise ContourSymmetryError(
            f"inverse_mellin: imaginary part {total.imag:.3e} exceeds {tol:.3e}"
        )
    return float(total.real)
