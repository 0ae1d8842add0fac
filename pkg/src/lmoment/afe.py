"""Approximate-functional-equation layer: gamma factors, the smoothing
weights V and W as inverse-Mellin integrals, their small-argument residue
constants, and central L-values from Hecke eigenvalue sequences.

The V and W integrands are evaluated once per (weight, level, contour) on a
fixed Gauss-Legendre node set; applying the weight to an array of arguments
is then a single matrix product, which keeps the trace-formula sweeps cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import divisor_count, is_prime
from .errors import CoverageError, DomainError
from .specfun import ContourSpec, contour_nodes, log_gamma, zeta, zeta_complex, zeta_deriv

EULER_GAMMA = 0.5772156649015329

# magnitude below which a weight function is treated as numerically dead
WEIGHT_FLOOR = 1e-12


@dataclass(frozen=True)
class WeightSpec:
    """Weight k, prime level q, and the inverse-Mellin contour (None selects
    the adaptive default: sigma = 1, height grown until the integrand has
    decayed to 1e-16 of its real-axis value)."""

    weight: int
    level: int
    contour: ContourSpec | None = None

    def __post_init__(self):
        if self.weight < 4 or self.weight % 2 != 0:
            raise DomainError(f"WeightSpec: weight {self.weight} must be even, >= 4")
        if not is_prime(self.level):
            raise DomainError(f"WeightSpec: level {self.level} must be prime")

    @property
    def root_sign(self) -> int:
        """i^k for even k."""
        return 1 if self.weight % 4 == 0 else -1


def gamma_box(s: complex | np.ndarray, k: int) -> complex | np.ndarray:
    """log of the degree-3 gamma factor
    pi^(-3s/2) Gamma((s+1)/2) Gamma((s+k-1)/2) Gamma((s+k)/2)."""
    s = np.asarray(s, dtype=np.complex128)
    out = (
        -1.5 * s * math.log(math.pi)
        + log_gamma((s + 1) / 2)
        + log_gamma((s + k - 1) / 2)
        + log_gamma((s + k) / 2)
    )
    return out if out.shape else complex(out)


def gamma_line(s: complex | np.ndarray, k: int) -> complex | np.ndarray:
    """log of the degree-1 gamma factor (2 pi)^(-s) Gamma(s + (k-1)/2)."""
    s = np.asarray(s, dtype=np.complex128)
    out = -s * math.log(2 * math.pi) + log_gamma(s + (k - 1) / 2)
    return out if out.shape else complex(out)


def _v_integrand(s: np.ndarray, k: int, q: int, include_level_factor: bool) -> np.ndarray:
    ratio = np.exp(gamma_box(0.5 + s, k) - gamma_box(0.5, k))
    vals = ratio * zeta_complex(1.0 + 2.0 * s) / s
    if include_level_factor:
        vals = vals * (1.0 - np.exp(-(1.0 + 2.0 * s) * math.log(q)))
    return vals


def _w_integrand(s: np.ndarray, k: int) -> np.ndarray:
    return np.exp(gamma_line(0.5 + s, k) - gamma_line(0.5, k)) / s


def _auto_height(sample, sigma: float, cap: float = 512.0) -> float:
    """Smallest multiple of 8 where |integrand| has fallen to 1e-16 of its
    value just off the real axis."""
    base = abs(sample(sigma + 0.25j))
    t = 8.0
    while t < cap:
        if abs(sample(sigma + 1j * t)) < 1e-16 * base:
            return t
        t += 8.0
    return cap


class WeightTables:
    """Precomputed inverse-Mellin kernels for V and W at one (k, q, contour).

    `max_abs_log_y` bounds the |log y| the tables will be asked for; the
    node density per panel is scaled so the oscillatory factor y^(-it) stays
    resolved across that range.
    """

    def __init__(
        self,
        k: int,
        q: int,
        contour: ContourSpec | None = None,
        include_level_factor: bool = True,
        max_abs_log_y: float = 20.0,
    ):
        self.k = k
        self.q = q
        self.include_level_factor = include_level_factor
        if contour is None:
            sigma = 1.0
            # height-2 panels; nodes sized to resolve the y^(-it) oscillation
            nodes = max(32, int(math.ceil(0.8 * max_abs_log_y)) + 8)
            height_v = _auto_height(
                lambda s: _v_integrand(np.array([s]), k, q, include_level_factor)[0],
                sigma,
            )
            height_w = _auto_height(lambda s: _w_integrand(np.array([s]), k)[0], sigma)
            self.contour_v = ContourSpec(sigma, height_v, int(height_v), nodes)
            self.contour_w = ContourSpec(sigma, height_w, int(height_w), nodes)
        else:
            self.contour_v = contour
            self.contour_w = contour
        s_v, w_v = contour_nodes(self.contour_v)
        s_w, w_w = contour_nodes(self.contour_w)
        self._s_v = s_v
        self._s_w = s_w
        self._coef_v = w_v * _v_integrand(s_v, k, q, include_level_factor) / (2 * math.pi)
        self._coef_w = w_w * _w_integrand(s_w, k) / (2 * math.pi)
        self._abs_v = float(np.sum(np.abs(self._coef_v)))
        self._abs_w = float(np.sum(np.abs(self._coef_w)))

    def _apply(self, s, coef, abs_coef, y):
        y = np.asarray(y, dtype=np.float64)
        flat = np.atleast_1d(y).astype(np.float64)
        if np.any(flat <= 0):
            raise DomainError("weight argument must be positive")
        out = np.empty(flat.shape, dtype=np.float64)
        sigma = float(s[0].real)
        for lo in range(0, flat.size, 1024):
            chunk = flat[lo : lo + 1024]
            phases = np.exp(-np.outer(np.log(chunk), s))
            vals = phases @ coef
            noise = 64 * np.finfo(float).eps * abs_coef * chunk**-sigma
            if np.any(np.abs(vals.imag) > np.maximum(1e-9, noise)):
                raise ArithmeticError("weight quadrature lost conjugate symmetry")
            out[lo : lo + 1024] = vals.real
        return out if y.shape else float(out[0])

    def v_at(self, y):
        return self._apply(self._s_v, self._coef_v, self._abs_v, y)

    def w_at(self, y):
        return self._apply(self._s_w, self._coef_w, self._abs_w, y)


@lru_cache(maxsize=32)
def _tables_cached(
    k: int,
    q: int,
    contour: ContourSpec | None,
    include_level_factor: bool,
    log_y_bucket: int,
) -> WeightTables:
    return WeightTables(
        k, q, contour, include_level_factor, max_abs_log_y=float(log_y_bucket)
    )


def weight_tables(
    spec: WeightSpec, include_level_factor: bool = True, max_abs_log_y: float = 20.0
) -> WeightTables:
    bucket = 20 * max(1, int(math.ceil(max_abs_log_y / 20.0)))
    return _tables_cached(spec.weight, spec.level, spec.contour, include_level_factor, bucket)


def weight_V(y: float, spec: WeightSpec) -> float:
    """Smoothing weight of the symmetric-square Dirichlet series."""
    need = abs(math.log(y)) + 1.0
    return float(weight_tables(spec, max_abs_log_y=max(20.0, need)).v_at(np.array([y]))[0])


def weight_W(y: float, spec: WeightSpec) -> float:
    """Smoothing weight of the degree-two Dirichlet series."""
    need = abs(math.log(y)) + 1.0
    return float(weight_tables(spec, max_abs_log_y=max(20.0, need)).w_at(np.array([y]))[0])


@dataclass(frozen=True)
class ResidueConstants:
    """Small-argument expansion data: V(y) = a_k log y + b_k + O(y^(1/4)),
    W(y) = c_k + O(y^(1/4)), and the assembled main-term constants."""

    a_k: float
    b_k: float
    c_k: float
    A_k: float
    B_k: float
    gamma_ratio_slope: float  # d/ds of the V gamma-factor ratio at s = 0


def _gamma_ratio_slope(k: int, step: float) -> float:
    g = lambda s: float(np.real(gamma_box(0.5 + s, k) - gamma_box(0.5, k)))
    return (g(step) - g(-step)) / (2.0 * step)


@lru_cache(maxsize=128)
def _residue_constants_cached(k: int, q: int) -> ResidueConstants:
    slope = _gamma_ratio_slope(k, 1e-5)
    check = _gamma_ratio_slope(k, 1e-6)
    if abs(slope - check) > 1e-6:
        raise ArithmeticError(
            f"gamma-ratio slope unstable under step refinement: {slope} vs {check}"
        )
    p0 = 1.0 - 1.0 / q
    a_k = -0.5 * p0
    b_k = EULER_GAMMA * p0 + math.log(q) / q + 0.5 * slope * p0
    c_k = 1.0
    z32 = zeta(1.5)
    zp32 = zeta_deriv(1.5)
    A_k = -a_k * c_k * z32
    B_k = c_k * (b_k * z32 - a_k * zp32)
    return ResidueConstants(
        a_k=a_k, b_k=b_k, c_k=c_k, A_k=A_k, B_k=B_k, gamma_ratio_slope=slope
    )


def residue_constants(spec: WeightSpec) -> ResidueConstants:
    """Laurent data of the V/W integrands at s = 0.

    a_k and b_k come from the double pole of the V integrand (the zeta
    factor supplies 1/(2s) + gamma_E, the level factor and the gamma-ratio
    their first-order terms); c_k = 1 exactly from the simple pole of the W
    integrand.  The q-dependence through (1 - q^(-1-2s)) is kept exact.
    """
    return _residue_constants_cached(spec.weight, spec.level)


def fit_v_log_slope(
    spec: WeightSpec,
    u_min: float = 45.0,
    u_max: float = 90.0,
    points: int = 10,
    sigma: float = 0.25,
) -> tuple[float, float]:
    """Independent check of (a_k, b_k): least-squares fit of V(y) against
    log y on y = exp(-u), u in [u_min, u_max].

    Deep arguments shrink the O(y^(1/4)) contamination below 1e-7; the
    contour sits at sigma = 1/4 so y^(-sigma) stays small enough for the
    quadrature to keep absolute accuracy.
    """
    tables = WeightTables(
        spec.weight,
        spec.level,
        contour=None,
        include_level_factor=True,
        max_abs_log_y=u_max + 2.0,
    )
    # rebuild on the requested abscissa with the same height and density
    height = tables.contour_v.height
    nodes = tables.contour_v.nodes_per_panel
    contour = ContourSpec(sigma, height, int(height), nodes)
    fine = WeightTables(
        spec.weight, spec.level, contour=contour, max_abs_log_y=u_max + 2.0
    )
    u = np.linspace(u_min, u_max, points)
    v = fine.v_at(np.exp(-u))
    design = np.vstack([-u, np.ones_like(u)]).T
    coef, *_ = np.linalg.lstsq(design, v, rcond=None)
    return float(coef[0]), float(coef[1])


@dataclass(frozen=True)
class AfeValue:
    """A truncated AFE evaluation: the value, a tail envelope (divisor-bound
    times the weight's decay past the cutoff), and the cutoff used."""

    value: float
    tail_bound: float
    cutoff: int


def _decay_cutoff(weight_at, scale: float, floor: float = WEIGHT_FLOOR) -> int:
    """Smallest index m where |weight(m/scale)| stays below `floor` (three
    consecutive hits, guarding against a sign-change dip)."""
    cap = 1 << 22
    m = 8
    while m <= cap:
        idx = np.arange(1, m + 1)
        vals = np.abs(weight_at(idx / scale))
        below = vals < floor
        run = 0
        for i in range(m):
            run = run + 1 if below[i] else 0
            if run == 3:
                return int(i - 1)
        m *= 2
    raise ArithmeticError("weight function failed to decay below floor")


def _tail_envelope(weight_at, scale: float, cutoff: int) -> float:
    """sum_(m > cutoff) tau(m) m^(-1/2) |weight(m/scale)| out to 4*cutoff,
    plus a terminal fudge; past 4*cutoff the weight is super-exponentially
    dead so the remainder is dominated by the last retained block."""
    ext = np.arange(cutoff + 1, 4 * cutoff + 1)
    vals = np.abs(weight_at(ext / scale))
    tau = np.array([divisor_count(int(m)) for m in ext], dtype=np.float64)
    block = float(np.sum(tau / np.sqrt(ext) * vals))
    return block + 10.0 * float(vals[-1])


def afe_L_f(
    lambdas, spec: WeightSpec, root_term: bool = True, min_cutoff: int = 0
) -> AfeValue:
    """Central value of the degree-two L-function from its AFE:

        (1 + i^k sqrt(q) lambda(q)) * sum_m lambda(m) m^(-1/2) W(m / sqrt(q))

    `lambdas` is indexed from n = 1 (lambdas[0] = lambda(1)).  Raises
    CoverageError naming the truncation point if the sequence is too short.
    min_cutoff forces a longer truncation (stability testing).
    """
    lam = np.asarray(lambdas, dtype=np.float64)
    q = spec.level
    scale = math.sqrt(q)
    tables = weight_tables(spec)
    cutoff = max(_decay_cutoff(tables.w_at, scale), min_cutoff)
    if lam.size < cutoff:
        raise CoverageError(
            f"afe_L_f: need lambda(m) for m <= {cutoff}, got {lam.size}"
        )
    if root_term and lam.size < q:
        raise CoverageError(f"afe_L_f: root-number term needs lambda({q})")
    m = np.arange(1, cutoff + 1)
    base = float(np.sum(lam[:cutoff] / np.sqrt(m) * tables.w_at(m / scale)))
    factor = 1.0
    if root_term:
        factor = 1.0 + spec.root_sign * scale * float(lam[q - 1])
    tail = _tail_envelope(tables.w_at, scale, cutoff) * abs(factor)
    return AfeValue(value=base * factor, tail_bound=tail, cutoff=cutoff)


def afe_L_sym2(lambdas, spec: WeightSpec, min_cutoff: int = 0) -> AfeValue:
    """Central value of the symmetric-square L-function from its one-term AFE:

        2 * sum_n lambda(n^2) n^(-1/2) V(n / q)

    Needs lambda up to the square of the truncation point.
    """
    lam = np.asarray(lambdas, dtype=np.float64)
    q = spec.level
    tables = weight_tables(spec)
    cutoff = max(_decay_cutoff(tables.v_at, float(q)), min_cutoff)
    if lam.size < cutoff * cutoff:
        raise CoverageError(
            f"afe_L_sym2: need lambda(n^2) for n <= {cutoff} "
            f"(sequence through {cutoff * cutoff}), got {lam.size}"
        )
    n = np.arange(1, cutoff + 1)
    squares = lam[n * n - 1]
    value = 2.0 * float(np.sum(squares / np.sqrt(n) * tables.v_at(n / q)))
    # tau(n^2)/sqrt(n) envelope for the dual-indexed tail
    ext = np.arange(cutoff + 1, 4 * cutoff + 1)
    vals = np.abs(tables.v_at(ext / q))
    tau = np.array([divisor_count(int(x * x)) for x in ext], dtype=np.float64)
    tail = 2.0 * (float(np.sum(tau / np.sqrt(ext) * vals)) + 10.0 * float(vals[-1]))
    return AfeValue(value=value, tail_bound=tail, cutoff=cutoff)
