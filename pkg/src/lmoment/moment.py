"""Trace-formula moment engine.

Computes the diagonal terms, the two Bessel-weighted off-diagonal
Kloosterman sums in their pre-Poisson form (the quantity the proof bounds,
summed honestly), assembles the full spectral average, fits the
log-asymptotic, and cross-checks the Poisson-summation identity that powers
the character-sum evaluation.

Off-diagonal evaluation: for each modulus M = cq a single real FFT of the
unit-phase array yields the complete Kloosterman table K[j] = S(d, j; M);
the twist identity S(m, r; M) = S(d, m' r; M) with m = d m', gcd(m', M) = 1
then serves every m from a handful of tables.  All reductions run in a
fixed index order (numpy pairwise within blocks, exact fsum across blocks),
so reports are identical at any thread count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as _sfft
from scipy.special import jv

from .afe import WeightSpec, weight_tables
from .arith import factorize
from .errors import CapacityError, DomainError, ValidationError
from .expsums import (
    CharSumParams,
    charsum_o1_bruteforce_grid,
    kloosterman,
    unit_tables,
)

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class TruncationPolicy:
    """Explicit cutoffs for the moment sums.

    n_cut and m_cut mirror the dyadic ranges of the analysis (n up to ~q,
    m up to ~sqrt(q)); c_cut caps the Kloosterman modulus sum, which stops
    earlier whenever the Bessel-times-Weil envelope certifies the remaining
    tail below tail_tol.
    """

    n_cut: int
    m_cut: int
    c_cut: int
    eta: float = 0.01
    tail_tol: float = 1e-10

    def __post_init__(self):
        if self.n_cut < 1 or self.m_cut < 1 or self.c_cut < 1:
            raise ValidationError("TruncationPolicy: cutoffs must be positive")
        if self.tail_tol <= 0:
            raise ValidationError("TruncationPolicy: tail_tol must be positive")

    @classmethod
    def default_for(cls, spec: WeightSpec, c_cut: int = 96) -> "TruncationPolicy":
        q = spec.level
        return cls(n_cut=q, m_cut=math.isqrt(q - 1) + 1, c_cut=c_cut)

    def validate_against(self, spec: WeightSpec) -> None:
        q = spec.level
        if self.n_cut < q:
            raise ValidationError(f"TruncationPolicy: n_cut {self.n_cut} below q={q}")
        if self.m_cut < math.sqrt(q):
            raise ValidationError(
                f"TruncationPolicy: m_cut {self.m_cut} below sqrt(q)={math.sqrt(q):.1f}"
            )


@dataclass(frozen=True)
class MomentReport:
    """One engine run: diagonals, off-diagonals, assembled total, and the
    truncation bookkeeping.  The basis-completion correction of order
    q^(-1/4) is deliberately not modelled; `oldform_gap_order` records that
    known gap for downstream tolerance choices."""

    q: int
    k: int
    delta1: float
    delta2: float
    o1: float
    o2: float
    s1: float
    s2: float
    total: float
    tail_bounds: dict = field(default_factory=dict)
    o1_certified: bool = False
    o2_certified: bool = False
    c_used_o1: int = 0
    c_used_o2: int = 0
    n_cut: int = 0
    m_cut: int = 0
    oldform_gap_order: str = "q^(-1/4)"
    wall_time: float = 0.0

    @property
    def tail_bound(self) -> float:
        t = self.tail_bounds
        return 2.0 * (t.get("delta1", 0.0) + t.get("delta2", 0.0)) + 4.0 * math.pi * (
            t.get("o1", 0.0) + t.get("o2", 0.0)
        )

    CSV_COLUMNS = ("q", "k", "delta1", "delta2", "o1", "o2", "total", "tail_bound", "seconds")

    def csv_row(self) -> tuple:
        return (
            self.q,
            self.k,
            repr(self.delta1),
            repr(self.delta2),
            repr(self.o1),
            repr(self.o2),
            repr(self.total),
            repr(self.tail_bound),
            f"{self.wall_time:.3f}",
        )

    def to_json_dict(self) -> dict:
        return {
            "q": self.q,
            "k": self.k,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "o1": self.o1,
            "o2": self.o2,
            "s1": self.s1,
            "s2": self.s2,
            "total": self.total,
            "tail_bounds": dict(self.tail_bounds),
            "tail_bound": self.tail_bound,
            "o1_certified": self.o1_certified,
            "o2_certified": self.o2_certified,
            "c_used_o1": self.c_used_o1,
            "c_used_o2": self.c_used_o2,
            "n_cut": self.n_cut,
            "m_cut": self.m_cut,
            "oldform_gap_order": self.oldform_gap_order,
            "wall_time": self.wall_time,
        }


def _sign_ik(k: int) -> int:
    """i^k = i^(-k) = (-1)^(k/2) for even k."""
    return 1 if k % 4 == 0 else -1


def _diagonal(spec: WeightSpec, pol: TruncationPolicy, scale_power: float):
    """sum of n^(-3/2) V(n/q) W(n^2 * q^scale_power) with its tail envelope.

    scale_power = -1/2 gives the first diagonal, +1/2 the second.
    """
    tables = weight_tables(spec)
    q = spec.level
    w_scale = float(q) ** scale_power
    n_max = 16
    while True:
        n = np.arange(1, n_max + 1)
        w_vals = tables.w_at(n * n * w_scale)
        dead = np.abs(w_vals) * n**-1.5 < 1e-18
        if np.all(dead[-3:]) or n_max >= pol.n_cut:
            break
        n_max = min(2 * n_max, pol.n_cut)
    terms = n**-1.5 * tables.v_at(n / q) * w_vals
    value = float(np.sum(terms))
    ext = np.arange(n_max + 1, 2 * n_max + 1)
    ext_terms = np.abs(ext**-1.5 * tables.v_at(ext / q) * tables.w_at(ext * ext * w_scale))
    tail = float(np.sum(ext_terms)) + 10.0 * float(ext_terms[-1])
    return value, tail


def diagonal_delta1(spec: WeightSpec, pol: TruncationPolicy | None = None) -> float:
    """First diagonal: sum of n^(-3/2) V(n/q) W(n^2 / sqrt(q)); carries the
    main term of the asymptotic."""
    pol = pol or TruncationPolicy.default_for(spec)
    return _diagonal(spec, pol, -0.5)[0]


def diagonal_delta2(spec: WeightSpec, pol: TruncationPolicy | None = None) -> float:
    """Second diagonal: W argument sqrt(q) n^2; negligible once sqrt(q)
    clears the W decay scale k/(4 pi)."""
    pol = pol or TruncationPolicy.default_for(spec)
    return _diagonal(spec, pol, 0.5)[0]


def _log_envelope_vec(order: int, z: np.ndarray) -> np.ndarray:
    """Vectorized upper bound for log |J_order|, matching
    specfun.bessel_log_envelope."""
    z = np.asarray(z, dtype=np.float64)
    landau = math.log(0.8) - math.log(max(order, 1)) / 3.0
    t = np.minimum(z / order, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        root = np.sqrt(np.maximum(1.0 - t * t, 0.0))
        debye = order * (np.log(t / (1.0 + root)) + root) + 0.5
    out = np.where(t >= 1.0, landau, np.minimum(debye, landau))
    return np.where(z <= 0.0, -np.inf, out)


def _tau_times_q(c: int, q: int) -> int:
    """Divisor count of c*q for prime q."""
    tau = 1
    q_exp = 1
    for p, e in factorize(c):
        if p == q:
            q_exp += e
        else:
            tau *= e + 1
    return tau * (q_exp + 1)


def _tau_cq_table(limit: int, q: int) -> np.ndarray:
    """tau(c*q) for c = 1..limit via a divisor sieve (q prime)."""
    counts = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        counts[d::d] += 1
    taus = counts * 2
    for c in range(q, limit + 1, q):
        a, cc = 0, c
        while cc % q == 0:
            a += 1
            cc //= q
        taus[c] = counts[c] * (a + 2) // (a + 1)
    return taus[1:].astype(np.float64)


class _OffdiagPlan:
    """Weight arrays, Bessel scales, and envelope bookkeeping shared by the
    two off-diagonal sums at one (spec, policy)."""

    def __init__(self, spec: WeightSpec, pol: TruncationPolicy):
        pol.validate_against(spec)
        self.spec = spec
        self.pol = pol
        q = spec.level
        tables = weight_tables(spec)
        n = np.arange(1, pol.n_cut + 1)
        m = np.arange(1, pol.m_cut + 1)
        self.n = n
        self.m = m
        self.v_weights = tables.v_at(n / q) / np.sqrt(n)
        self.w_weights = tables.w_at(m / math.sqrt(q)) / np.sqrt(m)
        self.abs_v_sum = float(np.sum(np.abs(self.v_weights)))
        self.abs_w = np.abs(self.w_weights)
        self.abs_w_sum = float(np.sum(self.abs_w))
        self.nu = spec.weight - 1
        # variant -> (Bessel denominator at c=1, overall prefactor)
        self.scales = {"o1": (float(q), 1.0), "o2": (math.sqrt(q), math.sqrt(q))}
        self.unit_fraction = {}  # c -> phi(cq)/(cq)

    def _phi_ratio(self, c: int) -> float:
        q = self.spec.level
        if c not in self.unit_fraction:
            ratio = 1.0 - 1.0 / q
            seen = {q}
            for p, _ in factorize(c):
                if p not in seen:
                    ratio *= 1.0 - 1.0 / p
                    seen.add(p)
            self.unit_fraction[c] = ratio
        return self.unit_fraction[c]

    def block_bounds(self, variant: str, c: int) -> np.ndarray:
        """Envelope for each (c, m) block: Bessel envelope times the trivial
        |S| <= phi(cq) bound with all n-weights in absolute value."""
        denom, pref = self.scales[variant]
        z_max = FOUR_PI * self.pol.n_cut * np.sqrt(self.m) / (c * denom)
        env = np.exp(np.minimum(_log_envelope_vec(self.nu, z_max), 0.0))
        return env * self.abs_v_sum * self.abs_w * self._phi_ratio(c) * pref

    def range_tail_envelope(self, variant: str, c_stop: int) -> float:
        """Absolute-value envelope for the mass beyond n_cut and m_cut at the
        retained moduli: weight decay beyond the cutoffs times the Weil bound
        and the Landau cap on the Bessel factor.  Honest but crude - the
        off-diagonal region it bounds is oscillatory, so this dominates the
        reported off-diagonal tails at small weight."""
        q = self.spec.level
        _, pref = self.scales[variant]
        tables = weight_tables(self.spec)
        n_ext = np.arange(self.pol.n_cut + 1, 8 * self.pol.n_cut + 1)
        v_tail = float(np.sum(np.abs(tables.v_at(n_ext / q)) / np.sqrt(n_ext)))
        m_ext = np.arange(self.pol.m_cut + 1, 8 * self.pol.m_cut + 1)
        w_ext = np.abs(tables.w_at(m_ext / math.sqrt(q))) / np.sqrt(m_ext)
        w_tail = float(np.sum(w_ext * np.sqrt(m_ext)))
        c_arr = np.arange(1, c_stop + 1)
        tau = _tau_cq_table(c_stop, q)
        c_factor = float(np.sum(tau / np.sqrt(c_arr * float(q))))
        denom, _ = self.scales[variant]
        z_ext_max = FOUR_PI * 8 * self.pol.n_cut * math.sqrt(8 * self.pol.m_cut) / denom
        bessel_cap = min(
            1.0,
            0.8 / max(self.nu, 1) ** (1.0 / 3.0),
            math.exp(min(0.0, _log_envelope_vec(self.nu, np.array([z_ext_max]))[0])),
        )
        w_sqrt_full = float(np.sum(self.abs_w * np.sqrt(self.m))) + w_tail
        # new-n mass against all m, plus new-m mass against the old n
        return (
            (v_tail * w_sqrt_full + self.abs_v_sum * w_tail)
            * c_factor
            * bessel_cap
            * pref
        )

    def weil_envelope_per_c(self, variant: str, c_arr: np.ndarray, tau: np.ndarray) -> np.ndarray:
        """Per-modulus absolute-value envelope used for the c-sum tail:
        Weil bound tau(cq) sqrt(m cq) / cq summed against the weights, with
        the Bessel factor capped by its envelope at each (c, m)."""
        q = self.spec.level
        denom, pref = self.scales[variant]
        out = np.empty(c_arr.size, dtype=np.float64)
        w_sqrt_m = self.abs_w * np.sqrt(self.m)
        for lo in range(0, c_arr.size, 8192):
            cs = c_arr[lo : lo + 8192]
            z = FOUR_PI * self.pol.n_cut * np.sqrt(self.m)[None, :] / (cs[:, None] * denom)
            amp = np.exp(np.minimum(_log_envelope_vec(self.nu, z), 0.0))
            out[lo : lo + 8192] = (amp @ w_sqrt_m) / np.sqrt(cs * float(q))
        return out * tau * self.abs_v_sum * pref


def _variant_stops(plan: _OffdiagPlan, variant: str):
    """(c_stop, certified, tail_at_stop) chosen from envelope suffix sums
    before any block work starts.

    The envelope horizon runs to where the Bessel argument has fallen to
    5 percent of the order (the envelope is then at least e^(-2.6 order)
    and decays faster than c^(-order) beyond), capped at 2*10^5.
    """
    pol = plan.pol
    denom, _ = plan.scales[variant]
    z1 = FOUR_PI * pol.n_cut * math.sqrt(pol.m_cut) / denom
    horizon = max(4 * pol.c_cut, int(z1 / (0.05 * plan.nu)) + 1)
    horizon = min(horizon, 200000)
    c_arr = np.arange(1, horizon + 1)
    tau = _tau_cq_table(horizon, plan.spec.level)
    env = plan.weil_envelope_per_c(variant, c_arr, tau)
    suffix = np.concatenate([np.cumsum(env[::-1])[::-1], [0.0]])
    # beyond the horizon the per-c envelope keeps dropping superpolynomially
    beyond = 10.0 * float(env[-1])
    certified_cs = np.nonzero(suffix[1 : pol.c_cut + 1] + beyond < pol.tail_tol)[0]
    if certified_cs.size:
        c_stop = int(certified_cs[0]) + 1
        return c_stop, True, float(suffix[c_stop] + beyond)
    return pol.c_cut, False, float(suffix[pol.c_cut] + beyond)


def _modulus_part(m: int, modulus: int) -> tuple[int, int]:
    """m = d * m' with d carrying every prime m shares with modulus and
    gcd(m', modulus) = 1."""
    d = 1
    g = math.gcd(m, modulus)
    while g > 1:
        d *= g
        m //= g
        g = math.gcd(m, modulus)
    return d, m


def _kloosterman_table(d: int, modulus: int, units, inverses) -> np.ndarray:
    """K[j] = S(d, j; modulus) for all j, via one real inverse FFT of the
    conjugate-symmetric unit-phase array e(d * xbar / modulus)."""
    half = modulus // 2
    spectrum = np.zeros(half + 1, dtype=np.complex128)
    mask = units <= half
    idx = units[mask]
    vals = np.exp(2j * np.pi * ((d % modulus) * inverses[mask] % modulus) / modulus)
    spectrum[idx] = vals
    if modulus == 1:
        return np.ones(1)
    if modulus == 2:
        # lone unit 1 sits at the Nyquist slot
        spectrum[1] = vals[0] if idx.size else 0.0
    return _sfft.irfft(spectrum, n=modulus, workers=1) * modulus


def _block_pair(plan: _OffdiagPlan, c: int, alive: dict, floors: dict):
    """Exact contribution of one modulus c * q to both off-diagonal sums.

    Returns {variant: (partial, skipped_envelope)}.
    """
    q = plan.spec.level
    modulus = c * q
    out = {}
    alive_masks = {}
    needed_d = set()
    for variant in ("o1", "o2"):
        if not alive[variant]:
            out[variant] = (0.0, 0.0)
            continue
        bounds = plan.block_bounds(variant, c)
        keep = bounds >= floors[variant]
        alive_masks[variant] = keep
        out[variant] = (0.0, float(np.sum(bounds[~keep])))
        for m_idx in np.nonzero(keep)[0]:
            needed_d.add(_modulus_part(int(m_idx) + 1, modulus)[0])
    if not needed_d:
        return out
    units, inverses = unit_tables(modulus)
    tables = {d: _kloosterman_table(d, modulus, units, inverses) for d in sorted(needed_d)}
    res = {
        "o1": plan.n * plan.n % modulus,
        "o2": q * plan.n * plan.n % modulus,
    }
    for variant in ("o1", "o2"):
        if not alive[variant] or variant not in alive_masks:
            continue
        denom, pref = plan.scales[variant]
        partial = 0.0
        skipped = out[variant][1]
        residues = res[variant]
        for m_idx in np.nonzero(alive_masks[variant])[0]:
            m_val = int(m_idx) + 1
            d, m_coprime = _modulus_part(m_val, modulus)
            z = FOUR_PI * plan.n * math.sqrt(m_val) / (c * denom)
            weights = plan.v_weights * jv(plan.nu, z)
            gathered = tables[d][m_coprime * residues % modulus]
            inner = float(np.sum(weights * gathered))
            partial += plan.w_weights[m_idx] * inner / modulus
        out[variant] = (partial * pref, skipped)
    return out


def _offdiag_pair(spec: WeightSpec, pol: TruncationPolicy, threads: int = 1) -> dict:
    """Both off-diagonal sums in one sweep over the shared moduli."""
    plan = _OffdiagPlan(spec, pol)
    stops = {}
    for variant in ("o1", "o2"):
        stops[variant] = _variant_stops(plan, variant)
    floors = {
        variant: pol.tail_tol / (8.0 * pol.m_cut * pol.c_cut) for variant in stops
    }
    c_top = max(stops["o1"][0], stops["o2"][0])

    def work(c: int):
        alive = {v: c <= stops[v][0] for v in stops}
        return _block_pair(plan, c, alive, floors)

    c_values = list(range(1, c_top + 1))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(work, c_values))
    else:
        blocks = [work(c) for c in c_values]
    result = {}
    for variant in ("o1", "o2"):
        value = math.fsum(b[variant][0] for b in blocks)
        skipped = math.fsum(b[variant][1] for b in blocks)
        c_stop, certified, tail_beyond = stops[variant]
        tail = skipped + tail_beyond + plan.range_tail_envelope(variant, c_stop)
        result[variant] = (value, tail, certified, c_stop)
    return result


def offdiag_o1(
    spec: WeightSpec, pol: TruncationPolicy | None = None, threads: int = 1
) -> float:
    """First off-diagonal: the triple sum of Kloosterman sums S(m, n^2; cq)
    against J_(k-1)(4 pi n sqrt(m) / cq) with the V, W weights (pre-Poisson
    form, summed directly)."""
    pol = pol or TruncationPolicy.default_for(spec)
    return _offdiag_pair(spec, pol, threads)["o1"][0]


def offdiag_o2(
    spec: WeightSpec, pol: TruncationPolicy | None = None, threads: int = 1
) -> float:
    """Second off-diagonal: sqrt(q) times the triple sum with S(m, q n^2; cq)
    and Bessel argument 4 pi n sqrt(m) / (c sqrt(q))."""
    pol = pol or TruncationPolicy.default_for(spec)
    return _offdiag_pair(spec, pol, threads)["o2"][0]


def moment_total(
    spec: WeightSpec, pol: TruncationPolicy | None = None, threads: int = 1
) -> MomentReport:
    """Full engine run assembling S = 2 S_1 + 2 i^k S_2 with
    S_i = Delta_i + 2 pi i^(-k) O_i."""
    start = time.perf_counter()
    pol = pol or TruncationPolicy.default_for(spec)
    pol.validate_against(spec)
    sign = _sign_ik(spec.weight)
    d1, t1 = _diagonal(spec, pol, -0.5)
    d2, t2 = _diagonal(spec, pol, 0.5)
    off = _offdiag_pair(spec, pol, threads)
    o1, to1, cert1, c1 = off["o1"]
    o2, to2, cert2, c2 = off["o2"]
    s1 = d1 + 2.0 * math.pi * sign * o1
    s2 = d2 + 2.0 * math.pi * sign * o2
    total = 2.0 * s1 + 2.0 * sign * s2
    return MomentReport(
        q=spec.level,
        k=spec.weight,
        delta1=d1,
        delta2=d2,
        o1=o1,
        o2=o2,
        s1=s1,
        s2=s2,
        total=total,
        tail_bounds={"delta1": t1, "delta2": t2, "o1": to1, "o2": to2},
        o1_certified=cert1,
        o2_certified=cert2,
        c_used_o1=c1,
        c_used_o2=c2,
        n_cut=pol.n_cut,
        m_cut=pol.m_cut,
        wall_time=time.perf_counter() - start,
    )


def asymptotic_fit(points) -> tuple[float, float, float]:
    """Least squares of total against log q.

    points: iterable of (q, total).  Returns (slope, intercept, max abs
    residual); raises ValidationError below 3 points.
    """
    pts = sorted((int(q), float(t)) for q, t in points)
    if len(pts) < 3:
        raise ValidationError(f"asymptotic_fit: needs >= 3 points, got {len(pts)}")
    if len({q for q, _ in pts}) != len(pts):
        raise ValidationError("asymptotic_fit: duplicate q values")
    logq = np.array([math.log(q) for q, _ in pts])
    totals = np.array([t for _, t in pts])
    design = np.vstack([logq, np.ones_like(logq)]).T
    coef, *_ = np.linalg.lstsq(design, totals, rcond=None)
    residuals = totals - design @ coef
    return float(coef[0]), float(coef[1]), float(np.max(np.abs(residuals)))


def smooth_bump(x):
    """C-infinity bump supported on [1, 2]: exp(-1/((x-1)(2-x))) inside."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    inside = (x > 1.0) & (x < 2.0)
    xi = x[inside]
    out[inside] = np.exp(-1.0 / ((xi - 1.0) * (2.0 - xi)))
    return out if out.shape else float(out)


def _smooth_step(t):
    t = np.asarray(t, dtype=np.float64)
    lo = np.exp(np.where(t > 0, -1.0 / np.maximum(t, 1e-300), 0.0)) * (t > 0)
    hi = np.exp(np.where(t < 1, -1.0 / np.maximum(1.0 - t, 1e-300), 0.0)) * (t < 1)
    with np.errstate(invalid="ignore"):
        out = np.where(t <= 0, 0.0, np.where(t >= 1, 1.0, lo / (lo + hi)))
    return out


def dyadic_window(x):
    """Window w with support (1, 4) such that sum over j of w(x / 2^j) = 1
    for every x > 0 (smooth partition of unity used for dyadic subdivisions)."""
    x = np.asarray(x, dtype=np.float64)
    out = _smooth_step(x - 1.0) - _smooth_step(x / 2.0 - 1.0)
    return out if out.shape else float(out)


@dataclass(frozen=True)
class PoissonCheck:
    lhs: float
    rhs: float
    rel_err: float
    dual_terms: int


def poisson_crosscheck(
    m: int,
    c: int,
    q: int,
    big_n: float,
    k: int,
    window=None,
    min_dual_radius: int = 0,
) -> PoissonCheck:
    """Numerical verification of the Poisson-summation identity behind the
    character-sum evaluation:

      sum_n S(m, n^2; cq) J_(k-1)(4 pi n sqrt(m)/cq) V(n/N)
        = (N/cq) sum_j C(j) I(j)

    with C(j) the mod-cq character sum and I(j) the windowed Bessel-Fourier
    integral.  The dual j-sum is extended until ten consecutive terms are
    below 1e-13 of the running value.
    """
    params = CharSumParams(m=m, n=0, c=c, q=q)
    modulus = params.modulus
    if modulus > 1500:
        raise CapacityError(f"poisson_crosscheck: cq={modulus} above 1500")
    if k < 4 or k % 2 != 0 or k > 16:
        raise DomainError("poisson_crosscheck: k must be even in [4, 16]")
    if big_n <= 1:
        raise DomainError("poisson_crosscheck: N must exceed 1")
    if window is None:
        window = smooth_bump
    nu = k - 1
    alpha = FOUR_PI * big_n * math.sqrt(m) / modulus

    n = np.arange(int(big_n) + 1, int(2 * big_n) + 1)
    win = window(n / big_n)
    kloos = np.array([kloosterman(m, int(x) * int(x), modulus) for x in n])
    lhs = float(np.sum(kloos * jv(nu, FOUR_PI * n * np.sqrt(m) / modulus) * win))

    charsums = charsum_o1_bruteforce_grid(m, c, q)[m - 1]

    # windowed integral: nodes dense enough for the largest dual frequency
    def dual_integral(j_values: np.ndarray) -> np.ndarray:
        beta_max = 2.0 * math.pi * big_n * float(np.max(np.abs(j_values))) / modulus
        panels = max(8, int((alpha + beta_max) / 25.0) + 1)
        xs, ws = np.polynomial.legendre.leggauss(24)
        edges = np.linspace(1.0, 2.0, panels + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        x = (mid[:, None] + half[:, None] * xs[None, :]).ravel()
        w = (half[:, None] * ws[None, :]).ravel()
        base = w * window(x) * jv(nu, alpha * x)
        phases = np.exp(-2j * np.pi * big_n * np.outer(j_values, x) / modulus)
        return phases @ base

    total = 0.0 + 0.0j
    dual_terms = 0
    block = 16
    j_lo = 0
    quiet = 0
    while (quiet < 10 or j_lo < min_dual_radius) and j_lo < 100000:
        js = np.arange(j_lo, j_lo + block)
        j_all = np.concatenate([js, -js[1:] if j_lo == 0 else -js])
        vals = charsums[j_all % modulus] * dual_integral(j_all.astype(float))
        total += complex(np.sum(vals))
        dual_terms += j_all.size
        scale = max(abs(total), 1e-30)
        quiet = quiet + block if np.all(np.abs(vals) < 1e-13 * scale) else 0
        j_lo += block
    rhs_c = total * big_n / modulus
    if abs(rhs_c.imag) > 1e-6 * max(1.0, abs(rhs_c.real)):
        raise ArithmeticError(
            f"poisson_crosscheck: dual side imaginary residue {rhs_c.imag:.3e}"
        )
    rhs = float(rhs_c.real)
    rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-30)
    return PoissonCheck(lhs=lhs, rhs=rhs, rel_err=rel, dual_terms=dual_terms)
