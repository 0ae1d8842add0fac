"""Kloosterman sums, quadratic Gauss sums, and the composite character sums
entering the off-diagonal analysis, with brute-force oracles and closed forms.

All sums are accumulated with numpy's pairwise summation in a fixed index
order, so values are deterministic across runs and thread counts.  Brute
force here means the literal defining sum; the only rewriting allowed on
the oracle side is exact reassociation (FFT) which is cross-checked against
the scalar double loop in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import (
    epsilon_factor,
    euler_phi,
    is_prime,
    jacobi_symbol,
    powerful_split,
    divisor_count,
)
from .errors import CapacityError, DomainError, UnsupportedCaseError

TWO_PI = 2.0 * math.pi

# caps for the exact enumeration paths
KLOOSTERMAN_MODULUS_CAP = 10**6
CHARSUM_MODULUS_CAP = 3000
_TABLE_CACHE_LIMIT = 200_000


@dataclass(frozen=True)
class ComplexValue:
    """A double-precision complex value, optionally tagged with an exact
    representation coeff * sqrt(radicand) * (i if imaginary else 1)."""

    re: float
    im: float
    exact: tuple[int, int, bool] | None = None

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def exact_value(self) -> complex:
        if self.exact is None:
            raise ValueError("no exact tag attached")
        coeff, radicand, imaginary = self.exact
        v = coeff * math.sqrt(radicand)
        return complex(0.0, v) if imaginary else complex(v, 0.0)

    @classmethod
    def from_complex(cls, z: complex, exact=None) -> "ComplexValue":
        return cls(re=float(z.real), im=float(z.imag), exact=exact)


EXACT_ZERO = ComplexValue(0.0, 0.0, exact=(0, 1, False))


def additive_char(a: int, c: int) -> complex:
    """e(a/c) = exp(2 pi i a / c); depends only on a mod c."""
    if c < 1:
        raise DomainError(f"additive_char: c={c} must be positive")
    return complex(np.exp(2j * math.pi * (a % c) / c))


def _phase_table(modulus: int) -> np.ndarray:
    """exp(2 pi i r / modulus) for r = 0..modulus-1."""
    return np.exp(2j * np.pi * np.arange(modulus) / modulus)


def _powmod_array(base: np.ndarray, exp: int, mod: int) -> np.ndarray:
    """Elementwise base**exp mod `mod` (int64-safe for mod <= 10^6)."""
    result = np.ones_like(base)
    b = base % mod
    while exp:
        if exp & 1:
            result = result * b % mod
        b = b * b % mod
        exp >>= 1
    return result


def _build_unit_tables(modulus: int) -> tuple[np.ndarray, np.ndarray]:
    if modulus == 1:
        z = np.zeros(1, dtype=np.int64)
        return z, z
    r = np.arange(modulus, dtype=np.int64)
    units = r[np.gcd(r, modulus) == 1]
    inverses = _powmod_array(units, euler_phi(modulus) - 1, modulus)
    return units, inverses


@lru_cache(maxsize=64)
def _unit_tables_cached(modulus: int) -> tuple[np.ndarray, np.ndarray]:
    return _build_unit_tables(modulus)


def unit_tables(modulus: int) -> tuple[np.ndarray, np.ndarray]:
    """(units, inverses) arrays for the unit group mod `modulus`."""
    if modulus <= _TABLE_CACHE_LIMIT:
        return _unit_tables_cached(modulus)
    return _build_unit_tables(modulus)


def kloosterman(m: int, n: int, c: int) -> float:
    """Kloosterman sum S(m, n; c) over units x mod c of e((m x + n xbar)/c).

    Real-valued; the imaginary part of the complex accumulation is checked
    against 1e-9 and discarded.
    """
    if c < 1:
        raise DomainError(f"kloosterman: c={c} must be positive")
    if c > KLOOSTERMAN_MODULUS_CAP:
        raise CapacityError(f"kloosterman: c={c} exceeds exact-path cap 10^6")
    if c == 1:
        return 1.0
    units, inverses = unit_tables(c)
    phases = (m % c) * units + (n % c) * inverses
    total = np.sum(np.exp(2j * np.pi * (phases % c) / c))
    if abs(total.imag) > 1e-9:
        raise ArithmeticError(
            f"kloosterman: imaginary residue {total.imag:.3e} for S({m},{n};{c})"
        )
    return float(total.real)


def weil_bound(m: int, n: int, c: int) -> float:
    """tau(c) * sqrt(gcd(m, n, c)) * sqrt(c), the standard envelope for |S(m,n;c)|."""
    g = math.gcd(math.gcd(abs(m), abs(n)), c)
    return divisor_count(c) * math.sqrt(g) * math.sqrt(c)


def gauss_quadratic_bruteforce(a: int, b: int, c: int) -> ComplexValue:
    """g(a, b; c) = sum over x mod c of e((a x^2 + b x)/c), by enumeration."""
    if c < 1:
        raise DomainError(f"gauss_quadratic: c={c} must be positive")
    x = np.arange(c, dtype=np.int64)
    phases = ((a % c) * x * x + (b % c) * x) % c
    return ComplexValue.from_complex(complex(np.sum(_phase_table(c)[phases])))


def gauss_quadratic_closed(a: int, b: int, c: int) -> ComplexValue:
    """Closed form eps_c * sqrt(c) * (a/c), valid for odd c, gcd(a,c)=1, b=0."""
    if c < 1:
        raise DomainError(f"gauss_quadratic: c={c} must be positive")
    if b != 0 or c % 2 == 0 or math.gcd(a, c) != 1:
        raise UnsupportedCaseError(
            f"gauss_quadratic closed form needs odd c, gcd(a,c)=1, b=0; "
            f"got a={a}, b={b}, c={c}"
        )
    jac = jacobi_symbol(a, c)
    eps = epsilon_factor(c)
    z = eps * jac * math.sqrt(c)
    return ComplexValue.from_complex(z, exact=(jac, c, eps == 1j))


def gauss_quadratic(a: int, b: int, c: int) -> ComplexValue:
    """Closed form when applicable, brute force otherwise."""
    try:
        return gauss_quadratic_closed(a, b, c)
    except UnsupportedCaseError:
        return gauss_quadratic_bruteforce(a, b, c)


def salie_type_sum(delta: int, c2: int) -> ComplexValue:
    """Sum over units b mod c2 of (b/c2) e(b delta / c2).

    c2 = 1 returns 1 (empty-modulus convention); even c2 is rejected since
    the Jacobi symbol needs an odd modulus.  When c2 | delta the sum is
    exactly phi(c2) for square c2 and exactly 0 otherwise.
    """
    if c2 < 1:
        raise DomainError(f"salie_type_sum: c2={c2} must be positive")
    if c2 == 1:
        return ComplexValue(1.0, 0.0, exact=(1, 1, False))
    if c2 % 2 == 0:
        raise UnsupportedCaseError(f"salie_type_sum: even modulus c2={c2}")
    if delta % c2 == 0:
        # principal-character case: the symbol sum over units
        root = math.isqrt(c2)
        if root * root == c2:
            phi = euler_phi(c2)
            return ComplexValue(float(phi), 0.0, exact=(phi, 1, False))
        return EXACT_ZERO
    units, _ = unit_tables(c2)
    chi = np.array([jacobi_symbol(int(b), c2) for b in units], dtype=np.float64)
    phases = _phase_table(c2)[(delta % c2) * units % c2]
    return ComplexValue.from_complex(complex(np.sum(chi * phases)))


@dataclass(frozen=True)
class CharSumParams:
    """Inputs (m, n, c, q) of the off-diagonal character sum, with the
    derived discriminant 4m - n^2 and modulus cq."""

    m: int
    n: int
    c: int
    q: int

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"CharSumParams: m={self.m} must be positive")
        if self.c < 1:
            raise DomainError(f"CharSumParams: c={self.c} must be positive")
        if not is_prime(self.q):
            raise DomainError(f"CharSumParams: q={self.q} must be prime")

    @property
    def delta(self) -> int:
        return 4 * self.m - self.n * self.n

    @property
    def modulus(self) -> int:
        return self.c * self.q


def charsum_o1_bruteforce(p: CharSumParams) -> ComplexValue:
    """Direct evaluation of sum over a mod cq of S(m, a^2; cq) e(a n / cq)."""
    modulus = p.modulus
    if modulus > CHARSUM_MODULUS_CAP:
        raise CapacityError(
            f"charsum_o1_bruteforce: cq={modulus} exceeds cap {CHARSUM_MODULUS_CAP}"
        )
    units, inverses = unit_tables(modulus)
    table = _phase_table(modulus)
    m_red = p.m % modulus
    n_red = p.n % modulus
    total = 0.0 + 0.0j
    inner_m = table[m_red * units % modulus]
    for a in range(modulus):
        phases = (a * a % modulus) * inverses % modulus
        kloos = np.sum(inner_m * table[phases])
        total += kloos * table[a * n_red % modulus]
    return ComplexValue.from_complex(complex(total))


def charsum_o1_closed(p: CharSumParams) -> ComplexValue:
    """Gauss-sum evaluation of the same character sum, valid for
    cq = 1 (mod 4) and gcd(c, q) = 1:

        eps_{q c1} * q * c1 * sqrt(c2) * (delta / c1 q) * salie_type_sum(delta, c2)

    with c = c1 c2 the coprime/powerful split against delta = 4m - n^2.
    Returns exact 0 whenever the split is invalid or q | delta.
    """
    modulus = p.modulus
    if modulus % 4 != 1:
        raise UnsupportedCaseError(
            f"charsum_o1_closed: cq={modulus} is not 1 mod 4; use brute force"
        )
    if math.gcd(p.c, p.q) != 1:
        raise UnsupportedCaseError("charsum_o1_closed: requires gcd(c, q) = 1")
    delta = p.delta
    split = powerful_split(p.c, delta)
    if not split.valid:
        return EXACT_ZERO
    c1, c2 = split.c1, split.c2
    jac = jacobi_symbol(delta, c1 * p.q)
    if jac == 0:
        return EXACT_ZERO
    sal = salie_type_sum(delta, c2)
    eps = epsilon_factor(p.q * c1)
    # reciprocity sign from splitting the twisted sum over (c1 q) * c2;
    # equals -1 exactly when both parts are 3 mod 4 (e.g. c2 = 27)
    if c2 % 4 == 3 and (c1 * p.q) % 4 == 3:
        jac = -jac
    prefactor = p.q * c1 * math.sqrt(c2)
    z = eps * prefactor * jac * sal.value
    exact = None
    if sal.exact is not None:
        s_coeff, s_rad, s_imag = sal.exact
        unit = eps * (1j if s_imag else 1)
        coeff = p.q * c1 * jac * s_coeff
        if unit in (-1, -1j):
            coeff = -coeff
        exact = (coeff, c2 * s_rad, unit in (1j, -1j))
    return ComplexValue.from_complex(z, exact=exact)


def charsum_o2_bruteforce(m: int, n: int, c: int, q: int) -> ComplexValue:
    """Direct evaluation of sum over a mod c of S(m, q a^2; cq) e(a n / c).

    Note the a-sum runs mod c, not mod cq.
    """
    p = CharSumParams(m=m, n=n, c=c, q=q)  # validates inputs
    modulus = p.modulus
    if modulus > CHARSUM_MODULUS_CAP:
        raise CapacityError(
            f"charsum_o2_bruteforce: cq={modulus} exceeds cap {CHARSUM_MODULUS_CAP}"
        )
    units, inverses = unit_tables(modulus)
    table = _phase_table(modulus)
    inner_m = table[(m % modulus) * units % modulus]
    total = 0.0 + 0.0j
    for a in range(c):
        phases = (q * a * a % modulus) * inverses % modulus
        kloos = np.sum(inner_m * table[phases])
        total += kloos * additive_char(a * n, c)
    return ComplexValue.from_complex(complex(total))


def charsum_o1_bruteforce_grid(m_count: int, c: int, q: int) -> np.ndarray:
    """Character sums for every m in 1..m_count and every frequency n mod cq,
    as a complex array of shape (m_count, cq).

    Same defining double sum as charsum_o1_bruteforce; the a-sum for all n
    at once is an exact reassociation done by an FFT of length cq per unit.
    The test suite pins this grid against the scalar brute force.
    """
    p = CharSumParams(m=1, n=0, c=c, q=q)  # validates c, q
    modulus = p.modulus
    if modulus > CHARSUM_MODULUS_CAP:
        raise CapacityError(
            f"charsum_o1_bruteforce_grid: cq={modulus} exceeds cap {CHARSUM_MODULUS_CAP}"
        )
    units, inverses = unit_tables(modulus)
    table = _phase_table(modulus)
    a = np.arange(modulus, dtype=np.int64)
    asq = a * a % modulus
    # T[x, n] = sum_a e((a^2 xbar + a n)/cq); ifft supplies the +an/cq phases
    quad_phases = table[np.outer(inverses, asq) % modulus]
    t_matrix = np.fft.ifft(quad_phases, axis=1) * modulus
    m_values = np.arange(1, m_count + 1, dtype=np.int64)
    outer = table[np.outer(m_values, units) % modulus]
    return outer @ t_matrix
