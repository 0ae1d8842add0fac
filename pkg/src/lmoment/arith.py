"""Exact integer and modular arithmetic primitives.

Everything here is a pure function of its arguments (safe to call from any
number of threads) and deterministic: primality uses a fixed witness set,
factorization uses trial division plus Brent's rho with a fixed parameter
schedule, so results are reproducible bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError, NotInvertibleError

# Witnesses proving primality for every n < 3.3e24 (covers the 2^62 cap).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)

PRIMALITY_CAP = 1 << 62
MODULUS_CAP = 1 << 40


def is_prime(n: int) -> bool:
    """Deterministic primality test for 2 <= n <= 2^62."""
    if n < 2 or n > PRIMALITY_CAP:
        raise DomainError(f"is_prime: n={n} outside [2, 2^62]")
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    """One nontrivial factor of composite n (n odd, not a prime power of a
    small prime). Deterministic: cycles through fixed (y0, c) seeds."""
    if n % 2 == 0:
        return 2
    for c in range(1, 64):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                k += m
                g = math.gcd(q, n)
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed on {n}")  # unreachable for n <= 2^40


@lru_cache(maxsize=65536)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of n >= 1 as a sorted tuple of (prime, exponent)."""
    if n < 1:
        raise DomainError(f"factorize: n={n} must be positive")
    factors: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    # trial division with a 2-3-5 wheel up to 2^20, rho beyond
    d = 49
    wheel = (2, 4, 2, 4, 6, 2, 6, 4)
    wi = 1
    while d * d <= n and d < (1 << 20):
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += wheel[wi]
        wi = (wi + 1) % len(wheel)
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        g = _brent_rho(m)
        stack.append(g)
        stack.append(m // g)
    return tuple(sorted(factors.items()))


def euler_phi(n: int) -> int:
    phi = 1
    for p, e in factorize(n):
        phi *= p ** (e - 1) * (p - 1)
    return phi


def divisor_count(n: int) -> int:
    tau = 1
    for _, e in factorize(n):
        tau *= e + 1
    return tau


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(n))


def is_powerful(n: int) -> bool:
    """True iff every prime dividing n does so at least twice (1 is powerful)."""
    return all(e >= 2 for _, e in factorize(n))


@dataclass(frozen=True)
class ModularContext:
    """A modulus with its factorization and unit-group size.

    Backbone of the exact exponential sums: the moduli c, q, cq all travel
    through this type so factorizations are computed once.
    """

    modulus: int
    factorization: tuple[tuple[int, int], ...]
    unit_count: int

    def __post_init__(self):
        prod = 1
        for p, e in self.factorization:
            prod *= p**e
        if prod != self.modulus:
            raise DomainError("ModularContext: factorization does not multiply back")
        if self.unit_count != euler_phi(self.modulus):
            raise DomainError("ModularContext: unit_count is not phi(modulus)")

    @classmethod
    def from_modulus(cls, m: int) -> "ModularContext":
        if m < 1 or m > MODULUS_CAP:
            raise DomainError(f"ModularContext: modulus {m} outside [1, 2^40]")
        fac = factorize(m)
        return cls(modulus=m, factorization=fac, unit_count=euler_phi(m))


def jacobi_symbol(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n; a is reduced mod n first.

    Completely multiplicative in both arguments; 0 iff gcd(a, n) > 1.
    """
    if n <= 0 or n % 2 == 0:
        raise DomainError(f"jacobi_symbol: n={n} must be odd and positive")
    a %= n
    result = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def epsilon_factor(d: int) -> complex:
    """1 for d = 1 mod 4, i for d = 3 mod 4 (d odd positive)."""
    if d <= 0 or d % 2 == 0:
        raise DomainError(f"epsilon_factor: d={d} must be odd and positive")
    return 1 + 0j if d % 4 == 1 else 1j


@dataclass(frozen=True)
class SquarefreePowerfulSplit:
    """Split c = c1*c2 with c1 coprime to the discriminant and c2 carrying
    every shared prime.  valid records whether c1 is squarefree and c2
    powerful: when it is not, the associated character sum vanishes."""

    c1: int
    c2: int
    discriminant: int
    valid: bool


def powerful_split(c: int, delta: int) -> SquarefreePowerfulSplit:
    """Factor c = c1*c2 with gcd(c1, delta) = 1 and every prime of c2
    dividing delta (for delta != 0).  For delta = 0 the whole of c is
    pushed into c2 and validity means c is powerful (or 1)."""
    if c < 1:
        raise DomainError(f"powerful_split: c={c} must be positive")
    if delta == 0:
        return SquarefreePowerfulSplit(
            c1=1, c2=c, discriminant=0, valid=(c == 1 or is_powerful(c))
        )
    c1, c2 = 1, 1
    c1_squarefree = True
    c2_powerful = True
    for p, e in factorize(c):
        if delta % p == 0:
            c2 *= p**e
            if e < 2:
                c2_powerful = False
        else:
            c1 *= p**e
            if e > 1:
                c1_squarefree = False
    return SquarefreePowerfulSplit(
        c1=c1, c2=c2, discriminant=delta, valid=c1_squarefree and c2_powerful
    )


def mod_inverse(a: int, c: int) -> int:
    """x with a*x = 1 (mod c), 0 <= x < c.  Requires gcd(a, c) = 1."""
    if c < 1:
        raise DomainError(f"mod_inverse: modulus {c} must be positive")
    if c == 1:
        return 0
    try:
        return pow(a, -1, c)
    except ValueError:
        raise NotInvertibleError(f"mod_inverse: gcd({a}, {c}) > 1") from None
