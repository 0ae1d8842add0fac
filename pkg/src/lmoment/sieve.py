"""Empirical verifier for the quadratic large-sieve step: the squarefree
double character sum, the representation-count alpha(d, u), and the ratio
against the (D + C1) C1 benchmark.

Conventions: "d up to D" means d in [1, D]; the dyadic "c1 ~ C1" means
c1 in [C1, 2 C1).  The inner sum runs over odd squarefree c1 (the Jacobi
symbol and the epsilon factor need an odd modulus).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import epsilon_factor, factorize, is_squarefree, jacobi_symbol
from .errors import CapacityError, DomainError, ValidationError

TERM_BUDGET = 10**9


@dataclass(frozen=True)
class SieveScanConfig:
    """One cell of the sieve scan: discriminants d <= D against moduli
    c1 in [C1, 2 C1), coprimality filter u, auxiliary prime q."""

    D: int
    C1: int
    q: int
    u: int = 1

    def __post_init__(self):
        if self.D < 1 or self.C1 < 1 or self.u < 1:
            raise ValidationError("SieveScanConfig: D, C1, u must be positive")
        if self.q % 2 == 0 or self.q < 3:
            raise ValidationError("SieveScanConfig: q must be an odd prime")


@lru_cache(maxsize=32)
def _squarefree_flags(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[0] = False
    for p in range(2, math.isqrt(limit) + 1):
        flags[p * p :: p * p] = False
    return flags


def _powerful_in_range(support: tuple[int, ...], lo: int, hi: int) -> int:
    """Count powerful numbers in [lo, hi) whose prime support lies in
    `support` (1 counts as powerful)."""
    values = [1]
    for p in support:
        extended = []
        for v in values:
            extended.append(v)
            pe = p * p
            while v * pe < hi:
                extended.append(v * pe)
                pe *= p
        values = extended
    return sum(1 for v in set(values) if lo <= v < hi)


def alpha_count(
    d: int, u: int, M: int, Ncal: int, C2range: tuple[int, int]
) -> int:
    """Exact count of triples (n, m, c2) with |n| <= Ncal, m in [M, 2M),
    4m - n^2 = d u^2, and c2 powerful in [C2range) dividing (d u^2)^inf."""
    if d < 1 or not is_squarefree(d):
        raise DomainError(f"alpha_count: d={d} must be positive squarefree")
    if u < 1 or M < 1 or Ncal < 0:
        raise DomainError("alpha_count: u, M positive and Ncal non-negative")
    lo, hi = C2range
    target = d * u * u
    support = tuple(p for p, _ in factorize(target))
    c2_count = _powerful_in_range(support, lo, hi)
    if c2_count == 0:
        return 0
    total = 0
    for n in range(-Ncal, Ncal + 1):
        num = target + n * n
        if num % 4 != 0:
            continue
        m = num // 4
        if M <= m < 2 * M:
            total += c2_count
    return total


def character_double_sum(cfg: SieveScanConfig) -> float:
    """sum over squarefree d <= D of |sum over odd squarefree c1 in
    [C1, 2 C1), gcd(c1, u) = 1 of eps(q c1) (d / c1)|^2, evaluated exactly."""
    if cfg.D * cfg.C1 > TERM_BUDGET:
        raise CapacityError(
            f"character_double_sum: D*C1 = {cfg.D * cfg.C1} beyond budget {TERM_BUDGET}"
        )
    flags = _squarefree_flags(max(cfg.D, 2 * cfg.C1))
    c1_list = [
        c1
        for c1 in range(cfg.C1, 2 * cfg.C1)
        if c1 % 2 == 1 and flags[c1] and math.gcd(c1, cfg.u) == 1
    ]
    eps = [epsilon_factor(cfg.q * c1) for c1 in c1_list]
    total = 0.0
    for d in range(1, cfg.D + 1):
        if not flags[d]:
            continue
        inner = 0.0 + 0.0j
        for c1, e in zip(c1_list, eps):
            chi = jacobi_symbol(d, c1)
            if chi:
                inner += e * chi
        total += abs(inner) ** 2
    return total


def sieve_ratio(cfg: SieveScanConfig) -> float:
    """character_double_sum normalized by the large-sieve benchmark
    (D + C1) * C1."""
    return character_double_sum(cfg) / ((cfg.D + cfg.C1) * cfg.C1)


@dataclass(frozen=True)
class SieveCell:
    D: int
    C1: int
    q: int
    u: int
    double_sum: float
    ratio: float

    CSV_COLUMNS = ("D", "C1", "q", "u", "sum", "ratio")

    def csv_row(self) -> tuple:
        return (self.D, self.C1, self.q, self.u, repr(self.double_sum), repr(self.ratio))


def sieve_scan(d_values, c1_values, q_values, u: int = 1, threads: int = 1) -> list[SieveCell]:
    """Evaluate the double sum on the whole (D, C1, q) grid, in a fixed
    order (embarrassingly parallel over cells, merged in index order)."""
    cells = [
        SieveScanConfig(D=d, C1=c1, q=q, u=u)
        for q in q_values
        for d in d_values
        for c1 in c1_values
    ]

    def work(cfg: SieveScanConfig) -> SieveCell:
        s = character_double_sum(cfg)
        return SieveCell(
            D=cfg.D,
            C1=cfg.C1,
            q=cfg.q,
            u=cfg.u,
            double_sum=s,
            ratio=s / ((cfg.D + cfg.C1) * cfg.C1),
        )

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(work, cells))
    return [work(cfg) for cfg in cells]
