"""Closed-form vs brute-force equivalence sweep for the off-diagonal
character sum.

Enumerates every admissible modulus pair (c, q) - q prime, gcd(c, q) = 1,
cq = 1 (mod 4), cq below the cap - and compares the Gauss-sum evaluation
against the defining double sum on the whole (m, n) grid.  The brute-force
side is the per-modulus FFT batch (exact reassociation of the double sum,
itself pinned against the scalar loop in the test suite).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .arith import is_prime
from .expsums import CharSumParams, charsum_o1_bruteforce_grid, charsum_o1_closed

# pass when |closed - brute| <= RTOL * max(|closed|, |brute|) or, for exact
# zeros of the closed form, when the brute value is within the double-sum
# roundoff envelope RTOL * (cq)^(3/2)
RTOL = 1e-9


@dataclass(frozen=True)
class SweepResult:
    tuples: int
    moduli: int
    mismatches: int
    max_abs_error: float
    worst_cases: tuple  # up to 20 (m, n, c, q, abs_error), largest first

    def to_json_dict(self) -> dict:
        return {
            "tuples": self.tuples,
            "moduli": self.moduli,
            "mismatches": self.mismatches,
            "max_abs_error": self.max_abs_error,
            "worst_cases": [
                {"m": m, "n": n, "c": c, "q": q, "abs_error": err}
                for (m, n, c, q, err) in self.worst_cases
            ],
        }


def admissible_moduli(max_modulus: int) -> list[tuple[int, int]]:
    """(c, q) with q prime, gcd(c, q) = 1, cq = 1 mod 4, cq <= max_modulus."""
    pairs = []
    for q in range(3, max_modulus + 1, 2):
        if not is_prime(q):
            continue
        for c in range(1, max_modulus // q + 1):
            if c % q == 0 or (c * q) % 4 != 1:
                continue
            pairs.append((c, q))
    return sorted(pairs, key=lambda cq: (cq[0] * cq[1], cq[1]))


def _sweep_one(c: int, q: int, m_max: int, n_max: int):
    modulus = c * q
    grid = charsum_o1_bruteforce_grid(m_max, c, q)
    checked = 0
    mismatches = []
    max_err = 0.0
    for m in range(1, m_max + 1):
        for n in range(-n_max, n_max + 1):
            closed = charsum_o1_closed(CharSumParams(m=m, n=n, c=c, q=q))
            brute = grid[m - 1, n % modulus]
            err = abs(complex(closed.re, closed.im) - brute)
            checked += 1
            if err > max_err:
                max_err = err
            scale = max(abs(brute), math.hypot(closed.re, closed.im))
            tol = RTOL * max(scale, float(modulus) ** 1.5)
            if err > tol:
                mismatches.append((m, n, c, q, err))
    return checked, mismatches, max_err


def charsum_identity_sweep(
    max_modulus: int = 1500,
    m_max: int = 12,
    n_max: int = 12,
    threads: int = 1,
) -> SweepResult:
    """Run the full equivalence sweep; deterministic across thread counts."""
    pairs = admissible_moduli(max_modulus)

    def work(pair):
        return _sweep_one(pair[0], pair[1], m_max, n_max)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, pairs))
    else:
        results = [work(p) for p in pairs]
    tuples = sum(r[0] for r in results)
    mismatches = [case for r in results for case in r[1]]
    max_err = max((r[2] for r in results), default=0.0)
    worst = tuple(sorted(mismatches, key=lambda rec: -rec[4])[:20])
    return SweepResult(
        tuples=tuples,
        moduli=len(pairs),
        mismatches=len(mismatches),
        max_abs_error=max_err,
        worst_cases=worst,
    )
