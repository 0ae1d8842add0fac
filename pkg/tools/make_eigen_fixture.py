#!/usr/bin/env python3
"""Regenerate the bundled weight-12 level-1 eigenvalue fixture.

Coefficients come from the 24th power of the eta-series computed exactly
over the integers (eta^3 is the sparse Jacobi series, and eta^24 is eight
sparse multiplications by it), then Hecke-normalized by n^(11/2).

Usage: python tools/make_eigen_fixture.py [N_MAX] > src/lmoment/data/delta_k12_hecke.txt
"""

import sys


def eta_cubed(n_max: int) -> list[int]:
    """Coefficients of eta(x)^3 / x^(1/8) = sum (-1)^j (2j+1) x^(j(j+1)/2)."""
    coeffs = [0] * n_max
    j = 0
    while j * (j + 1) // 2 < n_max:
        coeffs[j * (j + 1) // 2] = (-1) ** j * (2 * j + 1)
        j += 1
    return coeffs


def sparse_multiply(dense: list[int], sparse: list[int]) -> list[int]:
    n_max = len(dense)
    out = [0] * n_max
    for i, s in enumerate(sparse):
        if s == 0:
            continue
        for j in range(n_max - i):
            d = dense[j]
            if d:
                out[i + j] += s * d
    return out


def tau_coefficients(n_max: int) -> list[int]:
    """tau(1..n_max): coefficient of x^(n-1) in eta^24."""
    e3 = eta_cubed(n_max)
    acc = e3[:]
    for _ in range(7):
        acc = sparse_multiply(acc, e3)
    return acc


def main() -> None:
    n_max = int(sys.argv[1]) if len(sys.argv) > 1 else 4000
    tau = tau_coefficients(n_max)
    assert tau[:6] == [1, -24, 252, -1472, 4830, -6048], "tau series corrupted"
    print("# level=1 weight=12 label=delta normalization=hecke")
    for n in range(1, n_max + 1):
        lam = tau[n - 1] / float(n) ** 5.5
        print(f"{n} {lam!r}")


if __name__ == "__main__":
    main()
