import math
import random

import pytest

from lmoment.arith import (
    ModularContext,
    divisor_count,
    epsilon_factor,
    euler_phi,
    factorize,
    is_powerful,
    is_prime,
    is_squarefree,
    jacobi_symbol,
    mod_inverse,
    powerful_split,
)
from lmoment.errors import DomainError, NotInvertibleError


def test_is_prime_examples():
    assert is_prime(2)
    assert is_prime(1009)
    assert not is_prime(1001)  # 7 * 11 * 13


def test_is_prime_matches_trial_division():
    def trial(n):
        if n < 2:
            return False
        for d in range(2, int(n**0.5) + 1):
            if n % d == 0:
                return False
        return True

    for n in range(2, 2000):
        assert is_prime(n) == trial(n), n


def test_is_prime_range_errors():
    with pytest.raises(DomainError):
        is_prime(1)
    with pytest.raises(DomainError):
        is_prime((1 << 62) + 1)


def test_factorize():
    assert factorize(1) == ()
    assert factorize(360) == ((2, 3), (3, 2), (5, 1))
    assert factorize(1009) == ((1009, 1),)
    # rho path: product of two primes above the trial-division window
    n = 1048583 * 1048589
    assert factorize(n) == ((1048583, 1), (1048589, 1))


def test_euler_phi_and_divisor_count():
    assert euler_phi(1) == 1
    assert euler_phi(12) == 4
    assert divisor_count(12) == 6


def test_jacobi_examples():
    assert jacobi_symbol(1, 7) == 1
    assert jacobi_symbol(3, 9) == 0
    assert jacobi_symbol(2, 15) == 1


def test_jacobi_matches_legendre_at_primes():
    for p in (3, 5, 7, 11, 13, 101):
        squares = {x * x % p for x in range(1, p)}
        for a in range(p):
            expected = 0 if a == 0 else (1 if a in squares else -1)
            assert jacobi_symbol(a, p) == expected


def test_jacobi_reciprocity_random_pairs():
    rng = random.Random(20240811)
    checked = 0
    while checked < 2000:
        a = rng.randrange(3, 10**6, 2)
        n = rng.randrange(3, 10**6, 2)
        if math.gcd(a, n) != 1:
            continue
        lhs = jacobi_symbol(a, n) * jacobi_symbol(n, a)
        rhs = (-1) ** (((a - 1) // 2) * ((n - 1) // 2))
        assert lhs == rhs, (a, n)
        checked += 1


def test_jacobi_negative_first_argument_reduces():
    # canonical-residue convention: (a/n) = (a mod n / n)
    assert jacobi_symbol(-1, 5) == jacobi_symbol(4, 5)
    assert jacobi_symbol(-117, 11) == jacobi_symbol(-117 % 11, 11)


def test_jacobi_domain():
    with pytest.raises(DomainError):
        jacobi_symbol(2, 4)
    with pytest.raises(DomainError):
        jacobi_symbol(2, -3)


def test_epsilon_factor_rule():
    assert epsilon_factor(1) == 1
    assert epsilon_factor(3) == 1j
    assert epsilon_factor(5) == 1
    with pytest.raises(DomainError):
        epsilon_factor(4)


def test_epsilon_square_identity():
    for d in range(1, 10001, 2):
        assert epsilon_factor(d) ** 2 == (-1) ** ((d - 1) // 2)


def test_powerful_split_examples():
    s = powerful_split(6, 5)
    assert (s.c1, s.c2, s.valid) == (6, 1, True)
    s = powerful_split(12, 3)
    assert (s.c1, s.c2, s.valid) == (4, 3, False)
    s = powerful_split(9, 3)
    assert (s.c1, s.c2, s.valid) == (1, 9, True)
    s = powerful_split(7, 0)
    assert (s.c1, s.c2, s.valid) == (1, 7, False)
    assert powerful_split(1, 0).valid


def _check_split(c, delta):
    s = powerful_split(c, delta)
    assert s.c1 * s.c2 == c
    if delta != 0:
        assert math.gcd(s.c1, abs(delta)) == 1
        for p, _ in factorize(s.c2):
            assert delta % p == 0
        assert s.valid == (is_squarefree(s.c1) and is_powerful(s.c2))
    else:
        assert s.c1 == 1 and s.c2 == c
        assert s.valid == (c == 1 or is_powerful(c))


def test_powerful_split_reassembly_fixed_deltas():
    deltas = (0, 1, -1, 2, -2, 3, -3, 6, -6, 12, 30, -30, 720, -720, 997, -997)
    for c in range(1, 10001):
        for delta in deltas:
            _check_split(c, delta)


def test_powerful_split_reassembly_random():
    rng = random.Random(7)
    for _ in range(30000):
        _check_split(rng.randrange(1, 10001), rng.randrange(-1000, 1001))


def test_powerful_split_rejects_zero():
    with pytest.raises(DomainError):
        powerful_split(0, 5)


def test_mod_inverse():
    assert mod_inverse(1, 5) == 1
    assert mod_inverse(2, 5) == 3
    assert mod_inverse(7, 1) == 0
    with pytest.raises(NotInvertibleError):
        mod_inverse(4, 8)


def test_modular_context():
    ctx = ModularContext.from_modulus(360)
    assert ctx.factorization == ((2, 3), (3, 2), (5, 1))
    assert ctx.unit_count == 96
    with pytest.raises(DomainError):
        ModularContext.from_modulus((1 << 40) + 1)
    with pytest.raises(DomainError):
        ModularContext(modulus=6, factorization=((2, 1),), unit_count=2)
