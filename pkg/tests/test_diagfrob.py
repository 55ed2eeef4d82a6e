import random

import pytest

from defzeta.cohomology import MonomialBasis
from defzeta.diagfrob import (
    DiagonalFibre,
    alpha_uv,
    diag_frobenius_matrix,
    frobenius_matching,
    truncation_bounds,
)
from defzeta.intutil import ordp, ordp_factorial


def test_truncation_bounds_examples():
    assert truncation_bounds(3, 10) == (73, 24)
    M, R = truncation_bounds(2, 1)
    assert M == 27 and R == 13


def test_truncation_bounds_monotone():
    for p in (2, 3, 7, 11):
        prev = 0
        for N in range(1, 30, 3):
            M, R = truncation_bounds(p, N)
            assert M >= prev
            assert R == M // p
            prev = M


def test_matching_examples():
    # p = 1 mod d fixes every exponent tuple
    basis = MonomialBasis(5, 2)
    for u, _ in basis.elements:
        assert frobenius_matching(u, 11, 5) == u
    assert frobenius_matching((0, 0, 2), 7, 5) == (1, 1, 0)


def test_matching_is_permutation_with_expected_order():
    basis = MonomialBasis(5, 2)
    p, d = 7, 5
    perm = {u: frobenius_matching(u, p, d) for u, _ in basis.elements}
    assert set(perm.values()) == {u for u, _ in basis.elements}
    # applying the matching a times returns u when p^a = 1 mod d
    a = 1
    q = p % d
    while q != 1:
        q = q * p % d
        a += 1
    for u in perm:
        v = u
        for _ in range(a):
            v = frobenius_matching(v, p, d)
        assert v == u


def test_alpha_valuation_bounds_quintic():
    basis = MonomialBasis(5, 2)
    fib = DiagonalFibre(7, 5, 2, [1, 1, 1])
    Nprime = 12
    for u, ku in basis.elements:
        v = frobenius_matching(u, 7, 5)
        kv = basis.pole_order(v)
        alpha = alpha_uv(fib, u, v, Nprime)
        va = ordp(alpha, 7) if alpha else Nprime
        assert va >= 0
        bound = (
            ordp_factorial(kv - 1, 7)
            - ordp_factorial(ku - 1, 7)
            + (2 - ku)
        )
        assert va <= bound


def test_alpha_truncation_stability():
    fib = DiagonalFibre(7, 5, 2, [1, 2, 3])
    basis = MonomialBasis(5, 2)
    u, _ = basis.elements[4]
    v = frobenius_matching(u, 7, 5)
    N1, N2 = 9, 14
    a1 = alpha_uv(fib, u, v, N1)
    a2 = alpha_uv(fib, u, v, N2)
    assert (a2 - a1) % 7**N1 == 0


def test_matrix_permutation_structure():
    basis = MonomialBasis(4, 3)
    fib = DiagonalFibre(3, 4, 3, [1, 1, 1, 1])
    flat = diag_frobenius_matrix(fib, basis, 8, 0)
    b = basis.b
    for col in range(b):
        nz = [r for r in range(b) if flat[r * b + col]]
        assert len(nz) == 1
    for row in range(b):
        nz = [c for c in range(b) if flat[row * b + c]]
        assert len(nz) == 1


def test_matrix_entry_valuations_nonnegative_when_p_ge_n():
    basis = MonomialBasis(4, 3)
    fib = DiagonalFibre(3, 4, 3, [1, 1, 1, 1])
    flat = diag_frobenius_matrix(fib, basis, 6, 0)
    for v in flat:
        if v:
            assert ordp(v, 3) >= 0


def test_mismatched_pair_rejected():
    fib = DiagonalFibre(7, 5, 2, [1, 1, 1])
    with pytest.raises(ValueError):
        alpha_uv(fib, (0, 0, 2), (0, 0, 2), 8)
