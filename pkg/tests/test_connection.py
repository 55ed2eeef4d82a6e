import random
from fractions import Fraction

from defzeta.algebra import QPoly, RationalFunction, zpoly_eval, zpoly_mul, zpoly_trim
from defzeta.connection import (
    determinant_series,
    gauss_manin,
    gauss_manin_direct,
)
from defzeta.cohomology import ReductionTables, reduce_form
from defzeta.family import validate_family

from helpers import small_family


def test_t_independent_family_has_zero_connection():
    fam = validate_family(2, 4, 3, {(4, 0, 0): [1], (0, 4, 0): [1], (0, 0, 4): [2]})
    conn = gauss_manin(fam)
    assert all(not cs for row in conn.G for cs in row)
    assert conn.r == [1]


def test_k3_denominator(k3_connection):
    from defzeta.algebra import zpoly_primitive

    prim, _ = zpoly_primitive(k3_connection.r)
    assert prim == [-256, 0, 0, 0, 1]


def test_quintic_denominator(quintic_connection):
    from defzeta.algebra import zpoly_primitive

    prim, _ = zpoly_primitive(quintic_connection.r)
    assert prim == [3125, 0, 0, 0, 0, 27]


def test_direct_and_series_routes_agree(quintic_family):
    c1 = gauss_manin(quintic_family, prefer_series=True)
    c2 = gauss_manin(quintic_family, prefer_series=False)
    assert c1.G == c2.G
    assert c1.r == c2.r
    assert c1.R == c2.R


def test_routes_agree_on_random_small_families():
    agree = 0
    for seed in (0, 4, 9, 13):
        fam = small_family(seed, d=3, n=2, p=7)
        c1 = gauss_manin(fam, prefer_series=True)
        c2 = gauss_manin(fam, prefer_series=False)
        assert c1.G == c2.G and c1.r == c2.r
        agree += 1
    assert agree == 4


def test_r_divides_R(quintic_connection, k3_connection):
    from defzeta.algebra import zpoly_divexact, zpoly_primitive

    for conn in (quintic_connection, k3_connection):
        r_prim, _ = zpoly_primitive(conn.r)
        quotient = zpoly_divexact(list(conn.R), r_prim)
        assert zpoly_trim(zpoly_mul(quotient, r_prim)) == zpoly_trim(list(conn.R))


def test_degree_bounds(quintic_family, quintic_connection):
    # sanity ceiling from the complexity discussion: O(n (d e)^n d_t)
    import math

    fam = quintic_family
    bound = 10 * fam.n * int((fam.d * math.e) ** fam.n) * max(fam.d_t, 1)
    assert quintic_connection.degree_G() <= bound
    assert quintic_connection.degree_r() <= bound


def test_r0_unit_for_valid_primes(quintic_connection, k3_connection):
    assert zpoly_eval(quintic_connection.r, 0) % 7 != 0
    assert zpoly_eval(k3_connection.r, 0) % 3 != 0


def test_column_verification_second_reduction(quintic_family, quintic_connection):
    """Re-reduce nabla(e) independently and compare with the stored column."""
    fam = quintic_family
    conn = quintic_connection
    tables = ReductionTables(fam)
    basis = conn.basis
    dPdt = fam.t_derivative_terms()
    rng = random.Random(11)
    r_poly = QPoly(conn.r)
    for col in rng.sample(range(basis.b), 4):
        u, k = basis.elements[col]
        Q = {}
        for w, cs in dPdt.items():
            f = tuple(u[i] + w[i] for i in range(fam.n + 1))
            Q[f] = RationalFunction(QPoly([-k * c for c in cs]), None, normalize=False)
        gammas = reduce_form(tables, Q, k + 1)
        col_vals = {}
        for gamma in gammas:
            for f, c in gamma.items():
                col_vals[basis.index[f]] = c
        for i in range(basis.b):
            expected = col_vals.get(i, RationalFunction.zero())
            got = RationalFunction(QPoly(conn.G[i][col]), r_poly)
            assert got == expected


def test_trace_determinant_matches_direct(quintic_family):
    tables = ReductionTables(quintic_family)
    for k in (2, 3):
        prim_t, cont_t = determinant_series(quintic_family, tables, k)
        det_rf = tables.determinant(k)
        num, scale = det_rf.num.to_integer_poly()
        assert det_rf.den.degree() == 0
        scale = scale / det_rf.den.coeffs[0]
        assert prim_t == num
        assert cont_t == scale


def test_determinant_interpolation_route():
    # force the d_t >= 2 interpolation path on a small family
    fam = validate_family(
        2,
        3,
        5,
        {(3, 0, 0): [1], (0, 3, 0): [1], (0, 0, 3): [1], (1, 1, 1): [0, 1, 2]},
    )
    tables = ReductionTables(fam)
    from defzeta.connection import _det_by_interpolation, _determinant_direct

    for k in (2, 3):
        prim_i, cont_i = _det_by_interpolation(fam, tables, k)
        prim_d, cont_d = _determinant_direct(tables, k)
        assert prim_i == prim_d
        assert cont_i == cont_d


def test_gauss_manin_on_dt2_family():
    fam = validate_family(
        2,
        3,
        5,
        {(3, 0, 0): [1], (0, 3, 0): [1], (0, 0, 3): [1], (1, 1, 1): [0, 1, 2]},
    )
    c1 = gauss_manin(fam, prefer_series=True)
    c2 = gauss_manin(fam, prefer_series=False)
    assert c1.G == c2.G and c1.r == c2.r
