import random

import pytest

from defzeta.intutil import invmod, ordp
from defzeta.kernels import get_backend, mat_mul_add
from defzeta.ode import (
    InvalidDenominator,
    frobenius_series,
    identity_flat,
    reduce_connection_mod,
    solve_series_ode,
    transpose_flat,
)

from helpers import QUINTIC_EXPONENTS


def test_zero_connection_gives_identity():
    p, N, shift, b, K = 5, 8, 4, 3, 12
    mod = p ** (N + shift)
    C = solve_series_ode([], [1], K, p, N, shift, b)
    assert C[0] == identity_flat(b, p**shift)
    assert all(all(v == 0 for v in flat) for flat in C[1:])


def test_scalar_binomial_series():
    # dC/dt = C/(1-t) with C(0)=1 solves to 1/(1-t): all coefficients 1
    p, N, shift, K = 7, 10, 6, 30
    mod = p ** (N + shift)
    G = [[(-1) % mod]]  # G = -1, r = 1 - t
    C = solve_series_ode([G[0]], [1, -1], K, p, N, shift, 1)
    scale = p**shift
    assert all(flat[0] == scale for flat in C)


def test_r0_must_be_unit():
    with pytest.raises(InvalidDenominator):
        solve_series_ode([], [5, 1], 4, 5, 6, 2, 2)


def _random_system(rng, p, b, degG, degr, mod):
    G = []
    for _ in range(degG + 1):
        G.append([rng.randrange(p**3) for _ in range(b * b)])
    r = [rng.randrange(1, p)] + [rng.randrange(p**2) for _ in range(degr)]
    return G, r


def _series_residual(C, G, r, K, b, mod):
    """Coefficients of r C' + G C (should vanish to the working precision)."""
    out = []
    for k in range(K - 1):
        acc = [0] * (b * b)
        # r * C': coefficient k = sum_j r_j (k+1-j) C_{k+1-j}
        for j, rj in enumerate(r):
            idx = k + 1 - j
            if 0 <= idx < K and rj:
                for e, v in enumerate(C[idx]):
                    acc[e] += rj * idx * v
        for j, Gj in enumerate(G):
            idx = k - j
            if 0 <= idx < K:
                mat_mul_add(acc, Gj, C[idx], b)
        out.append([v % mod for v in acc])
    return out


def test_ode_residual_random_systems():
    rng = random.Random(31)
    checked = 0
    for trial in range(25):
        p = rng.choice([3, 5, 7])
        b = rng.choice([1, 2, 3])
        K = 24
        # generous shift: random systems have no convergence theorem
        shift = 3 * K
        N = 8
        mod = p ** (N + shift)
        G, r = _random_system(rng, p, b, rng.randint(0, 3), rng.randint(0, 3), mod)
        C = solve_series_ode(G, r, K, p, N, shift, b)
        residual = _series_residual(C, G, r, K, b, mod)
        # the recursion enforces the equation exactly at the mantissa level
        for row in residual:
            for v in row:
                assert v == 0
        checked += K - 1
    assert checked >= 100


def test_blocking_invariance():
    """The recursion result is bit-identical for any block size."""
    rng = random.Random(5)
    p, b, K, N, shift = 5, 2, 23, 6, 10
    mod = p ** (N + shift)
    G, r = _random_system(rng, p, b, 2, 2, mod)
    results = [
        solve_series_ode(G, r, K, p, N, shift, b, block=blk)
        for blk in (1, 3, 8, 64)
    ]
    assert all(res == results[0] for res in results)


def test_quintic_frobenius_series_contracts(quintic_family, quintic_connection):
    """Residuals and valuation floors for a real family."""
    from defzeta.diagfrob import DiagonalFibre, diag_frobenius_matrix
    from defzeta.precision import build_plan

    fam = quintic_family
    conn = quintic_connection
    plan = build_plan(fam, conn, a=1, exponents_cfg=QUINTIC_EXPONENTS)
    phi0 = diag_frobenius_matrix(
        DiagonalFibre(fam.p, fam.d, fam.n, fam.diagonal),
        conn.basis,
        plan.ladder["N_phi0"],
        plan.delta,
    )
    sPhi, diags = frobenius_series(conn.G, conn.r, phi0, plan)
    p, b, K = plan.p, plan.b, plan.K
    lad = plan.ladder
    # C(0) = I and Phi(0) = Phi0 within precision
    scaleC = p ** lad["val_C"]
    assert diags["C"][0] == identity_flat(b, scaleC)
    modPhi = p ** (plan.N_phi + plan.delta)
    drop = p ** (lad["N_phi0"] - plan.N_phi)
    for e in range(b * b):
        assert (diags["Phi"][0][e] - phi0[e]) % modPhi == 0
    # C * C^-1 = I mod (t^(K/p), p^(N - guard))
    Kp = len(diags["Cinv"])
    prod = [[0] * (b * b) for _ in range(Kp)]
    for i in range(Kp):
        for j in range(Kp - i):
            mat_mul_add(prod[i + j], diags["C"][i], diags["Cinv"][j], b)
    guard = 1 + 2 * plan.delta
    scale2 = p ** (lad["val_C"] + lad["val_Cinv"])
    check_mod = p ** (plan.N_phi - guard) * scale2
    ident = identity_flat(b, scale2)
    for k in range(Kp):
        for e in range(b * b):
            want = ident[e] if k == 0 else 0
            assert (prod[k][e] - want) % check_mod == 0
    # Thm-style valuation floor on C coefficients
    from defzeta.intutil import ceil_log

    w = 2 * plan.delta + (fam.n - 1)
    for i, flat in enumerate(diags["C"]):
        if i == 0:
            continue
        floor = -w * ceil_log(i, p)
        for v in flat:
            if v:
                assert ordp(v, p) - lad["val_C"] >= floor


def test_frobenius_ode_residual(quintic_family, quintic_connection):
    """(d/dt + M) Phi = p t^(p-1) Phi sigma(M), as a series residual.

    Multiplying through by r: r Phi' + G Phi - p t^(p-1) Phi sigma(G/r)...
    sigma fixes the rational coefficients, so sigma(M) has the same
    coefficients evaluated at t^p: check r(t) sigma(r)(t) times the
    equation to clear denominators.
    """
    from defzeta.diagfrob import DiagonalFibre, diag_frobenius_matrix
    from defzeta.kernels import conv_trunc
    from defzeta.precision import build_plan

    fam = quintic_family
    conn = quintic_connection
    plan = build_plan(fam, conn, a=1, exponents_cfg=QUINTIC_EXPONENTS)
    phi0 = diag_frobenius_matrix(
        DiagonalFibre(fam.p, fam.d, fam.n, fam.diagonal),
        conn.basis,
        plan.ladder["N_phi0"],
        plan.delta,
    )
    _, diags = frobenius_series(conn.G, conn.r, phi0, plan)
    Phi = diags["Phi"]
    p, b = plan.p, plan.b
    guard = 2 + plan.delta
    check_len = min(plan.K - len(conn.r) - 1, 60)
    mod = p ** (plan.N_phi - guard)
    b2 = b * b
    # sigma(r) coefficients: r_j at degree p*j
    deg_r = len(conn.r) - 1
    sig_r = [0] * (p * deg_r + 1)
    for j, c in enumerate(conn.r):
        sig_r[p * j] = c
    sig_G = [[None] * b for _ in range(b)]
    for i in range(b):
        for j in range(b):
            cs = conn.G[i][j]
            out = [0] * (p * (len(cs) - 1) + 1) if cs else []
            for e, c in enumerate(cs):
                out[p * e] = c
            sig_G[i][j] = out
    L = check_len
    # term1 = sigma(r) * r * Phi'
    rr = conv_trunc(conn.r, sig_r, L + 1)
    dPhi = [[(k + 1) * v for v in Phi[k + 1]] for k in range(L)]
    term = _matseries_scalar(rr, dPhi, L, b)
    # term2 = sigma(r) * G * Phi
    GPhi = _poly_mat_mul(conn.G, Phi, L, b)
    term2 = _matseries_scalar(sig_r, GPhi, L, b)
    # term3 = p t^(p-1) * r * Phi * sigma(G)
    PhisG = _mat_series_poly_mul(Phi, sig_G, L, b)
    t3 = _matseries_scalar(conn.r, PhisG, L, b)
    t3 = [[p * v for v in row] for row in t3]
    shifted = [[0] * b2 for _ in range(L)]
    for k in range(L - (p - 1)):
        shifted[k + p - 1] = t3[k]
    for k in range(L):
        for e in range(b2):
            resid = term[k][e] + term2[k][e] - shifted[k][e]
            assert resid % mod == 0


def _matseries_scalar(poly, series, L, b):
    out = [[0] * (b * b) for _ in range(L)]
    for j, c in enumerate(poly):
        if c:
            for k in range(L - j):
                row = series[k]
                tgt = out[k + j]
                for e, v in enumerate(row):
                    if v:
                        tgt[e] += c * v
    return out


def _poly_mat_mul(G, series, L, b):
    """(G * series)_k where G is a matrix of polynomials."""
    out = [[0] * (b * b) for _ in range(L)]
    for i in range(b):
        for kk in range(b):
            cs = G[i][kk]
            for e, c in enumerate(cs):
                if c:
                    for k in range(L - e):
                        src = series[k]
                        tgt = out[k + e]
                        for j in range(b):
                            v = src[kk * b + j]
                            if v:
                                tgt[i * b + j] += c * v
    return out


def _mat_series_poly_mul(series, Gpolys, L, b):
    """(series * G)_k with G a matrix of polynomials."""
    out = [[0] * (b * b) for _ in range(L)]
    for kk in range(b):
        for j in range(b):
            cs = Gpolys[kk][j]
            for e, c in enumerate(cs):
                if c:
                    for k in range(L - e):
                        src = series[k]
                        tgt = out[k + e]
                        for i in range(b):
                            v = src[i * b + kk]
                            if v:
                                tgt[i * b + j] += c * v
    return out


def test_error_injection_contract():
    """Injected p^Nprime-sized noise moves the output by at most p^N."""
    rng = random.Random(13)
    p, b, K = 3, 2, 16
    delta_w = 1  # 2 delta + (n-1) stand-in for a toy system
    from defzeta.intutil import ceil_log

    lg = ceil_log(K - 1, p)
    Nc = 6
    Nprime = Nc + (2 * delta_w + 1) * lg
    shift = (2 * delta_w + 1) * lg + 4
    mod = p ** (Nprime + shift)
    G, r = _random_system(rng, p, b, 2, 1, mod)
    base = solve_series_ode(G, r, K, p, Nprime, shift, b)
    # perturb G by p^Nprime-sized noise (Prop-style contract on a toy)
    Gp = [
        [(v + p**Nprime * rng.randint(-2, 2)) % mod for v in flat] for flat in G
    ]
    pert = solve_series_ode(Gp, r, K, p, Nprime, shift, b)
    for k in range(K):
        for e in range(b * b):
            diff = (base[k][e] - pert[k][e]) % (p ** (Nc + shift))
            vdiff = diff if diff == 0 else ordp(diff, p)
            if diff:
                assert vdiff >= Nc  # noise does not reach the trusted digits


def test_internal_error_injection_contract():
    """Noise of size p^Nprime injected into every recursion step stays
    below the trusted digits of the output (the working-precision story)."""
    rng = random.Random(99)
    p, b, K = 3, 2, 16
    from defzeta.intutil import ceil_log

    lg = ceil_log(K - 1, p)
    Nc = 6
    Nprime = Nc + 3 * lg
    shift = 3 * lg + 4
    mod = p ** (Nprime + shift)
    G, r = _random_system(rng, p, b, 2, 1, mod)
    base = solve_series_ode(G, r, K, p, Nprime, shift, b)

    def hook(s):
        return [p**Nprime * rng.randint(-2, 2) * p**shift % mod for _ in range(b * b)]

    pert = solve_series_ode(G, r, K, p, Nprime, shift, b, error_hook=hook)
    for k in range(K):
        for e in range(b * b):
            diff = (base[k][e] - pert[k][e]) % (p ** (Nc + shift))
            if diff:
                assert ordp(diff, p) >= Nc
