"""Power-series solution of the Frobenius differential system.

The homogeneous system r C' + G C = 0 with C(0) = I is solved by the
coefficient recursion

    C_(s) = -1/(r_0 s) ( sum_m G_m C_(s-1-m) + sum_m r_(m+1) (j C_j)|_(j=s-1-m) )

carried on integer mantissas modulo p^(Nprime + shift).  Long-range
contributions of finished coefficient blocks are added by packed
convolutions (one big multiplication per matrix entry pair); only the
short triangular part inside a block runs step by step.  The dual system
gives the inverse series, and Phi = C Phi_0 sigma(C^-1).
"""

from .intutil import invmod, ordp
from .kernels import mat_mul_add, mod_list, vec_addmul
from .kernels.packed import (
    PackedSeries,
    block_scatter,
    pack_scalar_series,
    series_matmul,
    series_scalar_mul,
    slot_bytes_for,
)


class InvalidDenominator(ArithmeticError):
    pass


def identity_flat(b, scale):
    out = [0] * (b * b)
    for i in range(b):
        out[i * b + i] = scale
    return out


def transpose_flat(flat, b):
    return [flat[j * b + i] for i in range(b) for j in range(b)]


def reduce_connection_mod(G_polys, r_poly, b, mod):
    """G as a list of flat coefficient matrices and r coefficients mod p^W."""
    degG = max((len(cs) - 1 for row in G_polys for cs in row if cs), default=-1)
    Gm = [[0] * (b * b) for _ in range(degG + 1)]
    for i in range(b):
        for j in range(b):
            for e, c in enumerate(G_polys[i][j]):
                if c:
                    Gm[e][i * b + j] = c % mod
    rm = [c % mod for c in r_poly]
    return Gm, rm


def solve_series_ode(Gm, rm, K, p, Ndigits, shift, b, block=None, val_floor=None,
                     error_hook=None):
    """Solve r C' + G C = 0, C(0) = I, to K coefficients mod p^Ndigits.

    Gm: flat coefficient matrices (already reduced mod p^(Ndigits+shift));
    rm: the r coefficients likewise.  Mantissas represent value * p^shift.
    val_floor: optional valuation floor asserted for every coefficient.
    error_hook(s): optional test hook returning flat additive noise for
    coefficient s, injected into the recursion like a working-precision
    error.
    """
    W = Ndigits + shift
    mod = p**W
    scale = p**shift
    if rm[0] % p == 0:
        raise InvalidDenominator("r(0) is not a p-adic unit")
    inv_r0 = invmod(rm[0], mod)
    rp = [c % mod for c in rm[1:]]
    LG = len(Gm) - 1
    from .kernels import backend_name

    if block is None:
        block = 16 if backend_name == "c" else 4
    C = [identity_flat(b, scale)]
    horizon = max(LG + 1, len(rp)) + block + 2
    acc = [[0] * (b * b) for _ in range(K)]
    sb = slot_bytes_for(mod, mod, block * (b + 1))
    Gpacked = PackedSeries(Gm, b * b, sb).packed if Gm else [0] * (b * b)
    rpacked = pack_scalar_series(rp, sb) if rp else None
    bb = b * b
    inv_cache = {}
    for block_start in range(0, K, block):
        block_end = min(block_start + block, K)
        for s in range(max(block_start, 1), block_end):
            bracket = mod_list(acc[s], mod)
            lo = max(block_start, s - 1 - LG)
            for j in range(lo, s):
                mat_mul_add(bracket, Gm[s - 1 - j], C[j], b)
            if rp:
                lo2 = max(block_start, s - len(rp))
                for j in range(max(lo2, 1), s):
                    crj = rp[s - 1 - j] * j
                    if crj:
                        vec_addmul(bracket, C[j], crj % mod)
            e = ordp(s, p) if s % p == 0 else 0
            unit = s // p**e
            key = unit % mod
            inv_u = inv_cache.get(key)
            if inv_u is None:
                inv_u = invmod(key, mod)
                inv_cache[key] = inv_u
            fac = (mod - 1) * inv_r0 * inv_u % mod  # -1/(r0 * unit(s))
            pe = p**e
            out = [0] * bb
            for idx in range(bb):
                v = bracket[idx] % mod * fac % mod
                if e:
                    if v % pe:
                        raise ArithmeticError("recursion underflow: shift too small")
                    v //= pe
                out[idx] = v
            if error_hook is not None:
                noise = error_hook(s)
                if noise:
                    out = [(x + e) % mod for x, e in zip(out, noise)]
            C.append(out)
            if val_floor is not None:
                _assert_floor(out, p, shift, val_floor(s))
        if block_end < K:
            jC = [
                [v * j % mod for v in C[j]]
                for j in range(block_start, block_end)
            ]
            block_scatter(
                acc, C[block_start:block_end], block_start, Gm, Gpacked,
                rp, rpacked, jC, b, sb, K,
            )
    return C


def _assert_floor(flat, p, shift, floor):
    for v in flat:
        if v:
            if ordp(v, p) - shift < floor:
                raise AssertionError(
                    "series coefficient valuation below the convergence floor"
                )


def renormalize(series, p, from_shift, to_shift, Ndigits):
    """Lower the fixed-point shift, dropping now-untrusted top digits."""
    drop = from_shift - to_shift
    if drop < 0:
        raise ValueError("cannot raise the shift")
    pk = p**drop
    mod = p ** (Ndigits + to_shift)
    out = []
    for flat in series:
        row = []
        for v in flat:
            if v % pk:
                raise ArithmeticError("renormalization drop is not exact")
            row.append(v // pk % mod)
        out.append(row)
    return out


def sigma_reindex(series, p, K):
    """Coefficient i moves to t-degree p*i (sigma fixes the coefficients)."""
    width = len(series[0]) if series else 0
    out = [[0] * width for _ in range(K)]
    for i, flat in enumerate(series):
        if p * i >= K:
            break
        out[p * i] = list(flat)
    return out


def frobenius_series(G_polys, r_poly, phi0_flat, plan):
    """s Phi mod t^K with mantissas value * p^delta modulo p^(N_phi+delta).

    Returns (sPhi coefficients, diagnostics dict with the truncated C and
    C^-1 series for residual checks).
    """
    import os
    import sys
    import time

    progress = os.environ.get("DEFZETA_PROGRESS")

    def note(msg, t0=[time.time()]):
        if progress:
            now = time.time()
            print(f"[series +{now - t0[0]:.1f}s] {msg}", file=sys.stderr, flush=True)
            t0[0] = now

    p = plan.p
    b = plan.b
    K = plan.K
    delta = plan.delta
    lad = plan.ladder
    n = plan.n
    # solve for C at working precision
    shift_C = lad["shift_C"]
    modC = p ** (lad["Np_C"] + shift_C)
    Gm, rm = reduce_connection_mod(G_polys, r_poly, b, modC)
    w = 2 * delta + (n - 1)

    def floor_C(i):
        from .intutil import ceil_log

        return -w * ceil_log(max(i, 1), p)

    C = solve_series_ode(
        Gm, rm, K, p, lad["Np_C"], shift_C, b, val_floor=floor_C
    )
    note("C solved")
    C = renormalize(C, p, shift_C, lad["val_C"], lad["N_C"])
    # dual system for C^-1: r (C^-1)' - C^-1 G = 0 transposes to
    # r Y' + (-G^T) Y = 0 with Y = (C^-1)^T
    Kp = -(-K // p)
    shift_D = lad["shift_Cinv"]
    modD = p ** (lad["Np_Cinv"] + shift_D)
    GmT, rmT = reduce_connection_mod(
        [[[-c for c in G_polys[j][i]] for j in range(b)] for i in range(b)],
        r_poly,
        b,
        modD,
    )
    Y = solve_series_ode(
        GmT, rmT, Kp, p, lad["Np_Cinv"], shift_D, b, val_floor=floor_C
    )
    note("C inverse solved")
    Cinv = [transpose_flat(flat, b) for flat in Y]
    Cinv = renormalize(Cinv, p, shift_D, lad["val_Cinv"], lad["N_Cinv"])
    # Phi = C Phi0 sigma(C^-1)
    modPhi0 = p ** (lad["N_phi0"] + delta)
    D = []
    for flat in Cinv:
        prod = [0] * (b * b)
        mat_mul_add(prod, phi0_flat, flat, b)
        D.append(prod)  # value * p^(delta + val_Cinv), exact products
    Ds = sigma_reindex(D, p, K)
    S_tot = lad["val_C"] + delta + lad["val_Cinv"]
    modE = p ** (plan.N_phi + S_tot)
    boundC = p ** (lad["N_C"] + lad["val_C"])
    boundD = modPhi0 * p ** (lad["N_Cinv"] + lad["val_Cinv"])
    note("assembling the triple product")
    E = series_matmul(C, Ds, b, K, boundC, boundD, modulus=modE)
    note("triple product done")
    drop = p ** (S_tot - delta)
    modPhi = p ** (plan.N_phi + delta)
    Phi = []
    for flat in E:
        row = []
        for v in flat:
            if v % drop:
                raise ArithmeticError("Frobenius series renormalization failed")
            row.append(v // drop % modPhi)
        Phi.append(row)
    svals = [c % modPhi for c in plan.s_poly]
    sPhi = series_scalar_mul(svals, Phi, K, modPhi, modPhi, modulus=modPhi)
    note("s*Phi done")
    diags = {"C": C, "Cinv": Cinv, "Phi": Phi}
    return sPhi, diags
