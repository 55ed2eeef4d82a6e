"""Precision planning: p-adic working precisions and the (s, K) pair.

Everything is computed with exact integer arithmetic (integer-power
comparisons in place of logarithms).  The plan fixes, ahead of the main
computation, every modulus and fixed-point shift used downstream, plus the
polynomial s and t-adic truncation K that turn the Frobenius series into
evaluable rational data.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import zpoly_mul, zpoly_primitive, zpoly_trim
from .gfpoly import gf_gcd
from .intutil import ceil_log, floor_log, ordp, ordp_factorial


def delta_bound(n, p):
    """Uniform valuation defect: ord_p((n-1)!) + sum floor(log_p i)."""
    total = ordp_factorial(n - 1, p)
    for i in range(1, n):
        total += floor_log(i, p)
    return total


class HodgeSlopes:
    """Convex slope function built from the Hodge numbers."""

    def __init__(self, hodge):
        # hodge = (|B_1|, ..., |B_n|) = (h^{n-1,0}, ..., h^{0,n-1});
        # slope i runs over a width of h^{i, n-1-i} = |B_{n-i}|
        self.widths = list(reversed(hodge))
        self.b = sum(hodge)

    def value(self, x):
        if x < 0 or x > self.b:
            raise ValueError("argument outside [0, b]")
        total = 0
        pos = 0
        for slope, w in enumerate(self.widths):
            take = min(w, x - pos)
            if take <= 0:
                break
            total += slope * take
            pos += take
        return total


def chi_coeff_precision(i, b, p, a, n):
    """Smallest N with p^N > 2 (b/i) q^(i(n-1)/2), q = p^a, exactly."""
    # compare p^(2N) i^2 > 4 b^2 p^(a i (n-1)) to avoid the half power
    rhs = 4 * b * b * p ** (a * i * (n - 1))
    ii = i * i
    N = (a * i * (n - 1)) // 2  # the dominant part; adjust upward from there
    while p ** (2 * N) * ii <= rhs:
        N += 1
    while N > 0 and p ** (2 * (N - 1)) * ii > rhs:
        N -= 1
    return N


def frobenius_precision(b, p, a, n, hodge, delta, mode="full", j_extra=0):
    """Required precision of the evaluated Frobenius matrix.

    mode: 'full' uses all coefficients, 'half' only the bottom half (the
    functional-equation sign must be known), 'adaptive' the bottom half
    plus j_extra.
    """
    if mode == "half":
        top = b // 2
    elif mode == "adaptive":
        top = min(b, b // 2 + j_extra)
    else:
        top = b
    gamma = HodgeSlopes(hodge)
    best = 1
    for i in range(1, top + 1):
        Nchi = chi_coeff_precision(i, b, p, a, n)
        if p >= n:
            val = Nchi - a * gamma.value(i - 1)
        else:
            val = Nchi + delta
        best = max(best, val)
    return best


def ladder_precisions(N_phi, K, delta, n, p, a, b):
    """All derived precisions for the series stage."""
    lg_K = ceil_log(max(K - 1, 1), p)
    Kp = -(-K // p)  # ceil(K/p)
    lg_Kp = ceil_log(max(Kp - 1, 1), p)
    w = 2 * delta + (n - 1)
    out = {
        "N_phi0": N_phi + w * (lg_K + lg_Kp),
        "N_C": N_phi + w * lg_Kp + delta,
        "N_Cinv": N_phi + w * lg_K + delta,
        "N_M": N_phi + (2 * w + 1) * lg_K + 1,
        "Np_C": N_phi + (2 * w + 1) * lg_K,
        "Np_Cinv": N_phi + (2 * w + 1) * lg_Kp,
        "Np_phi": N_phi + (a + b - 3) * delta,
    }
    out["Np_phi0"] = out["N_phi0"] + (n - 1) + ordp_factorial(n - 1, p) + 2 * delta
    out["Np_M"] = out["N_M"] + ordp_factorial(n, p)
    out["shift_C"] = (2 * w + 1) * lg_K
    out["shift_Cinv"] = (2 * w + 1) * lg_Kp
    out["val_C"] = w * lg_K
    out["val_Cinv"] = w * lg_Kp
    return out


# ---------------------------------------------------------------------------
# pole-order bounds per residue disk


def reduction_theta(mu, nu, N, p, n, d_t, at_infinity=False):
    """Pole bound from the reduction multiplicities (no exponents needed).

    mu = sum_{k<=n} ord_z(Delta_k^{-1}) and nu = ord_z(Delta_{n+1}^{-1}),
    both bounded below by minus the determinant multiplicities.
    """
    h = _h_of_N(N, p, n)
    theta = -mu - (p * (n + h) - n) * nu
    if at_infinity:
        theta += p * h * d_t
    return theta


def _h_of_N(N, p, n):
    c0 = (n - 1) + ordp_factorial(n - 1, p)
    # i + c0 - n*floor(log_p(p(n+i)-1)) < N; the log term is O(log i)
    upper = N + n * (1 + floor_log(max(p * (n + N + 4), 2), p)) + 4
    best = 0
    for i in range(1, upper + 1):
        if i + c0 - n * floor_log(p * (n + i) - 1, p) < N:
            best = i
    return best


class ExponentError(ValueError):
    pass


def exponent_theta(lambdas, ordp_M, delta_eff, b, n, p, N, at_special=False,
                   ord_z_W=0, ord_z_Winv=0):
    """Pole bound from connection exponents at a simple pole.

    at_special: the point is 0 or infinity (no overconvergence growth term).
    The optional W data accounts for a user-supplied basis change with
    poles/zeros at z; delta_eff must already include its p-adic correction.
    """
    lams = [Fraction(l) for l in lambdas]
    for lam in lams:
        if lam.denominator % p == 0:
            raise ExponentError(f"exponent {lam} is not a p-adic integer")
    alpha1 = math.floor(-p * min(lams) + max(lams))
    if at_special:
        alpha2 = 0
    else:
        alpha2 = _g_of_N(N, p, n, b, delta_eff, ordp_M)
    return alpha1 + p * alpha2 - ord_z_W - p * ord_z_Winv


def _g_of_N(N, p, n, b, delta, ordp_M):
    w = 2 * delta + (n - 1)

    def f(i):
        lo = -w * ceil_log(i, p)
        hi = (b - 1) * ordp_M - w * floor_log(i, p)
        return max(lo, hi)

    if ordp_M >= 0:
        c = 0
    else:
        c = 0
        upper0 = max(2, -(b - 1) * ordp_M * 4 + 16)
        for i in range(1, upper0 + 1):
            c = min(c, i + f(i))
    upper = N + delta - c + w * (1 + floor_log(max(N + delta - c + 2, 2), p)) + 4
    best = 0
    for i in range(1, upper + 1):
        if i + f(i) - delta + c < N:
            best = i
    return best


# ---------------------------------------------------------------------------
# residue-disk classification and the (s, K) choice


@dataclass
class DiskBound:
    ident: str  # "f<index>" for a finite factor class, "inf"
    factor: list | None
    degree: int
    method: str  # "exponents" | "reduction" | "zero" | "manual"
    theta: int
    mu: int = 0
    nu: int = 0


@dataclass
class PrecisionPlan:
    p: int
    a: int
    n: int
    d: int
    b: int
    delta: int
    hodge: tuple
    epsilon_mode: str
    N_chi: list
    N_phi: int
    K: int
    s_poly: list
    disks: list
    ladder: dict
    theta_inf: int

    def as_dict(self):
        return {
            "p": self.p,
            "a": self.a,
            "n": self.n,
            "d": self.d,
            "b": self.b,
            "delta": self.delta,
            "hodge": list(self.hodge),
            "epsilon_mode": self.epsilon_mode,
            "N_chi": list(self.N_chi),
            "N_phi": self.N_phi,
            "K": self.K,
            "s": [str(c) for c in self.s_poly],
            "theta_inf": self.theta_inf,
            "disks": [
                {
                    "ident": dk.ident,
                    "degree": dk.degree,
                    "method": dk.method,
                    "theta": dk.theta,
                    "mu": dk.mu,
                    "nu": dk.nu,
                }
                for dk in self.disks
            ],
            "ladder": dict(self.ladder),
        }


def _poly_mod_p(f, p):
    out = [c % p for c in f]
    while out and out[-1] == 0:
        out.pop()
    return out


def _zpoly_mul_mod(f, g, mod):
    """Product of integer polys with coefficients reduced mod `mod`, via one
    packed big multiplication."""
    if not f or not g:
        return []
    from .kernels.packed import pack_scalar_series, slot_bytes_for, unpack_into

    sb = slot_bytes_for(mod, mod, min(len(f), len(g)))
    pf = pack_scalar_series([c % mod for c in f], sb)
    pg = pack_scalar_series([c % mod for c in g], sb)
    n = len(f) + len(g) - 1
    out = [[0] for _ in range(n)]
    unpack_into(pf * pg, out, 0, 0, sb, n)
    return [row[0] % mod for row in out]


def _zpoly_pow_mod(f, e, mod):
    result = [1]
    base = [c % mod for c in f]
    while e:
        if e & 1:
            result = _zpoly_mul_mod(result, base, mod)
        e >>= 1
        if e:
            base = _zpoly_mul_mod(base, base, mod)
    return result


def choose_s_and_K(connection, p, N_phi, delta, d_t, exponents_cfg=None,
                   manual_theta=None, s_modulus=None):
    """Per-disk pole bounds, the polynomial s, and the truncation order K.

    Finite residue disks are organized by the irreducible factors of R over
    Q.  A factor of r gets its bound from the connection exponents (when the
    user supplied them and the disk structure allows it) or from the
    reduction multiplicities.  A factor of R whose disks carry no pole of M
    contributes 0; one that shares a disk with a pole contributes its own
    reduction multiplicities unless the sharing pole is exponent-bounded,
    in which case the exponent theorem already excludes further poles on
    the disk.

    exponents_cfg keys: "finite_default", "finite" (r-factor index ->
    entry), "infinity"; entries carry "lambdas" plus optional basis-change
    data "ord_z_W", "ord_z_Winv", "ordp_W_pair".  r-factors are indexed in
    sorted order (degree, then coefficients).  manual_theta entries
    ("f<i>", "R<i>", "inf") may only raise computed bounds.
    """
    exponents_cfg = exponents_cfg or {}
    manual_theta = manual_theta or {}
    basis = connection.basis
    n, b = basis.n, basis.b
    r_prim, _ = zpoly_primitive(connection.r)
    if connection.r_content % p == 0:
        raise ValueError("content of r is divisible by p; family unusable at p")
    ordp_M = connection.ordp_of_G(p)
    factor_table = connection.R_factor_table()
    r_factors = sorted(connection.r_factors(), key=lambda t: (len(t[0]), t[0]))
    r_keys = [tuple(f) for f, _ in r_factors]
    r_index = {key: i for i, key in enumerate(r_keys)}
    finite_cfg = exponents_cfg.get("finite", {}) or {}
    finite_default = exponents_cfg.get("finite_default")
    inf_cfg = exponents_cfg.get("infinity")

    # structural eligibility of the exponent route per r-factor and at inf
    rbars = {key: _poly_mod_p(list(key), p) for key in r_keys}
    full_degree = {key: len(rbars[key]) == len(key) for key in r_keys}
    squarefree = {}
    for key in r_keys:
        fb = rbars[key]
        der = [(i * c) % p for i, c in enumerate(fb)][1:]
        squarefree[key] = len(fb) > 1 and len(gf_gcd(fb, der, p)) == 1
    shares = {key: False for key in r_keys}
    for i, ki in enumerate(r_keys):
        for kj in r_keys[i + 1 :]:
            if len(gf_gcd(rbars[ki], rbars[kj], p)) > 1:
                shares[ki] = shares[kj] = True
    inf_drop = any(not full_degree[key] for key in r_keys)
    mult_in_r = {tuple(f): m for f, m in r_factors}
    kt_ok = {
        key: full_degree[key]
        and squarefree[key]
        and not shares[key]
        and mult_in_r[key] == 1
        for key in r_keys
    }

    def factor_cfg(key):
        if key in r_index:
            return finite_cfg.get(str(r_index[key]), finite_default)
        return None

    # which r-factor disks are exponent-bounded (no other poles on disk)
    exponent_bounded = set()
    for key in r_keys:
        cfg = factor_cfg(key)
        if cfg and "lambdas" in cfg and kt_ok[key]:
            exponent_bounded.add(key)

    level_rows = _level_row_sizes(basis.d, n)
    s_modulus = s_modulus or p ** (N_phi + delta)
    disks = []
    s_poly = [1]
    K_sum = 0
    for f, per_k in factor_table:
        key = tuple(f)
        deg = len(f) - 1
        fbar = _poly_mod_p(f, p)
        ident = f"f{r_index[key]}" if key in r_index else f"R{len(disks)}"
        mu = -sum(m for k, m in per_k.items() if k <= n)
        nu = -per_k.get(n + 1, 0)
        method, theta = None, 0
        if key in r_index:
            cfg = factor_cfg(key)
            if cfg and "lambdas" in cfg and kt_ok[key]:
                delta_eff = delta - int(cfg.get("ordp_W_pair", 0))
                theta = exponent_theta(
                    cfg["lambdas"], ordp_M, delta_eff, b, n, p, N_phi,
                    at_special=False,
                    ord_z_W=int(cfg.get("ord_z_W", 0)),
                    ord_z_Winv=int(cfg.get("ord_z_Winv", 0)),
                )
                method = "exponents"
            else:
                theta = reduction_theta(mu, nu, N_phi, p, n, d_t)
                method = "reduction"
        else:
            # not a pole itself:012 check disk sharing with the poles
            sharing = [
                kr
                for kr in r_keys
                if len(gf_gcd(fbar, rbars[kr], p)) > 1
            ]
            drop = len(fbar) < len(f)
            inf_covered = (not drop) or _inf_exponent_ok(inf_cfg, inf_drop)
            if not sharing and not drop:
                method, theta = "zero", 0
            elif all(kr in exponent_bounded for kr in sharing) and inf_covered:
                method, theta = "zero", 0
            else:
                theta = reduction_theta(mu, nu, N_phi, p, n, d_t)
                method = "reduction"
        if ident in manual_theta:
            if manual_theta[ident] < theta:
                raise ValueError("manual theta may not lower a computed bound")
            theta = manual_theta[ident]
            method = "manual"
        theta = max(theta, 0)
        disks.append(DiskBound(ident, f, deg, method, theta, mu, nu))
        if theta:
            s_poly = _zpoly_mul_mod(s_poly, _zpoly_pow_mod(f, theta, s_modulus), s_modulus)
        K_sum += deg * theta

    has_pole_inf = _has_pole_at_infinity(connection) or inf_drop
    if not has_pole_inf:
        theta_inf, method = 0, "zero"
    elif _inf_exponent_ok(inf_cfg, inf_drop):
        delta_eff = delta - int(inf_cfg.get("ordp_W_pair", 0))
        theta_inf = exponent_theta(
            inf_cfg["lambdas"], ordp_M, delta_eff, b, n, p, N_phi,
            at_special=True,
            ord_z_W=int(inf_cfg.get("ord_z_W", 0)),
            ord_z_Winv=int(inf_cfg.get("ord_z_Winv", 0)),
        )
        method = "exponents"
    else:
        degs = {k: 0 for k in range(2, n + 2)}
        for f, per_k in factor_table:
            for k, m in per_k.items():
                degs[k] += (len(f) - 1) * m
        # ord_inf of the inverse reduction maps: deg(det) - max adjugate degree
        mu_inf = sum(degs[k] - (level_rows[k] - 1) * d_t for k in range(2, n + 1))
        nu_inf = degs[n + 1] - (level_rows[n + 1] - 1) * d_t
        theta_inf = reduction_theta(
            min(mu_inf, 0), min(nu_inf, 0), N_phi, p, n, d_t, at_infinity=True
        )
        method = "reduction"
    if "inf" in manual_theta:
        if manual_theta["inf"] < theta_inf:
            raise ValueError("manual theta may not lower a computed bound")
        theta_inf = manual_theta["inf"]
        method = "manual"
    disks.append(DiskBound("inf", None, 0, method, theta_inf))
    K = max(K_sum + theta_inf + 1, 2)
    return s_poly, K, disks, theta_inf


def _inf_exponent_ok(inf_cfg, inf_drop):
    return bool(inf_cfg) and "lambdas" in inf_cfg and not inf_drop


def _level_row_sizes(d, n):
    from .cohomology import monomials_of_degree

    out = {}
    for k in range(2, n + 2):
        F = monomials_of_degree(n + 1, k * d - (n + 1))
        out[k] = sum(1 for u in F if max(u) >= d - 1)
    return out


def _has_pole_at_infinity(connection):
    # in the coordinate w = 1/t the connection matrix is -M(1/w)/w^2, so
    # the disk at infinity is pole-free only when deg G <= deg r - 2
    deg_r = len(connection.r) - 1
    for row in connection.G:
        for cs in row:
            if cs and len(cs) - 1 >= deg_r - 1:
                return True
    return False


def build_plan(family, connection, a, exponents_cfg=None, manual_theta=None,
               epsilon_mode=None, j_extra=1, overrides=None):
    """Assemble the full precision plan for a fibre of degree a."""
    basis = connection.basis
    n, d, p = family.n, family.d, family.p
    b = basis.b
    hodge = basis.hodge_numbers()
    delta = delta_bound(n, p)
    if epsilon_mode is None:
        epsilon_mode = "half" if n % 2 == 0 else "full"
    N_phi = frobenius_precision(b, p, a, n, hodge, delta, epsilon_mode, j_extra)
    overrides = overrides or {}
    if "N_phi" in overrides:
        if overrides["N_phi"] < N_phi:
            raise ValueError("N_phi override may not lower the computed value")
        N_phi = overrides["N_phi"]
    N_chi = [chi_coeff_precision(i, b, p, a, n) for i in range(1, b + 1)]
    if "s" in overrides or "K" in overrides:
        raise ValueError("override s and K via manual_theta, not directly")
    s_poly, K, disks, theta_inf = choose_s_and_K(
        connection, p, N_phi, delta, family.d_t, exponents_cfg, manual_theta,
        s_modulus=p ** (N_phi + delta),
    )
    ladder = ladder_precisions(N_phi, K, delta, n, p, a, b)
    for key, val in overrides.items():
        if key in ladder:
            if val < ladder[key]:
                raise ValueError(f"{key} override may not lower the computed value")
            ladder[key] = val
    return PrecisionPlan(
        p=p,
        a=a,
        n=n,
        d=d,
        b=b,
        delta=delta,
        hodge=hodge,
        epsilon_mode=epsilon_mode,
        N_chi=N_chi,
        N_phi=N_phi,
        K=K,
        s_poly=s_poly,
        disks=disks,
        ladder=ladder,
        theta_inf=theta_inf,
    )
