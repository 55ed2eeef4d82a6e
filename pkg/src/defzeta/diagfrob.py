"""The Frobenius matrix of a diagonal fibre over Q_p.

Entries are assembled from the products alpha_{u,v} of truncated double
sums; the matrix has exactly one nonzero entry in every row and column,
located by the exponent-matching permutation.  All arithmetic is exact
fixed-point arithmetic modulo a power of p; the factorial divisions inside
the sums consume shift headroom sized from the truncation bound, so no
digit is ever lost to rounding.
"""

from .intutil import ceil_log, invmod, ordp, ordp_factorial


class DiagonalFibre:
    def __init__(self, p, d, n, coefficients):
        if len(coefficients) != n + 1:
            raise ValueError("need n+1 diagonal coefficients")
        if d % p == 0:
            raise ValueError("p divides d")
        for i, a in enumerate(coefficients):
            if a % p == 0:
                raise ValueError(f"diagonal coefficient a_{i} not a unit")
        self.p = p
        self.d = d
        self.n = n
        self.a = [int(a) for a in coefficients]


def frobenius_matching(u, p, d):
    """The unique v with x^v in B and p(u_i+1) = v_i+1 mod d."""
    return tuple((p * (ui + 1) - 1) % d for ui in u)


def truncation_bounds(p, Nprime):
    """(M, R): how far the alpha sums must run for precision Nprime.

    M = ceil((p^2/(p-1)) (Nprime + log_p(Nprime+3) + 4)) - 1 with the
    logarithm resolved by exact integer-power comparisons; R = floor(M/p).
    """
    B = Nprime + 3
    # ceil(x) with x = (p^2/(p-1)) (Nprime + 4 + log_p B):
    # m >= x  <=>  p^(m(p-1) - p^2(Nprime+4)) >= B^(p^2)
    lo_log = floor_log(B, p)

    def geq(m):
        e = m * (p - 1) - p * p * (Nprime + 4)
        if e < 0:
            return False
        return p**e >= B ** (p * p)

    lo = (p * p * (Nprime + 4 + lo_log)) // (p - 1)
    m = max(lo, 0)
    while not geq(m):
        m += 1
    while m > 0 and geq(m - 1):
        m -= 1
    M = m - 1
    return M, M // p


def floor_log(n, b):
    from .intutil import floor_log as fl

    return fl(n, b)


class _FixedPoint:
    """Exact arithmetic on values x = man * p^(-shift) mod p^N precision."""

    def __init__(self, p, N, shift):
        self.p = p
        self.N = N
        self.shift = shift
        self.mod = p ** (N + shift)
        self.scale = p**shift

    def from_int(self, n):
        return n * self.scale % self.mod

    def mul(self, x, y):
        v = x * y
        if v % self.scale:
            raise ArithmeticError("fixed-point underflow")
        return v // self.scale % self.mod

    def div_int(self, x, n):
        """Divide by a nonzero integer, exactly."""
        v = ordp(n, self.p)
        unit = n // self.p**v if v else n
        x = x * invmod(unit % self.mod, self.mod) % self.mod
        if v:
            if x % self.p**v:
                raise ArithmeticError("fixed-point underflow in division")
            x //= self.p**v
        return x

    def valuation(self, x):
        if x == 0:
            return None
        return ordp(x, self.p) - self.shift


def alpha_uv(fibre, u, v, Nprime, bounds=None):
    """alpha_{u,v} as (mantissa mod p^Nprime, valuation >= 0 asserted).

    Returns an integer mantissa (no shift: the result is p-integral).
    """
    p, d, n = fibre.p, fibre.d, fibre.n
    M, R = bounds or truncation_bounds(p, Nprime)
    shift = ordp_factorial(M, p) + 1
    fx = _FixedPoint(p, Nprime, shift)
    inv_d = invmod(d, fx.mod)
    total = fx.from_int(1)
    for i in range(n + 1):
        ai = fibre.a[i] % fx.mod
        ci = p * (u[i] + 1) - (v[i] + 1)
        if ci % d:
            raise ValueError("(u, v) is not a matched pair")
        ci //= d
        if not 0 <= ci < p:
            raise AssertionError("matched offset outside [0, p)")
        pap = p * pow(ai, p - 1, fx.mod) % fx.mod
        # double sum over m = ci + p r, r = 0..R
        # terms[j] for the current r: (p a^(p-1))^(r-j) / ((m-pj)! j!)
        m = ci
        fact_ci = 1
        for t in range(2, ci + 1):
            fact_ci *= t
        terms = [fx.div_int(fx.from_int(1), fact_ci)]
        rising = fx.from_int(1)  # ((u_i+1)/d)_r
        base = fx.from_int((u[i] + 1) * inv_d)
        Ssum = terms[0]
        for r in range(1, R + 1):
            new_terms = [0] * (r + 1)
            # j = 0 term: multiply by (p a^(p-1)) and the p new factorials
            t0 = fx.mul(terms[0], fx.from_int(pap))
            for mm in range(m + 1, m + p + 1):
                t0 = fx.div_int(t0, mm)
            new_terms[0] = t0
            for j in range(1, r + 1):
                new_terms[j] = fx.div_int(terms[j - 1], j)
            terms = new_terms
            m += p
            Tsum = 0
            for t in terms:
                Tsum = (Tsum + t) % fx.mod
            rising = fx.mul(rising, (base + fx.from_int(r - 1)) % fx.mod)
            rv = fx.valuation(rising)
            if rv is not None and rv < ordp_factorial(r, p):
                raise AssertionError("rising factorial valuation too small")
            Ssum = (Ssum + fx.mul(rising, Tsum)) % fx.mod
        factor = fx.mul(fx.from_int(pow(ai, ci, fx.mod)), Ssum)
        total = fx.mul(total, factor)
    val = fx.valuation(total)
    if val is not None and val < 0:
        raise AssertionError("alpha has negative valuation")
    if total % fx.scale:
        raise AssertionError("alpha mantissa is not integral")
    return (total // fx.scale) % p**Nprime


def diag_frobenius_matrix(fibre, basis, N_phi0, delta):
    """Flat b x b mantissa matrix of the diagonal Frobenius action.

    Mantissas are value * p^delta modulo p^(N_phi0 + delta); the entry for
    basis column u sits in the row of its matched monomial v.
    """
    p, d, n = fibre.p, fibre.d, fibre.n
    Nprime = N_phi0 + (n - 1) + ordp_factorial(n - 1, p) + 2 * delta
    bounds = truncation_bounds(p, Nprime)
    b = basis.b
    mod = p ** (N_phi0 + delta)
    flat = [0] * (b * b)
    fact = [1]
    for t in range(1, n + 1):
        fact.append(fact[-1] * t)
    for col, (u, ku) in enumerate(basis.elements):
        v = frobenius_matching(u, p, d)
        row = basis.index[v]
        kv = basis.pole_order(v)
        alpha = alpha_uv(fibre, u, v, Nprime, bounds)
        va = ordp(alpha, p) if alpha else Nprime
        # two-sided valuation bound on alpha
        ratio_val = ordp_factorial(kv - 1, p) - ordp_factorial(ku - 1, p)
        if va > ratio_val + (n - ku) + delta:
            raise AssertionError("alpha valuation exceeds its upper bound")
        # entry = (-1)^kv (kv-1)!/(ku-1)! p^(n-ku) / alpha, times p^delta
        num = fact[kv - 1]
        den = fact[ku - 1]
        vnum, vden = ordp(num, p) if num > 1 else 0, ordp(den, p) if den > 1 else 0
        e = delta + (n - ku) + vnum - vden - va
        if e < 0:
            raise AssertionError("entry valuation below the delta floor")
        unum = num // p**vnum
        uden = den // p**vden
        ualpha = alpha // p**va
        man = p**e * unum % mod
        man = man * invmod(uden % mod, mod) % mod
        man = man * invmod(ualpha % mod, mod) % mod
        if kv % 2:
            man = (-man) % mod
        flat[row * b + col] = man
    return flat
