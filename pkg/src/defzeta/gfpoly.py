"""Dense polynomial arithmetic over F_p (ascending coefficient lists).

Used for modulus validation, residue-disk classification and the point
counting oracle.  Factorization is delegated to sympy's galoistools.
"""


def gf_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def gf_mulmod(f, g, m, p):
    prod = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                prod[i + j] = (prod[i + j] + a * b) % p
    return gf_divmod(prod, m, p)[1]


def gf_divmod(f, g, p):
    f = list(f)
    g = gf_trim(list(g))
    if not g:
        raise ZeroDivisionError("division by zero polynomial")
    inv_lead = pow(g[-1], -1, p)
    q = [0] * max(0, len(f) - len(g) + 1)
    for i in range(len(f) - len(g), -1, -1):
        c = f[i + len(g) - 1] % p
        if c:
            c = c * inv_lead % p
            q[i] = c
            for j, b in enumerate(g):
                f[i + j] = (f[i + j] - c * b) % p
    return q, gf_trim([c % p for c in f[: len(g) - 1]])


def gf_gcd(f, g, p):
    f, g = gf_trim([c % p for c in f]), gf_trim([c % p for c in g])
    while g:
        f, g = g, gf_divmod(f, g, p)[1]
    if f:
        inv = pow(f[-1], -1, p)
        f = [c * inv % p for c in f]
    return f


def gf_powmod(f, e, m, p):
    result = [1]
    base = gf_divmod(f, m, p)[1]
    while e:
        if e & 1:
            result = gf_mulmod(result, base, m, p)
        base = gf_mulmod(base, base, m, p)
        e >>= 1
    return result


def gf_is_irreducible(m, p):
    """Rabin's test for a monic-normalizable polynomial over F_p."""
    m = gf_trim([c % p for c in m])
    n = len(m) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    h = gf_powmod(x, p**n, m, p)
    if gf_trim([(a - b) % p for a, b in zip_pad(h, x)]):
        return False
    for ell in _prime_divisors(n):
        h = gf_powmod(x, p ** (n // ell), m, p)
        diff = [(a - b) % p for a, b in zip_pad(h, x)]
        if len(gf_gcd(diff, m, p)) > 1:
            return False
    return True


def gf_poly_invmod(f, m, p):
    """Inverse of f modulo m over F_p (extended Euclid)."""
    r0, r1 = gf_trim([c % p for c in m]), gf_trim([c % p for c in f])
    s0, s1 = [], [1]
    while r1:
        q, r = gf_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, gf_trim([(a - b) % p for a, b in zip_pad(s0, _gf_mul(q, s1, p))])
    if len(r0) != 1:
        raise ZeroDivisionError("element not invertible")
    inv = pow(r0[0], -1, p)
    return [c * inv % p for c in s0]


def _gf_mul(f, g, p):
    if not f or not g:
        return []
    prod = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                prod[i + j] = (prod[i + j] + a * b) % p
    return prod


def zip_pad(f, g):
    n = max(len(f), len(g))
    return zip(f + [0] * (n - len(f)), g + [0] * (n - len(g)))


def _prime_divisors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def gf_factor(f, p):
    """Irreducible factorization over F_p: list of (ascending coeffs, mult)."""
    from sympy.polys.domains import ZZ
    from sympy.polys.galoistools import gf_factor as _sympy_gf_factor

    dense = [ZZ(int(c) % p) for c in reversed(gf_trim(list(f)))]
    lead, factors = _sympy_gf_factor(dense, p, ZZ)
    out = []
    for fac, mult in factors:
        out.append(([int(c) % p for c in reversed(fac)], mult))
    return int(lead) % p, out
