"""Compute Conway polynomials C_{p,n} (development tool).

The Conway polynomial is the minimal polynomial, in the standard
lexicographic ordering on (c_{n-1}, ..., c_0) for
f = X^n + sum_i (-1)^(n-i) c_i X^i, of a primitive element zeta of F_{p^n}
whose norms to all proper subfields F_{p^m} are roots of C_{p,m}.

Instead of scanning polynomials, this enumerates the compatible primitive
elements directly: the norm conditions pin the discrete log of zeta to a
union of arithmetic progressions, and primitivity is a gcd condition on the
log.  Results should be frozen into test fixtures; this module is not part
of the installed package.

Usage: python3 tools/conway.py p n
"""

import sys
from functools import lru_cache

sys.path.insert(0, "src")

from sympy import factorint

from defzeta.gfpoly import gf_divmod, gf_is_irreducible, gf_trim


class GF:
    """F_{p^n} as polynomials modulo a (any) irreducible modulus."""

    def __init__(self, p, n, modulus):
        self.p = p
        self.n = n
        self.modulus = modulus

    def mul(self, u, v):
        p = self.p
        if self.n == 1:
            return [u[0] * v[0] % p]
        prod = [0] * (2 * self.n - 1)
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v):
                    prod[i + j] = (prod[i + j] + a * b) % p
        rem = gf_divmod(prod, self.modulus, p)[1]
        return rem + [0] * (self.n - len(rem))

    def pow(self, u, e):
        result = [1] + [0] * (self.n - 1)
        base = list(u)
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def one(self):
        return [1] + [0] * (self.n - 1)


def find_irreducible(p, n):
    if n == 1:
        return [0, 1]
    for code in range(p**n):
        poly = []
        c = code
        for _ in range(n):
            poly.append(c % p)
            c //= p
        poly.append(1)
        if gf_is_irreducible(poly, p):
            return poly
    raise AssertionError


def find_generator(field, order_factors):
    p, n = field.p, field.n
    q1 = p**n - 1
    for code in range(1, p**n):
        vec = []
        c = code
        for _ in range(n):
            vec.append(c % p)
            c //= p
        if all(field.pow(vec, q1 // ell) != field.one() for ell in order_factors):
            return vec
    raise AssertionError


def smallest_primitive_root(p):
    if p == 2:
        return 1
    fac = list(factorint(p - 1))
    for g in range(2, p):
        if all(pow(g, (p - 1) // ell, p) != 1 for ell in fac):
            return g
    raise AssertionError


def subfield_root_log(field, gen, cm, m):
    """Log (base the subfield generator delta = gen^e) of a root of cm.

    cm is primitive of degree m, so its roots are the delta^s with s prime
    to p^m - 1; scan those s with an incremental power of delta.
    """
    p, n = field.p, field.n
    q1 = p**n - 1
    sub1 = p**m - 1
    e = q1 // sub1
    delta = field.pow(gen, e)
    coeffs = [[c % p] + [0] * (n - 1) for c in cm]
    cur = field.one()
    import math

    for s in range(sub1):
        if sub1 == 1 or (s and math.gcd(s, sub1) == 1):
            acc = [0] * n
            for cf in reversed(coeffs):
                acc = field.mul(acc, cur)
                acc = [(x + y) % p for x, y in zip(acc, cf)]
            if not any(acc):
                return s
        cur = field.mul(cur, delta)
    raise AssertionError("no root of the subfield Conway polynomial")


def _crt_pair(a1, m1, a2, m2):
    import math

    g = math.gcd(m1, m2)
    if (a2 - a1) % g:
        return None
    lcm = m1 // g * m2
    t = ((a2 - a1) // g * pow(m1 // g, -1, m2 // g)) % (m2 // g)
    return ((a1 + m1 * t) % lcm, lcm)


@lru_cache(maxsize=None)
def conway(p, n):
    if n == 1:
        return ((-smallest_primitive_root(p)) % p, 1)
    q1 = p**n - 1
    fac = factorint(q1)
    field = GF(p, n, find_irreducible(p, n))
    gen = find_generator(field, list(fac))
    # norm-compatibility congruences at the maximal proper subfields
    maximal = sorted({n // ell for ell in factorint(n)})
    congruences = [[(0, 1)]]
    systems = [(0, 1)]
    for m in maximal:
        cm = list(conway(p, m))
        base = subfield_root_log(field, gen, cm, m)
        options = []
        for j in range(m):
            options.append((base * pow(p, j, p**m - 1)) % (p**m - 1))
        new_systems = []
        for a1, m1 in systems:
            for opt in options:
                merged = _crt_pair(a1, m1, opt, p**m - 1)
                if merged:
                    new_systems.append(merged)
        systems = list(set(new_systems))
    best = None
    for a, mmod in systems:
        # walk zeta = gen^a * (gen^mmod)^j incrementally
        z = field.pow(gen, a)
        step = field.pow(gen, mmod)
        k = a
        while k < q1 + a:
            kk = k % q1
            if kk and _is_orbit_min(kk, p, q1) and _coprime(kk, fac):
                poly = minimal_polynomial(field, z)
                key = conway_key(poly, p, n)
                if best is None or key < best[0]:
                    best = (key, poly)
            z = field.mul(z, step)
            k += mmod
    assert best is not None
    return tuple(best[1])


def _coprime(k, fac):
    return all(k % ell for ell in fac)


def _is_orbit_min(k, p, q1):
    cur = k
    for _ in range(200):
        cur = cur * p % q1
        if cur < k:
            return False
        if cur == k:
            return True
    raise AssertionError


def minimal_polynomial(field, z):
    """Monic minimal polynomial (degree n) of z over F_p, ascending coeffs."""
    p, n = field.p, field.n
    rows = []
    cur = field.one()
    for _ in range(n):
        rows.append(list(cur))
        cur = field.mul(cur, z)
    target = [(-c) % p for c in cur]  # -z^n
    # solve sum c_i z^i = -z^n  (columns are the powers)
    mat = [[rows[j][i] for j in range(n)] for i in range(n)]
    vec = list(target)
    cols = list(range(n))
    sol = [0] * n
    for col in range(n):
        piv = None
        for r in range(col, n):
            if mat[r][col]:
                piv = r
                break
        assert piv is not None
        mat[col], mat[piv] = mat[piv], mat[col]
        vec[col], vec[piv] = vec[piv], vec[col]
        inv = pow(mat[col][col], -1, p)
        mat[col] = [c * inv % p for c in mat[col]]
        vec[col] = vec[col] * inv % p
        for r in range(n):
            if r != col and mat[r][col]:
                f = mat[r][col]
                mat[r] = [(c - f * d) % p for c, d in zip(mat[r], mat[col])]
                vec[r] = (vec[r] - f * vec[col]) % p
    coeffs = vec  # c_0..c_{n-1}
    return tuple(coeffs) + (1,)


def conway_key(poly, p, n):
    # order by (c_{n-1}, ..., c_0) where f = X^n + sum (-1)^(n-i) c_i X^i
    key = []
    for i in range(n - 1, -1, -1):
        a = poly[i] % p
        c = a if (n - i) % 2 == 0 else (-a) % p
        key.append(c)
    return tuple(key)


if __name__ == "__main__":
    p, n = int(sys.argv[1]), int(sys.argv[2])
    poly = conway(p, n)
    print(f"C_{{{p},{n}}} =", list(poly))
