"""Brute-force point counts over small finite fields.

Deliberately dumb: enumerate normalized projective representatives and
evaluate the defining form with discrete-log field tables.  This module is
the trust anchor for everything else, so it stays elementary.
"""

from .gfpoly import gf_divmod, gf_is_irreducible, gf_trim
from .kernels import count_projective


class FieldTooLarge(ValueError):
    pass


MAX_FIELD = 1 << 20


class FiniteFieldSmall:
    """F_(p^e) with discrete-log tables (elements: -1 = zero, k = g^k)."""

    def __init__(self, p, e, modulus=None):
        q = p**e
        if q > MAX_FIELD:
            raise FieldTooLarge(f"field size {q} exceeds {MAX_FIELD}")
        self.p = p
        self.e = e
        self.q = q
        self.modulus = modulus or _find_irreducible(p, e)
        if len(self.modulus) != e + 1:
            raise ValueError("modulus degree mismatch")
        self._build_tables()

    def _vec_mul(self, u, v):
        prod = [0] * (2 * self.e - 1) if self.e > 1 else [u[0] * v[0] % self.p]
        if self.e > 1:
            for i, a in enumerate(u):
                if a:
                    for j, b in enumerate(v):
                        prod[i + j] = (prod[i + j] + a * b) % self.p
            prod = gf_divmod(prod, self.modulus, self.p)[1]
        prod = list(prod) + [0] * (self.e - len(prod))
        return tuple(prod)

    def _build_tables(self):
        p, e, q = self.p, self.e, self.q
        # find a multiplicative generator by trial
        from sympy import factorint

        qm1 = q - 1
        prime_divs = list(factorint(qm1))
        candidates = []
        for code in range(1, q):
            vec = _decode(code, p, e)
            candidates.append(tuple(vec))
        gen = None
        for vec in candidates:
            if all(
                _vec_pow(self, vec, qm1 // ell) != _one(e) for ell in prime_divs
            ):
                gen = vec
                break
        if gen is None:
            raise AssertionError("no multiplicative generator found")
        self.generator = gen
        self.log = {}
        self.antilog = [None] * qm1
        cur = _one(e)
        for k in range(qm1):
            self.log[cur] = k
            self.antilog[k] = cur
            cur = self._vec_mul(cur, gen)
        if cur != _one(e):
            raise AssertionError("generator order check failed")
        # Zech logarithms: zech[d] = log(1 + g^d), -1 if it is zero
        one = _one(e)
        self.zech = [0] * qm1
        for dd in range(qm1):
            v = self.antilog[dd]
            s = tuple((a + b) % p for a, b in zip(one, v))
            self.zech[dd] = self.log.get(s, -1)

    def log_of_vec(self, vec):
        """Discrete log of a coordinate vector (-1 for zero)."""
        vec = tuple(c % self.p for c in vec) + (0,) * (self.e - len(vec))
        if all(c == 0 for c in vec):
            return -1
        return self.log[vec]

    def embed_subfield_root(self, sub_modulus, sub_p):
        """Log of a root of sub_modulus (degree a | e) in this field."""
        if sub_p != self.p:
            raise ValueError("characteristic mismatch")
        a = len(sub_modulus) - 1
        if self.e % a:
            raise ValueError("no subfield of that degree")
        qm1 = self.q - 1
        sub_size = self.p**a - 1
        step = qm1 // sub_size if sub_size else 0
        # subfield elements are 0 and the powers g^(k step)
        for k in range(sub_size):
            lg = k * step
            if self._eval_poly_log(sub_modulus, lg) < 0:
                return lg
        # zero could be a root only for non-monic degenerate input
        if sub_modulus[0] % self.p == 0:
            return -1
        raise AssertionError("no root of the subfield modulus found")

    def _eval_poly_log(self, poly, xlog):
        """Log of poly(x) for x given by its log (-1 = zero)."""
        acc = -1
        qm1 = self.q - 1
        for i, c in enumerate(poly):
            c %= self.p
            if c == 0:
                continue
            if xlog < 0 and i > 0:
                continue
            term = (self.log[_decode_unit(c, self.e)] + i * xlog) % qm1
            acc = self._add_logs(acc, term)
        return acc

    def _add_logs(self, acc, term):
        if acc < 0:
            return term
        if term < 0:
            return acc
        d = (term - acc) % (self.q - 1)
        z = self.zech[d]
        return -1 if z < 0 else (acc + z) % (self.q - 1)


def _one(e):
    return tuple([1] + [0] * (e - 1))


def _decode(code, p, e):
    out = []
    for _ in range(e):
        out.append(code % p)
        code //= p
    return out


def _decode_unit(c, e):
    return tuple([c] + [0] * (e - 1))


def _vec_pow(field, vec, exp):
    result = _one(field.e)
    base = vec
    while exp:
        if exp & 1:
            result = field._vec_mul(result, base)
        base = field._vec_mul(base, base)
        exp >>= 1
    return result


def _find_irreducible(p, e):
    """Deterministic search for a monic irreducible of degree e over F_p."""
    if e == 1:
        return [0, 1]
    for code in range(p**e):
        poly = _decode(code, p, e) + [1]
        if gf_is_irreducible(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")


def count_points(family, fibre, i):
    """#X_tau(F_(q^i)) by enumeration, q = p^ext_degree."""
    p = family.p
    fib = fibre.validated(p)
    a = fib.ext_degree
    e = a * i
    field = FiniteFieldSmall(p, e)
    qm1 = field.q - 1
    # coefficients of P(tau): evaluate each t-polynomial at tau in F_(p^e)
    if a == 1:
        tau_log = field.log_of_vec([fib.tau[0]])
    else:
        root_log = field.embed_subfield_root(fib.modulus, p)
        tau_log = -1
        for j, c in enumerate(fib.tau):
            c %= p
            if c == 0:
                continue
            term = field.log[_decode_unit(c, field.e)]
            if j:
                term = (term + j * root_log) % qm1
            tau_log = field._add_logs(tau_log, term)
        if any(c % p for c in fib.tau) and tau_log < -1:
            raise AssertionError("tau embedding failed")
    term_logs = []
    term_exps = []
    for u, cs in family.terms.items():
        # c(tau) in log form
        acc = -1
        for j, c in enumerate(cs):
            c %= p
            if c == 0:
                continue
            if tau_log < 0 and j > 0:
                continue
            term = field.log[_decode_unit(c, field.e)]
            term = (term + j * tau_log) % qm1 if j else term
            acc = field._add_logs(acc, term)
        if acc < 0:
            continue
        term_logs.append(acc)
        term_exps.extend(u)
    nterms = len(term_logs)
    if nterms == 0:
        # the zero form vanishes everywhere
        return (field.q ** (family.n + 1) - 1) // qm1
    return count_projective(
        family.n + 1, field.q, list(field.zech), term_logs, term_exps, nterms
    )


def verify_zeta(predicted_counts, family, fibre, i_max):
    """Compare predicted counts against enumeration for i = 1..i_max."""
    report = []
    for i in range(1, i_max + 1):
        actual = count_points(family, fibre, i)
        expected = predicted_counts[i - 1]
        report.append((i, expected, actual, expected == actual))
    return report
