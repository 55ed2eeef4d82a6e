"""Fixed-precision p-adic arithmetic in Z_p / Q_p and unramified extensions.

Elements are stored as integer mantissas modulo p^(N+shift) and represent the
value mantissa * p^(-shift).  The shift (maximum supported negative valuation)
is fixed per context; it is sized ahead of a computation from a priori
valuation bounds, so that every division by a power of p stays exact on the
mantissa.  Arithmetic on mantissas is exact modular integer arithmetic; the
absolute precision of a value is a statement tracked by the caller (the
precision plan), not by the element.

Extension internals (Frobenius image of the generator, inverses, Teichmueller
lifts) work on plain integral coordinate vectors mod p^(N+shift); the shift
only enters at the ExtElement boundary.
"""

from fractions import Fraction

from .intutil import invmod, ordp


class PadicContext:
    """Arithmetic context: prime p, precision N, fixed-point shift."""

    def __init__(self, p, N, shift=0):
        if p < 2:
            raise ValueError("p must be a prime >= 2")
        if N < 1:
            raise ValueError("N must be >= 1")
        if shift < 0:
            raise ValueError("shift must be >= 0")
        self.p = p
        self.N = N
        self.shift = shift
        self.scale = p**shift
        self.modulus = p ** (N + shift)

    def __eq__(self, other):
        return (
            isinstance(other, PadicContext)
            and (self.p, self.N, self.shift) == (other.p, other.N, other.shift)
        )

    def __hash__(self):
        return hash((self.p, self.N, self.shift))

    def __repr__(self):
        return f"PadicContext(p={self.p}, N={self.N}, shift={self.shift})"

    def from_int(self, n):
        return PadicElement(self, n * self.scale)

    def from_rational(self, q):
        """Embed a rational whose denominator valuation fits in the shift."""
        q = Fraction(q)
        vden = ordp(q.denominator, self.p) if q.denominator > 1 else 0
        if vden > self.shift:
            raise ValueError(f"denominator valuation {vden} exceeds shift")
        den_unit = q.denominator // self.p**vden
        man = q.numerator * self.p ** (self.shift - vden)
        if den_unit > 1:
            man *= invmod(den_unit, self.modulus)
        return PadicElement(self, man)

    def from_mantissa(self, man):
        return PadicElement(self, man)

    def zero(self):
        return PadicElement(self, 0)

    def one(self):
        return PadicElement(self, self.scale)


class PadicElement:
    """A p-adic number  mantissa * p^(-shift)  with mantissa mod p^(N+shift)."""

    __slots__ = ("ctx", "man")

    def __init__(self, ctx, man):
        self.ctx = ctx
        self.man = man % ctx.modulus

    def _check(self, other):
        if self.ctx != other.ctx:
            raise ValueError("context mismatch")

    def __add__(self, other):
        self._check(other)
        return PadicElement(self.ctx, self.man + other.man)

    def __sub__(self, other):
        self._check(other)
        return PadicElement(self.ctx, self.man - other.man)

    def __neg__(self):
        return PadicElement(self.ctx, -self.man)

    def __mul__(self, other):
        self._check(other)
        man = self.man * other.man
        if self.ctx.shift:
            if man % self.ctx.scale:
                raise ArithmeticError("fixed-point underflow in multiplication")
            man //= self.ctx.scale
        return PadicElement(self.ctx, man)

    def __eq__(self, other):
        return (
            isinstance(other, PadicElement)
            and self.ctx == other.ctx
            and self.man == other.man
        )

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.N, self.ctx.shift, self.man))

    def is_zero(self):
        return self.man == 0

    def is_unit(self):
        return self.valuation() == 0

    def valuation(self):
        """ord_p of the value, or None when indistinguishable from zero."""
        if self.man == 0:
            return None
        return ordp(self.man, self.ctx.p) - self.ctx.shift

    def unit_inverse(self):
        if self.valuation() != 0:
            raise ZeroDivisionError(f"not a unit (valuation {self.valuation()})")
        man = invmod(self.man // self.ctx.scale, self.ctx.modulus)
        return PadicElement(self.ctx, man * self.ctx.scale)

    def __truediv__(self, other):
        return self * other.unit_inverse()

    def divide_by_p_power(self, k):
        """Exact division by p^k; precision accounting is the caller's duty."""
        if k == 0:
            return self
        pk = self.ctx.p**k
        if self.man % pk:
            raise ArithmeticError("mantissa not divisible by p^k")
        return PadicElement(self.ctx, self.man // pk)

    def lift_value(self):
        """The represented value as an exact rational (canonical mantissa)."""
        return Fraction(self.man, self.ctx.scale)

    def residue(self):
        """Reduction modulo p (only for integral elements)."""
        if self.man % self.ctx.scale:
            raise ArithmeticError("element not integral")
        return (self.man // self.ctx.scale) % self.ctx.p

    def __repr__(self):
        if self.ctx.shift:
            return f"Padic({self.man}*{self.ctx.p}^-{self.ctx.shift} mod {self.ctx.p}^{self.ctx.N})"
        return f"Padic({self.man} mod {self.ctx.p}^{self.ctx.N})"


class UnramifiedExtension:
    """Q_q = Q_p[x]/(m(x)) with m monic of degree a, irreducible mod p.

    The Frobenius image of the generator (the root of m(x) congruent to g^p
    mod p) is Hensel-lifted once on first use; sigma of a general element is
    then a polynomial composition.  Degree 1 degenerates to plain Q_p.
    """

    def __init__(self, ctx, modulus):
        self.ctx = ctx
        mod = [int(c) for c in modulus]
        if not mod or mod[-1] != 1:
            raise ValueError("modulus must be monic with ascending coefficients")
        self.a = len(mod) - 1
        if self.a < 1:
            raise ValueError("modulus must have degree >= 1")
        self.modulus = mod
        if self.a > 1:
            from .gfpoly import gf_is_irreducible

            if not gf_is_irreducible([c % ctx.p for c in mod], ctx.p):
                raise ValueError("modulus is not irreducible modulo p")
        self._red_rows = self._reduction_rows()
        self._sigma_tables = None  # [i] -> powers of sigma^(i+1)(g), plain vectors

    def _reduction_rows(self):
        a, M = self.a, self.ctx.modulus
        if a == 1:
            return []
        rows = []
        cur = [(-c) % M for c in self.modulus[:-1]]  # x^a mod m
        rows.append(list(cur))
        for _ in range(a - 2):
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for i, c in enumerate(self.modulus[:-1]):
                    cur[i] = (cur[i] - top * c) % M
            rows.append(list(cur))
        return rows

    # ---- plain integral coordinate vectors (no fixed-point shift) ----

    def int_mul(self, u, v):
        a, M = self.a, self.ctx.modulus
        if a == 1:
            return [u[0] * v[0] % M]
        prod = [0] * (2 * a - 1)
        for i, ui in enumerate(u):
            if ui:
                for j, vj in enumerate(v):
                    prod[i + j] += ui * vj
        out = [c % M for c in prod[:a]]
        for k in range(a - 1):
            c = prod[a + k] % M
            if c:
                row = self._red_rows[k]
                for i in range(a):
                    out[i] = (out[i] + c * row[i]) % M
        return out

    def int_pow(self, u, e):
        result = [1] + [0] * (self.a - 1)
        base = list(u)
        while e:
            if e & 1:
                result = self.int_mul(result, base)
            base = self.int_mul(base, base)
            e >>= 1
        return result

    def int_inverse(self, u):
        """Inverse of a unit vector, Newton iteration from the residue field."""
        from .gfpoly import gf_poly_invmod

        p, M = self.ctx.p, self.ctx.modulus
        ubar = [c % p for c in u]
        inv0 = gf_poly_invmod(ubar, [c % p for c in self.modulus], p)
        x = list(inv0) + [0] * (self.a - len(inv0))
        steps = max(1, M.bit_length())
        for _ in range(steps):
            ux = self.int_mul(u, x)
            err = [(-c) % M for c in ux]
            err[0] = (err[0] + 2) % M
            xn = self.int_mul(x, err)
            if xn == x:
                break
            x = xn
        return x

    def _eval_int_poly(self, coeffs, y):
        acc = [0] * self.a
        for c in reversed(coeffs):
            acc = self.int_mul(acc, y)
            acc[0] = (acc[0] + c) % self.ctx.modulus
        return acc

    def sigma_generator(self):
        """Plain vector of sigma(g): the root of m congruent to g^p mod p."""
        self._ensure_sigma_tables()
        return self._sigma_tables[0][1]

    def _ensure_sigma_tables(self):
        if self._sigma_tables is not None or self.a == 1:
            return
        a, p, M = self.a, self.ctx.p, self.ctx.modulus
        g = [0, 1] + [0] * (a - 2)
        y = self.int_pow(g, p)
        mprime = [(i * c) % M for i, c in enumerate(self.modulus)][1:]
        for _ in range(M.bit_length() + 2):
            fy = self._eval_int_poly(self.modulus, y)
            if all(c == 0 for c in fy):
                break
            dfy = self._eval_int_poly(mprime, y)
            corr = self.int_mul(fy, self.int_inverse(dfy))
            y = [(yi - ci) % M for yi, ci in zip(y, corr)]
        else:
            raise RuntimeError("Hensel lift of the Frobenius generator failed")
        tables = []
        cur = y
        for i in range(a - 1):  # sigma^1 .. sigma^(a-1)
            powers = [[1] + [0] * (a - 1)]
            for _ in range(a - 1):
                powers.append(self.int_mul(powers[-1], cur))
            tables.append(powers)
            if i + 2 < a + 1:
                # sigma^(i+2)(g) = sigma(sigma^(i+1)(g)), coefficientwise
                cur = _apply_table(self, tables[0], cur)
        self._sigma_tables = tables

    # ---- element constructors ----

    def zero(self):
        return ExtElement(self, [0] * self.a)

    def one(self):
        return ExtElement(self, [self.ctx.scale] + [0] * (self.a - 1))

    def generator(self):
        if self.a == 1:
            return ExtElement(self, [(-self.modulus[0]) * self.ctx.scale])
        man = [0] * self.a
        man[1] = self.ctx.scale
        return ExtElement(self, man)

    def from_residue(self, vec):
        """Lift an F_{p^a} element given by coordinates in 0..p-1."""
        if len(vec) != self.a:
            raise ValueError("coordinate vector has wrong length")
        return ExtElement(self, [int(c) * self.ctx.scale for c in vec])

    def from_padic(self, x):
        return ExtElement(self, [x.man] + [0] * (self.a - 1))


class ExtElement:
    """Element of an unramified extension; mantissa coordinates, power basis."""

    __slots__ = ("ext", "man")

    def __init__(self, ext, man):
        if len(man) != ext.a:
            raise ValueError("wrong number of coordinates")
        M = ext.ctx.modulus
        self.ext = ext
        self.man = [c % M for c in man]

    @property
    def coeffs(self):
        return [PadicElement(self.ext.ctx, c) for c in self.man]

    def __add__(self, other):
        return ExtElement(self.ext, [a + b for a, b in zip(self.man, other.man)])

    def __sub__(self, other):
        return ExtElement(self.ext, [a - b for a, b in zip(self.man, other.man)])

    def __neg__(self):
        return ExtElement(self.ext, [-a for a in self.man])

    def __mul__(self, other):
        ext = self.ext
        raw = ext.int_mul(self.man, other.man)
        s = ext.ctx.scale
        if ext.ctx.shift:
            out = []
            for c in raw:
                if c % s:
                    raise ArithmeticError("fixed-point underflow in multiplication")
                out.append(c // s)
            raw = out
        return ExtElement(ext, raw)

    def scalar_mul(self, x):
        """Multiply by a PadicElement of the same context."""
        s = self.ext.ctx.scale
        out = []
        for c in self.man:
            t = c * x.man
            if self.ext.ctx.shift:
                if t % s:
                    raise ArithmeticError("fixed-point underflow in multiplication")
                t //= s
            out.append(t)
        return ExtElement(self.ext, out)

    def __eq__(self, other):
        return (
            isinstance(other, ExtElement)
            and self.ext is other.ext
            and self.man == other.man
        )

    def is_zero(self):
        return all(c == 0 for c in self.man)

    def valuation(self):
        vals = [ordp(c, self.ext.ctx.p) for c in self.man if c]
        if not vals:
            return None
        return min(vals) - self.ext.ctx.shift

    def is_unit(self):
        return self.valuation() == 0

    def inverse(self):
        if not self.is_unit():
            raise ZeroDivisionError("not a unit")
        s = self.ext.ctx.scale
        plain = []
        for c in self.man:
            if c % s:
                raise ArithmeticError("unit with non-integral coordinates")
            plain.append(c // s)
        inv = self.ext.int_inverse(plain)
        return ExtElement(self.ext, [c * s for c in inv])

    def pow(self, e):
        result = self.ext.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divide_by_p_power(self, k):
        if k == 0:
            return self
        pk = self.ext.ctx.p**k
        if any(c % pk for c in self.man):
            raise ArithmeticError("coordinates not divisible by p^k")
        return ExtElement(self.ext, [c // pk for c in self.man])

    def residue_vector(self):
        s, p = self.ext.ctx.scale, self.ext.ctx.p
        out = []
        for c in self.man:
            if c % s:
                raise ArithmeticError("element not integral")
            out.append((c // s) % p)
        return out

    def __repr__(self):
        return f"ExtElement({self.man})"


def _apply_table(ext, powers, man):
    """sum man[i] * powers[i], coordinates mod the context modulus."""
    M = ext.ctx.modulus
    acc = [0] * ext.a
    for c, gp in zip(man, powers):
        if c:
            for i in range(ext.a):
                acc[i] += c * gp[i]
    return [c % M for c in acc]


def frobenius_sigma(x, i=1):
    """sigma^i(x) for the Frobenius lift fixing Q_p; identity when a = 1."""
    ext = x.ext
    i %= ext.a
    if ext.a == 1 or i == 0:
        return ExtElement(ext, list(x.man))
    ext._ensure_sigma_tables()
    if ext._sigma_tables is None:
        raise RuntimeError("Frobenius image of the generator is uninitialized")
    return ExtElement(ext, _apply_table(ext, ext._sigma_tables[i - 1], x.man))


def teichmueller_lift(ext, residue_vec):
    """The Teichmueller lift of an F_{p^a} element, to the context precision.

    Newton iteration on x^(q-1) = 1 (zero residue lifts to 0); each step
    doubles the number of correct digits.
    """
    ctx = ext.ctx
    if all(c % ctx.p == 0 for c in residue_vec):
        return ext.zero()
    p, M = ctx.p, ctx.modulus
    q = p**ext.a
    x = [int(c) % p for c in residue_vec]
    inv_qm1 = invmod(q - 1, M)
    for _ in range(M.bit_length() + 2):
        xq2 = ext.int_pow(x, q - 2)
        f = ext.int_mul(xq2, x)  # x^(q-1)
        f[0] = (f[0] - 1) % M
        if all(c == 0 for c in f):
            break
        # x <- x - (x^(q-1) - 1) / ((q-1) x^(q-2))
        corr = ext.int_mul(f, ext.int_inverse(xq2))
        x = [(xi - inv_qm1 * ci) % M for xi, ci in zip(x, corr)]
    return ExtElement(ext, [c * ctx.scale for c in x])
