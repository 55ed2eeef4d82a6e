"""Exact rational polynomial, rational function and matrix arithmetic.

Polynomials are dense ascending coefficient lists.  QPoly wraps Fraction
coefficients; integer polynomials used in bulk (connection numerators,
determinants) are handled as plain int lists through the zpoly_* helpers.
Factorization over Z and F_p is delegated to sympy's low-level routines.
"""

from fractions import Fraction

from .kernels import conv_trunc


class SingularMatrixError(ArithmeticError):
    """A matrix required to be invertible is singular."""


# ---------------------------------------------------------------------------
# integer polynomials as plain int lists (ascending)


def zpoly_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def zpoly_add(f, g):
    n = max(len(f), len(g))
    out = [0] * n
    for i, c in enumerate(f):
        out[i] += c
    for i, c in enumerate(g):
        out[i] += c
    return zpoly_trim(out)


def zpoly_neg(f):
    return [-c for c in f]


def zpoly_mul(f, g):
    if not f or not g:
        return []
    return zpoly_trim(conv_trunc(f, g, len(f) + len(g) - 1))


def zpoly_eval(f, x):
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
    return acc


def zpoly_derivative(f):
    return zpoly_trim([i * c for i, c in enumerate(f)][1:])


def zpoly_content(f):
    from math import gcd

    c = 0
    for a in f:
        c = gcd(c, abs(a))
        if c == 1:
            return 1
    return c


def zpoly_primitive(f):
    """Content-1 form with positive leading coefficient; returns (poly, unit)."""
    f = zpoly_trim(list(f))
    if not f:
        return [], Fraction(1)
    c = zpoly_content(f)
    if f[-1] < 0:
        c = -c
    return [a // c for a in f], Fraction(c)


def zpoly_divexact(f, g):
    """Exact division in Z[t]; raises if the division is inexact."""
    f = list(f)
    g = zpoly_trim(list(g))
    if not g:
        raise ZeroDivisionError("division by zero polynomial")
    if not zpoly_trim(list(f)):
        return []
    q = [0] * (len(f) - len(g) + 1)
    for i in range(len(f) - len(g), -1, -1):
        c = f[i + len(g) - 1]
        if c % g[-1]:
            raise ArithmeticError("inexact polynomial division")
        c //= g[-1]
        q[i] = c
        if c:
            for j, b in enumerate(g):
                f[i + j] -= c * b
    if any(f[: len(g) - 1]):
        raise ArithmeticError("inexact polynomial division (remainder)")
    return zpoly_trim(q)


def zpoly_divides(g, f):
    """Whether g divides f in Q[t] (both integer polys, g nonzero)."""
    try:
        _qpoly_divmod_exact(f, g)
        return True
    except ArithmeticError:
        return False


def _qpoly_divmod_exact(f, g):
    q, r = QPoly([Fraction(c) for c in f]).divmod(QPoly([Fraction(c) for c in g]))
    if not r.is_zero():
        raise ArithmeticError("not divisible")
    return q


def _to_sympy_dense(f):
    from sympy.polys.domains import ZZ

    return [ZZ(int(c)) for c in reversed(zpoly_trim(list(f)))]


def _from_sympy_dense(f):
    return [int(c) for c in reversed(f)]


def zpoly_gcd(f, g):
    """gcd in Z[t], primitive with positive leading coefficient."""
    from sympy.polys.domains import ZZ
    from sympy.polys.euclidtools import dup_inner_gcd

    f, g = zpoly_trim(list(f)), zpoly_trim(list(g))
    if not f:
        return zpoly_primitive(g)[0]
    if not g:
        return zpoly_primitive(f)[0]
    h, _, _ = dup_inner_gcd(_to_sympy_dense(f), _to_sympy_dense(g), ZZ)
    return zpoly_primitive(_from_sympy_dense(h))[0]


def zpoly_factor(f):
    """Irreducible factorization over Z: (rational content, [(poly, mult)])."""
    from sympy.polys.domains import ZZ
    from sympy.polys.factortools import dup_factor_list

    f = zpoly_trim(list(f))
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    content, factors = dup_factor_list(_to_sympy_dense(f), ZZ)
    out = []
    for fac, mult in factors:
        fac = _from_sympy_dense(fac)
        fac, unit = zpoly_primitive(fac)
        content = content * unit**mult
        if len(fac) == 1:  # constant factor folded into content
            content = content * Fraction(fac[0]) ** mult
            continue
        out.append((fac, mult))
    out.sort(key=lambda fm: (len(fm[0]), fm[0]))
    return Fraction(content), out


def zpoly_squarefree(f):
    """Squarefree part, primitive."""
    f, _ = zpoly_primitive(f)
    if len(f) <= 1:
        return f
    return zpoly_divexact(f, zpoly_gcd(f, zpoly_derivative(f)))


# ---------------------------------------------------------------------------
# rational polynomials


class QPoly:
    """Dense univariate polynomial over Q, ascending coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = cs

    @classmethod
    def from_int_list(cls, f):
        return cls(f)

    @classmethod
    def constant(cls, c):
        return cls([c])

    @classmethod
    def x(cls):
        return cls([0, 1])

    def degree(self):
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, QPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        out = [Fraction(0)] * n
        for i, c in enumerate(self.coeffs):
            out[i] += c
        for i, c in enumerate(other.coeffs):
            out[i] += c
        return QPoly(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return QPoly([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, Fraction) or isinstance(other, int):
            return QPoly([c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return QPoly()
        n = len(self.coeffs) + len(other.coeffs) - 1
        out = [Fraction(0)] * n
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] += a * b
        return QPoly(out)

    __rmul__ = __mul__

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return QPoly(), QPoly(rem)
        q = [Fraction(0)] * (dq + 1)
        inv = 1 / other.coeffs[-1]
        for i in range(dq, -1, -1):
            c = rem[i + len(other.coeffs) - 1] * inv
            q[i] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[i + j] -= c * b
        return QPoly(q), QPoly(rem[: len(other.coeffs) - 1])

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def monic(self):
        if self.is_zero():
            return self
        inv = 1 / self.coeffs[-1]
        return QPoly([c * inv for c in self.coeffs])

    def evaluate(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self):
        return QPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def shift_pow(self, k):
        """Multiply by t^k."""
        if self.is_zero():
            return QPoly()
        return QPoly([Fraction(0)] * k + self.coeffs)

    def to_integer_poly(self):
        """(integer coefficient list, rational scale): self = scale * list."""
        if self.is_zero():
            return [], Fraction(1)
        from math import gcd, lcm

        den = 1
        for c in self.coeffs:
            den = lcm(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for a in ints:
            g = gcd(g, abs(a))
        if ints[-1] < 0:
            g = -g
        return [a // g for a in ints], Fraction(g, den)

    def __repr__(self):
        return f"QPoly({self.coeffs})"


def poly_gcd(a, b):
    """Monic gcd of two rational polynomials."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    ia, _ = a.to_integer_poly()
    ib, _ = b.to_integer_poly()
    return QPoly(zpoly_gcd(ia, ib)).monic()


class RationalFunction:
    """num/den with den monic and gcd(num, den) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, normalize=True):
        if not isinstance(num, QPoly):
            num = QPoly.constant(num) if not isinstance(num, (list, tuple)) else QPoly(num)
        if den is None:
            den = QPoly.constant(1)
        elif not isinstance(den, QPoly):
            den = QPoly.constant(den) if not isinstance(den, (list, tuple)) else QPoly(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if normalize:
            if num.is_zero():
                den = QPoly.constant(1)
            else:
                g = poly_gcd(num, den)
                if g.degree() > 0:
                    num = num.divmod(g)[0]
                    den = den.divmod(g)[0]
                lead = den.coeffs[-1]
                if lead != 1:
                    inv = 1 / lead
                    num = num * inv
                    den = den * inv
        self.num = num
        self.den = den

    @classmethod
    def zero(cls):
        return cls(QPoly(), None, normalize=False)

    @classmethod
    def one(cls):
        return cls(QPoly.constant(1), None, normalize=False)

    def is_zero(self):
        return self.num.is_zero()

    def __eq__(self, other):
        return (
            isinstance(other, RationalFunction)
            and self.num == other.num
            and self.den == other.den
        )

    def __add__(self, other):
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other):
        return RationalFunction(
            self.num * other.den - other.num * self.den, self.den * other.den
        )

    def __neg__(self):
        return RationalFunction(-self.num, self.den, normalize=False)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalFunction(self.num * other, self.den)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def inverse(self):
        return RationalFunction.one() / self

    def evaluate(self, x):
        d = self.den.evaluate(x)
        if d == 0:
            raise ZeroDivisionError("pole at evaluation point")
        return self.num.evaluate(x) / d

    def is_polynomial(self):
        return self.den.degree() == 0

    def __repr__(self):
        return f"RationalFunction({self.num.coeffs}, {self.den.coeffs})"


# ---------------------------------------------------------------------------
# LUP factorization over an exact field (Fraction or RationalFunction)


class LUPFactorization:
    """P A = L U with L unit lower triangular, exact field arithmetic.

    Pivots are chosen sparsity-first (a Markowitz-style count on the
    remaining submatrix) which keeps fill-in small for the structured
    reduction matrices this is used on.
    """

    def __init__(self, A, zero, one):
        self.n = len(A)
        self.zero = zero
        self.one = one
        U = [list(row) for row in A]
        n = self.n
        perm = list(range(n))
        L = [[zero] * n for _ in range(n)]
        for i in range(n):
            L[i][i] = one
        for k in range(n):
            pivot_row = self._choose_pivot(U, k)
            if pivot_row is None:
                raise SingularMatrixError(f"matrix is singular at step {k}")
            if pivot_row != k:
                U[k], U[pivot_row] = U[pivot_row], U[k]
                perm[k], perm[pivot_row] = perm[pivot_row], perm[k]
                for j in range(k):
                    L[k][j], L[pivot_row][j] = L[pivot_row][j], L[k][j]
            piv = U[k][k]
            for i in range(k + 1, n):
                if not self._is_zero(U[i][k]):
                    f = U[i][k] / piv
                    L[i][k] = f
                    U[i][k] = zero
                    for j in range(k + 1, n):
                        if not self._is_zero(U[k][j]):
                            U[i][j] = U[i][j] - f * U[k][j]
            L[k][k] = one
        self.L = L
        self.U = U
        self.perm = perm

    @staticmethod
    def _is_zero(x):
        return x.is_zero() if hasattr(x, "is_zero") else x == 0

    def _choose_pivot(self, U, k):
        best, best_count = None, None
        for i in range(k, self.n):
            if self._is_zero(U[i][k]):
                continue
            count = sum(1 for j in range(k, self.n) if not self._is_zero(U[i][j]))
            if best_count is None or count < best_count:
                best, best_count = i, count
                if count == 1:
                    break
        return best

    def solve(self, w):
        """The unique v with A v = w."""
        n = self.n
        y = [w[self.perm[i]] for i in range(n)]
        for i in range(n):
            for j in range(i):
                if not self._is_zero(self.L[i][j]) and not self._is_zero(y[j]):
                    y[i] = y[i] - self.L[i][j] * y[j]
        v = [self.zero] * n
        for i in range(n - 1, -1, -1):
            acc = y[i]
            for j in range(i + 1, n):
                if not self._is_zero(self.U[i][j]) and not self._is_zero(v[j]):
                    acc = acc - self.U[i][j] * v[j]
            v[i] = acc / self.U[i][i]
        return v

    def determinant(self):
        det = self.one
        for i in range(self.n):
            det = det * self.U[i][i]
        sign = _perm_sign(self.perm)
        if sign < 0:
            det = self.zero - det
        return det

    def reconstruct(self):
        """P A as L U, for verification."""
        n = self.n
        out = [[self.zero] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                acc = self.zero
                for k in range(min(i, j) + 1):
                    acc = acc + self.L[i][k] * self.U[k][j]
                out[i][j] = acc
        return out


def _perm_sign(perm):
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if not seen[i]:
            j, clen = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                clen += 1
            if clen % 2 == 0:
                sign = -sign
    return sign


def lup_solve(fact, w):
    return fact.solve(w)


# ---------------------------------------------------------------------------
# truncated power-series matrices over a PadicContext


class SeriesMatrix:
    """K coefficient matrices of size b x b, mantissas in one PadicContext."""

    def __init__(self, ctx, b, K, coeffs=None):
        self.ctx = ctx
        self.b = b
        self.K = K
        if coeffs is None:
            coeffs = [[0] * (b * b) for _ in range(K)]
        self.coeffs = coeffs

    @classmethod
    def identity(cls, ctx, b, K):
        m = cls(ctx, b, K)
        for i in range(b):
            m.coeffs[0][i * b + i] = ctx.scale
        return m

    def copy(self):
        return SeriesMatrix(self.ctx, self.b, self.K, [list(c) for c in self.coeffs])

    def coefficient(self, i):
        return self.coeffs[i]

    def mul(self, other, K=None):
        """Truncated product; both operands share one context."""
        if self.ctx != other.ctx:
            raise ValueError("context mismatch")
        if self.b != other.b:
            raise ValueError("dimension mismatch")
        K = self.K if K is None else K
        from .kernels.packed import series_matmul

        M = self.ctx.modulus
        raw = series_matmul(self.coeffs, other.coeffs, self.b, K, M, M)
        scale = self.ctx.scale
        out = []
        for row in raw:
            if self.ctx.shift:
                red = []
                for v in row:
                    v %= M * scale
                    if v % scale:
                        raise ArithmeticError("fixed-point underflow in series product")
                    red.append((v // scale) % M)
                out.append(red)
            else:
                out.append([v % M for v in row])
        return SeriesMatrix(self.ctx, self.b, K, out)

    def add(self, other):
        if self.ctx != other.ctx or self.b != other.b or self.K != other.K:
            raise ValueError("shape/context mismatch")
        M = self.ctx.modulus
        coeffs = [
            [(a + c) % M for a, c in zip(ra, rc)]
            for ra, rc in zip(self.coeffs, other.coeffs)
        ]
        return SeriesMatrix(self.ctx, self.b, self.K, coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, SeriesMatrix)
            and self.ctx == other.ctx
            and self.b == other.b
            and self.K == other.K
            and self.coeffs == other.coeffs
        )
