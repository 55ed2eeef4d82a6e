"""Monomial cohomology bases and Griffiths-Dwork reduction.

The basis consists of the forms x^u Omega / P^k with |u| = kd-(n+1) and all
exponents below d-1; reduction matrices express membership in the Jacobian
ideal of P, with one column block per partial derivative.  Everything here
is exact over Q(t).
"""

from fractions import Fraction
from itertools import combinations

from .algebra import LUPFactorization, QPoly, RationalFunction, SingularMatrixError


def monomials_of_degree(nvars, degree):
    """All exponent tuples of the given total degree, lexicographic order."""
    if degree < 0:
        return []
    out = []
    for bars in combinations(range(degree + nvars - 1), nvars - 1):
        prev = -1
        tup = []
        for b in bars:
            tup.append(b - prev - 1)
            prev = b
        tup.append(degree + nvars - 2 - prev)
        out.append(tuple(tup))
    out.sort()
    return out


class MonomialBasis:
    """The basis forms, ordered by pole order then lexicographically."""

    def __init__(self, d, n):
        if d < 2 or n < 1:
            raise ValueError("need d >= 2 and n >= 1")
        self.d = d
        self.n = n
        self.B = []
        for k in range(1, n + 1):
            deg = k * d - (n + 1)
            mons = [u for u in monomials_of_degree(n + 1, deg) if max(u) < d - 1]
            self.B.append(mons)
        self.elements = [(u, k + 1) for k, mons in enumerate(self.B) for u in mons]
        self.index = {u: i for i, (u, _) in enumerate(self.elements)}
        self.b = len(self.elements)

    def size_formula(self):
        d, n = self.d, self.n
        return ((d - 1) ** (n + 1) + (-1) ** (n + 1) * (d - 1)) // d

    def pole_order(self, u):
        k, rem = divmod(sum(u) + self.n + 1, self.d)
        if rem:
            raise ValueError(f"{u} is not a basis-degree monomial")
        return k

    def hodge_numbers(self):
        """(h^{n-1,0}, ..., h^{0,n-1}) read off as the |B_k|."""
        return tuple(len(mons) for mons in self.B)


def _partial_coeff(family, w, j):
    """Coefficient t-polynomial of x^w in d P / d x_j."""
    u = tuple(w[i] + (1 if i == j else 0) for i in range(len(w)))
    cs = family.terms.get(u)
    if not cs:
        return None
    return [c * u[j] for c in cs]


class ReductionTables:
    """Row/column index sets and factored reduction matrices per pole order."""

    def __init__(self, family, basis=None, max_k=None):
        self.family = family
        self.basis = basis or MonomialBasis(family.d, family.n)
        self.max_k = max_k or (family.n + 1)
        self.rows = {}
        self.cols = {}
        self._lup = {}
        self._delta_polys = {}
        for k in range(2, self.max_k + 1):
            self._build_level(k)

    def _build_level(self, k):
        d, n = self.family.d, self.family.n
        F = monomials_of_degree(n + 1, k * d - (n + 1))
        Bset = {u for u in F if max(u) < d - 1}
        rows = [u for u in F if u not in Bset]
        cols = []
        current = monomials_of_degree(n + 1, (k - 1) * d - n)
        for j in range(n + 1):
            cols.extend((j, g) for g in current)
            current = [g for g in current if g[j] < d - 1]
        if len(rows) != len(cols):
            raise AssertionError("row/column cardinality mismatch")
        self.rows[k] = rows
        self.cols[k] = cols

    def bijection_image(self, u):
        """The canonical pairing: subtract d-1 from the first large exponent."""
        d = self.family.d
        for j, e in enumerate(u):
            if e >= d - 1:
                g = tuple(e - (d - 1) if i == j else ui for i, ui in enumerate(u))
                return (j, g)
        raise ValueError(f"{u} has no exponent >= d-1")

    def delta_entries(self, k):
        """Sparse entries of the level-k matrix: (row_idx, col_idx) -> t-poly."""
        if k in self._delta_polys:
            return self._delta_polys[k]
        if k not in self.rows:
            self._build_level(k)
        rows, cols = self.rows[k], self.cols[k]
        rindex = {u: i for i, u in enumerate(rows)}
        entries = {}
        for ci, (j, g) in enumerate(cols):
            for w_rel, cs in self._partials(j):
                f = tuple(g[i] + w_rel[i] for i in range(len(g)))
                ri = rindex.get(f)
                if ri is not None:
                    entries[(ri, ci)] = cs
        self._delta_polys[k] = entries
        return entries

    def _partials(self, j):
        """Monomials and t-coefficients of the j-th partial of P."""
        out = []
        for u, cs in self.family.terms.items():
            if u[j]:
                w = tuple(e - (1 if i == j else 0) for i, e in enumerate(u))
                out.append((w, [c * u[j] for c in cs]))
        return out

    def lup(self, k):
        if k not in self._lup:
            entries = self.delta_entries(k)
            nrows = len(self.rows[k])
            zero = RationalFunction.zero()
            one = RationalFunction.one()
            mat = [[zero] * nrows for _ in range(nrows)]
            for (ri, ci), cs in entries.items():
                mat[ri][ci] = RationalFunction(QPoly(cs), None, normalize=False)
            try:
                self._lup[k] = LUPFactorization(mat, zero, one)
            except SingularMatrixError as exc:
                raise SingularMatrixError(
                    f"reduction matrix at pole order {k} is singular: {exc}"
                ) from exc
        return self._lup[k]

    def determinant(self, k):
        return self.lup(k).determinant()


def _as_rf(v):
    if isinstance(v, RationalFunction):
        return v
    if isinstance(v, QPoly):
        return RationalFunction(v, None, normalize=False)
    return RationalFunction(QPoly.constant(Fraction(v)), None, normalize=False)


def decompose(tables, Q, k):
    """Write Q = sum Q_j d_jP + gamma_k with gamma_k supported on B_k.

    Q is a dict of exponent tuple -> coefficient (rational function); the
    Q_j come out supported on the column monomials, gamma_k on B_k.
    """
    fam = tables.family
    n, d = fam.n, fam.d
    if k > fam.n + 1 and k not in tables.rows:
        return _decompose_high(tables, Q, k)
    if k not in tables.rows:
        tables._build_level(k)
    rows, cols = tables.rows[k], tables.cols[k]
    rindex = {u: i for i, u in enumerate(rows)}
    w = [RationalFunction.zero()] * len(rows)
    for u, c in Q.items():
        ri = rindex.get(u)
        if ri is not None:
            w[ri] = _as_rf(c)
    if rows:
        v = tables.lup(k).solve(w)
    else:
        v = []
    Qparts = [dict() for _ in range(n + 1)]
    for ci, (j, g) in enumerate(cols):
        if ci < len(v) and not v[ci].is_zero():
            Qparts[j][g] = v[ci]
    gamma = dict(Q)
    for j in range(n + 1):
        for g, c in Qparts[j].items():
            for w_rel, cs in tables._partials(j):
                f = tuple(g[i] + w_rel[i] for i in range(len(g)))
                cur = gamma.get(f, RationalFunction.zero())
                cur = _as_rf(cur) - c * _as_rf(QPoly(cs))
                if cur.is_zero():
                    gamma.pop(f, None)
                else:
                    gamma[f] = cur
    gamma = {u: _as_rf(c) for u, c in gamma.items() if not _as_rf(c).is_zero()}
    for u in gamma:
        if max(u) >= d - 1:
            raise AssertionError("decompose left a non-basis monomial")
    return Qparts, gamma


def _decompose_high(tables, Q, k):
    """Pole order beyond n+1: shift each monomial into the level-(n+1) table."""
    fam = tables.family
    n, d = fam.n, fam.d
    Qparts = [dict() for _ in range(n + 1)]
    shift_deg = (k - (n + 1)) * d
    for u, c in Q.items():
        c = _as_rf(c)
        # split u = w + v with |v| = (n+1)d-(n+1); w greedy from the left
        w = []
        remaining = shift_deg
        for e in u:
            take = min(e, remaining)
            w.append(take)
            remaining -= take
        if remaining:
            raise ValueError("monomial degree too small for pole order")
        w = tuple(w)
        v = tuple(e - we for e, we in zip(u, w))
        parts, gamma = decompose(tables, {v: c}, n + 1)
        if gamma:
            raise AssertionError("top-level basis set should be empty")
        for j in range(n + 1):
            for g, cv in parts[j].items():
                f = tuple(g[i] + w[i] for i in range(len(g)))
                cur = Qparts[j].get(f)
                Qparts[j][f] = cv if cur is None else cur + cv
    return Qparts, {}


def reduce_form(tables, Q, k, use_high_path=True):
    """Rewrite Q Omega / P^k as sum gamma_i Omega / P^i with gamma_i on B_i."""
    fam = tables.family
    n = fam.n
    Q = {u: _as_rf(c) for u, c in Q.items() if not _as_rf(c).is_zero()}
    gammas = {}
    while k >= n + 1:
        if use_high_path or k == n + 1:
            Qparts, gamma = decompose(tables, Q, k)
        else:
            Qparts, gamma = _decompose_plain(tables, Q, k)
        if gamma:
            raise AssertionError("unexpected basis component above level n")
        k -= 1
        Q = _derivative_sum(Qparts, k, n)
    while k >= 1:
        basis_set = set(tables.basis.B[k - 1])
        if all(u in basis_set for u in Q):
            if Q:
                gammas[k] = Q
            k -= 1
            Q = {}
            continue
        Qparts, gamma = decompose(tables, Q, k)
        if gamma:
            gammas[k] = gamma
        k -= 1
        Q = _derivative_sum(Qparts, k, n)
    out = []
    for i in range(1, n + 1):
        out.append(gammas.get(i, {}))
    return out


def _decompose_plain(tables, Q, k):
    """Always use the level-k table (kept for cross-checking the fast path)."""
    fam = tables.family
    if k not in tables.rows:
        tables._build_level(k)
    return decompose(tables, Q, k)


def _derivative_sum(Qparts, k, n):
    """k^{-1} sum_i d(Q_i)/dx_i as a coefficient dict."""
    inv_k = Fraction(1, k)
    out = {}
    for i in range(n + 1):
        for g, c in Qparts[i].items():
            if g[i] == 0:
                continue
            f = tuple(e - (1 if j == i else 0) for j, e in enumerate(g))
            term = c * Fraction(g[i]) * inv_k
            cur = out.get(f)
            cur = term if cur is None else cur + term
            if cur.is_zero():
                out.pop(f, None)
            else:
                out[f] = cur
    return out
