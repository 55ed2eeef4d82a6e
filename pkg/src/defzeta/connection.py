"""The Gauss-Manin connection matrix M = G/r of a deformation family.

Two exact routes produce identical results:

* a direct route that reduces each nabla(basis form) with factored
  reduction matrices over Q(t) (fine while the reduction matrices stay
  small), and

* a t-adic route for large families: every linear solve against
  Delta = Delta0 + E(t) is done on truncated power series with scaled
  integer coefficients, using that Delta0 is a permutation of units
  (the fibre at 0 is diagonal).  The polynomial numerator H = M * R is
  recovered at the end from a rigorous degree bound.

Determinants of large reduction matrices come from sparse fraction-free
elimination when fill-in stays low, otherwise from traces of powers of a
sparse integer matrix via Newton's identities.  Everything is exact over Q.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    QPoly,
    RationalFunction,
    SingularMatrixError,
    zpoly_divexact,
    zpoly_eval,
    zpoly_factor,
    zpoly_gcd,
    zpoly_mul,
    zpoly_primitive,
    zpoly_trim,
)
from .cohomology import MonomialBasis, ReductionTables, monomials_of_degree, reduce_form
from .kernels import csr_apply


@dataclass
class ConnectionMatrix:
    basis: MonomialBasis
    G: list  # b x b nested list of integer coefficient lists (ascending t)
    r: list  # integer coefficient list (content times primitive part)
    r_content: int
    R: list  # primitive part of prod_k det Delta_k
    R_content: Fraction
    det_factors: dict  # k -> (content: Fraction, [(primitive irreducible, mult)])

    def degree_G(self):
        return max((len(c) - 1 for row in self.G for c in row if c), default=-1)

    def degree_r(self):
        return len(self.r) - 1

    def ordp_of_G(self, p):
        best = None
        for row in self.G:
            for cs in row:
                for c in cs:
                    if c:
                        v = 0
                        while c % p == 0:
                            c //= p
                            v += 1
                        best = v if best is None else min(best, v)
                        if best == 0:
                            return 0
        return 0 if best is None else best

    def r_factors(self):
        _, factors = zpoly_factor(self.r)
        return factors

    def R_factor_table(self):
        """Merged factor table of R: list of (primitive poly, mult per k dict)."""
        table = {}
        for k, (_, factors) in self.det_factors.items():
            for f, m in factors:
                table.setdefault(tuple(f), {})[k] = m
        out = [(list(f), per_k) for f, per_k in table.items()]
        out.sort(key=lambda t: (len(t[0]), t[0]))
        return out


def gauss_manin(family, prefer_series=None, fill_limit=3.0):
    """Connection data (G, r, R, factored determinants) for the family."""
    sizes = _level_sizes(family)
    big = max(sizes.values(), default=0)
    use_series = prefer_series if prefer_series is not None else big > 48
    tables = ReductionTables(family)
    det_factors, R_prim, R_content = _det_data(family, tables, use_series, fill_limit)
    if use_series:
        entries = _gm_series_entries(family, tables, R_prim, R_content)
        return _assemble_series(entries, tables.basis, det_factors, R_prim, R_content)
    M, _ = gauss_manin_direct(family, tables)
    return _assemble_from_rational(M, tables.basis, det_factors, R_prim, R_content)


def _level_sizes(family):
    d, n = family.d, family.n
    out = {}
    for k in range(2, n + 2):
        F = monomials_of_degree(n + 1, k * d - (n + 1))
        out[k] = sum(1 for u in F if max(u) >= d - 1)
    return out


# ---------------------------------------------------------------------------
# direct route over Q(t)


def gauss_manin_direct(family, tables=None):
    tables = tables or ReductionTables(family)
    basis = tables.basis
    n = family.n
    dPdt = family.t_derivative_terms()
    cols = []
    for u, k in basis.elements:
        Q = {}
        for w, cs in dPdt.items():
            f = tuple(u[i] + w[i] for i in range(n + 1))
            Q[f] = RationalFunction(QPoly([-k * c for c in cs]), None, normalize=False)
        gammas = reduce_form(tables, Q, k + 1)
        col = [RationalFunction.zero()] * basis.b
        for gamma in gammas:
            for f, c in gamma.items():
                col[basis.index[f]] = c
        cols.append(col)
    M = [[cols[j][i] for j in range(basis.b)] for i in range(basis.b)]
    return M, tables


def _det_data(family, tables, use_series, fill_limit):
    det_factors = {}
    R_poly, R_content = [1], Fraction(1)
    for k in range(2, family.n + 2):
        if use_series:
            prim, content = determinant_series(family, tables, k, fill_limit)
        else:
            prim, content = _determinant_direct(tables, k)
        if not prim or content == 0:
            raise SingularMatrixError(f"det Delta_{k} = 0")
        fcontent, factors = zpoly_factor(prim)
        det_factors[k] = (content * fcontent, factors)
        R_poly = zpoly_mul(R_poly, prim)
        R_content *= content
    R_prim, extra = zpoly_primitive(R_poly)
    return det_factors, R_prim, R_content * extra


def _determinant_direct(tables, k):
    detk = tables.determinant(k)
    if detk.is_zero():
        return [], Fraction(0)
    if detk.den.degree() != 0:
        raise AssertionError("determinant of a polynomial matrix must be polynomial")
    num, scale = detk.num.to_integer_poly()
    return num, scale / detk.den.coeffs[0]


def _assemble_from_rational(M, basis, det_factors, R_prim, R_content):
    b = basis.b
    entries = [[_rf_to_qpoly_pair(M[i][j]) for j in range(b)] for i in range(b)]
    return _assemble(entries, basis, det_factors, R_prim, R_content)


def _rf_to_qpoly_pair(rf):
    return rf.num, rf.den


def _assemble_from_qpoly(M_entries, basis, det_factors, R_prim, R_content):
    return _assemble(M_entries, basis, det_factors, R_prim, R_content)


def _assemble(entries, basis, det_factors, R_prim, R_content):
    """entries[i][j] = (num QPoly, den QPoly); build integer (G, r)."""
    b = basis.b
    r_prim = [1]
    dens = {}
    for i in range(b):
        for j in range(b):
            den = entries[i][j][1]
            deni, _ = den.to_integer_poly()
            if len(deni) > 1:
                key = tuple(deni)
                if key not in dens:
                    g = zpoly_gcd(r_prim, deni)
                    r_prim = zpoly_divexact(zpoly_mul(r_prim, deni), g)
                    dens[key] = True
    rq = QPoly(r_prim)
    lam = 1
    Gq = []
    for i in range(b):
        row = []
        for j in range(b):
            num, den = entries[i][j]
            q, rem = (num * rq).divmod(den)
            if not rem.is_zero():
                raise AssertionError("entry denominator does not divide r")
            row.append(q)
            for c in q.coeffs:
                lam = lam * c.denominator // math.gcd(lam, c.denominator)
        Gq.append(row)
    G = [[zpoly_trim([int(c * lam) for c in q.coeffs]) for q in row] for row in Gq]
    r = [c * lam for c in r_prim]
    common = 0
    for row in G:
        for cs in row:
            for c in cs:
                common = math.gcd(common, abs(c))
                if common == 1:
                    break
    common = math.gcd(common, lam) if common else lam
    if common > 1:
        G = [[[c // common for c in cs] for cs in row] for row in G]
        r = [c // common for c in r]
        lam //= common
    return ConnectionMatrix(
        basis=basis,
        G=G,
        r=r,
        r_content=lam,
        R=R_prim,
        R_content=R_content,
        det_factors=det_factors,
    )


def _assemble_series(entries, basis, det_factors, R_prim, R_content):
    """Build (G, r) from (integer poly, scale) entries of M = H/R.

    The true denominator r is found per irreducible factor of R: the factor
    enters r with multiplicity multR - min over entries of ord_f(H).  Cheap
    integer-evaluation tests prefilter the exact trial divisions.
    """
    b = basis.b
    factor_table = {}
    for k, (_, factors) in det_factors.items():
        for f, m in factors:
            key = tuple(f)
            factor_table[key] = factor_table.get(key, 0) + m
    nonzero = [
        (i, j, entries[i][j][0])
        for i in range(b)
        for j in range(b)
        if entries[i][j] is not None
    ]
    eval_points = (2, -3, 7)
    evals = [
        tuple(zpoly_eval(h, c) for c in eval_points) for (_, _, h) in nonzero
    ]
    r_prim = [1]
    cofactor_mults = {}
    for key, multR in sorted(factor_table.items(), key=lambda t: (len(t[0]), t[0])):
        f = list(key)
        fvals = tuple(zpoly_eval(f, c) for c in eval_points)
        min_ord = multR
        for idx, (_, _, h) in enumerate(nonzero):
            may_divide = all(
                (ev == 0) if fv == 0 else (ev % fv == 0)
                for fv, ev in zip(fvals, evals[idx])
            )
            ordh = 0
            if may_divide:
                cur = h
                while ordh < multR:
                    try:
                        cur = zpoly_divexact(cur, f)
                    except ArithmeticError:
                        break
                    ordh += 1
            min_ord = min(min_ord, ordh)
            if min_ord == 0:
                break
        if multR > min_ord:
            for _ in range(multR - min_ord):
                r_prim = zpoly_mul(r_prim, f)
        if min_ord:
            cofactor_mults[key] = min_ord
    w = [1]
    for key, m in cofactor_mults.items():
        for _ in range(m):
            w = zpoly_mul(w, list(key))
    Gq = [[QPoly() for _ in range(b)] for _ in range(b)]
    lam = 1
    for idx, (i, j, h) in enumerate(nonzero):
        gint = zpoly_divexact(h, w) if w != [1] else list(h)
        scale = entries[i][j][1]
        Gq[i][j] = QPoly([Fraction(c) * scale for c in gint])
        lam = lam * scale.denominator // math.gcd(lam, scale.denominator)
    G = [[zpoly_trim([int(c * lam) for c in q.coeffs]) for q in row] for row in Gq]
    r = [c * lam for c in r_prim]
    common = 0
    for row in G:
        for cs in row:
            for c in cs:
                common = math.gcd(common, abs(c))
                if common == 1:
                    break
    common = math.gcd(common, lam) if common else lam
    if common > 1:
        G = [[[c // common for c in cs] for cs in row] for row in G]
        r = [c // common for c in r]
        lam //= common
    return ConnectionMatrix(
        basis=basis,
        G=G,
        r=r,
        r_content=lam,
        R=R_prim,
        R_content=R_content,
        det_factors=det_factors,
    )


# ---------------------------------------------------------------------------
# t-adic route


class _LevelMaps:
    """Sparse solve data at one pole order.

    Delta = Delta0 + sum_e t^e E_e with Delta0 the permutation pairing
    row f = g x_j^(d-1) <-> column (j, g), value d a_j.  Solving
    Delta v = w order by order only ever inverts Delta0.  All integer
    data is scaled by L = lcm_j |d a_j|.
    """

    def __init__(self, family, tables, k, L):
        self.k = k
        if k not in tables.rows:
            tables._build_level(k)
        self.rows = tables.rows[k]
        self.cols = tables.cols[k]
        self.rindex = {u: i for i, u in enumerate(self.rows)}
        self.cindex = {c: i for i, c in enumerate(self.cols)}
        d, n = family.d, family.n
        self.L = L
        self.pair_col_of_row = [0] * len(self.rows)
        self.Linv_diag = [0] * len(self.rows)
        for ri, u in enumerate(self.rows):
            j, g = tables.bijection_image(u)
            self.pair_col_of_row[ri] = self.cindex[(j, g)]
            du = d * family.diagonal[j]
            if L % du:
                raise AssertionError("diagonal unit does not divide L")
            self.Linv_diag[ri] = L // du
        nonconst = family.nonconstant_terms()
        triples = {}
        for ci, (j, g) in enumerate(self.cols):
            for u, cs in nonconst.items():
                if u[j] == 0:
                    continue
                w = tuple(e - (1 if i == j else 0) for i, e in enumerate(u))
                f = tuple(g[i] + w[i] for i in range(n + 1))
                ri = self.rindex.get(f)
                if ri is None:
                    continue
                for e, c in enumerate(cs):
                    if e and c:
                        triples.setdefault(e, []).append((ri, ci, c * u[j]))
        self.t_csr = {e: _to_csr(trs, len(self.rows)) for e, trs in triples.items()}

    def apply_inverse_step(self, rhs_rows):
        """v-column values of L * Delta0^{-1} applied to row values."""
        vm = [0] * len(self.cols)
        for ri, val in enumerate(rhs_rows):
            if val:
                vm[self.pair_col_of_row[ri]] = val * self.Linv_diag[ri]
        return vm

    def solve_series(self, W, D):
        """Solve Delta v = w on series with the shared scale convention.

        Input W: integer series of row vectors, order ord meaning
        w^(ord) = W[ord] * C * L^(-ord) for the caller's constant C.
        Output V: v^(ord) = V[ord] * C * L^(-ord-1).
        """
        nrows = len(self.rows)
        V = []
        buf = [0] * nrows
        for m in range(D):
            rhs = list(W[m]) if m < len(W) else [0] * nrows
            for e, csr in self.t_csr.items():
                if e <= m and V[m - e] is not None:
                    csr_apply(csr[0], csr[1], csr[2], V[m - e], buf)
                    Le = self.L ** (e - 1)
                    for i in range(nrows):
                        if buf[i]:
                            rhs[i] -= buf[i] * Le
            V.append(self.apply_inverse_step(rhs))
        return V


def _to_csr(triples, nrows):
    triples.sort()
    row_start = [0] * (nrows + 1)
    for ri, _, _ in triples:
        row_start[ri + 1] += 1
    for i in range(nrows):
        row_start[i + 1] += row_start[i]
    pos = list(row_start[:-1])
    col_idx = [0] * len(triples)
    vals = [0] * len(triples)
    for ri, ci, c in triples:
        col_idx[pos[ri]] = ci
        vals[pos[ri]] = c
        pos[ri] += 1
    return (row_start, col_idx, vals)


def _common_unit_multiple(family):
    d = family.d
    L = 1
    for a in family.diagonal:
        du = abs(d * a)
        L = L * du // math.gcd(L, du)
    return L


def _basis_row_maps(family, tables, k, basis):
    """CSR of the t-part rows landing on basis monomials of level k."""
    n = family.n
    Bset = {u: i for i, u in enumerate(basis.B[k - 1])} if k <= family.n else {}
    triples = {}
    nonconst = family.nonconstant_terms()
    for ci, (j, g) in enumerate(tables.cols[k]):
        for u, cs in nonconst.items():
            if u[j] == 0:
                continue
            w = tuple(e - (1 if i == j else 0) for i, e in enumerate(u))
            f = tuple(g[i] + w[i] for i in range(n + 1))
            bi = Bset.get(f)
            if bi is None:
                continue
            for e, c in enumerate(cs):
                if e and c:
                    triples.setdefault(e, []).append((bi, ci, c * u[j]))
    return {e: _to_csr(trs, len(Bset)) for e, trs in triples.items()}, len(Bset)


def _derivative_map(family, tables, k_from, k_to):
    """CSR for (1/k_to) sum_i d/dx_i on the level-k_from solution vector,
    producing row values of the level-k_to system (integer part only;
    the 1/k_to goes into the caller's running scalar)."""
    n = family.n
    rindex = {u: i for i, u in enumerate(tables.rows[k_to])}
    triples = []
    for ci, (j, g) in enumerate(tables.cols[k_from]):
        if g[j] == 0:
            continue
        f = tuple(e - (1 if i == j else 0) for i, e in enumerate(g))
        ri = rindex.get(f)
        if ri is not None:
            triples.append((ri, ci, g[j]))
    return _to_csr(triples, len(tables.rows[k_to]))


def _derivative_to_basis_map(family, tables, k_from, basis, k_to):
    """Same derivative map but recording the components on B_{k_to}."""
    Bset = {u: i for i, u in enumerate(basis.B[k_to - 1])}
    triples = []
    for ci, (j, g) in enumerate(tables.cols[k_from]):
        if g[j] == 0:
            continue
        f = tuple(e - (1 if i == j else 0) for i, e in enumerate(g))
        bi = Bset.get(f)
        if bi is not None:
            triples.append((bi, ci, g[j]))
    return _to_csr(triples, len(Bset))


def _gm_series_entries(family, tables, R_prim, R_content):
    """Entries of M = H/R via the truncated-series chain.

    Returns a b x b array of (primitive integer poly, Fraction scale) pairs
    (None for zero entries), where M[i][j] = scale * poly / R_prim.
    """
    basis = tables.basis
    n = family.n
    L = _common_unit_multiple(family)
    levels = {k: _LevelMaps(family, tables, k, L) for k in range(2, n + 2)}
    basis_rows = {k: _basis_row_maps(family, tables, k, basis) for k in range(2, n + 2)}
    deriv = {k: _derivative_map(family, tables, k, k - 1) for k in range(3, n + 2)}
    deriv_basis = {
        k: _derivative_to_basis_map(family, tables, k, basis, k - 1)
        for k in range(2, n + 2)
    }
    guard = 8
    D = (
        max(family.d_t - 1, 0)
        + sum((len(tables.rows[k]) - 1) * max(family.d_t, 1) for k in range(2, n + 2))
        + guard
    )
    dPdt = family.t_derivative_terms()
    b = basis.b
    entries = [[None] * b for _ in range(b)]
    for col_idx, (u, kpole) in enumerate(basis.elements):
        gam, scalars = _reduce_column_series(
            family, tables, basis, levels, basis_rows, deriv, deriv_basis,
            u, kpole, dPdt, L, D, n,
        )
        for lvl in range(1, n + 1):
            if lvl not in gam:
                continue
            series, S = gam[lvl], scalars[lvl]
            offset = sum(len(basis.B[i]) for i in range(lvl - 1))
            for bi in range(len(basis.B[lvl - 1])):
                coeffs = [series[m][bi] for m in range(D)]
                if not any(coeffs):
                    continue
                poly, scale = _reconstruct_entry(coeffs, S, L, R_prim, D, guard)
                if poly:
                    entries[offset + bi][col_idx] = (poly, scale)
    return entries


def _reconstruct_entry(coeffs, S, L, R_prim, D, guard):
    """Primitive integer H with scale: entry = scale * H / R_prim.

    The series is value^(m) = coeffs[m] * S * L^(-m); multiplying by R must
    yield a polynomial of degree < D - guard, verified on the guard tail.
    """
    from .kernels import conv_trunc

    A = [c * L ** (D - 1 - m) for m, c in enumerate(coeffs)]
    H = conv_trunc(A, R_prim, D)
    cut = D - guard + 1
    for m in range(cut, len(H)):
        if H[m]:
            raise AssertionError(
                "series reconstruction overflowed its degree bound"
            )
    prim, content = zpoly_primitive(H[:cut])
    return prim, content * S / L ** (D - 1)


def _reduce_column_series(
    family, tables, basis, levels, basis_rows, deriv, deriv_basis,
    u, kpole, dPdt, L, D, n,
):
    """Series reduction of -k x^u dP/dt / P^(k+1) through the pole levels.

    All series share the convention value^(m) = int[m] * S * L^(-m) with a
    per-level running scalar S; every solve multiplies the scale by 1/L and
    every pole-order drop by 1/(new pole order).
    """
    start_level = kpole + 1
    rindex = {w: i for i, w in enumerate(tables.rows[start_level])}
    nrows = len(tables.rows[start_level])
    dt1 = max(family.d_t, 1)
    W = [[0] * nrows for _ in range(dt1)]
    Bset = (
        {w: i for i, w in enumerate(basis.B[start_level - 1])}
        if start_level <= n
        else {}
    )
    pendingB = [[0] * len(Bset) for _ in range(D)] if Bset else None
    for w, cs in dPdt.items():
        f = tuple(u[i] + w[i] for i in range(n + 1))
        ri = rindex.get(f)
        bi = Bset.get(f) if Bset else None
        for e, c in enumerate(cs):
            if c:
                val = c * L**e  # plain t-coefficient aligned to the convention
                if ri is not None:
                    W[e][ri] += val
                if bi is not None:
                    pendingB[e][bi] += val
    S = Fraction(-kpole)
    gam, scalars = {}, {}
    level = start_level
    while level >= 2:
        lm = levels[level]
        V = lm.solve_series(W, D)
        if level <= n:
            bmaps, nb = basis_rows[level]
            series = pendingB if pendingB is not None else _zero_rows(D, nb)
            buf = [0] * nb
            for e, csr in bmaps.items():
                Le = L ** (e - 1)
                for m in range(e, D):
                    csr_apply(csr[0], csr[1], csr[2], V[m - e], buf)
                    row = series[m]
                    for i in range(nb):
                        if buf[i]:
                            row[i] -= buf[i] * Le
            gam[level] = series
            scalars[level] = S
        if level > 2:
            csr = deriv[level]
            nrows_next = len(tables.rows[level - 1])
            Wn = []
            buf2 = [0] * nrows_next
            for m in range(D):
                csr_apply(csr[0], csr[1], csr[2], V[m], buf2)
                Wn.append(list(buf2))
            W = Wn
        csr_b = deriv_basis[level]
        nb2 = len(basis.B[level - 2])
        pendingB = _zero_rows(D, nb2)
        if nb2:
            buf3 = [0] * nb2
            for m in range(D):
                csr_apply(csr_b[0], csr_b[1], csr_b[2], V[m], buf3)
                row = pendingB[m]
                for i in range(nb2):
                    if buf3[i]:
                        row[i] += buf3[i]
        S = S / (L * (level - 1))
        level -= 1
    if pendingB is not None and any(any(row) for row in pendingB):
        gam[1] = pendingB
        scalars[1] = S
    return gam, scalars


def _zero_rows(D, width):
    return [[0] * width for _ in range(D)]


def _reconstruct_polynomial(coeffs, S, L, Rq, D):
    """QPoly H with H/R equal to the series sum coeffs[m] S L^(-m) t^m."""
    from .kernels import conv_trunc

    Rint, Rscale = Rq.to_integer_poly()
    degR = len(Rint) - 1
    # scale the series to the common denominator L^(D-1)
    A = [c * L ** (D - 1 - m) for m, c in enumerate(coeffs)]
    H = conv_trunc(A, Rint, D)
    # tail beyond the degree bound must vanish identically
    tail_from = D - 4
    for m in range(max(0, tail_from), len(H)):
        if H[m]:
            raise AssertionError(
                "series reconstruction overflowed its degree bound; "
                "the bound D is too small"
            )
    den = L ** (D - 1)
    out = [Fraction(c, den) * S * Rscale for c in H[: max(0, tail_from)]]
    return QPoly(out)


# ---------------------------------------------------------------------------
# determinants of the reduction matrices


def determinant_series(family, tables, k, fill_limit=None):
    """det Delta_k as (primitive integer poly, Fraction content)."""
    if family.d_t <= 1:
        return _det_by_traces(family, tables, k)
    if len(tables.rows.get(k, ())) <= 96:
        return _determinant_direct(tables, k)
    return _det_by_interpolation(family, tables, k)


def _det_by_interpolation(family, tables, k):
    """Evaluate det Delta_k(c) at integers and interpolate (d_t >= 2 only)."""
    entries = tables.delta_entries(k)
    nrows = len(tables.rows[k])
    degbound = nrows * family.d_t
    xs, ys = [], []
    c = 0
    while len(xs) < degbound + 1:
        pts = {}
        for (ri, ci), cs in entries.items():
            v = zpoly_eval(cs, c)
            if v:
                pts[(ri, ci)] = Fraction(v)
        det = _dense_fraction_det(pts, nrows)
        xs.append(Fraction(c))
        ys.append(det)
        c = -c + (1 if c <= 0 else 0)
    poly = _lagrange(xs, ys)
    den = 1
    for cf in poly:
        den = den * cf.denominator // math.gcd(den, cf.denominator)
    ints = zpoly_trim([int(cf * den) for cf in poly])
    if not ints:
        return [], Fraction(0)
    prim, content = zpoly_primitive(ints)
    return prim, content / den


def _dense_fraction_det(pts, n):
    mat = [[Fraction(0)] * n for _ in range(n)]
    for (ri, ci), v in pts.items():
        mat[ri][ci] = v
    det = Fraction(1)
    perm_sign = 1
    for kcol in range(n):
        piv = None
        for ri in range(kcol, n):
            if mat[ri][kcol]:
                piv = ri
                break
        if piv is None:
            return Fraction(0)
        if piv != kcol:
            mat[kcol], mat[piv] = mat[piv], mat[kcol]
            perm_sign = -perm_sign
        pv = mat[kcol][kcol]
        det *= pv
        for ri in range(kcol + 1, n):
            f = mat[ri][kcol]
            if f:
                f /= pv
                row, prow = mat[ri], mat[kcol]
                for ci in range(kcol + 1, n):
                    if prow[ci]:
                        row[ci] -= f * prow[ci]
    return det * perm_sign


def _lagrange(xs, ys):
    n = len(xs)
    poly = [Fraction(0)] * n
    for i in range(n):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            old = basis
            basis = [Fraction(0)] + old
            for d in range(len(old)):
                basis[d] -= xs[j] * old[d]
            denom *= xs[i] - xs[j]
        scale = ys[i] / denom
        for d, cf in enumerate(basis):
            if cf:
                poly[d] += cf * scale
    return poly


def _perm_parity(arr):
    seen = [False] * len(arr)
    sign = 1
    for i in range(len(arr)):
        if not seen[i]:
            j, ln = i, 0
            while not seen[j]:
                seen[j] = True
                j = arr[j]
                ln += 1
            if ln % 2 == 0:
                sign = -sign
    return sign


def _det_by_traces(family, tables, k):
    """det(Delta0 + t E1) for pencil-linear families (t-degree 1).

    det = det(Delta0) det(I + t B) with B = Delta0^{-1} E1 constant, so
    det(I + t B) = sum_m e_m(B) t^m.  Scaled traces tr((L B)^m) are exact
    integers obtained by propagating basis vectors through a sparse map;
    Newton's identities then give e~_m = L^m e_m over Z.
    """
    if family.d_t > 1:
        raise ValueError("trace determinant requires t-degree <= 1")
    L = _common_unit_multiple(family)
    lm = _LevelMaps(family, tables, k, L)
    ncols = len(lm.cols)
    if ncols == 0:
        return [1], Fraction(1)
    if 1 not in lm.t_csr:
        det0, sign = _det0(lm, L)
        return [1], det0 * sign
    # compose the t-part with L Delta0^{-1}: a column -> column integer map
    row_start, col_idx, vals = lm.t_csr[1]
    triples = []
    out_edges = [[] for _ in range(ncols)]
    for ri in range(len(lm.rows)):
        tgt = lm.pair_col_of_row[ri]
        scale = lm.Linv_diag[ri]
        for j in range(row_start[ri], row_start[ri + 1]):
            triples.append((tgt, col_idx[j], vals[j] * scale))
            out_edges[col_idx[j]].append((tgt, vals[j] * scale))
    csr = _to_csr(triples, ncols)
    dense_cut = max(8, ncols // 12)
    traces = [0] * (ncols + 1)
    buf = [0] * ncols
    for start in range(ncols):
        vec = {start: 1}
        dense = None
        for m in range(1, ncols + 1):
            if dense is None and len(vec) <= dense_cut:
                nxt = {}
                for src, x in vec.items():
                    for tgt, val in out_edges[src]:
                        nxt[tgt] = nxt.get(tgt, 0) + val * x
                vec = {kk: v for kk, v in nxt.items() if v}
                if not vec:
                    break
                tr = vec.get(start, 0)
            else:
                if dense is None:
                    dense = [0] * ncols
                    for kk, v in vec.items():
                        dense[kk] = v
                csr_apply(csr[0], csr[1], csr[2], dense, buf)
                dense, buf = buf, dense
                tr = dense[start]
                if not any(dense):
                    break
            if tr:
                traces[m] += tr
    # m e~_m = sum_{i=1}^m (-1)^(i-1) e~_{m-i} tr((LB)^i)
    esc = [1]
    for m in range(1, ncols + 1):
        acc = 0
        for i in range(1, m + 1):
            term = esc[m - i] * traces[i]
            acc += -term if i % 2 == 0 else term
        if acc % m:
            raise AssertionError("Newton recurrence produced a non-integer")
        esc.append(acc // m)
    det0, sign = _det0(lm, L)
    coeffs = [Fraction(em, L**m) for m, em in enumerate(esc)]
    coeffs = [c * det0 * sign for c in coeffs]
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = zpoly_trim([int(c * den) for c in coeffs])
    prim, content = zpoly_primitive(ints)
    return prim, content / den


def _det0(lm, L):
    det0 = Fraction(1)
    for inv in lm.Linv_diag:
        det0 *= Fraction(L, inv)  # the diagonal unit d a_j itself
    sign = _perm_parity(_normalize_perm(lm.pair_col_of_row))
    return det0, sign


def _normalize_perm(arr):
    rank = {v: i for i, v in enumerate(sorted(arr))}
    return [rank[v] for v in arr]


def _zip_pad(f, g):
    n = max(len(f), len(g))
    return zip(f + [0] * (n - len(f)), g + [0] * (n - len(g)))
