"""Input model and validation for one-parameter hypersurface deformations.

A family is a homogeneous P in Z[t][x_0..x_n] of degree d whose fibre at
t = 0 is diagonal with unit coefficients modulo the working prime.
"""

from dataclasses import dataclass, field

from .algebra import zpoly_trim
from .gfpoly import gf_is_irreducible


class FamilyValidationError(ValueError):
    def __init__(self, code, message):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass
class HypersurfaceFamily:
    """P = sum of exponent-tuple -> t-coefficient-list monomials."""

    n: int
    d: int
    p: int
    terms: dict  # tuple(length n+1) -> list of ints (ascending t powers)
    d_t: int = field(init=False)
    diagonal: list = field(init=False)  # a_0..a_n at t = 0

    def __post_init__(self):
        self.terms = {
            tuple(int(e) for e in u): zpoly_trim([int(c) for c in cs])
            for u, cs in self.terms.items()
        }
        self.terms = {u: cs for u, cs in self.terms.items() if cs}
        self.d_t = max((len(cs) - 1 for cs in self.terms.values()), default=0)
        self.diagonal = self._diagonal_coeffs()

    def _diagonal_coeffs(self):
        diag = []
        for i in range(self.n + 1):
            u = tuple(self.d if j == i else 0 for j in range(self.n + 1))
            cs = self.terms.get(u, [])
            diag.append(cs[0] if cs else 0)
        return diag

    def t_derivative_terms(self):
        """Exponent -> coefficients of dP/dt."""
        out = {}
        for u, cs in self.terms.items():
            der = zpoly_trim([i * c for i, c in enumerate(cs)][1:])
            if der:
                out[u] = der
        return out

    def constant_terms(self):
        """Exponent -> coefficient of the fibre at t = 0."""
        return {u: cs[0] for u, cs in self.terms.items() if cs and cs[0]}

    def nonconstant_terms(self):
        """Exponent -> t-coefficient list with the constant part removed."""
        out = {}
        for u, cs in self.terms.items():
            rest = zpoly_trim([0] + cs[1:])
            if rest:
                out[u] = rest
        return out

    def key(self):
        items = tuple(sorted((u, tuple(cs)) for u, cs in self.terms.items()))
        return (self.n, self.d, self.p, items)


def validate_family(n, d, p, terms):
    """Check homogeneity, p coprime to d, and the diagonal unit fibre at 0."""
    fam = HypersurfaceFamily(n=n, d=d, p=p, terms=dict(terms))
    for u in fam.terms:
        if len(u) != n + 1 or any(e < 0 for e in u):
            raise FamilyValidationError("NotHomogeneous", f"bad exponent tuple {u}")
        if sum(u) != d:
            raise FamilyValidationError(
                "NotHomogeneous", f"term {u} has degree {sum(u)} != {d}"
            )
    if d % p == 0:
        raise FamilyValidationError("DegreeDivisibleByP", f"p={p} divides d={d}")
    diag_tuples = {
        tuple(d if j == i else 0 for j in range(n + 1)) for i in range(n + 1)
    }
    for u, cs in fam.terms.items():
        if u not in diag_tuples and cs and cs[0] != 0:
            raise FamilyValidationError(
                "FibreZeroNotDiagonal", f"non-diagonal term {u} alive at t = 0"
            )
    for i, a in enumerate(fam.diagonal):
        if a % p == 0:
            raise FamilyValidationError(
                "NonUnitDiagonalCoefficient",
                f"diagonal coefficient a_{i} = {a} is 0 mod p",
            )
    return fam


@dataclass
class FibreSpec:
    """A point tau of the base over F_{p^a}, in a user-chosen presentation."""

    ext_degree: int
    tau: list  # length ext_degree, entries 0..p-1
    modulus: list | None = None  # monic integer coefficients, ascending

    def validated(self, p):
        a = self.ext_degree
        if a < 1:
            raise FamilyValidationError("BadFibre", "ext_degree must be >= 1")
        tau = [int(c) % p for c in self.tau]
        if len(tau) != a:
            raise FamilyValidationError("BadFibre", "tau has wrong length")
        if a == 1:
            mod = [(-tau[0]) % p, 1] if self.modulus is None else list(self.modulus)
            return FibreSpec(1, tau, mod)
        if self.modulus is None:
            raise FamilyValidationError("BadFibre", "degree > 1 needs a modulus")
        mod = [int(c) for c in self.modulus]
        if len(mod) != a + 1 or mod[-1] != 1:
            raise FamilyValidationError("BadFibre", "modulus must be monic of degree a")
        if not gf_is_irreducible([c % p for c in mod], p):
            raise FamilyValidationError("BadFibre", "modulus reducible mod p")
        return FibreSpec(a, tau, mod)


def fibre_in_S(family, R_poly, r_poly, fibre):
    """True iff both R and r are nonzero at tau over F_{p^a}."""
    from .gfpoly import gf_divmod

    p = family.p
    fib = fibre.validated(p)
    a = fib.ext_degree
    mod = [c % p for c in fib.modulus]

    def eval_mod(poly):
        acc = [0] * a
        for c in reversed(poly):
            # acc = acc * tau + c over F_p[x]/(mod)
            prod = [0] * (len(acc) + len(fib.tau) - 1)
            for i, ai in enumerate(acc):
                if ai:
                    for j, tj in enumerate(fib.tau):
                        prod[i + j] = (prod[i + j] + ai * tj) % p
            acc = gf_divmod(prod, mod, p)[1]
            acc = acc + [0] * (a - len(acc))
            acc[0] = (acc[0] + c) % p
        return acc

    return any(eval_mod(R_poly)) and any(eval_mod(r_poly))
