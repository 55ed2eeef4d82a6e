"""From the Frobenius series to the zeta function of a fibre.

Evaluate s*Phi at the Teichmueller lift of tau, divide by s(tau-hat), take
the semilinear power for the q-power Frobenius, compute the reverse
characteristic polynomial by the Faddeev-LeVerrier recurrence (ring
operations plus exact small-integer divisions), and round the modular
coefficients to integers through the Newton-Girard windows.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .intutil import ordp, ordp_factorial
from .kernels import lincomb
from .padic import ExtElement, PadicContext, UnramifiedExtension, frobenius_sigma, teichmueller_lift


class FibreOutsideS(ArithmeticError):
    pass


class NoIntegerInWindow(ArithmeticError):
    pass


class AmbiguousSign(ArithmeticError):
    pass


def evaluate_at_fibre(sPhi, s_poly, K, ext, tau_residue, N_phi, delta):
    """Phi_tau = s(tau-hat)^{-1} (s Phi mod t^K)|_{t=tau-hat} mod p^N_phi.

    sPhi carries mantissas value*p^delta mod p^(N_phi+delta); the extension
    context must match that modulus.  Returns a flat b x b matrix of
    ExtElements.
    """
    ctx = ext.ctx
    if ctx.N != N_phi or ctx.shift != delta:
        raise ValueError("extension context does not match the plan")
    tau_hat = teichmueller_lift(ext, tau_residue)
    # plain integral coordinate vectors of tau-hat powers
    a = ext.a
    mod = ctx.modulus
    scale = ctx.scale
    t_plain = [c // scale for c in tau_hat.man]
    powers = [[1] + [0] * (a - 1)]
    for _ in range(1, min(K, len(sPhi))):
        powers.append(ext.int_mul(powers[-1], t_plain))
    bb = len(sPhi[0]) if sPhi else 0
    b = math.isqrt(bb)
    # s(tau-hat) must be a unit
    s_at = [0] * a
    for k in range(len(powers)):
        c = s_poly[k] % mod if k < len(s_poly) else 0
        if c:
            for i in range(a):
                s_at[i] = (s_at[i] + c * powers[k][i]) % mod
    s_elt = ExtElement(ext, [c * scale for c in s_at])
    if not s_elt.is_unit():
        raise FibreOutsideS("s(tau-hat) is not a unit")
    s_inv = s_elt.inverse()
    out = []
    nterms = len(powers)
    for e in range(bb):
        coeffs = [sPhi[k][e] for k in range(nterms)]
        vec = lincomb(coeffs, powers, a)
        elt = ExtElement(ext, [v % mod for v in vec])  # value * p^delta kept
        out.append(elt * s_inv)
    return out, tau_hat


def mat_mul_ext(A, B, b):
    out = []
    for i in range(b):
        for j in range(b):
            acc = None
            for k in range(b):
                x = A[i * b + k]
                y = B[k * b + j]
                term = x * y
                acc = term if acc is None else acc + term
            out.append(acc)
    return out


def mat_sigma(A, power):
    return [frobenius_sigma(x, power) for x in A]


def semilinear_power(Phi_tau, a, b):
    """Phi sigma(Phi) ... sigma^(a-1)(Phi) by doubling."""
    if a == 1:
        return list(Phi_tau)
    bits = bin(a)[3:]
    result = list(Phi_tau)
    span = 1
    for bit in bits:
        result = mat_mul_ext(result, mat_sigma(result, span), b)
        span *= 2
        if bit == "1":
            result = mat_mul_ext(result, mat_sigma(Phi_tau, span), b)
            span += 1
    return result


def reverse_charpoly(A, b, ext):
    """Coefficients chi_0..chi_b of det(1 - T A) by Faddeev-LeVerrier.

    Divisions by 1..b are exact on the represented values; the caller's
    modulus must include ord_p(b!) guard digits.
    """
    one = ext.one()
    coeffs = [one]
    M = list(A)
    p = ext.ctx.p
    for k in range(1, b + 1):
        tr = None
        for i in range(b):
            tr = M[i * b + i] if tr is None else tr + M[i * b + i]
        ck = _div_ext_by_int(tr, k, p)
        ck = -ck
        coeffs.append(ck)
        if k < b:
            for i in range(b):
                M[i * b + i] = M[i * b + i] + ck
            M = mat_mul_ext(A, M, b)
    return coeffs


def _div_ext_by_int(x, nint, p):
    v = ordp(nint, p) if nint % p == 0 else 0
    unit = nint // p**v
    mod = x.ext.ctx.modulus
    inv = pow(unit % mod, -1, mod)
    man = [c * inv % mod for c in x.man]
    if v:
        pk = p**v
        out = []
        for c in man:
            if c % pk:
                raise ArithmeticError("charpoly division underflow")
            out.append(c // pk)
        man = out
    return ExtElement(x.ext, man)


def chi_coefficient_residues(coeffs, ext, trust_digits):
    """Extract Q_p residues of the chi~ coefficients, checking that the
    non-constant coordinates vanish to the trusted precision."""
    p = ext.ctx.p
    scale = ext.ctx.scale
    out = []
    trust = min(max(trust_digits, 1), ext.ctx.N)
    check = p ** (trust + ext.ctx.shift)
    for x in coeffs:
        man = x.man
        for c in man[1:]:
            if c % check:
                raise AssertionError(
                    "characteristic polynomial coefficient left Q_p"
                )
        if man[0] % scale:
            raise AssertionError("chi~ coefficient is not p-integral")
        out.append(man[0] // scale)
    return out


@dataclass
class ZetaResult:
    chi: list  # ascending integer coefficients, chi[0] = 1
    epsilon: int
    q: int
    n: int
    b: int
    plan_dict: dict | None = None

    def zeta_description(self):
        return {
            "chi": [str(c) for c in self.chi],
            "epsilon": self.epsilon,
            "zeta": {
                "chi_exponent": (-1) ** self.n,
                "denominator_factors": [[1, -(self.q**j)] for j in range(self.n)],
            },
        }

    def power_sums(self, count):
        return chi_power_sums(self.chi, count)

    def predicted_count(self, i):
        S = chi_power_sums(self.chi, i)[i - 1]
        total = sum(self.q ** (i * j) for j in range(self.n))
        return total + (-1) ** (self.n + 1) * S


def chi_power_sums(chi, count):
    """Power sums of the reciprocal roots of chi, by Newton's identities."""
    b = len(chi) - 1
    s = []
    for j in range(1, count + 1):
        acc = 0
        for i in range(1, min(j, b + 1)):
            acc += s[j - i - 1] * chi[i]
        if j <= b:
            sj = -j * chi[j] - acc
        else:
            sj = -acc
        s.append(sj)
    return s


def round_chi(chi_tilde, N_chi, q, n, b, p, mode="full", epsilon=None,
              j_extra=None):
    """Round modular chi~ coefficients to the integer polynomial chi.

    chi_tilde[i] is trusted modulo p^N_chi[i-1] (1-indexed coefficients).
    In half/adaptive mode the top half comes from the functional equation.
    Returns (chi list, epsilon).
    """
    chi = [1] + [None] * b
    s = []  # power sums as they become known
    if mode == "half":
        top = b // 2
        if epsilon is None:
            raise ValueError("half mode needs the functional-equation sign")
    elif mode == "adaptive":
        top = min(b, b // 2 + (j_extra or 1))
    else:
        top = b
    for j in range(1, top + 1):
        acc = 0
        for i in range(1, j):
            acc += s[j - i - 1] * chi[i]
        center = Fraction(-acc, j)
        N = N_chi[j - 1]
        pN = p**N
        resid = chi_tilde[j] % pN
        # nearest representative of resid mod pN to the center
        k = _round_nearest(center - resid, pN)
        cj = resid + k * pN
        # Weil window |chi_j - center| <= (b/j) q^(j(n-1)/2), squared form
        lhs = (Fraction(cj) - center) ** 2 * j * j
        rhs = b * b * q ** (j * (n - 1))
        if lhs > rhs:
            raise NoIntegerInWindow(
                f"no admissible integer for coefficient {j}"
            )
        # uniqueness: the window must be shorter than p^N
        chi[j] = cj
        s.append(-j * cj - acc)
    if mode in ("half", "adaptive"):
        chi, epsilon = _fill_functional_equation(
            chi, top, b, n, q, epsilon, mode
        )
    else:
        epsilon = _epsilon_from_chi(chi, b, n, q)
    _assert_chi_properties(chi, b, n, q, epsilon)
    return chi, epsilon


def _round_nearest(x, m):
    """Nearest integer to x/m (x a Fraction or int)."""
    x = Fraction(x)
    num, den = x.numerator, x.denominator * m
    return (2 * num + den) // (2 * den)


def _fill_functional_equation(chi, top, b, n, q, epsilon, mode):
    if epsilon is None and mode == "adaptive":
        epsilon = _sign_from_adaptive(chi, top, b, n, q)
    sign = epsilon * (-1) ** b
    for i in range(0, b // 2 + 1):
        jj = b - i
        if chi[jj] is not None and jj > top:
            continue
        expo = Fraction(n - 1) * (Fraction(b, 2) - i)
        if expo.denominator != 1:
            raise ValueError("functional equation needs an integer power")
        val = sign * q ** int(expo) * chi[i]
        if jj <= top and chi[jj] is not None and chi[jj] != val:
            raise AssertionError("functional equation contradicts rounding")
        if chi[jj] is None:
            chi[jj] = val
    if any(c is None for c in chi):
        raise AssertionError("functional equation left a hole")
    return chi, epsilon


def _sign_from_adaptive(chi, top, b, n, q):
    # smallest j with chi_(ceil(b/2)-j) != 0 determines the sign by
    # comparing the mirrored coefficients
    for j in range(0 if b % 2 == 0 else 1, top):
        lo = -(-b // 2) - j
        hi = b // 2 + j
        if lo < 1 or hi > top:
            break
        if chi[lo]:
            expo = Fraction(n - 1) * (Fraction(b, 2) - lo)
            if expo.denominator != 1:
                break
            base = (-1) ** b * q ** int(expo) * chi[lo]
            if chi[hi] == base:
                return 1
            if chi[hi] == -base:
                return -1
            raise AmbiguousSign("mirror coefficients are inconsistent")
    raise AmbiguousSign("cannot determine the functional-equation sign")


def _epsilon_from_chi(chi, b, n, q):
    # det of the Frobenius power is (-1)^b chi_b = epsilon q^(b(n-1)/2)
    if (b * (n - 1)) % 2:
        raise AssertionError("b (n-1) odd: sign undefined by chi_b")
    expected = q ** (b * (n - 1) // 2)
    sign = (-1) ** b
    if chi[b] == sign * expected:
        return 1
    if chi[b] == -sign * expected:
        return -1
    raise AssertionError("chi_b is not +-q^(b(n-1)/2)")


def _assert_chi_properties(chi, b, n, q, epsilon):
    if chi[0] != 1:
        raise AssertionError("chi(0) != 1")
    if (b * (n - 1)) % 2:
        raise AssertionError("b (n-1) must be even")
    sign = epsilon * (-1) ** b
    half = b * (n - 1) // 2
    for i in range(0, b + 1):
        e = half - i * (n - 1)
        lhs = chi[b - i]
        rhs = sign * (q**e * chi[i] if e >= 0 else Fraction(chi[i], q**-e))
        if lhs != rhs:
            raise AssertionError("functional equation fails")
    sums = chi_power_sums(chi, b)
    for j in range(1, b + 1):
        if sums[j - 1] ** 2 > b * b * q ** (j * (n - 1)):
            raise AssertionError("power sum exceeds the Weil bound")


def compute_chi(Phi_tau_flat, ext, plan, trust_digits):
    """chi~ residues from the evaluated Frobenius matrix."""
    b = plan.b
    power = semilinear_power(Phi_tau_flat, plan.a, b)
    coeffs = reverse_charpoly(power, b, ext)
    return chi_coefficient_residues(coeffs, ext, trust_digits)


def charpoly_context(plan):
    """Context (modulus, shift) for the semilinear/charpoly stage."""
    p, b, a, delta = plan.p, plan.b, plan.a, plan.delta
    Nbig = max(max(plan.N_chi), plan.N_phi) + ordp_factorial(b, p) + (a + b) * delta
    shift = (b + 1) * max(a, 1) * delta
    return Nbig, shift
