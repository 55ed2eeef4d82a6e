"""End-to-end zeta computation for one fibre of a deformation family."""

import time

from .connection import gauss_manin
from .diagfrob import DiagonalFibre, diag_frobenius_matrix
from .family import FibreSpec, fibre_in_S, validate_family
from .ode import frobenius_series
from .padic import ExtElement, PadicContext, UnramifiedExtension
from .precision import build_plan
from .zeta import (
    ZetaResult,
    charpoly_context,
    chi_coefficient_residues,
    evaluate_at_fibre,
    reverse_charpoly,
    round_chi,
    semilinear_power,
)


class PipelineTimings:
    def __init__(self):
        self.stages = {}
        self._last = time.time()

    def mark(self, name):
        now = time.time()
        self.stages[name] = self.stages.get(name, 0.0) + (now - self._last)
        self._last = now

    def as_ms(self):
        return {k: round(v * 1000, 1) for k, v in self.stages.items()}


def compute_zeta(
    family,
    fibre,
    exponents_cfg=None,
    manual_theta=None,
    epsilon_mode=None,
    overrides=None,
    connection_data=None,
    series_provider=None,
):
    """Run the full computation; returns (ZetaResult, artifacts dict).

    series_provider: optional callable (plan, G, r, phi0) -> sPhi, used by
    the cache layer to avoid resolving the differential system.
    """
    timings = PipelineTimings()
    fib = fibre.validated(family.p)
    conn = connection_data or gauss_manin(family)
    timings.mark("connection")
    p, n = family.p, family.n
    if not fibre_in_S(family, conn.R, conn.r, fib):
        raise ValueError("tau lies outside the good locus S")
    plan = build_plan(
        family,
        conn,
        a=fib.ext_degree,
        exponents_cfg=exponents_cfg,
        manual_theta=manual_theta,
        epsilon_mode=epsilon_mode,
        overrides=overrides,
    )
    timings.mark("plan")
    delta = plan.delta
    phi0 = diag_frobenius_matrix(
        DiagonalFibre(p, family.d, n, family.diagonal),
        conn.basis,
        plan.ladder["N_phi0"],
        delta,
    )
    timings.mark("diagonal_frobenius")
    tau_is_zero = all(c % p == 0 for c in fib.tau)
    ctx = PadicContext(p, plan.N_phi, delta)
    ext = UnramifiedExtension(ctx, fib.modulus)
    if tau_is_zero:
        mod = ctx.modulus
        Phi_tau = [
            ExtElement(ext, [v % mod] + [0] * (ext.a - 1)) for v in phi0
        ]
        timings.mark("evaluate")
    else:
        if series_provider is not None:
            sPhi = series_provider(plan, conn, phi0)
        else:
            sPhi, _ = frobenius_series(conn.G, conn.r, phi0, plan)
        timings.mark("series")
        Phi_tau, _ = evaluate_at_fibre(
            sPhi, plan.s_poly, plan.K, ext, fib.tau, plan.N_phi, delta
        )
        timings.mark("evaluate")
    chi, epsilon = chi_from_phi_tau(Phi_tau, ext, plan)
    timings.mark("charpoly")
    result = ZetaResult(
        chi=chi,
        epsilon=epsilon,
        q=p**fib.ext_degree,
        n=n,
        b=plan.b,
        plan_dict=plan.as_dict(),
    )
    artifacts = {
        "plan": plan,
        "connection": conn,
        "phi0": phi0,
        "timings": timings.as_ms(),
    }
    return result, artifacts


def chi_from_phi_tau(Phi_tau, ext, plan):
    """Semilinear power, characteristic polynomial, and integer rounding."""
    p, b, delta = plan.p, plan.b, plan.delta
    Nbig, shift_big = charpoly_context(plan)
    big_ctx = PadicContext(p, Nbig, shift_big)
    big_ext = UnramifiedExtension(big_ctx, ext.modulus)
    lift = p ** (shift_big - delta)
    Phi_big = [
        ExtElement(big_ext, [c * lift for c in x.man]) for x in Phi_tau
    ]
    power = semilinear_power(Phi_big, plan.a, b)
    coeffs = reverse_charpoly(power, b, big_ext)
    from .intutil import ordp_factorial

    trust = max(1, plan.N_phi - delta - ordp_factorial(b, p))
    chi_tilde = chi_coefficient_residues(coeffs, big_ext, trust)
    mode = plan.epsilon_mode
    epsilon = 1 if mode == "half" else None
    chi, epsilon = round_chi(
        chi_tilde,
        plan.N_chi,
        p**plan.a,
        plan.n,
        b,
        p,
        mode=mode,
        epsilon=epsilon,
    )
    return chi, epsilon


def prepare_family(spec_dict):
    """Build a validated family from the CLI JSON structure."""
    terms = {
        tuple(entry["exps"]): list(entry["t_coeffs"])
        for entry in spec_dict["terms"]
    }
    return validate_family(spec_dict["n"], spec_dict["d"], spec_dict["p"], terms)


def prepare_fibre(spec_dict):
    fd = spec_dict["fibre"]
    return FibreSpec(
        ext_degree=fd["ext_degree"],
        tau=list(fd["tau"]),
        modulus=fd.get("modulus"),
    )
