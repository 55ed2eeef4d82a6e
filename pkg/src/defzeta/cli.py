"""Command-line front end, file formats, and the Frobenius-series cache.

Input families are JSON:

    {"p": 3, "n": 3, "d": 4,
     "terms": [{"exps": [4,0,0,0], "t_coeffs": [1]}, ...],
     "fibre": {"ext_degree": 20, "modulus": [...] | null,
               "tau": [0,1,0,...]}}

Big integers in outputs are decimal strings.  The cached artifact is the
fibre-independent pair (s Phi mod t^K, plan metadata), keyed by a content
hash of the family, the prime, and the plan.
"""

import argparse
import hashlib
import json
import os
import sys
import time

from .connection import gauss_manin
from .diagfrob import DiagonalFibre, diag_frobenius_matrix
from .family import FamilyValidationError
from .ode import frobenius_series
from .pipeline import chi_from_phi_tau, compute_zeta, prepare_family, prepare_fibre
from .precision import build_plan
from .zeta import NoIntegerInWindow

CACHE_FORMAT_VERSION = 1


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.exit_code = code


def _load_job(path):
    with open(path) as fh:
        return json.load(fh)


def _json_out(data, args):
    text = json.dumps(data, sort_keys=True, separators=(",", ":"))
    print(text)


def _family_hash(family, p, plan):
    payload = {
        "n": family.n,
        "d": family.d,
        "p": p,
        "terms": sorted((list(u), cs) for u, cs in family.terms.items()),
        "N_phi": plan.N_phi,
        "K": plan.K,
        "s": [str(c) for c in plan.s_poly],
        "delta": plan.delta,
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def _cache_dir(args):
    return args.cache_dir or os.environ.get("DEFZETA_CACHE")


def _cache_load(path, key):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, ValueError):
        return None
    if data.get("format_version") != CACHE_FORMAT_VERSION:
        return None
    if data.get("family_hash") != key:
        return None
    body = json.dumps(data.get("entries"), sort_keys=True).encode()
    if hashlib.sha256(body).hexdigest() != data.get("entries_hash"):
        return None
    K = data["K"]
    b = data["b"]
    entries = data["entries"]
    sPhi = [[0] * (b * b) for _ in range(K)]
    for r in range(b):
        for c in range(b):
            for k, val in enumerate(entries[r][c]):
                sPhi[k][r * b + c] = int(val)
    return sPhi


def _cache_store(path, key, plan, sPhi, b):
    entries = [
        [[str(sPhi[k][r * b + c]) for k in range(plan.K)] for c in range(b)]
        for r in range(b)
    ]
    body = json.dumps(entries, sort_keys=True).encode()
    data = {
        "format_version": CACHE_FORMAT_VERSION,
        "family_hash": key,
        "p": plan.p,
        "delta": plan.delta,
        "N_phi": plan.N_phi,
        "K": plan.K,
        "b": b,
        "s": [str(c) for c in plan.s_poly],
        "entries_hash": hashlib.sha256(body).hexdigest(),
        "entries": entries,
    }
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(data, fh, sort_keys=True)
    os.replace(tmp, path)


def _parse_overrides(args):
    overrides = {}
    for item in args.override or []:
        key, _, val = item.partition("=")
        overrides[key] = int(val)
    manual_theta = json.loads(args.manual_theta) if args.manual_theta else None
    exponents = None
    if args.exponents:
        with open(args.exponents) as fh:
            exponents = json.load(fh)
    return overrides, manual_theta, exponents


def cmd_zeta(args):
    job = _load_job(args.input)
    family = prepare_family(job)
    fibre = prepare_fibre(job)
    overrides, manual_theta, exponents = _parse_overrides(args)
    cache_dir = _cache_dir(args)
    series_provider = None
    cache_state = {}
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)

        def series_provider(plan, conn, phi0):
            key = _family_hash(family, family.p, plan)
            path = os.path.join(cache_dir, f"series-{key[:32]}.json")
            cached = _cache_load(path, key)
            if cached is not None:
                cache_state["hit"] = True
                return cached
            sPhi, _ = frobenius_series(conn.G, conn.r, phi0, plan)
            _cache_store(path, key, plan, sPhi, plan.b)
            cache_state["hit"] = False
            return sPhi

    t0 = time.time()
    result, artifacts = compute_zeta(
        family,
        fibre,
        exponents_cfg=exponents,
        manual_theta=manual_theta,
        epsilon_mode=args.epsilon_mode,
        overrides=overrides,
        series_provider=series_provider,
    )
    elapsed = time.time() - t0
    counts = [result.predicted_count(i) for i in range(1, max(args.counts, 1) + 1)]
    payload = {
        "chi": [str(c) for c in result.chi],
        "epsilon": result.epsilon,
        "zeta": result.zeta_description()["zeta"],
        "plan": result.plan_dict,
        "predicted_counts": [str(c) for c in counts],
    }
    if args.timings:
        payload["timings_ms"] = dict(artifacts["timings"], total=round(elapsed * 1000, 1))
    if args.verify_oracle:
        from .oracle import verify_zeta

        report = verify_zeta(counts, family, fibre, args.verify_oracle)
        payload["oracle"] = [
            {"i": i, "predicted": str(e), "actual": str(a), "match": ok}
            for (i, e, a, ok) in report
        ]
        if not all(ok for (_, _, _, ok) in report):
            _json_out(payload, args)
            raise CliError(4, "oracle mismatch")
    _json_out(payload, args)


def cmd_connection(args):
    job = _load_job(args.input)
    family = prepare_family(job)
    conn = gauss_manin(family)
    payload = {
        "r": [str(c) for c in conn.r],
        "R": [str(c) for c in conn.R],
        "G": [[[str(c) for c in cs] for cs in row] for row in conn.G],
        "r_factor_degrees": sorted(len(f) - 1 for f, _ in conn.r_factors()),
    }
    _json_out(payload, args)


def cmd_diagfrob(args):
    job = _load_job(args.input)
    family = prepare_family(job)
    conn = gauss_manin(family)
    a = job.get("fibre", {}).get("ext_degree", 1)
    overrides, manual_theta, exponents = _parse_overrides(args)
    plan = build_plan(family, conn, a=a, exponents_cfg=exponents,
                      manual_theta=manual_theta, overrides=overrides)
    phi0 = diag_frobenius_matrix(
        DiagonalFibre(family.p, family.d, family.n, family.diagonal),
        conn.basis,
        plan.ladder["N_phi0"],
        plan.delta,
    )
    b = plan.b
    payload = {
        "N_phi0": plan.ladder["N_phi0"],
        "delta": plan.delta,
        "phi0": [[str(phi0[i * b + j]) for j in range(b)] for i in range(b)],
    }
    _json_out(payload, args)


def cmd_plan(args):
    job = _load_job(args.input)
    family = prepare_family(job)
    conn = gauss_manin(family)
    a = job.get("fibre", {}).get("ext_degree", 1)
    overrides, manual_theta, exponents = _parse_overrides(args)
    plan = build_plan(family, conn, a=a, exponents_cfg=exponents,
                      manual_theta=manual_theta,
                      epsilon_mode=args.epsilon_mode, overrides=overrides)
    _json_out(plan.as_dict(), args)


def cmd_expand(args):
    job = _load_job(args.input)
    family = prepare_family(job)
    conn = gauss_manin(family)
    a = job.get("fibre", {}).get("ext_degree", 1)
    overrides, manual_theta, exponents = _parse_overrides(args)
    plan = build_plan(family, conn, a=a, exponents_cfg=exponents,
                      manual_theta=manual_theta,
                      epsilon_mode=args.epsilon_mode, overrides=overrides)
    phi0 = diag_frobenius_matrix(
        DiagonalFibre(family.p, family.d, family.n, family.diagonal),
        conn.basis, plan.ladder["N_phi0"], plan.delta,
    )
    sPhi, _ = frobenius_series(conn.G, conn.r, phi0, plan)
    cache_dir = _cache_dir(args)
    if not cache_dir:
        raise CliError(2, "expand needs --cache-dir or DEFZETA_CACHE")
    os.makedirs(cache_dir, exist_ok=True)
    key = _family_hash(family, family.p, plan)
    path = os.path.join(cache_dir, f"series-{key[:32]}.json")
    _cache_store(path, key, plan, sPhi, plan.b)
    _json_out({"cached": path, "K": plan.K, "N_phi": plan.N_phi}, args)


def cmd_count(args):
    from .oracle import count_points

    job = _load_job(args.input)
    family = prepare_family(job)
    fibre = prepare_fibre(job)
    counts = []
    for i in range(1, args.counts + 1):
        counts.append(str(count_points(family, fibre, i)))
    _json_out({"counts": counts}, args)


def cmd_hodge(args):
    from .cohomology import MonomialBasis

    job = _load_job(args.input)
    family = prepare_family(job)
    basis = MonomialBasis(family.d, family.n)
    _json_out(
        {"hodge": list(basis.hodge_numbers()), "b": basis.b}, args
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="defzeta",
        description="Zeta functions of smooth projective hypersurfaces "
        "over finite fields by p-adic deformation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="JSON job description")
    common.add_argument("--exponents", help="JSON file with connection exponents")
    common.add_argument(
        "--manual-theta",
        help='JSON dict of per-disk pole-bound overrides, e.g. {"inf": 9}; '
        "overrides may only raise computed bounds",
    )
    common.add_argument(
        "--override",
        action="append",
        help="raise a planned precision, e.g. N_phi=50 or Np_C=80",
    )
    common.add_argument(
        "--epsilon-mode",
        choices=["full", "half", "adaptive"],
        default=None,
        help="how much of chi to round directly (default: half for even n)",
    )
    common.add_argument("--cache-dir", help="series cache directory")
    common.add_argument("--timings", action="store_true", help="include timings")
    common.add_argument(
        "--counts", type=int, default=3, help="how many point counts to report"
    )
    z = sub.add_parser("zeta", parents=[common], help="full pipeline")
    z.add_argument(
        "--verify-oracle",
        type=int,
        metavar="IMAX",
        help="check predicted counts against enumeration up to F_(q^IMAX)",
    )
    z.set_defaults(func=cmd_zeta)
    sub.add_parser("connection", parents=[common]).set_defaults(func=cmd_connection)
    sub.add_parser("diagfrob", parents=[common]).set_defaults(func=cmd_diagfrob)
    sub.add_parser("plan", parents=[common]).set_defaults(func=cmd_plan)
    sub.add_parser("expand", parents=[common]).set_defaults(func=cmd_expand)
    sub.add_parser("count", parents=[common]).set_defaults(func=cmd_count)
    sub.add_parser("hodge", parents=[common]).set_defaults(func=cmd_hodge)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FamilyValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NoIntegerInWindow as exc:
        print(f"rounding failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
