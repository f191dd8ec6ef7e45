"""Command-line front end: ``chanres <verb> [options]``.

Exit codes: 0 success, 2 validation error (bad flag, unreadable or invalid
file, budget exceeded), 3 solver failure.  Every verb prints a single
document in the requested format (``--format table|json|csv``).  Distances
are half diamond norms; entropic quantities are in bits.  The default solver
tolerance can be overridden with the ``CHANRES_SOLVER_TOL`` environment
variable or ``--tol``.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__ as PACKAGE_VERSION
from . import _accel
from .channel import Channel, load_channel, save_channel
from .conic import SolverOptions
from .errors import BudgetExceeded, ChanresError, InvalidInput, SolverFailure
from .freesets import FreeSetSpec, axiom_check, load_free_set
from .monotones import (
    FreeEnergyMonotone,
    channel_dmax,
    channel_dmax_smooth,
    cq_asymptotic_cost,
    generating_power,
    i_max,
    increasing_power,
    monotone_suite,
    robustness,
)
from .norms import diamond_distance, diamond_distance_to_free
from .protocols import convex_split, erasure_protocol, verify_simulation
from .report import FORMATS, emit
from .states import majorizes

BUILTIN_FREE = ("mio", "constant", "maxmixed", "gibbs")


class UsageError(Exception):
    """A validation problem attributable to one flag or file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2) itself; keep control of the stream
        raise UsageError(message)


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def _load(path: str, flag: str) -> Channel:
    try:
        return load_channel(path)
    except FileNotFoundError:
        raise UsageError(f"{flag}: file not found: {path}")
    except (OSError, InvalidInput, ValueError) as exc:
        raise UsageError(f"{flag}: invalid channel file {path}: {exc}")


def _floats(text: str, flag: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected a comma-separated list of numbers, got {text!r}")


def _free_set(args, din: int, dout: int) -> FreeSetSpec:
    name = args.free
    if name is None:
        raise UsageError("--free is required for this verb")
    if name in BUILTIN_FREE:
        if name == "gibbs":
            if args.energies is None or args.beta is None:
                raise UsageError("--free gibbs needs --energies and --beta")
            h = np.diag(_floats(args.energies, "--energies"))
            try:
                return FreeSetSpec.gibbs(h, args.beta, din, dout)
            except ChanresError as exc:
                raise UsageError(f"--free gibbs: {exc}")
        return getattr(FreeSetSpec, name)(din, dout)
    path = Path(name)
    if not path.exists():
        raise UsageError(f"--free: expected one of {', '.join(BUILTIN_FREE)} or a free-set file; "
                         f"file not found: {name}")
    try:
        spec = load_free_set(path)
        return spec.at(din, dout)
    except (ChanresError, ValueError) as exc:
        raise UsageError(f"--free: invalid free-set file {name}: {exc}")


def _eps(value: Optional[float], flag: str = "--eps") -> float:
    v = 0.0 if value is None else float(value)
    if not (0.0 <= v <= 1.0):
        raise UsageError(f"{flag}: must lie in [0, 1], got {v}")
    return v


def _options(args) -> SolverOptions:
    opts = SolverOptions.from_env()
    if getattr(args, "tol", None) is not None:
        if args.tol <= 0:
            raise UsageError("--tol: must be positive")
        opts.gap_tol = opts.feas_tol = float(args.tol)
    return opts


def _provenance(args, opts: SolverOptions, status: Optional[str] = None, **extra) -> dict:
    prov = {
        "package": "chanres",
        "version": PACKAGE_VERSION,
        "kernel_backend": _accel.backend(),
        "solver": {"gap_tol": opts.gap_tol, "feas_tol": opts.feas_tol, "max_iters": opts.max_iters},
        "seed": getattr(args, "seed", None),
    }
    if status is not None:
        prov["solver_status"] = status
    prov.update(extra)
    return prov


# ---------------------------------------------------------------------------
# verbs; each returns (inputs, params, results, provenance-extras, csv columns)
# ---------------------------------------------------------------------------


def _v_dmax(args, opts):
    a, b = _load(args.lhs, "--lhs"), _load(args.rhs, "--rhs")
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        raise UsageError("--rhs: channel dimensions differ from --lhs")
    eps = _eps(args.eps)
    if eps > 0:
        r = channel_dmax_smooth(a, b, eps, opts)
        lb = None if math.isnan(r.state_lower_bound) else r.state_lower_bound
        res = {"dmax_eps_bits": r.value, "state_lower_bound_bits": lb}
        if args.witness_out and r.smoothed is not None:
            save_channel(r.smoothed, args.witness_out)
        res["witness_path"] = args.witness_out if (args.witness_out and r.smoothed is not None) else None
        diag = {"solver_status": r.status, "state_bound_status": r.state_bound_status}
        return {"lhs": args.lhs, "rhs": args.rhs}, {"eps": eps}, res, diag, None
    val = channel_dmax(a, b, method=args.method, options=opts)
    return {"lhs": args.lhs, "rhs": args.rhs}, {"eps": 0.0, "method": args.method}, {"dmax_bits": val}, {}, None


def _v_robust(args, opts):
    n = _load(args.channel, "channel")
    spec = _free_set(args, n.dim_in, n.dim_out)
    eps = _eps(args.eps)
    r = robustness(n, spec, eps, opts)
    witness = None
    if args.witness_out:
        save_channel(r.optimal_free, args.witness_out)
        witness = args.witness_out
    res = {"R": r.robustness, "LR_bits": r.log_robustness, "witness_path": witness}
    return ({"channel": args.channel}, {"free": spec.describe(), "eps": eps}, res,
            {"solver_status": r.status, "iterations": r.solve.iterations if r.solve else None}, None)


def _v_imax(args, opts):
    n = _load(args.channel, "channel")
    return {"channel": args.channel}, {}, {"imax_bits": i_max(n, opts)}, {}, None


def _v_diamond(args, opts):
    a, b = _load(args.lhs, "--lhs"), _load(args.rhs, "--rhs")
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        raise UsageError("--rhs: channel dimensions differ from --lhs")
    return ({"lhs": args.lhs, "rhs": args.rhs}, {}, {"half_diamond_distance": diamond_distance(a, b, opts)},
            {}, None)


def _v_dist_free(args, opts):
    n = _load(args.channel, "channel")
    spec = _free_set(args, n.dim_in, n.dim_out)
    r = diamond_distance_to_free(n, spec, opts)
    witness = None
    if args.witness_out:
        save_channel(r.free_channel, args.witness_out)
        witness = args.witness_out
    return ({"channel": args.channel}, {"free": spec.describe()},
            {"half_diamond_distance_to_free": r.value, "witness_path": witness},
            {"solver_status": r.solve.status}, None)


def _v_power(args, opts):
    n = _load(args.channel, "channel")
    if args.monotone == "free_energy":
        if args.energies is None or args.beta is None:
            raise UsageError("--monotone free_energy needs --energies and --beta")
        omega = FreeEnergyMonotone(np.diag(_floats(args.energies, "--energies")), args.beta)
    else:
        omega = "coherence"
    fn = increasing_power if args.kind == "ip" else generating_power
    try:
        r = fn(n, omega, complete=args.complete, starts=args.starts, seed=args.seed)
    except ChanresError as exc:
        raise UsageError(f"--monotone: {exc}")
    unit = "energy" if args.monotone == "free_energy" else "bits"
    res = {"value": r.value, "unit": unit, "certified": r.certified, "ancilla_dim": r.ancilla_dim_used}
    return ({"channel": args.channel},
            {"monotone": args.monotone, "kind": args.kind, "complete": args.complete, "starts": args.starts},
            res, {}, None)


def _v_convex_split(args, opts):
    a, b = _load(args.alpha, "--alpha"), _load(args.beta_channel, "--beta")
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        raise UsageError("--beta: channel dimensions differ from --alpha")
    if args.n < 1:
        raise UsageError("--n: must be at least 1")
    try:
        r = convex_split(a, b, args.n, options=opts)
    except BudgetExceeded as exc:
        raise UsageError(f"--n: {exc}")
    except ChanresError as exc:
        if isinstance(exc, SolverFailure):
            raise
        raise UsageError(f"--alpha/--beta: {exc}")
    res = {"n": r.n, "lambda": r.lam, "distance": r.measured_distance, "bound": r.bound,
           "shortcut": r.used_shortcut, "dim": r.gamma_dim, "method": r.method}
    return ({"alpha": args.alpha, "beta": args.beta_channel}, {"n": args.n}, res, {},
            ["n", "lambda", "distance", "bound", "shortcut", "dim"])


def _v_erasure(args, opts):
    n = _load(args.channel, "channel")
    spec = _free_set(args, n.dim_in, n.dim_out)
    if args.eps is None or args.eta is None:
        raise UsageError("--eps and --eta are required")
    if not (0.0 < args.eta < args.eps < 1.0):
        raise UsageError("--eta/--eps: need 0 < eta < eps < 1")
    r = erasure_protocol(n, spec, args.eps, args.eta, options=opts)
    res = r.to_dict()
    return ({"channel": args.channel}, {"free": spec.describe(), "eps": args.eps, "eta": args.eta},
            res, {}, None)


def _v_simulate_check(args, opts):
    n = _load(args.channel, "channel")
    target = _load(args.target, "--target")
    pre, post = _load(args.pre, "--pre"), _load(args.post, "--post")
    spec = _free_set(args, target.dim_in, target.dim_out)
    eps = _eps(args.eps)
    try:
        r = verify_simulation(n, target, pre, post, spec, eps, options=opts)
    except InvalidInput as exc:
        raise UsageError(f"--pre/--post: {exc}")
    return ({"channel": args.channel, "target": args.target, "pre": args.pre, "post": args.post},
            {"free": spec.describe(), "eps": eps}, r.to_dict(), {}, None)


def _v_axioms(args, opts):
    spec = _free_set(args, args.dim_in, args.dim_out or args.dim_in)
    rep = axiom_check(spec, trials=args.trials, seed=args.seed)
    rows = [{"axiom": f.axiom, "name": f.name, "status": f.status} for f in rep.findings]
    return ({}, {"free": spec.describe(), "trials": args.trials},
            {"violations": len(rep.violations), "rows": rows, "columns": ["axiom", "name", "status"]}, {}, None)


def _v_monotone_suite(args, opts):
    spec = _free_set(args, args.dim_in, args.dim_out or args.dim_in)
    rep = monotone_suite(spec, trials=args.trials, seed=args.seed, options=opts)
    rows = [v.to_dict() for v in rep.violations]
    return ({}, {"free": spec.describe(), "trials": args.trials},
            {"checks": rep.checks, "violations": len(rows), "rows": rows,
             "columns": ["check", "trial", "lhs", "rhs", "detail"]}, {}, None)


def _v_majorize(args, opts):
    p, q = _floats(args.p, "--p"), _floats(args.q, "--q")
    try:
        val = majorizes(p, q)
    except InvalidInput as exc:
        raise UsageError(f"--p/--q: {exc}")
    return {}, {"p": p, "q": q}, {"majorizes": val}, {}, None


def _v_cq_cost(args, opts):
    n = _load(args.channel, "channel")
    try:
        val = cq_asymptotic_cost(n)
    except InvalidInput as exc:
        raise UsageError(f"channel: {exc}")
    return {"channel": args.channel}, {}, {"cost_bits": val}, {}, None


VERBS: Dict[str, Callable] = {
    "dmax": _v_dmax,
    "robust": _v_robust,
    "imax": _v_imax,
    "diamond": _v_diamond,
    "dist-free": _v_dist_free,
    "power": _v_power,
    "convex-split": _v_convex_split,
    "erasure": _v_erasure,
    "simulate-check": _v_simulate_check,
    "axioms": _v_axioms,
    "monotone-suite": _v_monotone_suite,
    "majorize": _v_majorize,
    "cq-cost": _v_cq_cost,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chanres", description="Resource theory of quantum channels: monotones and protocols.")
    sub = p.add_subparsers(dest="verb", metavar="VERB", parser_class=_Parser)
    sub.required = True

    def common(sp, free=False, seed=False):
        sp.add_argument("--format", choices=FORMATS, default="table", help="output format")
        sp.add_argument("--tol", type=float, default=None, help="solver gap/feasibility tolerance")
        if free:
            sp.add_argument("--free", default=None,
                            help="free set: mio | constant | maxmixed | gibbs | path to a free-set JSON file")
            sp.add_argument("--energies", default=None, help="comma-separated energy levels (gibbs)")
            sp.add_argument("--beta", type=float, default=None, help="inverse temperature (gibbs)")
        sp.add_argument("--seed", type=int, default=0 if seed else None, help="random seed")

    s = sub.add_parser("dmax", help="max-relative entropy between channels (bits)")
    s.add_argument("--lhs", required=True)
    s.add_argument("--rhs", required=True)
    s.add_argument("--eps", type=float, default=None, help="diamond smoothing radius")
    s.add_argument("--method", choices=("eig", "sdp"), default="eig")
    s.add_argument("--witness-out", default=None)
    common(s)

    s = sub.add_parser("robust", help="(smooth) robustness and log-robustness")
    s.add_argument("channel")
    s.add_argument("--eps", type=float, default=None)
    s.add_argument("--witness-out", default=None, help="write the optimal free channel here")
    common(s, free=True)

    s = sub.add_parser("imax", help="channel max-information (bits)")
    s.add_argument("channel")
    common(s)

    s = sub.add_parser("diamond", help="half diamond distance between channels")
    s.add_argument("--lhs", required=True)
    s.add_argument("--rhs", required=True)
    common(s)

    s = sub.add_parser("dist-free", help="half diamond distance to the free set")
    s.add_argument("channel")
    s.add_argument("--witness-out", default=None)
    common(s, free=True)

    s = sub.add_parser("power", help="increasing / generating power (heuristic lower bound)")
    s.add_argument("channel")
    s.add_argument("--monotone", choices=("coherence", "free_energy"), default="coherence")
    s.add_argument("--kind", choices=("ip", "gp"), default="ip")
    s.add_argument("--complete", action="store_true")
    s.add_argument("--starts", type=int, default=20)
    s.add_argument("--energies", default=None)
    s.add_argument("--beta", type=float, default=None)
    common(s, seed=True)

    s = sub.add_parser("convex-split", help="convex-split distance versus sqrt(lambda/n)")
    s.add_argument("--alpha", required=True)
    s.add_argument("--beta", dest="beta_channel", required=True)
    s.add_argument("--n", type=int, required=True)
    common(s)

    s = sub.add_parser("erasure", help="catalytic resource-erasure protocol")
    s.add_argument("channel")
    s.add_argument("--eps", type=float, default=None)
    s.add_argument("--eta", type=float, default=None)
    common(s, free=True)

    s = sub.add_parser("simulate-check", help="verify a free simulation triple")
    s.add_argument("--channel", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--pre", required=True)
    s.add_argument("--post", required=True)
    s.add_argument("--eps", type=float, default=None)
    common(s, free=True)

    for name, helptext in (("axioms", "empirical free-set axiom check"),
                           ("monotone-suite", "empirical log-robustness monotonicity suite")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--dim-in", type=int, default=2)
        s.add_argument("--dim-out", type=int, default=None)
        s.add_argument("--trials", type=int, default=20 if name == "axioms" else 50)
        common(s, free=True, seed=True)

    s = sub.add_parser("majorize", help="majorization test between probability vectors")
    s.add_argument("--p", required=True)
    s.add_argument("--q", required=True)
    common(s)

    s = sub.add_parser("cq-cost", help="asymptotic MIO cost of a classical-quantum channel (bits)")
    s.add_argument("channel")
    common(s)
    return p


def _write(text: str, stream) -> None:
    stream.write(text)
    stream.flush()


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except UsageError as exc:
        _write(f"chanres: error: {exc}\n", stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    fmt = args.format
    try:
        opts = _options(args)
        inputs, params, results, extra, columns = VERBS[args.verb](args, opts)
    except UsageError as exc:
        _write(f"chanres {args.verb}: error: {exc}\n", stderr)
        return 2
    except SolverFailure as exc:
        status = exc.status
        _write(f"chanres {args.verb}: solver failure (status={status}): {exc}\n", stderr)
        if fmt == "json":
            doc = {"verb": args.verb, "inputs": {}, "params": {}, "results": {"error": str(exc)},
                   "provenance": _provenance(args, SolverOptions.from_env(), status)}
            _write(emit(doc, "json"), stdout)
        return 3
    except (ChanresError, OSError, ValueError) as exc:
        _write(f"chanres {args.verb}: error: {exc}\n", stderr)
        return 2
    doc = {"verb": args.verb, "inputs": inputs, "params": params, "results": results,
           "provenance": _provenance(args, opts, **extra)}
    _write(emit(doc, fmt, columns), stdout)
    return 0


def main() -> None:  # pragma: no cover - console entry point
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
