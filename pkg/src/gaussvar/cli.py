"""Command-line front end.

Every subcommand accepts ``--config FILE`` (a JSON object whose keys are
the long option names with dashes replaced by underscores); explicit flags
override config values.  Reports are printed as tab-separated tables and,
with ``--out DIR``, written to ``DIR/<command>.tsv`` together with a JSON
summary ``DIR/<command>.json``.

``--config demo_bench`` (any bundled name without ``.json``) loads a
config shipped with the package.

Exit status: 0 when every requested assertion passes, 1 when one fails or
a prerequisite is not met, 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .reports import format_table, reports_table

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CONDITIONS = ("LH0", "Pinf_gamma", "infdecay", "P_mu", "diening_lebesgue", "maxdifp", "equivalence")


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# Config plumbing
# --------------------------------------------------------------------------

DEFAULTS: dict[str, dict[str, Any]] = {
    "check-exponent": {"spec": "const2", "dim": 2, "conditions": list(CONDITIONS), "seed": 0,
                       "n_balls": 1000, "n_pairs": 4000},
    "measure": {"center": [0.0], "radius": 1.0, "mc": False, "samples": 65536, "seed": 0, "tol": 1e-10},
    "norm": {"spec": "const2", "dim": 1, "function": "bump", "grid": 512, "box": 8.0, "trials": 0, "seed": 0},
    "riesz": {"variant": "new", "alpha": [1], "path": "spectral", "coeffs": None, "beta": [1],
              "points": None, "n_points": 10, "identity_suite": False, "degree": None, "trials": 100, "seed": 0,
              "tol": 5e-3},
    "kernel-verify": {"dims": [1, 2], "orders": [1, 2, 3], "eps": 0.05, "n_pairs": 1000, "seed": 0,
                      "box": 5.0, "threshold": 0.1},
    "maximal": {"spec": "inv_square", "dim": 1, "grid": None, "levels": None, "gamma": 0.5,
                "n_configs": 1000, "seed": 0, "force": False},
    "bench": {"spec": "inv_square", "dim": 1, "grid": None, "levels": None, "refine": True,
              "threshold": 0.05, "seed": 0, "force": False},
}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    if not os.path.exists(path):
        bundled = resources.files("gaussvar") / "data" / f"{path}.json"
        if bundled.is_file():
            path = str(bundled)
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return cfg


def _settings(args: argparse.Namespace) -> dict:
    cmd = args.command
    out = dict(DEFAULTS[cmd])
    cfg = _load_config(args.config)
    cfg.pop("command", None)
    unknown = set(cfg) - set(out)
    if unknown:
        raise UsageError(f"unknown config keys for {cmd}: {sorted(unknown)}")
    out.update(cfg)
    for k in DEFAULTS[cmd]:
        v = getattr(args, k, None)
        if v is not None and v is not False:
            out[k] = v
    if getattr(args, "no_refine", False):
        out["refine"] = False
    return out


def _spec(name_or_record, dim: int):
    from .exponents import ExponentSpec, get_spec, registry

    if isinstance(name_or_record, dict):
        return ExponentSpec.from_record(dict(name_or_record, dim=dim))
    try:
        return get_spec(name_or_record, dim)
    except KeyError:
        raise UsageError(f"unknown spec {name_or_record!r}; registry: {sorted(registry(dim))}") from None


def _emit(args, settings: dict, table: str, summary: dict, lines: list[str] = ()) -> None:
    sys.stdout.write(table)
    for line in lines:
        print(line)
    summary = dict(summary, command=args.command, settings=settings, version=__version__,
                   threads=_threads())
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{args.command}.tsv").write_text(table)
        # NaN and inf are written as null
        rec = json.loads(json.dumps(summary, default=_json), parse_constant=lambda c: None)
        (d / f"{args.command}.json").write_text(json.dumps(rec, indent=2, sort_keys=True) + "\n")


def _json(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    return str(o)


def _threads() -> int:
    v = os.environ.get("GAUSSVAR_THREADS", "1")
    try:
        n = int(v)
    except ValueError:
        raise UsageError(f"GAUSSVAR_THREADS must be a positive integer, got {v!r}") from None
    if n < 1:
        raise UsageError("GAUSSVAR_THREADS must be a positive integer")
    return n


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def cmd_check_exponent(args) -> int:
    from .exponents import (BallSampler, PairSampler, check_diening_lebesgue, check_infdecay, check_LH0,
                            check_maxdifp, check_P_mu, check_Pinf_gamma, equivalence_probe)

    s = _settings(args)
    spec = _spec(s["spec"], s["dim"])
    conds = s["conditions"]
    bad = [c for c in conds if c not in CONDITIONS]
    if bad:
        raise UsageError(f"unknown conditions {bad}; choose from {list(CONDITIONS)}")
    bs = BallSampler(seed=s["seed"])
    runners = {
        "LH0": lambda: check_LH0(spec, PairSampler(seed=s["seed"]), s["n_pairs"]),
        "Pinf_gamma": lambda: check_Pinf_gamma(spec),
        "infdecay": lambda: check_infdecay(spec),
        "P_mu": lambda: check_P_mu(spec, "gaussian", bs, s["n_balls"]),
        "diening_lebesgue": lambda: check_diening_lebesgue(spec, bs, s["n_balls"]),
        "maxdifp": lambda: check_maxdifp(spec, bs, 2 * s["n_balls"]),
    }
    reports, lines, ok = [], [], True
    for c in conds:
        if c == "equivalence":
            probe = equivalence_probe(spec, bs)
            state = "all pass" if probe["all_pass"] else ("all fail" if probe["consistent"] else "mixed")
            lines.append(f"equivalence: {state} ({'consistent' if probe['consistent'] else 'inconsistent'})")
            ok &= probe["all_pass"]
            continue
        r = runners[c]()
        reports.append(r)
        ok &= bool(r.verdict)
    summary = {"spec": spec.to_record(), "pass": ok, "reports": [r.to_record() for r in reports]}
    _emit(args, s, reports_table(reports), summary, lines)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_measure(args) -> int:
    from .gauss_measure import Ball, gaussian_ball_mc, log_gaussian_ball, lower_bound_gamma

    s = _settings(args)
    c = np.atleast_1d(np.asarray(s["center"], dtype=float))
    try:
        ball = Ball(c, s["radius"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    lg = log_gaussian_ball(ball.center, ball.radius, s["tol"])
    tag, lb = lower_bound_gamma(ball)
    row = [ball.dim, float(np.linalg.norm(c)), ball.radius, math.exp(lg), lg, tag, lb]
    cols = ["dim", "center_norm", "radius", "measure", "log_measure", "case", "variable_part"]
    summary = {"measure": math.exp(lg), "log_measure": lg, "case": tag, "variable_part": lb}
    if s["mc"]:
        mc = gaussian_ball_mc(ball, s["samples"], s["seed"])
        row += [mc.value, mc.stderr]
        cols += ["mc_value", "mc_stderr"]
        summary.update(mc_value=mc.value, mc_stderr=mc.stderr, seed=s["seed"])
    _emit(args, s, format_table([row], cols), summary)
    return EXIT_OK


def _test_function(name: str, d: int, seed: int):
    from .norms import gaussian_bump, random_bump_sum

    if name == "one":
        return lambda x: np.ones(np.asarray(x).shape[0])
    if name == "bump":
        return gaussian_bump(np.full(d, 0.5), 0.75)
    if name == "random":
        return random_bump_sum(np.random.default_rng(seed), d)
    raise UsageError(f"unknown function {name!r} (one, bump, random)")


def cmd_norm(args) -> int:
    from .exponents import conjugate_exponent
    from .grids import GridFunction
    from .norms import dual_norm_estimate, holder_check, luxemburg_norm, modular, random_bump_sum

    s = _settings(args)
    spec = _spec(s["spec"], s["dim"])
    d = s["dim"]
    grid = GridFunction.on_box(0.0, (-s["box"], s["box"]), s["grid"], d, "gaussian")
    f = grid.with_values(_test_function(s["function"], d, s["seed"])(grid.points))
    n = luxemburg_norm(f, spec)
    rows = [["norm", s["function"], n, modular(f, spec, lam=n) if n > 0 else 0.0, True]]
    ok = True
    if s["trials"]:
        rng = np.random.default_rng(s["seed"])
        hv = dv = 0
        for _ in range(s["trials"]):
            a = grid.with_values(random_bump_sum(rng, d)(grid.points))
            b = grid.with_values(random_bump_sum(rng, d)(grid.points))
            hv += not holder_check(a, b, spec).passed
            if spec.p_minus > 1:
                dv += not dual_norm_estimate(a, spec, [b]).upper_ok
        rows.append(["holder", f"trials={s['trials']}", float(hv), math.nan, hv == 0])
        rows.append(["dual_upper", f"trials={s['trials']}", float(dv), math.nan, dv == 0])
        ok = hv == 0 and dv == 0
    table = format_table(rows, ["quantity", "input", "value", "modular_at_norm", "pass"])
    _emit(args, s, table, {"norm": n, "pass": ok, "seed": s["seed"]})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_riesz(args) -> int:
    from .hermite import (DEFAULT_DEGREE_CAP, HermiteExpansion, TruncationError, max_coeff_error,
                          project_constants_out, random_expansion, riesz, synthesize)
    from .kernels import KernelFamily, pv_apply

    s = _settings(args)
    if s["identity_suite"]:
        rng = np.random.default_rng(s["seed"])
        rows, ok = [], True
        suite = s["identity_suite"]
        dims = [1, 2, 3] if suite is True else [int(suite)]
        for d in dims:
            N = s["degree"] or DEFAULT_DEGREE_CAP.get(d, 4)
            worst = 0.0
            for _ in range(s["trials"]):
                e = random_expansion(d, N, rng, zero_constant=False)
                acc = HermiteExpansion(d, N + 1, {})
                for i in range(d):
                    ei = tuple(int(j == i) for j in range(d))
                    acc = acc + riesz(ei, riesz(ei, e, "old"), "new").with_cap(N + 1)
                worst = max(worst, max_coeff_error(acc, project_constants_out(e).with_cap(N + 1)))
            rows.append([d, N, s["trials"], worst, worst <= 1e-13])
            ok &= worst <= 1e-13
        _emit(args, s, format_table(rows, ["dim", "degree", "trials", "max_coeff_error", "pass"]),
              {"pass": ok, "seed": s["seed"]})
        return EXIT_OK if ok else EXIT_FAIL

    alpha = tuple(int(a) for a in s["alpha"])
    if sum(alpha) < 1:
        raise UsageError("alpha must have |alpha| >= 1")
    d = len(alpha)
    if s["variant"] not in ("old", "new"):
        raise UsageError("variant must be old or new")
    if s["path"] not in ("spectral", "kernel", "both"):
        raise UsageError("path must be spectral, kernel or both")
    if s["coeffs"] is not None:
        e = HermiteExpansion.from_records(s["coeffs"])
        if e.dim != d:
            raise UsageError("coefficient record and alpha have different dimensions")
    else:
        beta = tuple(int(b) for b in s["beta"])
        if len(beta) != d:
            raise UsageError("beta and alpha must have the same length")
        e = HermiteExpansion.basis(beta)
    if s["points"] is not None:
        pts = np.atleast_2d(np.asarray(s["points"], dtype=float)).reshape(-1, d)
    else:
        rng = np.random.default_rng(s["seed"])
        pts = rng.uniform(-1.5, 1.5, (s["n_points"], d))
    rows, deltas = [], []
    spec_vals = kern_vals = None
    if s["path"] in ("spectral", "both"):
        try:
            spec_vals = synthesize(riesz(alpha, e, s["variant"]), pts)
        except TruncationError as exc:
            raise UsageError(str(exc)) from None
    if s["path"] in ("kernel", "both"):
        fam = KernelFamily.hermite(alpha)
        fn = lambda y: synthesize(e, y)  # noqa: E731
        kern_vals = np.array([pv_apply(fam, fn, x, variant=s["variant"]).value if e.coeffs else 0.0 for x in pts])
    for k, x in enumerate(pts):
        row = [";".join(f"{v:.6g}" for v in x)]
        row.append(float(spec_vals[k]) if spec_vals is not None else math.nan)
        row.append(float(kern_vals[k]) if kern_vals is not None else math.nan)
        dlt = abs(row[1] - row[2]) if spec_vals is not None and kern_vals is not None else math.nan
        row.append(dlt)
        deltas.append(dlt)
        rows.append(row)
    ok = True
    lines = []
    if s["path"] == "both":
        md = float(np.max(deltas)) if deltas else 0.0
        ok = md <= s["tol"]
        lines.append(f"max delta = {md:.6g}")
    table = format_table(rows, ["x", "spectral", "kernel", "delta"])
    _emit(args, s, table, {"pass": ok, "seed": s["seed"], "max_delta": max(deltas) if deltas else 0.0}, lines)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_kernel_verify(args) -> int:
    from .kernel_checks import PairSampler, boundsexp_check, default_alpha
    from .kernels import KernelFamily

    s = _settings(args)
    reports = []
    for d in s["dims"]:
        for m in s["orders"]:
            fam = KernelFamily.hermite(default_alpha(int(m), int(d)), eps=s["eps"])
            try:
                reports += boundsexp_check(fam, s["eps"], s["n_pairs"], PairSampler(s["box"], s["seed"]),
                                           threshold=s["threshold"])
            except ValueError as exc:
                raise UsageError(str(exc)) from None
    ok = all(r.passed for r in reports)
    _emit(args, s, reports_table(reports), {"pass": ok, "seed": s["seed"], "reports": [r.to_record() for r in reports]})
    return EXIT_OK if ok else EXIT_FAIL


def _prerequisites(spec, s) -> tuple[bool, dict, str]:
    from .maximal import certify

    cert = certify(spec, seed=s["seed"])
    ok = cert["certified"] and spec.p_minus > 1
    msg = ", ".join(f"{k}={'pass' if cert[k].verdict else 'fail'}" for k in ("LH0", "Pinf_gamma", "P_mu"))
    return ok, cert, msg


def cmd_maximal(args) -> int:
    from .grids import GridFunction
    from .maximal import (ConfigSampler, default_grid_size, jensen_variable_check, lemma_A1_check, lemma_A4_check,
                          make_instance, normalize_half, pointwise_maximal_check, q_instance)
    from .norms import random_bump_sum

    s = _settings(args)
    spec = _spec(s["spec"], s["dim"])
    d = s["dim"]
    ok_pre, cert, msg = _prerequisites(spec, s)
    if not ok_pre and not s["force"]:
        print(f"prerequisites not met for {spec.name}: {msg} (use --force for a diagnostic run)", file=sys.stderr)
        return EXIT_FAIL
    c_mu = max(cert["c_mu"], 1e-300) if math.isfinite(cert["c_mu"]) else 1e-300
    inst = make_instance(spec, d, levels=s["levels"], gamma=s["gamma"], c_mu=min(c_mu, 1.0 - 1e-12))
    n = s["grid"] or default_grid_size(d)
    grid = GridFunction.on_box(0.0, (-10.0, 10.0), n, d, "gaussian")
    rng = np.random.default_rng(s["seed"])
    f = grid.with_values(random_bump_sum(rng, d)(grid.points))
    c, r, x = ConfigSampler(seed=s["seed"]).sample(s["n_configs"], d)
    xx = rng.uniform(-6, 6, (s["n_configs"], d))
    yy = xx + rng.standard_normal((s["n_configs"], d))
    qi = q_instance(inst)
    reports = [
        lemma_A1_check(inst, np.linspace(0.0, 1.0, 17), c, r, x),
        jensen_variable_check(inst, normalize_half(f, spec), c, r, x),
        lemma_A4_check(spec, inst.p_inf, np.linspace(0.0, 1.0, 64), xx, yy),
        pointwise_maximal_check(qi, normalize_half(f, qi.spec)),
    ]
    ok = ok_pre and all(rep.passed for rep in reports)
    lines = [f"prerequisites: {msg}"]
    _emit(args, s, reports_table(reports), {"pass": ok, "seed": s["seed"], "c_mu": inst.c_mu, "delta": inst.delta,
                                             "reports": [rep.to_record() for rep in reports]}, lines)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bench(args) -> int:
    from .maximal import boundedness_experiment, default_grid_size, make_instance
    from .reports import relative_change

    s = _settings(args)
    spec = _spec(s["spec"], s["dim"])
    d = s["dim"]
    ok_pre, cert, msg = _prerequisites(spec, s)
    if not ok_pre and not s["force"]:
        print(f"prerequisites not met for {spec.name}: {msg} (use --force for a diagnostic run)", file=sys.stderr)
        return EXIT_FAIL
    inst = make_instance(spec, d, levels=s["levels"], c_mu=1.0 - 1e-12)
    n = s["grid"] or default_grid_size(d)
    grids = [n, 2 * n] if s["refine"] else [n]
    rows, Ks = [], []
    for g in grids:
        res = boundedness_experiment(inst, n=g, require=not s["force"])
        Ks.append(res.K)
        rows += [[g] + r for r in res.rows]
    table = format_table(rows, ["grid", "function", "norm_f", "norm_Mf", "ratio"])
    change = relative_change(Ks[0], Ks[-1])
    ok = ok_pre and all(math.isfinite(k) for k in Ks) and change < s["threshold"]
    lines = [f"empirical K = {Ks[-1]:.10g}"]
    if s["refine"]:
        lines.append(f"refinement change = {change:.6g}")
    if not ok_pre:
        lines.append(f"prerequisites: {msg} (diagnostic run)")
    _emit(args, s, table, {"pass": ok, "K": Ks, "refinement_change": change, "seed": s["seed"],
                           "family_size": len(inst.family)}, lines)
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaussvar", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"gaussvar {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--out", help="directory for <command>.tsv and <command>.json")
        sp.add_argument("--seed", type=int)
        return sp

    sp = add("check-exponent", "fit the exponent-condition constants of a spec")
    sp.add_argument("--spec")
    sp.add_argument("--dim", type=int)
    sp.add_argument("--conditions", type=lambda t: t.split(","), help=f"comma list from {','.join(CONDITIONS)}")
    sp.add_argument("--n-balls", type=int)
    sp.add_argument("--n-pairs", type=int)
    sp.set_defaults(func=cmd_check_exponent)

    sp = add("measure", "Gaussian measure of a ball and its lower bound")
    sp.add_argument("--center", type=_floats, help="comma-separated coordinates")
    sp.add_argument("--radius", type=float)
    sp.add_argument("--mc", action="store_true", help="add a Monte Carlo estimate")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--tol", type=float)
    sp.set_defaults(func=cmd_measure)

    sp = add("norm", "Luxemburg norm of a test function; optional Hoelder trials")
    sp.add_argument("--spec")
    sp.add_argument("--dim", type=int)
    sp.add_argument("--function", choices=["one", "bump", "random"])
    sp.add_argument("--grid", type=int)
    sp.add_argument("--box", type=float)
    sp.add_argument("--trials", type=int)
    sp.set_defaults(func=cmd_norm)

    sp = add("riesz", "Riesz transforms by the spectral and/or kernel path")
    sp.add_argument("--variant", choices=["old", "new"])
    sp.add_argument("--alpha", type=_ints)
    sp.add_argument("--beta", type=_ints, help="input f = h_beta")
    sp.add_argument("--path", choices=["spectral", "kernel", "both"])
    sp.add_argument("--n-points", type=int)
    sp.add_argument("--identity-suite", type=int, nargs="?", const=True,
                    help="check sum R*_i R_i = I - pi_0 (optionally for one dimension)")
    sp.add_argument("--degree", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--tol", type=float)
    sp.set_defaults(func=cmd_riesz)

    sp = add("kernel-verify", "fit the pointwise kernel-bound constants")
    sp.add_argument("--dims", type=_ints)
    sp.add_argument("--orders", type=_ints)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--n-pairs", type=int)
    sp.add_argument("--box", type=float)
    sp.add_argument("--threshold", type=float)
    sp.set_defaults(func=cmd_kernel_verify)

    for name, help_, fn in (("maximal", "run the maximal-function inequality chain", cmd_maximal),
                            ("bench", "boundedness experiment for the Gaussian maximal function", cmd_bench)):
        sp = add(name, help_)
        sp.add_argument("--spec")
        sp.add_argument("--dim", type=int)
        sp.add_argument("--grid", type=int)
        sp.add_argument("--levels", type=int)
        sp.add_argument("--force", action="store_true", help="run even if the spec fails the prerequisites")
        if name == "maximal":
            sp.add_argument("--gamma", type=float)
            sp.add_argument("--n-configs", type=int)
        else:
            sp.add_argument("--no-refine", action="store_true", help="skip the grid-doubling run")
            sp.add_argument("--threshold", type=float)
        sp.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _threads()
        return args.func(args)
    except UsageError as exc:
        print(f"gaussvar {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
