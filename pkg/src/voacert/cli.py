"""Command-line surface.

Verbs: build, axioms, norms, certify, suite, export.  Exit codes:
0 success, 1 violation found, 2 bad configuration or usage, 3 internal
numerical failure (non-positive Gram and friends).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys

from .bound_certifier import (bootstrap_analyze, certify_orbifold_chain,
                              certify_pair_bound, certify_primary_bound,
                              certify_product_lemma, certify_v1_bound,
                              certify_virasoro_bound,
                              certify_zero_mode_product, fit_recursion,
                              measure_sector_growth, orbifold_average,
                              trace_domination_check)
from .config import SuiteConfig, load_config
from .errors import ConfigError, ModelBugError, VoacertError
from .graded_fock import Automorphism, BasisState, Model, StateVector, \
    build_model, heisenberg_spec, lattice_spec, virasoro_spec
from .mode_engine import sample_residuals
from .norm_lab import norm_table
from .scalars import Q, rat_from_str
from .serialize import ModelCache, save_model, spec_from_dict, spec_to_dict
from .unitary_structure import family_of

REPORT_SCHEMA = "voacert-report/1"

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


# ---------------------------------------------------------------------------
# state selectors


def resolve_state(model: Model, selector: str) -> StateVector:
    """Parse a state selector.

    Tokens: `nu`, `vac`, `top:<sector>`, `basis:<degree>:<pos>`, joined by
    `+` with an optional rational prefix `c*`.
    """
    total = StateVector()
    for token in selector.split("+"):
        token = token.strip()
        coeff = Q(1)
        if "*" in token:
            pre, token = token.split("*", 1)
            coeff = rat_from_str(pre)
        if token == "nu":
            part = model.nu.copy()
        elif token == "vac":
            part = StateVector.basis(model.vacuum)
        elif token.startswith("top:"):
            sector = int(token.split(":")[1])
            part = StateVector.basis(BasisState(sector, ()))
        elif token.startswith("basis:"):
            _, deg, pos = token.split(":")
            part = StateVector.basis(model.basis.states(int(deg))[int(pos)])
        else:
            raise ConfigError(f"bad state selector {token!r}")
        total = total + part.scale(coeff)
    return total


def _spec_from_args(args) -> "ModelSpec":
    if args.kind == "heisenberg":
        return heisenberg_spec(args.rank, args.N)
    if args.kind == "virasoro":
        if args.c is None:
            raise ConfigError("virasoro needs --c")
        return virasoro_spec(args.c, args.N)
    if args.kind == "lattice":
        if args.q is None:
            raise ConfigError("lattice needs --q")
        return lattice_spec(args.q, args.N)
    raise ConfigError(f"unknown kind {args.kind!r}")


def _add_model_flags(parser):
    parser.add_argument("--kind", required=True,
                        choices=["heisenberg", "virasoro", "lattice"])
    parser.add_argument("--N", type=int, required=True)
    parser.add_argument("--c", help="central charge (virasoro), e.g. 1/2")
    parser.add_argument("--q", type=int, help="lattice square (even)")
    parser.add_argument("--rank", type=int, default=1)
    parser.add_argument("--pad", type=int, default=None,
                        help="internal working margin above N")


# ---------------------------------------------------------------------------
# check runners (shared by `certify` and `suite`)


def run_check(model: Model, check: dict, tolerance: float,
              output_dir: str = None) -> dict:
    ctype = check["type"]
    name = check.get("name", ctype)
    m_max = check.get("m_max", 4)
    n_max = check.get("n_max", min(6, model.N))
    out = {"name": name, "type": ctype, "model": model.spec.describe()}

    if ctype == "axioms":
        samples = check.get("samples", 100)
        seed = check.get("seed", 0)
        cap = check.get("degree_cap")
        identities = {}
        ok = True
        for ident in ("borcherds", "skewsymmetry", "commutator",
                      "translation"):
            count, failures = sample_residuals(
                model, ident, samples, seed=seed, degree_cap=cap)
            identities[ident] = {
                "checked": count,
                "failures": [repr(t) for t, _ in failures],
            }
            ok = ok and not failures
        out.update({"identities": identities, "pass": ok})
        return out

    if ctype == "unitarity":
        fam = family_of(model)
        pd = {d: fam.positive_definite(d) for d in range(model.N + 1)}
        ok = all(pd.values())
        out.update({"positive_definite": {str(k): v for k, v in pd.items()},
                    "pass": ok})
        return out

    if ctype == "norms":
        state = resolve_state(model, check.get("state", "nu"))
        table = norm_table(model, state, range(-m_max, m_max + 1), n_max,
                           owner=check.get("state", "nu"))
        if output_dir:
            path = os.path.join(output_dir, f"{name}.csv")
            table.write_csv(path)
            out["csv"] = os.path.basename(path)
        out.update({"table": json.loads(table.to_json()), "pass": True})
        return out

    if ctype == "bootstrap":
        kseq = measure_sector_growth(model, n_max)
        d = check.get("d", 1)
        d_const, s = fit_recursion(kseq, d)
        verdict = bootstrap_analyze(kseq, d_const, s, d, tol=tolerance)
        out.update({"K": [format(v, ".12g") for v in kseq],
                    "D": d_const, "s": s, "d": d,
                    "verdict": verdict.to_dict(),
                    "pass": verdict.kind == "certified"})
        return out

    if ctype == "orbifold":
        degree = check.get("degree", 1)
        s = float(rat_from_str(check.get("s", "1")))
        auts = [Automorphism(model, "charge_conjugation")]
        if model.spec.kind == "lattice":
            auts.append(Automorphism(model, "torus_phase", Q(1, 2)))
        x, avg_report = orbifold_average(model, degree, auts)
        state = resolve_state(
            model, check.get("state", f"basis:{degree}:0"))
        chain = certify_orbifold_chain(model, state, x, s, n_max,
                                       tol=tolerance)
        ok = avg_report.passed and chain.passed
        out.update({"average": avg_report.to_dict(),
                    "chain": chain.to_dict(), "pass": ok})
        return out

    if ctype == "trace_domination":
        state = resolve_state(model, check["state"])
        qdamp = rat_from_str(check.get("q", "1/2"))
        report = trace_domination_check(model, state, qdamp, n_max,
                                        tol=tolerance)
        out.update({"report": report.to_dict(), "pass": report.passed})
        return out

    state = resolve_state(model, check.get("state", "nu"))
    if ctype == "virasoro_bound":
        report = certify_virasoro_bound(model, state, m_max, n_max,
                                        tol=tolerance)
    elif ctype == "v1_bound":
        report = certify_v1_bound(model, state, m_max, n_max, tol=tolerance)
    elif ctype == "product_lemma":
        report = certify_product_lemma(model, state, m_max, n_max,
                                       tol=tolerance)
    elif ctype == "primary_bound":
        report = certify_primary_bound(model, state, m_max, n_max,
                                       tol=tolerance)
    elif ctype == "pair_bound":
        other = resolve_state(model, check.get("with", "nu"))
        report = certify_pair_bound(model, state, other, m_max, n_max,
                                    tol=tolerance)
    elif ctype == "zero_mode_product":
        other = resolve_state(model, check.get("with", "nu"))
        report = certify_zero_mode_product(model, other, check.get("p", 0),
                                           state, n_max, tol=tolerance)
    else:
        raise ConfigError(f"unknown check type {ctype!r}")
    out.update({"report": report.to_dict(), "pass": report.passed})
    return out


# ---------------------------------------------------------------------------
# suite execution


def _task(spec_dict, pad, corrupt, check, tolerance, output_dir):
    spec = spec_from_dict(spec_dict)
    key = json.dumps(spec_dict, sort_keys=True) + f"|{pad}|{corrupt}"
    model = _task_models.get(key)
    if model is None:
        model = build_model(spec, corrupt=corrupt, pad=pad)
        _task_models[key] = model
    return run_check(model, check, tolerance, output_dir)


_task_models = {}


def run_suite(config: SuiteConfig, output_dir: str = None,
              jobs: int = None) -> dict:
    output_dir = output_dir or config.output_dir
    os.makedirs(output_dir, exist_ok=True)
    jobs = jobs if jobs is not None else config.jobs
    if jobs == 0:
        jobs = int(os.environ.get("VOACERT_JOBS", 0)) or \
            (os.cpu_count() or 1)
    jobs = max(1, min(jobs, len(config.checks) or 1))
    cache = ModelCache(config.cache_dir) if config.cache_dir else None

    results = []
    if jobs == 1 or len(config.checks) <= 1:
        models = {}
        for check in config.checks:
            mname = check["model"]
            if mname not in models:
                spec = config.models[mname]
                pad = config.pads.get(mname)
                corrupt = config.corrupts.get(mname)
                if cache is not None and corrupt is None:
                    models[mname] = cache.get_or_build(spec, pad)
                else:
                    models[mname] = build_model(spec, corrupt=corrupt,
                                                pad=pad)
            results.append(run_check(models[mname], check,
                                     config.tolerance, output_dir))
    else:
        with concurrent.futures.ProcessPoolExecutor(jobs) as pool:
            futures = []
            for check in config.checks:
                mname = check["model"]
                futures.append(pool.submit(
                    _task, spec_to_dict(config.models[mname]),
                    config.pads.get(mname), config.corrupts.get(mname),
                    check, config.tolerance, output_dir))
            # merge strictly in config order, not completion order
            results = [f.result() for f in futures]

    bundle = {
        "schema": REPORT_SCHEMA,
        "tolerance": config.tolerance,
        "results": results,
        "pass": all(r["pass"] for r in results),
    }
    path = os.path.join(output_dir, "suite.json")
    with open(path, "w") as fh:
        json.dump(bundle, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return bundle


def export_bundle(bundle_path: str, fmt: str, out_dir: str):
    with open(bundle_path) as fh:
        bundle = json.load(fh)
    if bundle.get("schema") != REPORT_SCHEMA:
        raise ConfigError("not a report bundle")
    if fmt == "json":
        path = os.path.join(out_dir, "bundle.json")
        with open(path, "w") as fh:
            json.dump(bundle, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return [path]
    written = []
    for result in bundle["results"]:
        cells = None
        if "report" in result:
            cells = result["report"].get("cells")
        elif "table" in result:
            cells = [{"m": c["m"], "n": c["n"], "lhs": c["norm"],
                      "rhs": "", "margin": ""}
                     for c in result["table"]["cells"]]
        if not cells:
            continue
        path = os.path.join(out_dir, f"{result['name']}.csv")
        with open(path, "w") as fh:
            fh.write("m,n,lhs,rhs,margin\n")
            for cell in cells:
                fh.write(f"{cell['m']},{cell['n']},{cell['lhs']},"
                         f"{cell['rhs']},{cell['margin']}\n")
        written.append(path)
    if not written:
        raise ConfigError("empty table: nothing to export")
    return written


# ---------------------------------------------------------------------------
# entry point


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="voacert",
        description="exact truncated vertex-algebra models and "
                    "energy-bound certification")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("build", help="build a model and save its container")
    _add_model_flags(p)
    p.add_argument("--out", default="model.json")

    p = sub.add_parser("axioms", help="randomized exact identity checks")
    _add_model_flags(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--degree-cap", type=int, default=None)
    p.add_argument("--json", dest="json_out")

    p = sub.add_parser("norms", help="graded norm table for one state")
    _add_model_flags(p)
    p.add_argument("--state", default="nu")
    p.add_argument("--m-max", type=int, default=4)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--csv")
    p.add_argument("--json", dest="json_out")

    p = sub.add_parser("certify", help="run one bound certification")
    _add_model_flags(p)
    p.add_argument("--check", required=True)
    p.add_argument("--state", default="nu")
    p.add_argument("--with", dest="with_state", default="nu")
    p.add_argument("--m-max", type=int, default=4)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--s", default="1")
    p.add_argument("--damping", default="1/2")
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", dest="json_out")

    p = sub.add_parser("suite", help="run a configured certification suite")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=None)

    p = sub.add_parser("export", help="re-emit a report bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("--out", default=".")
    return parser


def _emit(payload: dict, json_out):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if json_out:
        with open(json_out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "build":
            model = build_model(_spec_from_args(args), pad=args.pad)
            save_model(model, args.out)
            print(f"built {model.spec.describe()} -> {args.out}")
            return EXIT_OK
        if args.verb == "axioms":
            model = build_model(_spec_from_args(args), pad=args.pad)
            check = {"name": "axioms", "type": "axioms",
                     "samples": args.samples, "seed": args.seed,
                     "degree_cap": args.degree_cap}
            result = run_check(model, check, 1e-8)
            _emit(result, args.json_out)
            return EXIT_OK if result["pass"] else EXIT_VIOLATION
        if args.verb == "norms":
            model = build_model(_spec_from_args(args), pad=args.pad)
            state = resolve_state(model, args.state)
            table = norm_table(model, state,
                               range(-args.m_max, args.m_max + 1),
                               args.n_max, owner=args.state)
            if args.csv:
                table.write_csv(args.csv)
            _emit(json.loads(table.to_json()), args.json_out)
            return EXIT_OK
        if args.verb == "certify":
            model = build_model(_spec_from_args(args), pad=args.pad)
            check = {"name": args.check, "type": args.check,
                     "state": args.state, "with": args.with_state,
                     "m_max": args.m_max, "n_max": args.n_max,
                     "p": args.p, "s": args.s, "q": args.damping,
                     "degree": args.degree, "d": args.d,
                     "samples": args.samples, "seed": args.seed}
            result = run_check(model, check, 1e-8)
            _emit(result, args.json_out)
            return EXIT_OK if result["pass"] else EXIT_VIOLATION
        if args.verb == "suite":
            config = load_config(args.config)
            out_dir = args.out or \
                os.environ.get("VOACERT_OUTPUT_DIR") or config.output_dir
            bundle = run_suite(config, out_dir, args.jobs)
            print(f"suite: {'pass' if bundle['pass'] else 'FAIL'} "
                  f"({len(bundle['results'])} checks) -> "
                  f"{os.path.join(out_dir, 'suite.json')}")
            return EXIT_OK if bundle["pass"] else EXIT_VIOLATION
        if args.verb == "export":
            files = export_bundle(args.bundle, args.format, args.out)
            for path in files:
                print(path)
            return EXIT_OK
        raise ConfigError(f"unknown verb {args.verb!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ModelBugError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except VoacertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
