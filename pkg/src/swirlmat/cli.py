"""Command-line front end.

Every subcommand resolves its parameters into a flat config dict. The config
is echoed into the outputs, and its hash goes into a header line, so
``--config summary.json`` re-runs an experiment exactly.

Exit codes: 0 success, 1 validation failure (bad input, budget cap, failed
identity check, I/O), 2 numerical failure (eigensolver non-convergence,
overflow).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ensembles import DistKind, EntryDistribution, Family, PatternSpec, build_exchange, sample_pattern, sample_sequence
from .link_analysis import audit_grid
from .matrix_core import EigenSolverError
from .moment_combinatorics import (
    MATCHING_K_CAP,
    double_factorial,
    finite_N_expected_trace,
    limit_even_moment,
    partition_audit,
)
from .spectra import (
    SYMMETRIZED_RAYLEIGH,
    TrialError,
    histogram,
    ks_statistic,
    run_monte_carlo,
    sample_moment,
)
from .swirl_algebra import (
    PASS_REL_TOL,
    verify_iterated_trace_identity,
    verify_trace_identity,
    verify_transpose_identity,
)

TOOL = "swirlmat"

ENSEMBLES = {
    "circulant-hankel": Family.CIRCULANT_HANKEL,
    "circulant-toeplitz": Family.CIRCULANT_TOEPLITZ,
    "hankel-swirl": Family.CONCENTRIC_EVEN,
    "concentric-even": Family.CONCENTRIC_EVEN,
    "link": Family.LINK_ST,
}
TRACE_ENSEMBLES = [*ENSEMBLES, "dense"]

# parameters that never enter the config (they do not change the results)
_NON_CONFIG = {"out", "config", "subcommand", "handler"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- output helpers

def config_hash(subcommand: str, config: dict) -> str:
    blob = json.dumps([subcommand, config], sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def header(subcommand: str, config: dict) -> dict:
    return {"tool": TOOL, "subcommand": subcommand, "config_hash": config_hash(subcommand, config),
            "version": __version__}


def header_comment(subcommand: str, config: dict) -> str:
    h = header(subcommand, config)
    return f"# {TOOL} {subcommand} config={h['config_hash']} version={h['version']}\n"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    if v is None:
        return ""
    return str(v)


def csv_text(subcommand: str, config: dict, fieldnames, rows) -> str:
    buf = io.StringIO()
    buf.write(header_comment(subcommand, config))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fieldnames)
    for row in rows:
        w.writerow([_fmt(row[f]) for f in fieldnames])
    return buf.getvalue()


def json_text(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _emit(text: str, out: str | None, default_name: str | None = None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    path = Path(out)
    if default_name is not None and (path.is_dir() or out.endswith(os.sep)):
        path = path / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def emit_report(subcommand: str, config: dict, results, fmt: str = "json", out=None,
                fieldnames=None, default_name=None) -> str:
    """Serialize ``results`` with the standard header and write to ``out`` (stdout if None)."""
    if fmt == "json":
        text = json_text({"header": header(subcommand, config), "config": config,
                          "results": list(results)})
    elif fmt == "csv":
        results = list(results)
        if fieldnames is None:
            fieldnames = list(results[0]) if results else []
        text = csv_text(subcommand, config, fieldnames, results)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    _emit(text, out, default_name)
    return text


# ---------------------------------------------------------------- parameter helpers

def _int_list(spec: str) -> list[int]:
    """``"2:32"`` (inclusive) or ``"5"``."""
    try:
        if ":" in spec:
            lo, hi = spec.split(":", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(spec)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or LO:HI range, got {spec!r}") from None


def _flatten(groups) -> list[int] | None:
    if groups is None:
        return None
    return [v for g in groups for v in g]


def _pattern(cfg: dict) -> PatternSpec:
    fam = ENSEMBLES[cfg["ensemble"]]
    return PatternSpec(family=fam, n=cfg["n"], s=cfg.get("s", 1), t=cfg.get("t", 1),
                       symmetric_link=cfg.get("symmetric", False), ell=cfg.get("ell", 1))


def _dist(cfg: dict, seed=None) -> EntryDistribution:
    return EntryDistribution(DistKind(cfg["dist"]), cfg["seed"] if seed is None else seed)


# ---------------------------------------------------------------- subcommands

def cmd_simulate(cfg: dict, out: str | None) -> int:
    if out is None:
        raise ValueError("simulate needs --out DIR")
    spec = _pattern(cfg)
    sample = run_monte_carlo(spec, _dist(cfg), cfg["trials"])
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)

    sub = "simulate"
    (outdir / "eigs.csv").write_text(
        csv_text(sub, cfg, ["value"], ({"value": v} for v in sample.scaled_eigs)))
    edges, density, outside = histogram(sample)
    (outdir / "hist.csv").write_text(csv_text(
        sub, cfg, ["bin_left", "bin_right", "density"],
        ({"bin_left": lo, "bin_right": hi, "density": d}
         for lo, hi, d in zip(edges[:-1], edges[1:], density))))
    summary = {
        "header": header(sub, cfg),
        "config": cfg,
        "ensemble": spec.to_dict(),
        "matrix_dim": sample.n,
        "c": sample.c,
        "trials": sample.trials,
        "samples": len(sample),
        "moments": [{"k": k, "sample": sample_moment(sample, k),
                     "reference": SYMMETRIZED_RAYLEIGH.moment(k)} for k in range(1, 9)],
        "ks_symmetrized_rayleigh": ks_statistic(sample),
        "hist_outside_range": outside,
        "numerical_rank_range": list(sample.rank_range),
        "rank_unstable": sample.rank_unstable,
    }
    (outdir / "summary.json").write_text(json_text(summary))
    return 0


def _trace_matrix(cfg: dict) -> np.ndarray:
    """The A matrix fed to the identities (X is always the exchange matrix)."""
    if cfg["ensemble"] == "dense":
        vals = sample_sequence(_dist(cfg), cfg["n"] ** 2)
        return vals.reshape(cfg["n"], cfg["n"])
    spec = _pattern(cfg)
    if spec.family is Family.CONCENTRIC_EVEN:
        # sw(A, J) with A circulant Toeplitz
        spec = PatternSpec(Family.CIRCULANT_TOEPLITZ, spec.n)
    return sample_pattern(spec, _dist(cfg)).data


def cmd_trace_check(cfg: dict, out: str | None) -> int:
    a = _trace_matrix(cfg)
    x = build_exchange(a.shape[0])
    tol = cfg["tol"]
    reports = []
    for k in range(1, cfg["k"] + 1):
        reports.append(verify_trace_identity(a, x, k))
        if cfg["ell"] > 1:
            reports.append(verify_iterated_trace_identity(a, x, k, cfg["ell"]))
        reports.append(verify_transpose_identity(a, x, k))
    lines = [json.dumps({"header": header("trace-check", cfg), "config": cfg})]
    failed = 0
    for r in reports:
        d = r.to_dict()
        d["passed"] = (r.abs_err == 0) if r.exact else r.rel_err <= tol
        failed += not d["passed"]
        lines.append(json.dumps(d))
    _emit("\n".join(lines) + "\n", out, "trace_check.jsonl")
    if failed:
        print(f"trace-check: {failed} identity check(s) exceeded rel_err {tol:g}", file=sys.stderr)
        return 1
    return 0


def cmd_moments_exact(cfg: dict, out: str | None) -> int:
    results = []
    for k in cfg["k"]:
        if not 1 <= k <= MATCHING_K_CAP:
            raise ValueError(f"--k must be in 1..{MATCHING_K_CAP}, got {k}")
        results.append({"k": k, "moment_order": 2 * k,
                        "matchings_total": double_factorial(2 * k - 1),
                        "contributing": (m := limit_even_moment(k)),
                        "limit_moment": m})
    emit_report("moments-exact", cfg, results, "json", out, default_name="moments_exact.json")
    return 0


def cmd_partition_audit(cfg: dict, out: str | None) -> int:
    rows = []
    for k in cfg["k"]:
        if not 1 <= k <= MATCHING_K_CAP:
            raise ValueError(f"--k must be in 1..{MATCHING_K_CAP}, got {k}")
        rows.extend(partition_audit(k))
    emit_report("partition-audit", cfg, rows, "csv", out,
                fieldnames=["k", "pairs", "odd_even", "nullity", "contributes"],
                default_name="partition_audit.csv")
    return 0


def cmd_coset_count(cfg: dict, out: str | None) -> int:
    if any(n < 2 for n in cfg["n"]):
        raise ValueError("coset-count needs N >= 2")
    reports = audit_grid(cfg["n"], cfg["s"], cfg["t"])
    rows = [r.to_row() for r in reports]
    fields = ["N", "s", "t", "class_count_plain", "class_count_symmetric", "subgroup_order",
              "coset_index", "gcd_value", "ratio", "classification"]
    emit_report("coset-count", cfg, rows, "csv", out, fieldnames=fields,
                default_name="coset_count.csv")
    return 0


def cmd_oracle(cfg: dict, out: str | None) -> int:
    dist = EntryDistribution(DistKind(cfg["dist"]))
    results = []
    for n in cfg["n"]:
        value = finite_N_expected_trace(n, cfg["k"], dist.moments(cfg["k"]))
        norm = float(value) / n ** (cfg["k"] / 2 + 1)
        results.append({"N": n, "power": cfg["k"], "expected_trace": str(value),
                        "expected_trace_float": float(value),
                        "normalized_moment": float(norm)})
    emit_report("oracle", cfg, results, "json", out, default_name="oracle.json")
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog=TOOL, description="Swirl matrices and circulant Hankel spectra.")
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(sp, seed=True):
        sp.add_argument("--out", help="output directory or file (stdout when omitted)")
        sp.add_argument("--config", help="re-run with the config embedded in a previous output")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    def pattern_flags(sp, choices, default):
        sp.add_argument("--ensemble", choices=choices, default=default)
        sp.add_argument("--n", type=int, default=64)
        sp.add_argument("--dist", choices=[d.value for d in DistKind], default="normal")
        sp.add_argument("--s", type=int, default=1)
        sp.add_argument("--t", type=int, default=1)
        sp.add_argument("--symmetric", action="store_true", help="symmetric (s,t) link closure")
        sp.add_argument("--ell", type=int, default=1, help="swirl iteration depth")

    sp = sub.add_parser("simulate", help="Monte Carlo spectra vs the symmetrized Rayleigh law")
    common(sp)
    pattern_flags(sp, list(ENSEMBLES), "circulant-hankel")
    sp.add_argument("--trials", type=int, default=10)
    sp.set_defaults(handler=cmd_simulate)

    sp = sub.add_parser("trace-check", help="verify the swirl trace identities on one draw")
    common(sp)
    pattern_flags(sp, TRACE_ENSEMBLES, "hankel-swirl")
    sp.add_argument("--k", type=int, default=6, help="check powers 1..k")
    sp.add_argument("--tol", type=float, default=PASS_REL_TOL)
    sp.set_defaults(handler=cmd_trace_check, n=8, ell=2)

    sp = sub.add_parser("moments-exact", help="limiting moments M_2k from matching nullities")
    common(sp, seed=False)
    sp.add_argument("--k", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    sp.set_defaults(handler=cmd_moments_exact)

    sp = sub.add_parser("partition-audit", help="per-matching odd-even flag and nullity")
    common(sp, seed=False)
    sp.add_argument("--k", type=int, nargs="+", default=[2])
    sp.set_defaults(handler=cmd_partition_audit)

    sp = sub.add_parser("coset-count", help="(s,t) link class counts, coset indices, gcd audit")
    common(sp, seed=False)
    sp.add_argument("--n", type=_int_list, nargs="+", default=[[4]], help="N values or LO:HI ranges")
    sp.add_argument("--s", type=_int_list, nargs="+", help="s values (default all residues)")
    sp.add_argument("--t", type=_int_list, nargs="+", help="t values (default all residues)")
    sp.set_defaults(handler=cmd_coset_count)

    sp = sub.add_parser("oracle", help="exact finite-N expected trace of H^k")
    common(sp, seed=False)
    sp.add_argument("--n", type=_int_list, nargs="+", default=[[4]])
    sp.add_argument("--k", type=int, default=4, help="power of H")
    sp.add_argument("--dist", choices=[d.value for d in DistKind], default="normal")
    sp.set_defaults(handler=cmd_oracle)
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in _NON_CONFIG}
    for key in ("n", "s", "t"):
        if args.subcommand in ("coset-count", "oracle") and key in cfg:
            cfg[key] = _flatten(cfg[key])
    if args.config:
        doc = json.loads(Path(args.config).read_text())
        if "header" in doc and doc["header"].get("subcommand") not in (None, args.subcommand):
            raise ValueError(f"config file is for {doc['header']['subcommand']!r}, not {args.subcommand!r}")
        loaded = doc.get("config", doc)
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    return cfg


def run_subcommand(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        return args.handler(cfg, args.out)
    except UsageError as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return 1
    except (EigenSolverError, TrialError, OverflowError, ArithmeticError) as exc:
        print(f"{TOOL}: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> None:
    sys.exit(run_subcommand(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
