"""``perclab`` command line: arcs, counts, bounds, simulation and validation.

Data goes to stdout (text, CSV or JSON). A run manifest goes to stderr, and
when ``--out-dir`` or ``$PERCLAB_OUT_DIR`` is set the data and manifest are
also written there as ``<subcommand>-<timestamp>-<seed>.{csv,json}`` and
``manifest.json``.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import secrets
import sys
import time
from pathlib import Path

from . import __version__, bound, lattice, pathcount, sim, validate
from .lattice import LatticeVariant

OUT_DIR_ENV = "PERCLAB_OUT_DIR"

ARC_COLUMNS = ["a1", "a2"]
COUNT_COLUMNS = ["k", "i", "coefficient", "power_of_two", "count"]
BOUND_COLUMNS = ["k", "mid", "log_count", "b_k", "abs_err_vs_limit", "threshold"]
SIM_COLUMNS = ["variant", "k", "p", "event", "trials", "hits", "phat", "ci_low", "ci_high", "seed"]
PC_COLUMNS = ["step", *SIM_COLUMNS]


class UsageError(Exception):
    """Semantically invalid arguments; reported through argparse (exit 2)."""


class CommandFailure(Exception):
    """A verdict or validation failure; exit status 1 after output is emitted."""


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def to_csv(records: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        writer.writerow([_fmt(rec.get(c, "")) for c in columns])
    return buf.getvalue()


def to_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def to_text(records: list[dict], columns: list[str]) -> str:
    rows = [[_short(rec.get(c, "")) for c in columns] for rec in records]
    widths = [max(len(c), *(len(r[j]) for r in rows)) if rows else len(c) for j, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in rows]
    return "\n".join(lines) + "\n"


def _short(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def render(fmt: str, records: list[dict], columns: list[str], meta: dict | None = None) -> str:
    if fmt == "csv":
        return to_csv(records, columns)
    if fmt == "json":
        return to_json({**(meta or {}), "rows": records})
    return to_text(records, columns)


# --- argument types ------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _probability(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a probability, got {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {value}")
    return value


def _variant(text: str) -> LatticeVariant:
    try:
        return LatticeVariant.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    parts = [t for t in text.split(",") if t.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("expected a non-empty comma-separated list of integers")
    return [_positive_int(t.strip()) for t in parts]


def _prob_list(text: str) -> list[float]:
    parts = [t for t in text.split(",") if t.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("expected a non-empty comma-separated list of probabilities")
    return [_probability(t.strip()) for t in parts]


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {value}")
    return value


# --- subcommands -----------------------------------------------------------------


def cmd_arcs(args) -> tuple[str, int | None]:
    sign = 1 if args.sign == "+" else -1
    if args.variant is LatticeVariant.TRI_UP:
        verts = sorted(lattice.arc_t(args.k), key=lambda v: (-v.a1, -v.a2))
        verts = [v if sign > 0 else -v for v in verts]
    else:
        verts = list(lattice.arc_z2(args.k, sign))
    if args.format == "text":
        return "".join(f"{v}\n" for v in verts), None
    records = [{"a1": v.a1, "a2": v.a2} for v in verts]
    meta = {"k": args.k, "variant": args.variant.value, "sign": args.sign,
            "vertices": [str(v) for v in verts]}
    if args.format == "json":
        return to_json(meta), None
    return to_csv(records, ARC_COLUMNS), None


def cmd_count(args) -> tuple[str, int | None]:
    if args.bruteforce and args.k > pathcount.BRUTEFORCE_MAX_K:
        raise pathcount.BudgetError(
            f"--bruteforce supports k <= {pathcount.BRUTEFORCE_MAX_K} (BRUTEFORCE_MAX_K), got {args.k}"
        )
    row = pathcount.count_row(args.k)
    records = row.records()
    columns = list(COUNT_COLUMNS)
    meta = {"k": row.k, "total": str(row.total)}
    verdict = None
    if args.bruteforce:
        hist = pathcount.enumerate_paths_bruteforce(args.k)
        for rec in records:
            rec["bruteforce"] = str(hist.by_norm.get(row.k + rec["i"], 0))
        columns.append("bruteforce")
        verdict = "MATCH" if pathcount.verify_row(args.k) else "MISMATCH"
        meta["bruteforce"] = {str(n): str(c) for n, c in hist.by_norm.items()}
        meta["verdict"] = verdict
    if args.format == "text":
        out = to_text(records, columns) + f"total = {row.total}\n"
        if verdict:
            out += f"{verdict}\n"
    else:
        out = render(args.format, records, columns, meta)
    if verdict == "MISMATCH":
        raise CommandFailure(out)
    return out, None


def cmd_bound(args) -> tuple[str, int | None]:
    if args.k_list is not None:
        ks = args.k_list
    else:
        ks = bound.geometric_ks(args.k_max) if args.geometric else list(range(1, args.k_max + 1))
    records = [pt.record() for pt in bound.bound_series(ks)]
    meta = {"limit": bound.LIMIT}
    return render(args.format, records, BOUND_COLUMNS, meta), None


def _sim_config(args, p=None) -> sim.SimConfig:
    return sim.SimConfig(args.variant, args.k, args.p if p is None else p,
                         args.trials, args.seed, args.origin_rule)


def cmd_simulate(args) -> tuple[str, int | None]:
    est = sim.estimate(_sim_config(args), args.event, threads=args.threads)
    return render(args.format, [est.record()], SIM_COLUMNS, {"origin_rule": args.origin_rule}), args.seed


def cmd_sweep(args) -> tuple[str, int | None]:
    if any(b < a for a, b in zip(args.p_grid, args.p_grid[1:])):
        raise UsageError("--p-grid must be sorted ascending")
    rows = sim.sweep(args.variant, args.k_list, args.p_grid, args.trials, args.seed,
                     args.event, args.origin_rule, threads=args.threads)
    records = [r.record() for r in rows]
    return render(args.format, records, SIM_COLUMNS, {"origin_rule": args.origin_rule}), args.seed


def cmd_pc(args) -> tuple[str, int | None]:
    res = sim.pc_bisect(args.variant, args.k, args.trials, args.seed, target=args.target,
                        tol=args.tol, lo=args.lo, hi=args.hi, event=args.event,
                        origin_rule=args.origin_rule, threads=args.threads)
    records = [{"step": j, **est.record()} for j, est in enumerate(res.trace)]
    meta = {"p_estimate": res.p, "lo": res.lo, "hi": res.hi, "target": args.target}
    if args.format == "text":
        out = to_text(records, PC_COLUMNS) + f"p_estimate = {res.p:.6f}  (bracket [{res.lo:.6f}, {res.hi:.6f}])\n"
    elif args.format == "csv":
        out = to_csv(records + [{"step": "estimate", "p": res.p}], PC_COLUMNS)
    else:
        out = to_json({**meta, "trace": records})
    return out, args.seed


def cmd_validate(args) -> tuple[str, int | None]:
    results = validate.run_all()
    records = [{"check": r.name, "status": "PASS" if r.passed else "FAIL", "detail": r.detail}
               for r in results]
    if args.format == "text":
        out = "".join(f"{r['status']}  {r['check']}: {r['detail']}\n" for r in records)
    else:
        out = render(args.format, records, ["check", "status", "detail"])
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise CommandFailure(out + ("" if args.format != "text" else f"FAILED: {', '.join(failed)}\n"))
    return out, None


def cmd_replay(args) -> tuple[str, int | None]:
    manifest = json.loads(Path(args.manifest).read_text())
    parser = build_parser()
    replay_args = parser.parse_args(manifest["argv"])
    out, _ = replay_args.func(replay_args)
    digest = hashlib.sha256(out.encode()).hexdigest()
    if digest != manifest["output_sha256"]:
        raise CommandFailure(out + f"REPLAY MISMATCH: {digest} != {manifest['output_sha256']}\n")
    return out, manifest.get("seed")


# --- parser ------------------------------------------------------------------------


def _add_format(p):
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")
    p.add_argument("--out-dir", default=None,
                   help=f"also write data and manifest here (default ${OUT_DIR_ENV})")


def _add_sim(p, *, single_k=True, single_p=True, event="one-arm"):
    p.add_argument("--variant", type=_variant, default=LatticeVariant.TRI_UP)
    if single_k:
        p.add_argument("--k", type=_positive_int, required=True)
    if single_p:
        p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--seed", type=_seed, default=sim.DEFAULT_SEED)
    p.add_argument("--entropy", action="store_true", help="draw a fresh random seed and record it")
    p.add_argument("--event", choices=[e.value for e in sim.Event], default=event)
    p.add_argument("--origin-rule", choices=[r.value for r in sim.OriginRule],
                   default=sim.OriginRule.CONDITIONED_OPEN.value)
    p.add_argument("--threads", type=_positive_int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="perclab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"perclab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("arcs", help="list arc vertices")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--variant", type=_variant, default=LatticeVariant.Z2)
    p.add_argument("--sign", choices=["+", "-"], default="+")
    _add_format(p)
    p.set_defaults(func=cmd_arcs)

    p = sub.add_parser("count", help="exact up-step path counts for one generation")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--bruteforce", action="store_true", help="cross-check against full enumeration")
    _add_format(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("bound", help="threshold bound series b_k")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--k-list", type=_int_list)
    g.add_argument("--k-max", type=_positive_int)
    p.add_argument("--geometric", action="store_true", help="log-spaced odd k up to --k-max")
    _add_format(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", help="Monte Carlo crossing estimate")
    _add_sim(p)
    _add_format(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="coupled estimates over k and p grids")
    _add_sim(p, single_k=False, single_p=False)
    p.add_argument("--k-list", type=_int_list, required=True)
    p.add_argument("--p-grid", type=_prob_list, required=True)
    _add_format(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pc", help="bisect p for a target crossing frequency")
    _add_sim(p, single_p=False, event="two-arm")
    p.add_argument("--target", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=0.005)
    p.add_argument("--lo", type=_probability, default=0.0)
    p.add_argument("--hi", type=_probability, default=1.0)
    _add_format(p)
    p.set_defaults(func=cmd_pc)

    p = sub.add_parser("validate", help="run the embedded invariant suite")
    _add_format(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("replay", help="re-run a manifest and check its output checksum")
    p.add_argument("manifest")
    _add_format(p)
    p.set_defaults(func=cmd_replay)
    return parser


def _manifest(args, argv: list[str], seed, out: str) -> dict:
    params = {k: (v.value if hasattr(v, "value") else v) for k, v in vars(args).items()
              if k not in ("func", "command", "out_dir", "entropy")}
    return {
        "subcommand": args.command,
        "params": params,
        "argv": argv,
        "seed": seed,
        "version": __version__,
        "output_sha256": hashlib.sha256(out.encode()).hexdigest(),
    }


def _replay_argv(args, argv: list[str]) -> list[str]:
    """``argv`` with any ``--entropy`` replaced by the seed it produced."""
    out = [a for a in argv if a != "--entropy" and not a.startswith("--out-dir")]
    if "--out-dir" in out:
        j = out.index("--out-dir")
        del out[j:j + 2]
    if getattr(args, "entropy", False):
        out += ["--seed", str(args.seed)]
    return out


def _write_files(out_dir: str, args, out: str, manifest: dict) -> None:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    stamp = time.strftime("%Y%m%dT%H%M%S")
    seed = manifest["seed"] if manifest["seed"] is not None else "noseed"
    ext = "csv" if args.format == "csv" else "json" if args.format == "json" else "txt"
    (path / f"{args.command}-{stamp}-{seed}.{ext}").write_text(out)
    (path / "manifest.json").write_text(to_json(manifest))


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "entropy", False):
        args.seed = secrets.randbits(64)
    status = 0
    try:
        out, seed = args.func(args)
    except CommandFailure as fail:
        out, seed, status = str(fail), getattr(args, "seed", None), 1
    except UsageError as exc:
        parser.error(str(exc))
    except (pathcount.BudgetError, sim.BracketError, lattice.UnsupportedVariantError, ValueError) as exc:
        print(f"perclab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(out)
    manifest = _manifest(args, _replay_argv(args, argv), seed, out)
    print(json.dumps(manifest, sort_keys=True), file=sys.stderr)
    out_dir = args.out_dir or os.environ.get(OUT_DIR_ENV)
    if out_dir:
        _write_files(out_dir, args, out, manifest)
    return status


if __name__ == "__main__":
    sys.exit(main())
