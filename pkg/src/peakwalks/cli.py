"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or feasibility error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import secrets
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .bijections import NotInDomainError, excursion_to_tree, rho
from .enumeration import count_family
from .limits import marginal_cdf, marginal_pdf
from .paths import FAMILIES, FamilySpec, PathFormatError, num_peaks, parse_path, serialize_path
from .sampling import BatchRequest, EmptyFamilyError, RandomSource, default_workers, sample_batch, sample_excursion
from .verify import DEFAULT_SEED, SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    subcommand: str
    params: dict
    seed: int | None
    workers: int
    version: str = __version__
    outputs: list[str] = field(default_factory=list)
    argv: list[str] = field(default_factory=list)

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")

    @classmethod
    def read(cls, path: Path) -> "RunManifest":
        return cls(**json.loads(path.read_text()))


def _parse_seed(text: str) -> int:
    if text == "random":
        return secrets.randbits(63)
    try:
        seed = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer or 'random', got {text!r}")
    if seed < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return seed


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="peakwalks", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True, workers=False):
        p.add_argument("--manifest", type=Path, help="write a run manifest to this path")
        if seed:
            p.add_argument("--seed", type=_parse_seed, default=DEFAULT_SEED,
                           help=f"integer seed or 'random' (default {DEFAULT_SEED})")
        if workers:
            p.add_argument("--workers", type=_positive, default=None,
                           help="worker processes (default: $PEAKWALKS_WORKERS or 1)")

    p = sub.add_parser("count", help="exact number of paths with k peaks")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=_nonneg, required=True)
    p.add_argument("--k", type=_nonneg)
    common(p, seed=False)

    p = sub.add_parser("sample", help="draw uniform paths as JSON lines")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=_nonneg, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--k", type=_nonneg)
    group.add_argument("--unconditioned", action="store_true")
    p.add_argument("--count", type=_positive, default=1)
    p.add_argument("--out", type=Path, help="output file (default: standard output)")
    common(p, workers=True)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--max-n", type=_nonneg)
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--n", type=_positive)
    p.add_argument("--k", type=_positive)
    p.add_argument("--samples", type=_positive)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out", type=Path, help="write the report here as well")
    common(p, workers=True)

    p = sub.add_parser("polyomino", help="parallelogram polyomino of an excursion")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--steps")
    src.add_argument("--random", nargs=2, type=_nonneg, metavar=("N", "K"),
                     help="a uniform excursion of length N with K peaks")
    common(p)

    p = sub.add_parser("tree", help="plane tree coded by an excursion")
    p.add_argument("--steps", required=True)
    common(p, seed=False)

    p = sub.add_parser("density", help="CSV table of a limit marginal")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float, default=3.0)
    p.add_argument("--points", type=_positive, default=61)
    p.add_argument("--out", type=Path)
    common(p, seed=False)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest_file", type=Path)
    return parser


# ---------- subcommands ----------

def _emit(text: str, out: Path | None) -> list[str]:
    if out is None:
        sys.stdout.write(text)
        return []
    out.write_text(text)
    return [str(out)]


def cmd_count(args) -> tuple[int, list[str]]:
    if args.k is not None:
        print(count_family(FamilySpec(args.family, args.n, args.k)))
    else:
        for k in range(args.n // 2 + 1):
            print(f"{k},{count_family(FamilySpec(args.family, args.n, k))}")
    return EXIT_OK, []


def cmd_sample(args) -> tuple[int, list[str]]:
    request = BatchRequest(args.family, args.n, None if args.unconditioned else args.k, args.seed)
    try:
        request.check()
    except EmptyFamilyError as exc:
        raise UsageError(str(exc))
    handle = open(args.out, "w") if args.out else sys.stdout
    try:
        for path in sample_batch(request, args.count, args.workers):
            record = {"n": path.n, "k": num_peaks(path), "steps": serialize_path(path)}
            handle.write(json.dumps(record) + "\n")
    finally:
        if args.out:
            handle.close()
    return EXIT_OK, [str(args.out)] if args.out else []


def _format_reports(reports, fmt: str) -> str:
    rows = [rep.row() for rep in reports]
    if fmt == "csv":
        keys: list[str] = []
        for row in rows:
            keys.extend(k for k in row if k not in keys)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in keys})
        return buf.getvalue()
    lines = []
    width = max(len(r["name"]) for r in rows)
    for rep, row in zip(reports, rows):
        extra = ", ".join(f"{k}={_short(v)}" for k, v in row.items()
                          if k not in ("name", "statistic", "critical", "passed", "p_value", "sample_size", "seed"))
        verdict = "PASS" if rep.passed else "FAIL"
        lines.append(f"{verdict}  {rep.name:<{width}}  stat={_short(rep.statistic)}  "
                     f"crit={_short(rep.critical)}  m={rep.sample_size}" + (f"  [{extra}]" if extra else ""))
    return "\n".join(lines) + "\n"


def _short(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def cmd_verify(args) -> tuple[int, list[str]]:
    options = {"seed": args.seed, "workers": args.workers}
    for name in ("max_n", "family", "n", "k", "samples"):
        value = getattr(args, name)
        if value is not None:
            options[name] = value
    reports = run_suite(args.suite, **options)
    text = _format_reports(reports, args.format)
    sys.stdout.write(text)
    outputs = []
    if args.out:
        args.out.write_text(text)
        outputs.append(str(args.out))
    return (EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL), outputs


def _parse_excursion(text: str):
    try:
        return parse_path(text)
    except PathFormatError as exc:
        raise UsageError(str(exc))


def cmd_polyomino(args) -> tuple[int, list[str]]:
    if args.steps is not None:
        path = _parse_excursion(args.steps)
    else:
        n, k = args.random
        try:
            path = sample_excursion(n, k, RandomSource(args.seed).generator())
        except EmptyFamilyError as exc:
            raise UsageError(str(exc))
    try:
        poly = rho(path)
    except NotInDomainError as exc:
        raise UsageError(str(exc))
    print(json.dumps({"steps": serialize_path(path), **poly.to_dict()}))
    print(poly.render())
    return EXIT_OK, []


def cmd_tree(args) -> tuple[int, list[str]]:
    path = _parse_excursion(args.steps)
    try:
        tree = excursion_to_tree(path)
    except NotInDomainError as exc:
        raise UsageError(str(exc))
    print(json.dumps({"steps": args.steps, "edges": tree.edges, "leaves": tree.leaves,
                      "children": [list(c) for c in tree.children]}))
    print(tree.render())
    return EXIT_OK, []


def cmd_density(args) -> tuple[int, list[str]]:
    t = args.t
    if not 0 < t <= 1 or (t == 1 and args.family in ("b", "e")):
        raise UsageError(f"t={t} is outside the range of the {args.family} marginal")
    x_min = args.x_min if args.x_min is not None else (0.0 if args.family in ("e", "m") else -args.x_max)
    if x_min >= args.x_max:
        raise UsageError("--x-min must be below --x-max")
    xs = np.linspace(x_min, args.x_max, args.points)
    pdf = np.atleast_1d(marginal_pdf(args.family, t, xs))
    cdf = np.atleast_1d(marginal_cdf(args.family, t, xs))
    buf = io.StringIO()
    buf.write("x,pdf,cdf\n")
    for x, f, c in zip(xs, pdf, cdf):
        buf.write(f"{x:.6g},{f:.12g},{c:.12g}\n")
    return EXIT_OK, _emit(buf.getvalue(), args.out)


COMMANDS = {
    "count": cmd_count,
    "sample": cmd_sample,
    "verify": cmd_verify,
    "polyomino": cmd_polyomino,
    "tree": cmd_tree,
    "density": cmd_density,
}


def _canonical_argv(args) -> list[str]:
    """Arguments that reproduce this run, with the seed resolved."""
    argv = [args.command]
    for key, value in sorted(vars(args).items()):
        if key in ("command", "manifest", "suite") or value is None or value is False:
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        elif isinstance(value, (list, tuple)):
            argv.extend([flag, *map(str, value)])
        else:
            argv.extend([flag, str(value)])
    if getattr(args, "suite", None):
        argv.insert(1, args.suite)
    return argv


def _manifest_path(args) -> Path | None:
    if getattr(args, "manifest", None):
        return args.manifest
    out = getattr(args, "out", None)
    return Path(str(out) + ".manifest.json") if out else None


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "replay":
        try:
            manifest = RunManifest.read(args.manifest_file)
        except (OSError, ValueError, TypeError) as exc:
            print(f"error: cannot read manifest: {exc}", file=sys.stderr)
            return EXIT_USAGE
        return main(manifest.argv)
    if hasattr(args, "workers") and args.workers is None:
        args.workers = default_workers()
    try:
        code, outputs = COMMANDS[args.command](args)
    except (UsageError, EmptyFamilyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    target = _manifest_path(args)
    if target is not None:
        params = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()
                  if k not in ("command", "manifest", "seed", "workers")}
        RunManifest(
            subcommand=args.command,
            params=params,
            seed=getattr(args, "seed", None),
            workers=getattr(args, "workers", 1) or 1,
            outputs=outputs,
            argv=_canonical_argv(args),
        ).write(target)
    return code


if __name__ == "__main__":
    sys.exit(main())
