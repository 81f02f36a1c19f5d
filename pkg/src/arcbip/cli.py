"""Benchmark runner: Table-1-style CSV reports and performance-profile data."""
import argparse
import concurrent.futures
import csv
import dataclasses
import io
import pathlib
import sys
import time
from dataclasses import dataclass

import numpy as np

from .driver import SolverConfig, Status, solve
from .exceptions import MismatchedProblemSets, UnknownProblem
from .hs_suite import get_problem, list_problems

CSV_COLUMNS = ("name", "n", "m", "NO", "NI", "NIF", "NIG", "Res", "status", "wall_ms")
METRICS = ("NI", "NIF", "NIG")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


@dataclass(frozen=True)
class BenchReportRow:
    name: str
    n: int
    m: int
    NO: int
    NI: int
    NIF: int
    NIG: int
    Res: float
    status: str
    wall_ms: float

    @property
    def converged(self):
        return self.status == Status.CONVERGED.value


@dataclass(frozen=True)
class ProfilePoint:
    tau_ratio: float
    fraction_solved: float


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- configuration


def _coerce(field, text):
    if field.type in (bool, "bool"):
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"{field.name}: expected a boolean, got {text!r}")
    kind = {"int": int, "float": float, "str": str}.get(field.type, field.type)
    try:
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        return str(text)
    except ValueError:
        raise UsageError(f"{field.name}: cannot parse {text!r}") from None


def parse_config_text(text, source="<config>"):
    """Parse ``key = value`` lines into SolverConfig overrides; unknown keys are errors."""
    fields = {f.name: f for f in dataclasses.fields(SolverConfig)}
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in fields:
            raise UsageError(f"{source}:{lineno}: unknown key {key!r}")
        overrides[key] = _coerce(fields[key], value)
    return overrides


def load_config(path):
    path = pathlib.Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text, str(path))


def build_config(overrides, tol=None, max_iter=None):
    kw = dict(overrides)
    if tol is not None:
        kw["e_t"] = tol
    if max_iter is not None:
        kw["max_total_iters"] = max_iter
    try:
        return SolverConfig(**kw)
    except ValueError as exc:
        raise UsageError(f"invalid configuration: {exc}") from None


# ---------------------------------------------------------------- solving


def run_problem(name, config):
    """Solve one registered problem and return its report row."""
    entry = get_problem(name)
    start = time.perf_counter()
    result = solve(entry.problem, entry.x0, config)
    wall_ms = (time.perf_counter() - start) * 1e3
    return BenchReportRow(name=entry.name, n=entry.problem.n, m=entry.problem.m,
                          NO=result.NO, NI=result.NI, NIF=result.NIF, NIG=result.NIG,
                          Res=float(result.E_final), status=result.status.value,
                          wall_ms=round(wall_ms, 3))


def run_suite(names, config, jobs=1):
    """Rows for ``names`` ordered by problem name regardless of completion order."""
    names = sorted(set(names))
    if jobs <= 1:
        rows = [run_problem(name, config) for name in names]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_problem, names, [config] * len(names)))
    return sorted(rows, key=lambda row: row.name)


# ---------------------------------------------------------------- CSV


def format_row(row):
    return [row.name, str(row.n), str(row.m), str(row.NO), str(row.NI), str(row.NIF),
            str(row.NIG), f"{row.Res:.4e}", row.status, f"{row.wall_ms:.3f}"]


def emit_csv(rows, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(format_row(row))


def rows_to_csv(rows):
    buf = io.StringIO()
    emit_csv(rows, buf)
    return buf.getvalue()


def parse_csv(text):
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [BenchReportRow(name=rec["name"], n=int(rec["n"]), m=int(rec["m"]),
                           NO=int(rec["NO"]), NI=int(rec["NI"]), NIF=int(rec["NIF"]),
                           NIG=int(rec["NIG"]), Res=float(rec["Res"]), status=rec["status"],
                           wall_ms=float(rec["wall_ms"]))
            for rec in reader]


# ---------------------------------------------------------------- profiles


def emit_performance_profile(rows_by_variant, metric="NI"):
    """Performance profiles of several variants over a common problem set.

    Parameters
    ----------
    rows_by_variant : mapping or sequence
        Report rows per variant, either ``{label: rows}`` or a list of row lists.
    metric : {"NI", "NIF", "NIG"}
        Counter compared across variants. Failed solves count as ``+inf``.

    Returns
    -------
    profiles : dict or list
        Breakpoints ``ProfilePoint(tau, fraction)`` of the empirical CDF of the
        per-problem ratios ``metric / best metric``, starting at ``tau = 1``.
        Keyed like the input.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    keyed = isinstance(rows_by_variant, dict)
    labels = list(rows_by_variant) if keyed else list(range(len(rows_by_variant)))
    variants = [list(rows_by_variant[label]) for label in labels]
    if len(variants) < 2:
        raise ValueError("a performance profile needs at least two variants")

    problem_sets = [sorted(row.name for row in rows) for rows in variants]
    for names in problem_sets:
        if len(set(names)) != len(names):
            raise MismatchedProblemSets(f"duplicate problem names in a variant: {names}")
        if names != problem_sets[0]:
            raise MismatchedProblemSets(f"problem sets differ: {problem_sets[0]} vs {names}")
    names = problem_sets[0]
    if not names:
        raise MismatchedProblemSets("no problems to profile")

    # counts of zero (start already optimal) are treated as one so ratios stay finite
    table = np.full((len(names), len(variants)), np.inf)
    for s, rows in enumerate(variants):
        by_name = {row.name: row for row in rows}
        for p, name in enumerate(names):
            row = by_name[name]
            if row.converged:
                table[p, s] = max(float(getattr(row, metric)), 1.0)
    best = table.min(axis=1, keepdims=True)
    with np.errstate(invalid="ignore"):
        ratios = np.where(np.isfinite(best), table / best, np.inf)

    profiles = []
    for s in range(len(variants)):
        r = ratios[:, s]
        taus = np.unique(np.concatenate([[1.0], r[np.isfinite(r)]]))
        profiles.append([ProfilePoint(float(t), float(np.count_nonzero(r <= t)) / len(names))
                         for t in taus])
    return dict(zip(labels, profiles)) if keyed else profiles


def format_profiles(profiles):
    """Two-column whitespace-separated text, one blank-line-separated block per variant."""
    blocks = []
    for label, points in profiles.items():
        lines = [f"# variant {label}", "# tau fraction_solved"]
        lines += [f"{pt.tau_ratio:.6g} {pt.fraction_solved:.6g}" for pt in points]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


# ---------------------------------------------------------------- command line


def build_parser():
    parser = argparse.ArgumentParser(
        prog="arcbip-bench",
        description="Run the interior-point cubic-regularisation solver on the test suite.")
    parser.add_argument("--problem", action="append", default=[], metavar="NAME",
                        help="problem to solve (repeatable)")
    parser.add_argument("--all", action="store_true", help="solve every registered problem")
    parser.add_argument("--list", action="store_true", help="list registered problems and exit")
    parser.add_argument("--tol", type=float, help="overall stopping tolerance e_t")
    parser.add_argument("--max-iter", type=int, help="cap on total inner iterations")
    parser.add_argument("--config", action="append", default=[], metavar="PATH",
                        help="file of 'key = value' SolverConfig overrides; repeat to "
                             "define several variants")
    parser.add_argument("--csv", metavar="PATH", help="write the report as CSV")
    parser.add_argument("--profile", metavar="PATH",
                        help="write performance profiles (needs two or more --config variants)")
    parser.add_argument("--metric", choices=METRICS, default="NI",
                        help="counter used for the performance profile")
    parser.add_argument("--seed", type=int, default=0,
                        help="accepted for reproducible harness runs; solves are deterministic")
    parser.add_argument("--jobs", type=int, default=1, help="solve problems in parallel")
    return parser


def _variant_csv_path(base, label, many):
    base = pathlib.Path(base)
    return base if not many else base.with_name(f"{base.stem}.{label}{base.suffix}")


def _print_table(label, rows, out):
    if label is not None:
        print(f"[{label}]", file=out)
    print(f"{'name':<10} {'n':>3} {'m':>3} {'NO':>4} {'NI':>5} {'NIF':>5} {'NIG':>5} "
          f"{'Res':>11} {'status':<17} {'ms':>8}", file=out)
    for row in rows:
        print(f"{row.name:<10} {row.n:>3} {row.m:>3} {row.NO:>4} {row.NI:>5} {row.NIF:>5} "
              f"{row.NIG:>5} {row.Res:>11.4e} {row.status:<17} {row.wall_ms:>8.1f}", file=out)


def run_cli(argv=None, out=None):
    """Entry point returning the exit code (0 all converged, 1 some failed, 2 usage error)."""
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    try:
        if args.list:
            for name, n, m in list_problems():
                print(f"{name:<10} {n:>3} {m:>3}", file=out)
            return EXIT_OK
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        if args.all:
            names = [name for name, _, _ in list_problems()]
        elif args.problem:
            names = list(args.problem)
            for name in names:
                get_problem(name)
        else:
            raise UsageError("give --problem NAME or --all")
        if args.profile and len(args.config) < 2:
            raise UsageError("--profile compares variants; give --config at least twice")

        if args.config:
            labels = [pathlib.Path(p).stem for p in args.config]
            if len(set(labels)) != len(labels):
                labels = [f"{i}-{label}" for i, label in enumerate(labels)]
            configs = {label: build_config(load_config(path), args.tol, args.max_iter)
                       for label, path in zip(labels, args.config)}
        else:
            configs = {"default": build_config({}, args.tol, args.max_iter)}
    except (UsageError, UnknownProblem) as exc:
        parser.print_help(sys.stderr)
        print(f"\nerror: {exc}", file=sys.stderr)
        return EXIT_USAGE

    many = len(configs) > 1
    rows_by_variant = {}
    for label, config in configs.items():
        rows = run_suite(names, config, jobs=args.jobs)
        rows_by_variant[label] = rows
        _print_table(label if many else None, rows, out)
        if args.csv:
            path = _variant_csv_path(args.csv, label, many)
            with open(path, "w", newline="") as fh:
                emit_csv(rows, fh)

    if args.profile:
        profiles = emit_performance_profile(rows_by_variant, args.metric)
        pathlib.Path(args.profile).write_text(format_profiles(profiles))

    all_ok = all(row.converged for rows in rows_by_variant.values() for row in rows)
    return EXIT_OK if all_ok else EXIT_FAILED


def main(argv=None):
    sys.exit(run_cli(argv))


if __name__ == "__main__":
    main()
