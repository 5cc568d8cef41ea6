"""Command-line interface.

Subcommands: ``adjust`` (adjusted p-values for 2x2 tables), ``support``
(dump attainable p-value supports), ``simulate`` (Monte-Carlo FDR/power
study), ``bound`` (midP FDR upper bound), ``oracle`` (exact FDR by
enumeration), and ``demo`` (the embedded ten-study example).

Input formats
-------------
``table``   header ``id,x11,x12,x21,x22`` with the 2x2 counts per row.
``pharma``  header ``id,events,reports,total_events,total_reports`` for
            drug-surveillance aggregates; each row expands to the 2x2 table
            (events, reports - events, total_events - events,
            total_reports - total_events - (reports - events)).
``support`` header ``id,atom,cdf,observed`` in long format, one row per
            attainable p-value, with observed = 1 marking the realized atom
            (``bound`` also accepts dumps without the observed column).

Files written with --out hold full-precision floats (Python repr) so they
are byte-stable; terminal tables round to --digits significant digits.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from .bounds import midfdr_upper_bound
from .datasets import DEMO_TABLES
from .fisher import ContingencyTable, TailDirection, fisher_exact
from .nulldist import ATOL, NullDistribution, TestResult
from .oracle import DEFAULT_OUTCOME_CAP, HypothesisSpec, OutcomeCapExceeded, exact_fdr
from .procedures import Family, Procedure, adjust, reject_at_level, tarone_select
from .simulation import SimulationConfig, run_study, write_sweep_csv

TABLE_HEADER = ["id", "x11", "x12", "x21", "x22"]
PHARMA_HEADER = ["id", "events", "reports", "total_events", "total_reports"]
SUPPORT_HEADER = ["id", "atom", "cdf", "observed"]
SPEC_HEADER = ["id", "atom", "cdf", "is_true_null"]

DEFAULT_PROCEDURES = (
    Procedure.BH,
    Procedure.MIDP_BH,
    Procedure.DBH,
    Procedure.BL,
    Procedure.MIDP_BL,
    Procedure.DBL,
)


class InputError(Exception):
    """Malformed input file; message already carries file/line context."""


def _open_rows(path):
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    with handle:
        reader = csv.reader(handle)
        rows = [(lineno, row) for lineno, row in enumerate(reader, start=1) if row]
    if not rows:
        raise InputError(f"{path}: empty file")
    return rows


def _check_header(path, got, want, optional=()):
    expected = list(want)
    trimmed = [c.strip() for c in got]
    if trimmed == expected:
        return
    if optional and trimmed == expected + list(optional):
        return
    raise InputError(
        f"{path}: line 1: expected header {','.join(expected)}"
        f"{' (optionally +' + ','.join(optional) + ')' if optional else ''},"
        f" got {','.join(got)}"
    )


def _int_field(path, lineno, name, raw):
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"{path}: line {lineno}: {name} is not an integer: {raw!r}")
    if value < 0:
        raise InputError(f"{path}: line {lineno}: {name} is negative")
    return value


def _float_field(path, lineno, name, raw):
    try:
        return float(raw)
    except ValueError:
        raise InputError(f"{path}: line {lineno}: {name} is not a number: {raw!r}")


def read_table_csv(path) -> list[tuple[str, ContingencyTable]]:
    rows = _open_rows(path)
    _check_header(path, rows[0][1], TABLE_HEADER)
    out = []
    for lineno, row in rows[1:]:
        if len(row) != 5:
            raise InputError(f"{path}: line {lineno}: expected 5 fields, got {len(row)}")
        counts = [
            _int_field(path, lineno, name, raw)
            for name, raw in zip(TABLE_HEADER[1:], row[1:])
        ]
        out.append((row[0].strip(), ContingencyTable(*counts)))
    if not out:
        raise InputError(f"{path}: no data rows")
    return out


def read_pharma_csv(path) -> list[tuple[str, ContingencyTable]]:
    rows = _open_rows(path)
    _check_header(path, rows[0][1], PHARMA_HEADER)
    out = []
    for lineno, row in rows[1:]:
        if len(row) != 5:
            raise InputError(f"{path}: line {lineno}: expected 5 fields, got {len(row)}")
        events, reports, total_events, total_reports = (
            _int_field(path, lineno, name, raw)
            for name, raw in zip(PHARMA_HEADER[1:], row[1:])
        )
        x11 = events
        x12 = reports - events
        x21 = total_events - events
        x22 = total_reports - total_events - x12
        if min(x12, x21, x22) < 0:
            raise InputError(
                f"{path}: line {lineno}: aggregates are inconsistent"
                " (expanded 2x2 table has a negative cell)"
            )
        out.append((row[0].strip(), ContingencyTable(x11, x12, x21, x22)))
    if not out:
        raise InputError(f"{path}: no data rows")
    return out


def _group_long_rows(path, rows, n_fields):
    """Group data rows by id preserving first-appearance order."""
    order = []
    groups = {}
    for lineno, row in rows:
        if len(row) != n_fields:
            raise InputError(
                f"{path}: line {lineno}: expected {n_fields} fields, got {len(row)}"
            )
        key = row[0].strip()
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append((lineno, row))
    return order, groups


def _build_distribution(path, ident, entries):
    atoms = np.array([a for a, _ in entries])
    cdf = np.array([c for _, c in entries])
    try:
        return NullDistribution(atoms=atoms, cdf=cdf)
    except ValueError as exc:
        raise InputError(f"{path}: id {ident}: {exc}")


def read_support_csv(path, require_observed=True) -> list[tuple[str, TestResult]]:
    """Parse a support dump back into per-hypothesis test results.

    When require_observed is false and the observed column is absent, the
    largest atom (always 1) is taken as observed, which is enough for
    consumers that only need the distributions.
    """
    rows = _open_rows(path)
    header = [c.strip() for c in rows[0][1]]
    if header == SUPPORT_HEADER:
        has_observed = True
    elif header == SUPPORT_HEADER[:3] and not require_observed:
        has_observed = False
    else:
        _check_header(path, rows[0][1], SUPPORT_HEADER)
        raise AssertionError("unreachable")
    n_fields = 4 if has_observed else 3
    order, groups = _group_long_rows(path, rows[1:], n_fields)
    if not order:
        raise InputError(f"{path}: no data rows")
    out = []
    for ident in order:
        entries = []
        observed_idx = []
        for offset, (lineno, row) in enumerate(groups[ident]):
            atom = _float_field(path, lineno, "atom", row[1])
            cdf = _float_field(path, lineno, "cdf", row[2])
            entries.append((atom, cdf))
            if has_observed:
                flag = _int_field(path, lineno, "observed", row[3])
                if flag not in (0, 1):
                    raise InputError(f"{path}: line {lineno}: observed must be 0 or 1")
                if flag:
                    observed_idx.append(offset)
        dist = _build_distribution(path, ident, entries)
        if has_observed:
            if len(observed_idx) != 1:
                raise InputError(
                    f"{path}: id {ident}: exactly one row must have observed=1"
                )
            k = observed_idx[0]
        else:
            k = dist.n_atoms - 1
        p = float(dist.atoms[k])
        mid = p - 0.5 * float(dist.point_masses[k])
        out.append((ident, TestResult(p_value=p, mid_p=mid, null=dist)))
    return out


def read_spec_csv(path) -> list[tuple[str, HypothesisSpec]]:
    """Parse an oracle spec: long-format model support plus a truth flag.

    An optional trailing gen_cdf column gives the generating distribution's
    cdf on the same atom grid (for false nulls whose p-values are not drawn
    from the model null); atoms where gen_cdf does not increase carry no
    generating mass.
    """
    rows = _open_rows(path)
    header = [c.strip() for c in rows[0][1]]
    if header == SPEC_HEADER:
        has_gen = False
    elif header == SPEC_HEADER + ["gen_cdf"]:
        has_gen = True
    else:
        _check_header(path, rows[0][1], SPEC_HEADER, optional=("gen_cdf",))
        raise AssertionError("unreachable")
    n_fields = 5 if has_gen else 4
    order, groups = _group_long_rows(path, rows[1:], n_fields)
    if not order:
        raise InputError(f"{path}: no data rows")
    out = []
    for ident in order:
        entries = []
        truth_flags = set()
        gen_cdf = []
        for lineno, row in groups[ident]:
            atom = _float_field(path, lineno, "atom", row[1])
            cdf = _float_field(path, lineno, "cdf", row[2])
            flag = _int_field(path, lineno, "is_true_null", row[3])
            if flag not in (0, 1):
                raise InputError(f"{path}: line {lineno}: is_true_null must be 0 or 1")
            truth_flags.add(flag)
            entries.append((atom, cdf))
            if has_gen:
                gen_cdf.append(_float_field(path, lineno, "gen_cdf", row[4]))
        if len(truth_flags) != 1:
            raise InputError(f"{path}: id {ident}: is_true_null differs across rows")
        model = _build_distribution(path, ident, entries)
        if not has_gen:
            spec = HypothesisSpec(null=model, is_true_null=bool(truth_flags.pop()))
        else:
            try:
                generating = NullDistribution(
                    atoms=model.atoms, cdf=np.asarray(gen_cdf)
                )
            except ValueError as exc:
                raise InputError(f"{path}: id {ident}: gen_cdf: {exc}")
            spec = HypothesisSpec(
                null=generating, is_true_null=bool(truth_flags.pop()), model=model
            )
        out.append((ident, spec))
    return out


def _read_family(args) -> tuple[list[str], Family, list[str]]:
    """Returns (ids, family, ids of degenerate rows) for adjust/bound inputs."""
    tail = TailDirection(args.tail)
    if args.format == "table":
        records = read_table_csv(args.input)
        results = [(i, fisher_exact(t, tail)) for i, t in records]
    elif args.format == "pharma":
        records = read_pharma_csv(args.input)
        results = [(i, fisher_exact(t, tail)) for i, t in records]
    else:
        results = read_support_csv(args.input, require_observed=args.command != "bound")
    ids = [i for i, _ in results]
    if len(set(ids)) != len(ids):
        raise InputError(f"{args.input}: duplicate ids")
    family = Family(tuple(r for _, r in results))
    degenerate = [i for i, r in results if r.null.n_atoms == 1]
    return ids, family, degenerate


def _fmt(value, digits):
    return f"{value:.{digits}g}"


def _print_matrix(ids, col_names, columns, out, fmt):
    widths = [max(len("id"), *(len(i) for i in ids))]
    cells = []
    for name, col in zip(col_names, columns):
        text = [fmt(v) for v in col]
        widths.append(max(len(name), *(len(t) for t in text)))
        cells.append(text)
    header = "  ".join(n.rjust(w) for n, w in zip(["id"] + list(col_names), widths))
    out.write(header + "\n")
    for r, ident in enumerate(ids):
        row = [ident.rjust(widths[0])]
        row += [cells[c][r].rjust(widths[c + 1]) for c in range(len(columns))]
        out.write("  ".join(row) + "\n")


def _parse_procedures(parser, raw):
    procs = []
    for name in raw.split(","):
        name = name.strip()
        try:
            procs.append(Procedure(name))
        except ValueError:
            choices = ", ".join(p.value for p in Procedure)
            parser.error(f"unknown procedure {name!r} (choose from {choices})")
    return tuple(procs)


def cmd_adjust(parser, args) -> int:
    procs = _parse_procedures(parser, args.procedures)
    ids, family, degenerate = _read_family(args)
    adjusted = [adjust(family, p, q=args.q, c=args.c) for p in procs]
    if degenerate:
        sys.stderr.write(
            "note: degenerate null (support {1}) for id "
            + ", ".join(degenerate)
            + "; p-value is pinned at 1 (midP at 0.5)\n"
        )
    if args.out:
        with open(args.out, "w") as fh:
            names = [p.value for p in procs]
            fh.write("id," + ",".join(names + [f"reject_{n}" for n in names]) + "\n")
            for r, ident in enumerate(ids):
                vals = [repr(float(a.values[r])) for a in adjusted]
                flags = [str(int(a.values[r] <= args.q + ATOL)) for a in adjusted]
                fh.write(ident + "," + ",".join(vals + flags) + "\n")
    else:
        _print_matrix(ids, [p.value for p in procs],
                      [a.values for a in adjusted], sys.stdout,
                      lambda v: _fmt(v, args.digits))
        for p, a in zip(procs, adjusted):
            k = reject_at_level(a, args.q).size
            sys.stdout.write(f"{p.value}: {k} rejection(s) at q={args.q:g}\n")
    return 0


def cmd_support(parser, args) -> int:
    tail = TailDirection(args.tail)
    reader = read_table_csv if args.format == "table" else read_pharma_csv
    records = reader(args.input)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        out.write(",".join(SUPPORT_HEADER) + "\n")
        for ident, table in records:
            result = fisher_exact(table, tail)
            dist = result.null
            k_obs = int(np.searchsorted(dist.atoms, result.p_value))
            for k in range(dist.n_atoms):
                out.write(
                    f"{ident},{float(dist.atoms[k])!r},{float(dist.cdf[k])!r},"
                    f"{int(k == k_obs)}\n"
                )
    finally:
        if args.out:
            out.close()
    return 0


def cmd_simulate(parser, args) -> int:
    config = SimulationConfig(
        m=args.m,
        N=args.N,
        n_null_low=args.null_low,
        n_null_high=args.null_high,
        n_false=args.false_count,
        rho=args.rho,
        reps=args.reps,
        q=args.q,
        seed=args.seed,
    )
    summary = run_study(config)
    if args.out:
        with open(args.out, "w") as fh:
            write_sweep_csv([summary], fh)
    else:
        write_sweep_csv([summary], sys.stdout)
    if args.out or args.verbose:
        dest = sys.stdout
        dest.write(f"scenario {config.scenario_id} ({config.reps} replicates)\n")
        for proc in summary.fdr_mean:
            dest.write(
                f"  {proc.value:>8}  fdr {summary.fdr_mean[proc]:.3f}"
                f" ({summary.fdr_se[proc]:.3f})"
                f"  power {summary.power_mean[proc]:.3f}"
                f" ({summary.power_se[proc]:.3f})\n"
            )
        if not summary.power_defined:
            dest.write("  note: no false nulls, power reported as 0\n")
    return 0


def cmd_bound(parser, args) -> int:
    ids, family, _ = _read_family(args)
    selection = tarone_select(family, args.q, c=args.c) if args.tarone else None
    result = midfdr_upper_bound(family, args.q, selection=selection)
    for ident, eps in zip(ids, result.epsilons):
        sys.stdout.write(f"epsilon[{ident}]={_fmt(eps, args.digits)}\n")
    if selection is not None:
        sys.stdout.write(f"tarone_mK={selection.mK}\n")
    sys.stdout.write(f"bound={_fmt(result.bound_all, args.digits)}\n")
    return 0


def cmd_oracle(parser, args) -> int:
    try:
        procedure = Procedure(args.procedure)
    except ValueError:
        choices = ", ".join(p.value for p in Procedure)
        parser.error(f"unknown procedure {args.procedure!r} (choose from {choices})")
    specs = [s for _, s in read_spec_csv(args.spec)]
    try:
        result = exact_fdr(
            specs, procedure, q=args.q, c=args.c, outcome_cap=args.cap
        )
    except OutcomeCapExceeded as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    sys.stdout.write(f"fdr={_fmt(result.fdr, args.digits)}\n")
    sys.stdout.write(f"power={_fmt(result.power, args.digits)}\n")
    sys.stdout.write(f"outcomes={result.outcome_count}\n")
    return 0


def cmd_demo(parser, args) -> int:
    tail = TailDirection.LESS
    results = [fisher_exact(t, tail) for t in DEMO_TABLES]
    family = Family(tuple(results))
    ids = [str(i + 1) for i in range(len(DEMO_TABLES))]
    sys.stdout.write("Ten studies relating treatment to an adverse event\n")
    sys.stdout.write("(one-sided Fisher's exact test, smaller treatment rate)\n\n")
    counts = np.array([[t.x11, t.x12, t.x21, t.x22] for t in DEMO_TABLES])
    cols = [counts[:, j] for j in range(4)]
    names = ["x11", "x12", "x21", "x22"]
    widths = [3] * 4
    header = " id  " + "  ".join(n.rjust(w) for n, w in zip(names, widths))
    sys.stdout.write(header + "   p-value  midP-value\n")
    for r, ident in enumerate(ids):
        row = "  ".join(str(int(c[r])).rjust(w) for c, w in zip(cols, widths))
        sys.stdout.write(
            f"{ident:>3}  {row}  {results[r].p_value:8.3f}  {results[r].mid_p:10.3f}\n"
        )
    sys.stdout.write("\nAdjusted p-values\n")
    adjusted = [adjust(family, p, q=args.q) for p in DEFAULT_PROCEDURES]
    _print_matrix(ids, [p.value for p in DEFAULT_PROCEDURES],
                  [a.values for a in adjusted], sys.stdout, lambda v: f"{v:.3f}")
    sys.stdout.write("\n")
    for p, a in zip(DEFAULT_PROCEDURES, adjusted):
        k = reject_at_level(a, args.q).size
        sys.stdout.write(f"{p.value}: {k} rejection(s) at q={args.q:g}\n")
    return 0


def _add_io_flags(sub, with_out=True):
    sub.add_argument("--input", required=True, help="input CSV file")
    sub.add_argument(
        "--format",
        choices=["table", "pharma", "support"],
        default="table",
        help="input schema (default: table)",
    )
    sub.add_argument(
        "--tail",
        choices=[t.value for t in TailDirection],
        default=TailDirection.LESS.value,
        help="test direction (default: less)",
    )
    if with_out:
        sub.add_argument("--out", help="write full-precision CSV here")


def _digits_flag(sub, default=6):
    sub.add_argument(
        "--digits",
        type=int,
        default=default,
        help=f"significant digits for printed numbers (default: {default})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discretefdr",
        description="FDR-controlling multiple testing for discrete statistics",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_adjust = subs.add_parser(
        "adjust", help="adjusted p-values and rejections for 2x2 tables"
    )
    _add_io_flags(p_adjust)
    p_adjust.add_argument(
        "--procedures",
        default=",".join(p.value for p in DEFAULT_PROCEDURES),
        help="comma-separated procedure names (default: %(default)s)",
    )
    p_adjust.add_argument("--q", type=float, default=0.05, help="FDR level")
    p_adjust.add_argument(
        "--c", type=float, default=1.0, help="selection-threshold multiplier"
    )
    _digits_flag(p_adjust)
    p_adjust.set_defaults(func=cmd_adjust)

    p_support = subs.add_parser(
        "support", help="dump attainable p-value supports as CSV"
    )
    p_support.add_argument("--input", required=True, help="input CSV file")
    p_support.add_argument(
        "--format", choices=["table", "pharma"], default="table",
        help="input schema (default: table)",
    )
    p_support.add_argument(
        "--tail",
        choices=[t.value for t in TailDirection],
        default=TailDirection.LESS.value,
        help="test direction (default: less)",
    )
    p_support.add_argument("--out", help="write CSV here instead of stdout")
    p_support.set_defaults(func=cmd_support)

    p_sim = subs.add_parser("simulate", help="Monte-Carlo FDR/power study")
    p_sim.add_argument("--m", type=int, required=True, help="number of hypotheses")
    p_sim.add_argument("--N", type=int, required=True, help="subjects per group")
    p_sim.add_argument(
        "--null-low", type=int, required=True,
        help="true nulls with success probability 0.01",
    )
    p_sim.add_argument(
        "--null-high", type=int, required=True,
        help="true nulls with success probability 0.1",
    )
    p_sim.add_argument(
        "--false", dest="false_count", type=int, required=True,
        help="false nulls (0.1 versus 0.3)",
    )
    p_sim.add_argument("--rho", type=float, default=0.0, help="equicorrelation")
    p_sim.add_argument("--reps", type=int, default=1000, help="replicates")
    p_sim.add_argument("--q", type=float, default=0.05, help="FDR level")
    p_sim.add_argument("--seed", type=int, default=0, help="RNG seed")
    p_sim.add_argument("--out", help="write long-format CSV here")
    p_sim.add_argument(
        "--verbose", action="store_true", help="print summary table to stdout"
    )
    p_sim.set_defaults(func=cmd_simulate)

    p_bound = subs.add_parser("bound", help="midP FDR upper bound for a family")
    _add_io_flags(p_bound, with_out=False)
    p_bound.add_argument("--q", type=float, default=0.05, help="FDR level")
    p_bound.add_argument(
        "--tarone", action="store_true",
        help="restrict to the selected subfamily before bounding",
    )
    p_bound.add_argument(
        "--c", type=float, default=1.0, help="selection-threshold multiplier"
    )
    _digits_flag(p_bound)
    p_bound.set_defaults(func=cmd_bound)

    p_oracle = subs.add_parser("oracle", help="exact FDR/power by enumeration")
    p_oracle.add_argument("--spec", required=True, help="hypothesis spec CSV")
    p_oracle.add_argument("--procedure", required=True, help="procedure name")
    p_oracle.add_argument("--q", type=float, default=0.05, help="FDR level")
    p_oracle.add_argument(
        "--c", type=float, default=1.0, help="selection-threshold multiplier"
    )
    p_oracle.add_argument(
        "--cap", type=int, default=DEFAULT_OUTCOME_CAP,
        help="refuse enumerations larger than this many joint outcomes",
    )
    _digits_flag(p_oracle)
    p_oracle.set_defaults(func=cmd_oracle)

    p_demo = subs.add_parser("demo", help="run the embedded ten-study example")
    p_demo.add_argument("--q", type=float, default=0.1, help="FDR level")
    p_demo.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
