"""qcorr command line: state inspection, measures, sweeps and self-verification.

    qcorr state    --c c1,c2,c3
    qcorr measures --c c1,c2,c3 [--oracle-grid N] [--min-variant]
    qcorr sweep    --channel bit-phase-flip|depolarizing|gad --c c1,c2,c3
                   [--p X | --gamma-fixed X] --grid start:stop:step
                   --measures m1,m2 --format csv|json [--out PATH] [--path closed|kraus]
    qcorr verify   --samples N --seed S

Exit codes: 0 success, 1 verification failure, 2 input error, 3 unsupported
combination. Every error is a single stderr line starting with ``error:``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from typing import Sequence

from . import measures, states
from .dynamics import SweepSpec, run_sweep, sweep_events
from .errors import MapUnavailable, QcorrError, Unphysical
from .verify import run_verification

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 1, 2, 3

_NUMBER_LIST = re.compile(r"^-[\d.]")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(value: float, digits: int = 12) -> str:
    """Locale-independent number text with ``digits`` significant digits."""
    return format(float(value) + 0.0, f".{digits}g")


def parse_c(text: str) -> states.CorrelationVector:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"--c expects three comma-separated numbers, got {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"--c expects three comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise UsageError(f"--c entries must be finite, got {text!r}")
    try:
        return states.CorrelationVector(*vals)
    except Unphysical as exc:
        raise UsageError(str(exc)) from None


def parse_grid(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"--grid expects start:stop:step, got {text!r}") from None
    if not (step > 0 and 0.0 <= start < stop <= 1.0):
        raise UsageError(f"--grid needs 0 <= start < stop <= 1 and step > 0, got {text!r}")
    if math.floor((stop - start) / step + 1e-9) < 1:
        raise UsageError(f"--grid {text!r} has fewer than 2 points")
    return start, stop, step


def parse_measures(text: str) -> tuple[str, ...]:
    names = tuple(n.strip().replace("-", "_") for n in text.split(",") if n.strip())
    bad = [n for n in names if n not in measures.MEASURES]
    if bad or not names:
        raise UsageError(f"--measures must be chosen from {','.join(measures.MEASURES)}, got {text!r}")
    return names


def parse_unit(name: str, text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise UsageError(f"{name} expects a number, got {text!r}") from None
    if not 0.0 <= v <= 1.0:
        raise UsageError(f"{name} must lie in [0, 1], got {text!r}")
    return v


def _physical(c: states.CorrelationVector) -> states.CorrelationVector:
    try:
        return states.require_physical(c)
    except Unphysical as exc:
        raise UsageError(str(exc)) from None


def cmd_state(args, out) -> int:
    c = parse_c(args.c)
    rho = states.bd_matrix(c)
    spectrum = states.bd_eigenvalues(c)
    out.write(f"correlation vector: ({', '.join(fmt(v) for v in c)})\n")
    out.write("density matrix (basis |00>, |01>, |10>, |11>):\n")
    for row in rho.real:
        out.write("  " + "  ".join(f"{fmt(v, 6):>10}" for v in row) + "\n")
    out.write("Bell spectrum:\n")
    for name, value in spectrum.items():
        out.write(f"  lambda_{name:<4} = {fmt(value)}\n")
    name, lowest = spectrum.minimum()
    if lowest < -states.PHYSICAL_TOL:
        out.write(f"verdict: unphysical (lambda_{name} = {fmt(lowest)})\n")
        raise UsageError(f"unphysical correlation vector: lambda_{name} = {fmt(lowest)} < 0")
    pure = max(spectrum.as_tuple()) >= 1.0 - 1e-12
    out.write(f"verdict: physical{' (pure)' if pure else ''}\n")
    state = states.bd_from_c(c)
    for sub in ("a", "b"):
        m = states.marginal(state, sub).real
        out.write(f"marginal {sub}: [[{fmt(m[0, 0])}, {fmt(m[0, 1])}], [{fmt(m[1, 0])}, {fmt(m[1, 1])}]]\n")
    return EXIT_OK


def cmd_measures(args, out) -> int:
    c = _physical(parse_c(args.c))
    if args.oracle_grid < 2:
        raise UsageError("--oracle-grid must be at least 2")
    state = states.bd_from_c(c)
    rows = [("concurrence", measures.concurrence_bd(c), measures.concurrence(state))]
    for name, dist in measures.ORACLE_DISTANCE.items():
        rows.append((name, measures.closed_form(c, name), measures.oracle_min(state, dist, args.oracle_grid).value))
    out.write(f"{'measure':<14}{'closed-form':>16}{'oracle':>16}{'gap':>12}\n")
    for name, closed, oracle in rows:
        out.write(f"{name:<14}{fmt(closed, 10):>16}{fmt(oracle, 10):>16}{abs(closed - oracle):>12.2e}\n")
    if args.min_variant:
        alt = measures.trace_min_smallest(c).value
        out.write(f"{'trace_min*':<14}{fmt(alt, 10):>16}{'-':>16}{'-':>12}\n")
        out.write("* min_i |c_i| reading; the maximum over measurements is the trace_min row\n")
    return EXIT_OK


def _sweep_spec(args) -> SweepSpec:
    c = _physical(parse_c(args.c))
    grid = parse_grid(args.grid)
    wanted = parse_measures(args.measures)
    path = {"closed": "closed-form", "kraus": "kraus"}[args.path]
    fixed, param = {}, None
    if args.channel == "gad":
        if args.p is not None and args.gamma_fixed is not None:
            raise UsageError("gad takes either --p (sweep gamma) or --gamma-fixed (sweep p), not both")
        if args.gamma_fixed is not None:
            param, fixed = "p", {"gamma": parse_unit("--gamma-fixed", args.gamma_fixed)}
        else:
            param = "gamma"
            fixed = {"p": parse_unit("--p", args.p) if args.p is not None else 0.5}
    elif args.p is not None or args.gamma_fixed is not None:
        raise UsageError(f"{args.channel} has a single parameter, which is swept; drop --p/--gamma-fixed")
    return SweepSpec(
        initial_c=c,
        channel=args.channel,
        grid=grid,
        sweep_parameter=param,
        fixed_params=fixed,
        measures=wanted,
        evolution_path=path,
    )


def _round(v: float) -> float:
    return float(fmt(v))


def render_csv(spec: SweepSpec, records) -> str:
    cols = ("param", "c1", "c2", "c3", *spec.measures)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        w.writerow([fmt(r.param), *(fmt(v) for v in r.c_t), *(fmt(r.values[m]) for m in spec.measures)])
    return buf.getvalue()


def render_json(spec: SweepSpec, records, events) -> str:
    doc = {
        "channel": spec.channel,
        "sweep_parameter": spec.sweep_parameter,
        "fixed_params": dict(spec.fixed_params),
        "initial_c": [_round(v) for v in spec.initial_c],
        "evolution_path": spec.evolution_path,
        "records": [
            {
                "param": _round(r.param),
                "c": [_round(v) for v in r.c_t],
                "values": {m: _round(r.values[m]) for m in spec.measures},
            }
            for r in records
        ],
        "events": {m: _round_events(e.as_dict()) for m, e in events.items()},
    }
    return json.dumps(doc, indent=2) + "\n"


def _round_events(d: dict) -> dict:
    def r(v):
        if isinstance(v, list):
            return [r(x) for x in v]
        return _round(v) if isinstance(v, float) else v

    return {k: r(v) for k, v in d.items()}


def event_summary(events) -> str:
    lines = []
    for m, e in events.items():
        esd = "none" if e.esd_threshold is None else fmt(e.esd_threshold, 8)
        dark = ",".join(fmt(x, 8) for x in e.dark_points) or "none"
        rev = ",".join(f"{fmt(a, 8)}->{fmt(b, 8)}" for a, b in e.revivals) or "none"
        kinks = ",".join(fmt(x, 8) for x in e.kinks) or "none"
        lines.append(f"events {m}: esd={esd} dark={dark} revival={rev} kinks={kinks}")
    return "\n".join(lines) + "\n"


def cmd_sweep(args, out, err) -> int:
    spec = _sweep_spec(args)
    records = run_sweep(spec)
    events = sweep_events(spec, records)
    text = render_csv(spec, records) if args.format == "csv" else render_json(spec, records, events)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    err.write(event_summary(events))
    return EXIT_OK


def cmd_verify(args, out) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    if args.oracle_grid < 2:
        raise UsageError("--oracle-grid must be at least 2")
    ok = run_verification(args.samples, args.seed, out, oracle_grid=args.oracle_grid)
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcorr", description="Entanglement and measurement-induced nonlocality of Bell-diagonal states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", help="matrix, Bell spectrum and marginals of a Bell-diagonal state")
    p.add_argument("--c", required=True, help="correlation vector c1,c2,c3")

    p = sub.add_parser("measures", help="closed-form and oracle values of all four measures")
    p.add_argument("--c", required=True, help="correlation vector c1,c2,c3")
    p.add_argument("--oracle-grid", type=int, default=60, help="theta/phi grid size of the oracle (default 60)")
    p.add_argument("--min-variant", action="store_true", help="also print the min_i |c_i| trace-MIN reading")

    p = sub.add_parser("sweep", help="evolve under a noise channel and tabulate the measures")
    p.add_argument("--channel", required=True, choices=("bit-phase-flip", "depolarizing", "gad"))
    p.add_argument("--c", required=True, help="initial correlation vector c1,c2,c3")
    p.add_argument("--p", default=None, help="gad only: fixed stationary population p while gamma is swept")
    p.add_argument("--gamma-fixed", default=None, help="gad only: fixed gamma while p is swept")
    p.add_argument("--grid", default="0:1:0.01", help="start:stop:step within [0, 1] (default 0:1:0.01)")
    p.add_argument("--measures", default=",".join(measures.MEASURES), help="comma-separated subset of measures")
    p.add_argument("--format", default="csv", choices=("csv", "json"))
    p.add_argument("--out", default=None, help="write to this file instead of stdout")
    p.add_argument("--path", default="closed", choices=("closed", "kraus"), help="closed-form map or full Kraus evolution")

    p = sub.add_parser("verify", help="run the property suite and list known discrepancies")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-grid", type=int, default=60)
    return parser


def _join_negative_values(argv: Sequence[str]) -> list[str]:
    # "--c -1,1,1" would otherwise be read as an unknown option
    out, i = [], 0
    argv = list(argv)
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NUMBER_LIST.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(_join_negative_values(argv))
        if args.command == "state":
            return cmd_state(args, out)
        if args.command == "measures":
            return cmd_measures(args, out)
        if args.command == "sweep":
            return cmd_sweep(args, out, err)
        return cmd_verify(args, out)
    except UsageError as exc:
        err.write(f"error: {_one_line(exc)}\n")
        return EXIT_INPUT
    except MapUnavailable as exc:
        err.write(f"error: {_one_line(exc)}\n")
        return EXIT_UNSUPPORTED
    except (QcorrError, ValueError, OSError) as exc:
        err.write(f"error: {_one_line(exc)}\n")
        return EXIT_INPUT


def _one_line(exc: BaseException) -> str:
    return " ".join(str(exc).split())


if __name__ == "__main__":
    sys.exit(main())
