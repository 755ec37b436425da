"""``relaxcycle`` command line.

Exit codes: 0 success, 1 invalid input or configuration, 2 numerical
failure. Diagnostics go to stderr; results go to ``--out`` (stdout when
omitted or ``-``).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .config import KEYS, parse_config
from .cycle import fast_fraction, find_limit_cycle, orientation, segment_phases
from .equilibria import branch_diagram, budworm_equilibria, fold_points
from .errors import IntegrationError, NumericalError, ValidationError
from .integrator import integrate
from .model import NE, NS, StateNE, StateNS, vector_field
from .series import (
    diagram_polylines,
    orbit_polyline,
    phase_polyline,
    read_series_csv,
    toy_polyline,
    trajectory_polyline,
)
from .svg import SvgStyle, render_svg, write_svg
from .sweep import ANALYSES, SweepSpec, run_sweep
from .tables import format_value, to_csv_text, write_csv
from .toy import ToyMarketConfig, count_legs, steady_period, toy_two_well

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _range(text: str) -> tuple[float, float]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    try:
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers in lo:hi, got {text!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _guide(text: str):
    vals = _floats(text)
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("guide needs x0,y0,x1,y1")
    return (vals[0], vals[1]), (vals[2], vals[3])


def _emit_text(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        _write_bytes(text, out)


def _write_bytes(text: str, path) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(text.encode("utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot write {path!r}: {exc.strerror or exc}") from None


def _emit_table(rows, out, columns=None) -> None:
    _emit_text(to_csv_text(rows, columns), out)


def _state(args, chart):
    if args.s0 is not None and args.e0 is not None:
        raise UsageError("give only one of --s0 and --e0")
    if args.e0 is not None:
        ne = StateNE(args.n0, args.e0)
    else:
        ne = StateNE(args.n0, 1.0 / args.s0) if args.s0 is not None else StateNE(args.n0, 2.5)
        if args.s0 is not None:
            StateNS(args.n0, args.s0)
    return ne


def cmd_simulate(args, cfg):
    ne = _state(args, args.chart)
    y0 = (ne.n, ne.e) if args.chart == NE else (ne.n, 1.0 / ne.e)
    field = vector_field(cfg.params, args.chart)
    try:
        traj = integrate(field, y0, (0.0, args.t_end), cfg.settings, chart=args.chart)
    except IntegrationError as exc:
        if exc.partial is not None and len(exc.partial.times) > 0:
            _emit_table(exc.partial, args.out)
            if args.svg and len(exc.partial.times) > 1:
                write_svg(render_svg(trajectory_polyline(exc.partial, cfg.theta)), args.svg)
        raise
    _emit_table(traj, args.out)
    if args.svg:
        write_svg(render_svg(trajectory_polyline(traj, cfg.theta),
                             SvgStyle(title="Simulated phase plot")), args.svg)
    print(f"simulate: {traj.accepted} accepted, {traj.rejected} rejected steps", file=sys.stderr)


def cmd_equilibria(args, cfg):
    eq = budworm_equilibria(cfg.params, args.s)
    rows = [{"s": eq.s, "n": 0.0, "stability": eq.zero_stability}]
    rows += [{"s": eq.s, "n": rt.n, "stability": rt.stability} for rt in eq.roots]
    _emit_table(rows, args.out, ["s", "n", "stability"])


def cmd_folds(args, cfg):
    folds = fold_points(cfg.params, args.s_range, args.points)
    columns = ["status", "s_minus", "s_plus", "bracket_width"]
    if folds is None:
        row = {"status": "no-folds"}
    else:
        row = {"status": "ok", "s_minus": folds.s_minus, "s_plus": folds.s_plus,
               "bracket_width": folds.bracket_width}
    _emit_table([row], args.out, columns)


def cmd_diagram(args, cfg):
    lo, hi = args.s_range
    if not 0 < lo < hi:
        raise UsageError("--s-range needs 0 < lo < hi")
    grid = np.geomspace(lo, hi, args.points) if args.log else np.linspace(lo, hi, args.points)
    rows = branch_diagram(cfg.params, grid.tolist())
    _emit_table(rows, args.out, ["s", "n", "stability"])
    if args.svg:
        write_svg(render_svg(diagram_polylines(rows), SvgStyle(title="Equilibrium branches")), args.svg)


def cmd_sweep(args, cfg):
    names, grids = [args.param], [args.values]
    if args.param2:
        if not args.values2:
            raise UsageError("--param2 needs --values2")
        names.append(args.param2)
        grids.append(args.values2)
    spec = SweepSpec(cfg.params, tuple(names), tuple(grids), args.analysis, s=args.s,
                     s_range=args.s_range, settings=cfg.settings, max_periods=args.max_periods)
    rows = run_sweep(spec, workers=args.workers)
    _emit_table(rows, args.out, spec.columns)


def cmd_cycle(args, cfg):
    y0 = _state(args, NE)
    cyc = find_limit_cycle(cfg.params, y0, cfg.settings, args.max_periods)
    segs = segment_phases(cyc, cfg.theta, cfg.min_len)
    summary = {
        "period": cyc.period,
        "residual": cyc.residual,
        "section_level": cyc.section_level,
        "orientation": orientation(cyc),
        "segments": len(segs),
        "segment_kinds": "|".join(s.kind for s in segs),
        "fast_fraction": fast_fraction(cyc, segs),
        "n_min": float(cyc.n.min()),
        "n_max": float(cyc.n.max()),
        "e_min": float(cyc.e.min()),
        "e_max": float(cyc.e.max()),
    }
    text = "".join(f"{k}={format_value(v)}\n" for k, v in summary.items())
    if args.out in (None, "-"):
        _emit_text(text, None)
    else:
        m = len(cyc.orbit) - 1
        kind = ["slow"] * m
        for seg in segs:
            for i in seg.indices(m):
                kind[i] = seg.kind
        kind.append(kind[0])
        rows = [{"t": t, "n": n, "e": e, "phase": k}
                for t, (n, e), k in zip(cyc.times.tolist(), cyc.orbit.tolist(), kind)]
        write_csv(rows, args.out, ["t", "n", "e", "phase"])
        sys.stderr.write(text)
    if args.svg:
        write_svg(render_svg(orbit_polyline(cyc, segs), SvgStyle(title="Limit cycle")), args.svg)


def cmd_toy(args, cfg):
    conf = ToyMarketConfig(args.cap1, args.p1, args.p2, args.up, args.down, args.steps)
    steps = toy_two_well(conf, args.d0)
    rows = [{"step": i, "demand": s.demand, "price": s.price, "leg": s.leg, "kind": s.kind}
            for i, s in enumerate(steps)]
    _emit_table(rows, args.out, ["step", "demand", "price", "leg", "kind"])
    try:
        legs = count_legs(steady_period(steps))
        print(f"toy: steady cycle with {legs['fast']} fast and {legs['slow']} slow legs", file=sys.stderr)
    except ValidationError as exc:
        print(f"toy: {exc}", file=sys.stderr)
    if args.svg:
        write_svg(render_svg(toy_polyline(steps), SvgStyle(title="Two-well market")), args.svg)


def cmd_phaseplot(args, cfg):
    rows = read_series_csv(args.input)
    poly = phase_polyline(rows, args.theta)
    table = []
    for i, r in enumerate(rows):
        table.append({"year": r.year, "production": r.production, "price": r.price,
                      "edge_speed": float(poly.speeds[i]) if i < poly.edge_count else None,
                      "edge_label": poly.labels[i] if i < poly.edge_count else None})
    _emit_table(table, args.out, ["year", "production", "price", "edge_speed", "edge_label"])
    if args.svg:
        style = SvgStyle(title=args.title, show_vertices=True, guides=tuple(args.guide or ()))
        write_svg(render_svg(poly, style), args.svg)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value configuration file")
    for key in KEYS:
        common.add_argument(f"--{key}", dest=key, metavar="VALUE", default=None)

    parser = _Parser(prog="relaxcycle", description="Budworm / oil-price relaxation cycle toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(func=func)
        return p

    def add_state(p):
        p.add_argument("--n0", type=float, default=0.3, help="initial price / budworm level")
        p.add_argument("--s0", type=float, help="initial foliage S (1/EROEI)")
        p.add_argument("--e0", type=float, help="initial EROEI E (default 2.5)")

    p = add("simulate", cmd_simulate, "integrate a trajectory and write it as CSV")
    add_state(p)
    p.add_argument("--chart", choices=[NS, NE], default=NE)
    p.add_argument("--t-end", type=float, default=200.0)
    p.add_argument("--out")
    p.add_argument("--svg")

    p = add("equilibria", cmd_equilibria, "equilibria of the fast equation at fixed S")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--out")

    p = add("folds", cmd_folds, "critical values S- and S+")
    p.add_argument("--s-range", type=_range, default=(0.1, 2.0))
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--out")

    p = add("diagram", cmd_diagram, "equilibrium branch diagram over a range of S")
    p.add_argument("--s-range", type=_range, default=(0.1, 2.0))
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--log", action="store_true", help="geometric grid")
    p.add_argument("--out")
    p.add_argument("--svg")

    p = add("sweep", cmd_sweep, "sweep one or two parameters")
    p.add_argument("--param", required=True)
    p.add_argument("--values", type=_floats, required=True)
    p.add_argument("--param2")
    p.add_argument("--values2", type=_floats)
    p.add_argument("--analysis", choices=ANALYSES, default="folds")
    p.add_argument("--s", type=float, default=0.5, help="S for analysis=equilibria")
    p.add_argument("--s-range", type=_range, default=(0.1, 2.0))
    p.add_argument("--max-periods", type=int, default=200)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")

    p = add("cycle", cmd_cycle, "limit cycle, phase segments and orientation")
    add_state(p)
    p.add_argument("--max-periods", type=int, default=200)
    p.add_argument("--out", help="orbit CSV; the summary then goes to stderr")
    p.add_argument("--svg")

    p = add("toy", cmd_toy, "two-well oil market cycle")
    p.add_argument("--cap1", type=float, default=1000.0)
    p.add_argument("--p1", type=float, default=100.0)
    p.add_argument("--p2", type=float, default=200.0)
    p.add_argument("--up", type=float, default=50.0)
    p.add_argument("--down", type=float, default=300.0)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--d0", type=float, default=0.0)
    p.add_argument("--out")
    p.add_argument("--svg")

    p = add("phaseplot", cmd_phaseplot, "annotated phase plot of a year,production,price series")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--theta", type=float, default=2.0)
    p.add_argument("--title", default="Production vs price")
    p.add_argument("--guide", type=_guide, action="append", help="x0,y0,x1,y1 reference line")
    p.add_argument("--out")
    p.add_argument("--svg")
    return parser


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        overrides = {key: getattr(args, key) for key in KEYS}
        cfg = parse_config(args.config, overrides)
        args.func(args, cfg)
    except SystemExit as exc:  # --help and --version
        return EXIT_OK if not exc.code else EXIT_INVALID
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except Exception as exc:  # noqa: BLE001 - exit-code taxonomy must stay closed
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main() -> None:
    sys.exit(run())
