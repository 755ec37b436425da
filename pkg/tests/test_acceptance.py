"""Acceptance gate: one check per criterion, each reported as a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""
import io
import math
import sys
import tempfile
import time
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))
from oracles import growth_per_capita, scan_equilibria  # noqa: E402

from relaxcycle.cli import run  # noqa: E402
from relaxcycle.cycle import (  # noqa: E402
    bistability_ratios,
    fast_fraction,
    find_limit_cycle,
    orientation,
    segment_phases,
)
from relaxcycle.equilibria import budworm_equilibria, fold_points, quasi_static_sweep  # noqa: E402
from relaxcycle.integrator import IntegratorSettings, integrate  # noqa: E402
from relaxcycle.model import ModelParams, StateNS, rhs_budworm, rhs_eroei, to_eroei_chart  # noqa: E402
from relaxcycle.reference import BISTABLE, CYCLIC, CYCLIC_Y0, FOLD_RANGE  # noqa: E402
from relaxcycle.tables import read_csv_table, to_csv_text, values_equal  # noqa: E402
from relaxcycle.toy import ToyMarketConfig, count_legs, steady_period, toy_two_well  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
SERIES = ROOT / "tests" / "fixtures" / "series.csv"
CONFIG = ROOT / "configs" / "reference.cfg"


def _log_uniform(rng, lo, hi, size=None):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def chart_equivalence():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(1000):
        r, k, b, eta, rho, s_max = _log_uniform(rng, 0.05, 20, 6)
        eps = float(_log_uniform(rng, 1e-4, 1.0))
        p = ModelParams(r=r, k=k, b=b, eta=eta, rho=rho, s_max=s_max, eps=eps)
        n, s = float(_log_uniform(rng, 1e-3, 1e3)), float(_log_uniform(rng, 1e-3, 1e2))
        ns = rhs_budworm(p, StateNS(n, s))
        ne = rhs_eroei(p, to_eroei_chart(StateNS(n, s)))
        # relative to the largest term in each sum, so exact cancellations do not divide by ~0
        n_scale = max(abs(ns.dn), p.r * n, p.r * n * n / (p.k * s), p.b)
        pushed = -ns.dslow / s**2
        e_scale = max(abs(pushed), p.rho / s, p.rho / p.s_max, p.eps * n / s**2)
        worst = max(worst, abs(ne.dn - ns.dn) / n_scale, abs(ne.dslow - pushed) / e_scale)
    assert worst <= 1e-12, f"worst relative error {worst:.3e}"
    return f"1000 samples, worst relative error {worst:.2e}"


def equilibria_oracle():
    rng = np.random.default_rng(2)
    worst, labels = 0.0, 0
    for _ in range(200):
        r, k, b, eta = _log_uniform(rng, 0.1, 10, 4)
        s = float(_log_uniform(rng, 0.05, 5))
        p = ModelParams(r=r, k=k, b=b, eta=eta)
        eq = budworm_equilibria(p, s)
        oracle = scan_equilibria(p, s)
        assert len(eq.values) == len(oracle), f"root count {len(eq.values)} vs {len(oracle)} at {p}, s={s}"
        worst = max([worst] + [abs(a - o) for a, o in zip(eq.values, oracle)])
        for rt in eq.roots:
            below = growth_per_capita(p, rt.n * (1 - 1e-6), s)
            above = growth_per_capita(p, rt.n * (1 + 1e-6), s)
            assert rt.stable == (below > 0 > above), f"stability label wrong at {p}, s={s}, n={rt.n}"
            labels += 1
    assert worst <= 1e-8, f"worst root error {worst:.3e}"
    return f"200 samples, worst root error {worst:.2e}, {labels}/{labels} labels agree"


def exact_roots():
    eq = budworm_equilibria(BISTABLE, 0.5)
    want = [(4 - math.sqrt(11)) / 2, 1.0, (4 + math.sqrt(11)) / 2]
    assert len(eq.values) == 3
    err = max(abs(a - b) for a, b in zip(eq.values, want))
    assert err <= 1e-9, f"error {err:.3e}"
    assert [rt.stability for rt in eq.roots] == ["stable", "unstable", "stable"]
    return f"max error {err:.2e}"


def fold_hysteresis():
    folds = fold_points(BISTABLE, FOLD_RANGE)
    trace = quasi_static_sweep(BISTABLE, [0.2, 1.2, 0.2])
    assert len(trace.jumps) == 2, f"{len(trace.jumps)} jumps"
    up, down = trace.jumps
    assert up.from_branch == "low" and down.from_branch == "high"
    d_up, d_down = abs(up.s - folds.s_plus), abs(down.s - folds.s_minus)
    assert max(d_up, d_down) <= 1e-6, f"jump offsets {d_up:.3e}, {d_down:.3e}"
    assert up.s > down.s
    return f"up jump S={up.s:.8f}, down jump S={down.s:.8f}, offsets {max(d_up, d_down):.1e}"


def limit_cycle():
    cyc = find_limit_cycle(CYCLIC, CYCLIC_Y0)
    segs = segment_phases(cyc)
    kinds = [s.kind for s in segs]
    frac = fast_fraction(cyc, segs)
    ratio = max(bistability_ratios(cyc))
    assert cyc.residual < 1e-6, f"residual {cyc.residual:.3e}"
    assert orientation(cyc) == "clockwise"
    assert len(segs) == 4 and all(kinds[i] != kinds[i - 1] for i in range(4)), kinds
    assert frac < 0.30, f"fast fraction {frac:.3f}"
    assert ratio > 2, f"price ratio {ratio:.3f}"
    return (f"period {cyc.period:.4f}, residual {cyc.residual:.1e}, clockwise, "
            f"{'|'.join(kinds)}, fast {frac:.1%}, price ratio {ratio:.1f}")


def integrator_order():
    def harmonic(t, y):
        return (y[1], -y[0])

    hs, errs = [], []
    for i in range(5):
        h = 2 * math.pi / (8 * 2**i)
        tr = integrate(harmonic, (1.0, 0.0), (0.0, 2 * math.pi), IntegratorSettings(fixed_step=h, h_init=h))
        hs.append(h)
        errs.append(math.hypot(tr.final[0] - 1.0, tr.final[1]))
    slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    assert 4.5 <= slope <= 5.5, f"slope {slope:.3f}"

    t1 = 10 * math.pi
    tr = integrate(harmonic, (1.0, 0.0), (0.0, t1))
    e_osc = math.hypot(tr.final[0] - math.cos(t1), tr.final[1] + math.sin(t1))
    tr = integrate(lambda t, y: (-y[0], 0.0), (1.0, 0.0), (0.0, 10.0))
    e_exp = abs(tr.final[0] - math.exp(-10.0))
    tr = integrate(lambda t, y: (y[0] * (1 - y[0]), 0.0), (0.1, 0.0), (0.0, 10.0))
    e_log = abs(tr.final[0] - 1 / (1 + 9 * math.exp(-10.0)))
    worst = max(e_osc, e_exp, e_log)
    assert worst < 1e-6, f"endpoint errors {e_osc:.2e}, {e_exp:.2e}, {e_log:.2e}"
    return f"slope {slope:.3f}, worst endpoint error {worst:.1e}"


def toy_market():
    steps = toy_two_well(ToyMarketConfig(cap1=1000, p1=100, p2=200))
    legs = count_legs(steady_period(steps))
    assert legs == {"fast": 2, "slow": 2}, legs
    return "2 fast price legs and 2 slow demand legs per period"


CLI_RUNS = [
    ["simulate", "--t-end", "100"],
    ["equilibria", "--s", "0.5"],
    ["folds", "--s-range", "0.1:2"],
    ["diagram", "--points", "100"],
    ["sweep", "--param", "k", "--values", "1,5,10", "--analysis", "folds"],
    ["cycle"],
    ["toy"],
    ["phaseplot", "--in", str(SERIES)],
]
WITH_SVG = {"simulate", "diagram", "cycle", "toy", "phaseplot"}


def io_determinism():
    svgs = 0
    with tempfile.TemporaryDirectory() as tmp:
        for args in CLI_RUNS:
            outs = []
            for tag in "ab":
                csv, svg = Path(tmp, f"{args[0]}{tag}.csv"), Path(tmp, f"{args[0]}{tag}.svg")
                extra = ["--config", str(CONFIG), "--out", str(csv)]
                if args[0] in WITH_SVG:
                    extra += ["--svg", str(svg)]
                code = run(args + extra)
                assert code == 0, f"{args[0]} exited {code}"
                outs.append((csv.read_bytes(), svg.read_bytes() if svg.exists() else None))
            assert outs[0] == outs[1], f"{args[0]} output differs between runs"
            table = read_csv_table(io.StringIO(outs[0][0].decode()))
            text = to_csv_text(table, list(table[0]) if table else None)
            assert text.encode() == outs[0][0] or not table, f"{args[0]} CSV does not re-serialise"
            if outs[0][1] is not None:
                ET.fromstring(outs[0][1])
                svgs += 1
    rows = [{"x": 0.1, "y": 1 / 3, "z": 1e-310, "w": -7, "s": "ok"}]
    back = read_csv_table(io.StringIO(to_csv_text(rows)))
    assert all(values_equal(rows[0][k], back[0][k]) for k in rows[0])
    return f"{len(CLI_RUNS)} subcommands byte-identical, CSV round-trips, {svgs} SVGs well-formed"


CRITERIA = [
    (1, "chart equivalence", chart_equivalence),
    (2, "equilibria oracle", equilibria_oracle),
    (3, "exact roots", exact_roots),
    (4, "fold/hysteresis consistency", fold_hysteresis),
    (5, "limit cycle", limit_cycle),
    (6, "integrator order", integrator_order),
    (7, "toy market", toy_market),
    (8, "I/O determinism", io_determinism),
]


def _check(number, name, func):
    start = time.perf_counter()
    try:
        detail = func()
    except Exception as exc:
        return False, f"FAIL criterion {number} ({name}): {type(exc).__name__}: {exc}"
    took = time.perf_counter() - start
    return True, f"PASS criterion {number} ({name}): {detail} [{took:.2f}s]"


@pytest.mark.parametrize("number,name,func", CRITERIA, ids=[f"criterion{n}" for n, _, _ in CRITERIA])
def test_criterion(number, name, func, capsys):
    ok, line = _check(number, name, func)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [_check(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
