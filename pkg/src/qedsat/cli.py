"""Command-line experiment runner.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 runtime error.
"""

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

from .amplitudes import amplitude_matrix
from .basis import UR, ProcessKind
from .config import CONFIG_KEYS, load_config
from .dynamics import AngleSchedule, closed_form_random_product, iterate
from .entanglement import Kind, fidelity, state
from .errors import ConfigError, QedsatError
from .spectral import predict_asymptote
from .svg import line_plot
from .verification import FAULTS, verify

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3

TRAJECTORY_HEADER = ["n", "theta", "concurrence", "re_a", "im_a", "re_b", "im_b", "re_c", "im_c", "re_d", "im_d"]


def fmt(x):
    """17 significant digits, stable across platforms."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if x == 0.0:
        return "0"  # folds -0.0
    return "%.17g" % x


def _writer(buf):
    return csv.writer(buf, lineterminator="\n")


def trajectory_csv(traj):
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(TRAJECTORY_HEADER)
    for k in range(len(traj)):
        amps = traj.states[k]
        row = [str(k), fmt(traj.thetas[k]), fmt(traj.concurrences[k])]
        for a in amps:
            row += [fmt(a.real), fmt(a.imag)]
        w.writerow(row)
    return buf.getvalue()


def _write(path, text):
    if path in (None, "", "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _regime_label(mu):
    return "ur" if math.isinf(mu) else fmt(mu)


def _plot(traj, cfg, title):
    if cfg.svg:
        _write(cfg.svg, line_plot(traj.n, {"C": traj.concurrences}, title=title))


# -- commands ----------------------------------------------------------------


def cmd_iterate(cfg):
    cfg.validate("iterate")
    seed = cfg.seed_value
    schedule = AngleSchedule.random(seed) if seed is not None else AngleSchedule.fixed(cfg.theta_value)
    traj = iterate(
        cfg.process_kind, cfg.mu, schedule, cfg.initial_state, cfg.steps_value, cfg.tol_value, cfg.window_value
    )
    _write(cfg.csv, trajectory_csv(traj))
    _plot(traj, cfg, f"{cfg.process_kind.value} mu={_regime_label(cfg.mu)} initial={cfg.initial}")
    return traj


def cmd_sweep(cfg):
    cfg.validate("sweep")
    proc, init, n = cfg.process_kind, cfg.initial_state, cfg.steps_value
    values = cfg.grid_values
    if cfg.axis == "theta":
        mu = cfg.mu

        def job(v):
            return iterate(proc, mu, AngleSchedule.fixed(v), init, n, cfg.tol_value, cfg.window_value)

    else:
        theta = cfg.theta_value

        def job(v):
            return iterate(proc, v, AngleSchedule.fixed(theta), init, n, cfg.tol_value, cfg.window_value)

    with ThreadPoolExecutor(max_workers=cfg.workers_value) as pool:
        trajs = list(pool.map(job, values))
    order = sorted(range(len(values)), key=lambda k: values[k])
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(["axis_value", "n", "concurrence"])
    for k in order:
        for step, c in enumerate(trajs[k].concurrences):
            w.writerow([fmt(values[k]), str(step), fmt(c)])
    _write(cfg.csv, buf.getvalue())
    if cfg.svg:
        series = {f"{cfg.axis}={values[k]:.4g}": trajs[k].concurrences for k in order[:12]}
        _write(cfg.svg, line_plot(trajs[0].n, series, title=f"{proc.value} sweep over {cfg.axis}"))
    return {values[k]: trajs[k] for k in order}


def schedule_csv(realized):
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(["theta", "k"])
    for th, k in realized:
        w.writerow([fmt(th), str(k)])
    return buf.getvalue()


def cmd_random_walk(cfg, check_closed_form=False, out=None):
    cfg.validate("random-walk")
    proc, mu = cfg.process_kind, cfg.mu
    if check_closed_form and not (proc is ProcessKind.BHABHA and math.isinf(mu)):
        raise ConfigError("check_closed_form", "the product formula covers ultrarelativistic Bhabha only")
    init = cfg.initial_state
    if check_closed_form and fidelity(init, state("RL")) < 1.0 - 1e-12:
        raise ConfigError("check_closed_form", "the product formula starts from |RL>")
    schedule = AngleSchedule.random(cfg.seed_value)
    traj = iterate(proc, mu, schedule, init, cfg.steps_value, cfg.tol_value, cfg.window_value)
    _write(cfg.csv, trajectory_csv(traj))
    sidecar = cfg.schedule_out or (f"{cfg.csv}.schedule.csv" if cfg.csv not in (None, "", "-") else None)
    if sidecar:
        _write(sidecar, schedule_csv(schedule.realized))
    _plot(traj, cfg, f"{proc.value} random angles seed={cfg.seed_value}")
    fid = None
    if check_closed_form:
        fid = fidelity(traj.final_state, closed_form_random_product(schedule.realized))
        print(f"closed-form fidelity: {fmt(fid)}", file=out or sys.stdout)
    return traj, schedule, fid


TABLE_ROWS = (
    ("bhabha", "RL", "ur"),
    ("bhabha", "RL", "nr"),
    ("bhabha", "RR", "nr"),
    ("moller", "RL", "ur"),
    ("moller", "RR", "nr"),
    ("moller", "RL", "nr"),
    ("annihilation", "RL", "ur"),
    ("annihilation", "RR", "ur"),
)
NR_MU = 0.01
TABLE_THETA = math.pi / 4


def asymptote_row(process, initial, regime, theta=TABLE_THETA):
    mu = UR if regime == "ur" else NR_MU
    a = predict_asymptote(amplitude_matrix(process, mu, theta), state(initial))
    cls = a.classification
    row = {
        "process": process,
        "initial": initial,
        "regime": regime,
        "mu": None if math.isinf(mu) else mu,
        "theta": theta,
        "predicted": a.label if a.kind != "converges" or cls.kind is not Kind.BELL else cls.which,
        "kind": a.kind,
        "classification": cls.kind.value if cls else None,
        "plane": list(cls.plane) if cls and cls.plane else None,
        "fidelity": None,
        "concurrence": None,
        "margin": a.report.get("margin"),
    }
    if a.state is not None:
        row["concurrence"] = float(cls.concurrence)
        if cls.kind is Kind.BELL:
            row["fidelity"] = fidelity(a.state, state(cls.which))
    elif a.kind == "planar":
        row["concurrence"] = 1.0
    elif a.kind == "annihilated":
        row["concurrence"] = 0.0
    return row


def cmd_asymptote_table(rows=TABLE_ROWS):
    return [asymptote_row(*r) for r in rows]


def table_json(rows):
    return json.dumps(rows, indent=2, sort_keys=True) + "\n"


def cmd_verify(level="fast", fault=None, out=None):
    ok, text = verify(level, fault)
    print(text, file=out or sys.stdout)
    return EXIT_OK if ok else EXIT_VERIFY


# -- argument parsing --------------------------------------------------------


def _add_run_flags(p):
    p.add_argument("--config", help="INI file with run settings")
    for key in CONFIG_KEYS:
        flags = sorted({"--" + key, "--" + key.replace("_", "-")})
        p.add_argument(*flags, dest=key, default=None)


def build_parser():
    parser = argparse.ArgumentParser(prog="qedsat", description="Iterated QED helicity maps and entanglement saturation")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("iterate", help="iterate a map at a fixed (or seeded random) angle")
    _add_run_flags(p)
    p = sub.add_parser("sweep", help="iterate over a theta or mu grid")
    _add_run_flags(p)
    p = sub.add_parser("random-walk", help="iterate with seeded random angles")
    _add_run_flags(p)
    p.add_argument("--check-closed-form", action="store_true", help="compare with the product formula")
    p = sub.add_parser("asymptote-table", help="predicted asymptotic states as JSON")
    p.add_argument("--output", "-o", default=None)
    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("level", nargs="?", choices=("fast", "full"), default="fast")
    p.add_argument("--inject-fault", choices=FAULTS, default=None, help=argparse.SUPPRESS)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors already
        return int(exc.code or 0)
    try:
        if args.command == "verify":
            return cmd_verify(args.level, args.inject_fault)
        if args.command == "asymptote-table":
            _write(args.output, table_json(cmd_asymptote_table()))
            return EXIT_OK
        overrides = {k: getattr(args, k) for k in CONFIG_KEYS}
        cfg = load_config(args.config, overrides)
        if args.command == "iterate":
            cmd_iterate(cfg)
        elif args.command == "sweep":
            cmd_sweep(cfg)
        elif args.command == "random-walk":
            cmd_random_walk(cfg, args.check_closed_form)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QedsatError, OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
