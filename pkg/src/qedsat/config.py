"""Run configuration: INI file plus command-line overrides.

Sections only group keys; every key name is unique so a flag of the same
name (``--saturation_tol`` or ``--saturation-tol``) can override it.

Example::

    [run]
    process = bhabha
    regime = ur
    initial = RL
    theta = pi/4
    steps = 200

    [tolerances]
    saturation_tol = 1e-6
    saturation_window = 5

    [output]
    csv = traj.csv
    svg = traj.svg
"""

import ast
import configparser
import math
import operator
import re
from dataclasses import dataclass, fields

import numpy as np

from .basis import UR, ProcessKind
from .entanglement import normalize, state
from .errors import ConfigError, ZeroVector

MAX_STEPS = 1_000_000

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def parse_angle(text, name="theta"):
    """Radians from '0.5', 'pi', 'pi/4', '3*pi/4', '-pi/8 + 1'."""
    if isinstance(text, (int, float)):
        return float(text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in ("pi", "π"):
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        raise ValueError("unsupported expression")

    src = str(text).strip().replace("π", "pi")
    src = re.sub(r"(\d)\s*pi", r"\1*pi", src)  # allow '3pi/4'
    try:
        value = ev(ast.parse(src, mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(name, f"cannot parse angle {text!r} ({exc})") from None
    if not math.isfinite(value):
        raise ConfigError(name, f"angle {text!r} is not finite")
    return value


def parse_regime(text):
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        mu = float(text)
    else:
        key = str(text).strip().lower()
        if key in ("ur", "inf", "infinity"):
            return UR
        try:
            mu = float(key)
        except ValueError:
            raise ConfigError("regime", f"expected 'ur' or a positive number, got {text!r}") from None
    if not mu > 0:
        raise ConfigError("regime", f"mu must be > 0, got {mu!r}")
    return mu


def parse_initial(text):
    """Named state (RR, RL, LR, LL, Phi+, ...) or four comma-separated complex numbers."""
    if not isinstance(text, str):
        vec = np.asarray(text, dtype=complex)
    else:
        try:
            return state(text)
        except KeyError:
            pass
        parts = [p.strip().replace(" ", "") for p in text.split(",")]
        if len(parts) != 4:
            raise ConfigError("initial", f"expected a state name or 4 amplitudes, got {text!r}")
        try:
            vec = np.array([complex(p.replace("i", "j")) for p in parts])
        except ValueError:
            raise ConfigError("initial", f"cannot parse amplitudes {text!r}") from None
    try:
        return normalize(vec)
    except ZeroVector:
        raise ConfigError("initial", "initial state is the zero vector") from None


def parse_grid(text, name="grid", angle=True):
    """'a, b, c' or 'linspace(a, b, k)' (endpoints inclusive) or 'open(a, b, k)' (interior points)."""
    src = str(text).strip()
    m = re.fullmatch(r"(linspace|open)\((.*)\)", src)
    conv = (lambda s: parse_angle(s, name)) if angle else (lambda s: _float(s, name))
    if m:
        args = [a.strip() for a in m.group(2).split(",")]
        if len(args) != 3:
            raise ConfigError(name, f"{m.group(1)} needs (start, stop, count), got {text!r}")
        lo, hi = conv(args[0]), conv(args[1])
        try:
            k = int(args[2])
        except ValueError:
            raise ConfigError(name, f"count must be an integer, got {args[2]!r}") from None
        if k < 1:
            raise ConfigError(name, "grid must be non-empty")
        if m.group(1) == "open":
            return list(np.linspace(lo, hi, k + 2)[1:-1])
        return list(np.linspace(lo, hi, k))
    values = [conv(p) for p in src.split(",") if p.strip()]
    if not values:
        raise ConfigError(name, "grid must be non-empty")
    return values


def _float(text, name):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigError(name, f"expected a number, got {text!r}") from None


def _int(text, name):
    try:
        return int(str(text).strip())
    except (TypeError, ValueError):
        raise ConfigError(name, f"expected an integer, got {text!r}") from None


@dataclass
class RunConfig:
    process: str = "bhabha"
    regime: str = "ur"
    initial: str = "RL"
    theta: str | None = "pi/4"
    seed: str | None = None
    steps: str = "50"
    saturation_tol: str = "1e-6"
    saturation_window: str = "5"
    csv: str | None = None
    svg: str | None = None
    schedule_out: str | None = None
    axis: str | None = None
    grid: str | None = None
    workers: str | None = None

    # -- typed views (validated) ---------------------------------------------

    @property
    def process_kind(self):
        try:
            return ProcessKind.parse(self.process)
        except ValueError:
            raise ConfigError("process", f"unknown process {self.process!r}") from None

    @property
    def mu(self):
        return parse_regime(self.regime)

    @property
    def initial_state(self):
        return parse_initial(self.initial)

    @property
    def theta_value(self):
        if self.theta in (None, ""):
            raise ConfigError("theta", "a scattering angle is required")
        th = parse_angle(self.theta, "theta")
        if not 0.0 < th < 2.0 * math.pi:
            raise ConfigError("theta", f"angle {th!r} outside (0, 2pi)")
        return th

    @property
    def seed_value(self):
        if self.seed in (None, ""):
            return None
        return _int(self.seed, "seed")

    @property
    def steps_value(self):
        n = _int(self.steps, "steps")
        if not 1 <= n <= MAX_STEPS:
            raise ConfigError("steps", f"must be in [1, {MAX_STEPS}], got {n}")
        return n

    @property
    def tol_value(self):
        tol = _float(self.saturation_tol, "saturation_tol")
        if not 0.0 < tol < 1.0:
            raise ConfigError("saturation_tol", f"must be in (0, 1), got {tol}")
        return tol

    @property
    def window_value(self):
        w = _int(self.saturation_window, "saturation_window")
        if w < 1:
            raise ConfigError("saturation_window", "must be >= 1")
        return w

    @property
    def workers_value(self):
        if self.workers in (None, ""):
            return None
        w = _int(self.workers, "workers")
        if w < 1:
            raise ConfigError("workers", "must be >= 1")
        return w

    def validate(self, command):
        """Type-check every field used by ``command``; raise ConfigError on the first bad one."""
        self.process_kind, self.mu, self.initial_state, self.steps_value
        self.tol_value, self.window_value, self.workers_value
        seed = self.seed_value
        if command == "iterate":
            if seed is None:
                self.theta_value
        elif command == "random-walk":
            if seed is None:
                raise ConfigError("seed", "random-walk needs a seed")
        elif command == "sweep":
            if self.axis not in ("theta", "mu"):
                raise ConfigError("axis", f"expected 'theta' or 'mu', got {self.axis!r}")
            if self.grid in (None, ""):
                raise ConfigError("grid", "sweep needs a grid")
            values = self.grid_values
            if self.axis == "theta":
                if any(not 0.0 < v < math.pi for v in values):
                    raise ConfigError("grid", "theta grid must lie inside (0, pi)")
            else:
                self.theta_value
                if any(not v > 0 for v in values):
                    raise ConfigError("grid", "mu grid must be positive")
        return self

    @property
    def grid_values(self):
        if self.axis != "mu":
            return parse_grid(self.grid, "grid", angle=True)
        if "(" in str(self.grid):
            return parse_grid(self.grid, "grid", angle=False)
        try:
            return [parse_regime(v) for v in str(self.grid).split(",")]
        except ConfigError as exc:
            raise ConfigError("grid", exc.message) from None


CONFIG_KEYS = tuple(f.name for f in fields(RunConfig))


def load_config(path=None, overrides=None):
    """Read an INI file (optional) and apply non-None overrides."""
    cfg = RunConfig()
    if path:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
        except configparser.Error as exc:
            raise ConfigError("config", f"malformed file {path}: {exc}") from None
        for section in parser.sections():
            for key, value in parser.items(section):
                norm = key.replace("-", "_")
                if norm not in CONFIG_KEYS:
                    raise ConfigError(norm, f"unknown key in section [{section}]")
                setattr(cfg, norm, value.strip() or None)
    for key, value in (overrides or {}).items():
        if value is not None:
            setattr(cfg, key, str(value))
    return cfg
