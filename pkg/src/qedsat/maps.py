"""Amplitude matrices as quantum maps: symbol patterns and Bell-basis views."""

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .basis import BELL_UNITARY, ProcessKind
from .errors import PatternViolation


class Basis(enum.Enum):
    COMPUTATIONAL = "computational"
    BELL = "bell"


def _frozen_array(entries):
    arr = np.array(entries, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ScatteringMatrix:
    """4x4 map; entry (i, j) is the amplitude from input pair j to output pair i."""

    entries: np.ndarray
    basis: Basis = Basis.COMPUTATIONAL
    process: ProcessKind | None = None
    mu: float | None = None
    theta: float | None = None

    def __post_init__(self):
        arr = _frozen_array(self.entries)
        if arr.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("matrix has non-finite entries")
        if not np.any(arr):
            raise ValueError("zero matrix is not a valid map")
        object.__setattr__(self, "entries", arr)

    @property
    def norm(self):
        """Infinity norm (max absolute row sum)."""
        return float(np.linalg.norm(self.entries, ord=np.inf))

    def with_entries(self, entries, basis=None):
        return ScatteringMatrix(entries, basis or self.basis, self.process, self.mu, self.theta)

    def scaled(self, c):
        return self.with_entries(complex(c) * self.entries)

    def power(self, n):
        return self.with_entries(np.linalg.matrix_power(self.entries, int(n)))

    def apply(self, vec):
        return self.entries @ np.asarray(vec, dtype=complex)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def as_matrix(m):
    """Accept a ScatteringMatrix or any 4x4 array-like."""
    if isinstance(m, ScatteringMatrix):
        return m
    return ScatteringMatrix(np.asarray(m, dtype=complex))


# -- symbol patterns ---------------------------------------------------------


@dataclass(frozen=True)
class PatternClass:
    """Positions sharing one symbol value times ``sign``. ``symbol=None`` means zero."""

    name: str
    symbol: str | None
    sign: int
    positions: tuple

    @property
    def is_zero(self):
        return self.symbol is None


@dataclass(frozen=True)
class SymbolPattern:
    name: str
    classes: tuple

    def __post_init__(self):
        seen = [pos for cls in self.classes for pos in cls.positions]
        if sorted(seen) != sorted(itertools.product(range(4), range(4))) or len(seen) != 16:
            raise ValueError(f"pattern {self.name!r} does not partition the 16 positions")

    @property
    def symbols(self):
        out = []
        for cls in self.classes:
            if cls.symbol is not None and cls.symbol not in out:
                out.append(cls.symbol)
        return tuple(out)

    def cardinalities(self):
        return sorted(len(c.positions) for c in self.classes if not c.is_zero)

    def class_named(self, name):
        for cls in self.classes:
            if cls.name == name:
                return cls
        raise KeyError(name)

    def signed_positions(self, symbol):
        return [(pos, cls.sign) for cls in self.classes if cls.symbol == symbol for pos in cls.positions]

    def read(self, m, symbol):
        """Least-squares value of ``symbol`` from a matrix obeying the pattern."""
        entries = as_matrix(m).entries
        vals = [sign * entries[pos] for pos, sign in self.signed_positions(symbol)]
        return complex(np.mean(vals))

    def build(self, **values):
        out = np.zeros((4, 4), dtype=complex)
        for cls in self.classes:
            if cls.is_zero:
                continue
            for pos in cls.positions:
                out[pos] = cls.sign * values[cls.symbol]
        return out


@dataclass(frozen=True)
class PatternReport:
    ok: bool
    worst_violation: float  # absolute
    relative_violation: float  # divided by the matrix norm
    worst_class: str | None
    worst_position: tuple | None
    tol: float

    def __bool__(self):
        return self.ok


def _cls(name, symbol, sign, *positions):
    return PatternClass(name, symbol, sign, tuple(positions))


BHABHA_PATTERN = SymbolPattern(
    "bhabha",
    (
        _cls("A", "A", 1, (0, 0), (3, 3)),
        _cls("B", "B", 1, (1, 0), (2, 0), (3, 1), (3, 2)),
        _cls("-B", "B", -1, (0, 1), (0, 2), (1, 3), (2, 3)),
        _cls("D", "D", 1, (0, 3), (3, 0)),
        _cls("E", "E", 1, (1, 1), (2, 2)),
        _cls("F", "F", 1, (1, 2), (2, 1)),
    ),
)


def _classes_from_table(table):
    """Build classes from a 4x4 table of labels like 'A', '-B' or '0'."""
    groups = {}
    for i, row in enumerate(table):
        for j, label in enumerate(row):
            groups.setdefault(label, []).append((i, j))
    out = []
    for label, positions in groups.items():
        if label == "0":
            out.append(PatternClass("0", None, 0, tuple(positions)))
        elif label.startswith("-"):
            out.append(PatternClass(label, label[1:], -1, tuple(positions)))
        else:
            out.append(PatternClass(label, label, 1, tuple(positions)))
    return tuple(out)


# Frozen fixtures recovered by detect_pattern over random (mu, theta) samples.
MOLLER_PATTERN = SymbolPattern(
    "moller",
    _classes_from_table(
        [
            ["A", "B", "-B", "C"],
            ["-B", "D", "E", "-B"],
            ["B", "E", "D", "B"],
            ["C", "B", "-B", "A"],
        ]
    ),
)
ANNIHILATION_PATTERN = SymbolPattern(
    "annihilation",
    _classes_from_table(
        [
            ["A", "0", "0", "B"],
            ["C", "D", "E", "-C"],
            ["C", "E", "D", "-C"],
            ["-B", "0", "0", "-A"],
        ]
    ),
)
COMPTON_PATTERN = SymbolPattern(
    "compton",
    _classes_from_table(
        [
            ["A", "B", "C", "D"],
            ["B", "E", "F", "C"],
            ["-C", "-F", "E", "B"],
            ["-D", "-C", "B", "A"],
        ]
    ),
)

_PATTERNS = {
    ProcessKind.BHABHA: BHABHA_PATTERN,
    ProcessKind.MOLLER: MOLLER_PATTERN,
    ProcessKind.ANNIHILATION: ANNIHILATION_PATTERN,
    ProcessKind.COMPTON: COMPTON_PATTERN,
}


def structural_pattern(process):
    return _PATTERNS[ProcessKind.parse(process)]


def matches_pattern(m, pat, tol=1e-9):
    """Check every class relation within ``tol * ||M||_inf``."""
    sm = as_matrix(m)
    if sm.basis is not Basis.COMPUTATIONAL:
        raise ValueError("pattern checks need the computational basis")
    entries = sm.entries
    scale = sm.norm
    worst, worst_cls, worst_pos = 0.0, None, None
    for symbol in pat.symbols:
        signed = pat.signed_positions(symbol)
        value = np.mean([sign * entries[pos] for pos, sign in signed])
        for pos, sign in signed:
            dev = abs(sign * entries[pos] - value)
            if dev > worst:
                cls = next(c for c in pat.classes if pos in c.positions)
                worst, worst_cls, worst_pos = dev, cls.name, pos
    for cls in pat.classes:
        if cls.is_zero:
            for pos in cls.positions:
                dev = abs(entries[pos])
                if dev > worst:
                    worst, worst_cls, worst_pos = dev, cls.name, pos
    rel = worst / scale
    return PatternReport(rel <= tol, worst, rel, worst_cls, worst_pos, tol)


def require_pattern(m, pat, tol=1e-9):
    rep = matches_pattern(m, pat, tol)
    if not rep.ok:
        raise PatternViolation(
            f"{pat.name} pattern violated in class {rep.worst_class} at {rep.worst_position} "
            f"(relative {rep.relative_violation:.3g} > {tol:g})"
        )
    return rep


# -- numerical detection -----------------------------------------------------


def detect_pattern(samples, tol=1e-9, name="detected"):
    """Intersect equal/opposite/zero relations across sample matrices.

    Two positions share a class when they are equal (or opposite) in every
    sample to within ``tol`` relative to that sample's norm. Positions that
    vanish in every sample form the zero class.
    """
    mats = [as_matrix(s).entries for s in samples]
    if not mats:
        raise ValueError("need at least one sample")
    positions = list(itertools.product(range(4), range(4)))
    scales = [float(np.linalg.norm(m, ord=np.inf)) for m in mats]

    def zero(pos):
        return all(abs(m[pos]) <= tol * sc for m, sc in zip(mats, scales))

    def related(p, q, sign):
        return all(abs(m[p] - sign * m[q]) <= tol * sc for m, sc in zip(mats, scales))

    zeros = [p for p in positions if zero(p)]
    rest = [p for p in positions if p not in zeros]
    groups = []  # list of [(pos, sign)]
    for pos in rest:
        for grp in groups:
            ref = grp[0][0]
            if related(pos, ref, 1):
                grp.append((pos, 1))
                break
            if related(pos, ref, -1):
                grp.append((pos, -1))
                break
        else:
            groups.append([(pos, 1)])
    classes = []
    for k, grp in enumerate(groups):
        symbol = _symbol_name(k)
        for sign in (1, -1):
            members = tuple(p for p, s in grp if s == sign)
            if members:
                label = symbol if sign > 0 else "-" + symbol
                classes.append(PatternClass(label, symbol, sign, members))
    if zeros:
        classes.append(PatternClass("0", None, 0, tuple(zeros)))
    return SymbolPattern(name, tuple(classes))


def _symbol_name(k):
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    return letters[k] if k < 26 else f"S{k}"


def canonical_relations(pat):
    """Label-free form of a pattern: frozenset of (pos_p, pos_q, relative sign)."""
    rels = set()
    for symbol in pat.symbols:
        signed = pat.signed_positions(symbol)
        for (p, sp), (q, sq) in itertools.combinations(signed, 2):
            a, b = sorted((p, q))
            rels.add((a, b, sp * sq))
    zeros = frozenset(pos for c in pat.classes if c.is_zero for pos in c.positions)
    return frozenset(rels), zeros


def same_partition(pat_a, pat_b):
    return canonical_relations(pat_a) == canonical_relations(pat_b)


# -- Bell basis --------------------------------------------------------------


def to_bell_basis(m):
    sm = as_matrix(m)
    if sm.basis is Basis.BELL:
        raise ValueError("matrix is already in the Bell basis")
    u = BELL_UNITARY
    return sm.with_entries(u @ sm.entries @ u.conj().T, Basis.BELL)


def from_bell_basis(m):
    sm = as_matrix(m)
    if sm.basis is not Basis.BELL:
        raise ValueError("matrix is not in the Bell basis")
    u = BELL_UNITARY
    return sm.with_entries(u.conj().T @ sm.entries @ u, Basis.COMPUTATIONAL)


def self_similarity_violation(m, pat, powers=range(2, 11)):
    """Largest relative pattern violation over M**n for the given powers."""
    sm = as_matrix(m)
    worst = 0.0
    base = sm.entries / sm.norm  # keep powers in range
    for n in powers:
        mn = ScatteringMatrix(np.linalg.matrix_power(base, n))
        worst = max(worst, matches_pattern(mn, pat, math.inf).relative_violation)
    return worst
