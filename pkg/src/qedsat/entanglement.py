"""Pure two-qubit states: normalization, concurrence and Bell classification."""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .basis import BELL_LABELS, BELL_UNITARY, PAIR_LABELS, PLANES
from .errors import ZeroVector

MAXIMALITY_TOL = 1e-9


@dataclass(frozen=True)
class PureTwoQubitState:
    """Amplitudes (a, b, c, d) over (RR, RL, LR, LL); unit norm."""

    amps: np.ndarray

    def __post_init__(self):
        arr = np.array(self.amps, dtype=complex, copy=True).reshape(4)
        arr.setflags(write=False)
        object.__setattr__(self, "amps", arr)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amps, dtype=dtype)

    def __iter__(self):
        return iter(self.amps)

    def __len__(self):
        return 4

    def __getitem__(self, k):
        return self.amps[k]

    @property
    def concurrence(self):
        return concurrence(self)

    def bell(self):
        return bell_coords(self)

    def equals_mod_phase(self, other, tol=1e-12):
        return fidelity(self, other) >= 1.0 - tol


def _vec(s):
    return np.asarray(s.amps if isinstance(s, PureTwoQubitState) else s, dtype=complex).reshape(4)


def normalize(v):
    arr = _vec(v)
    nrm = float(np.linalg.norm(arr))
    if not (nrm > 0.0) or not math.isfinite(nrm):
        raise ZeroVector("cannot normalize a zero (or non-finite) vector")
    return PureTwoQubitState(arr / nrm)


def concurrence_raw(v):
    """2|ad - bc| without normalization or clipping."""
    a, b, c, d = _vec(v)
    return 2.0 * abs(a * d - b * c)


def concurrence(s):
    return min(1.0, max(0.0, concurrence_raw(s)))


def bell_coords(s):
    """Coordinates over (Phi+, Phi-, Psi+, Psi-)."""
    return BELL_UNITARY.conj() @ _vec(s)


def from_bell_coords(coords):
    return PureTwoQubitState(BELL_UNITARY.T @ np.asarray(coords, dtype=complex))


def fidelity(x, y):
    """|<x|y>|^2 for normalized vectors (phase-insensitive)."""
    return float(abs(np.vdot(_vec(x), _vec(y))) ** 2)


def state(name):
    """Named state: RR, RL, LR, LL or a Bell label."""
    key = str(name).strip()
    norm_key = key.replace("⁺", "+").replace("⁻", "-").replace("Φ", "Phi").replace("Ψ", "Psi")
    if norm_key.upper() in PAIR_LABELS:
        v = np.zeros(4, complex)
        v[PAIR_LABELS.index(norm_key.upper())] = 1.0
        return PureTwoQubitState(v)
    for k, label in enumerate(BELL_LABELS):
        if norm_key.lower() == label.lower():
            return PureTwoQubitState(BELL_UNITARY[k])
    raise KeyError(f"unknown state name {name!r}")


RR, RL, LR, LL = (state(n) for n in PAIR_LABELS)
PHI_PLUS, PHI_MINUS, PSI_PLUS, PSI_MINUS = (state(n) for n in BELL_LABELS)


def planar_state(plane, xi):
    """cos(xi) first + sin(xi) second, for a plane given as two Bell labels."""
    i, j = (BELL_LABELS.index(lbl) for lbl in plane)
    c = np.zeros(4, complex)
    c[i], c[j] = math.cos(xi), math.sin(xi)
    return from_bell_coords(c)


class Kind(enum.Enum):
    BELL = "bell"
    PLANAR = "planar"
    MAXIMAL = "maximal"  # C = 1 but not in a real Bell plane
    NOT_MAXIMAL = "not_maximal"


@dataclass(frozen=True)
class BellClassification:
    kind: Kind
    concurrence: float
    which: str | None = None  # Bell label
    plane: tuple | None = None
    xi: float | None = None
    fidelity: float | None = None  # with the named Bell state

    def __str__(self):
        if self.kind is Kind.BELL:
            return f"Bell({self.which})"
        if self.kind is Kind.PLANAR:
            return f"Planar({self.plane[0]},{self.plane[1]}; xi={self.xi:.6g})"
        if self.kind is Kind.MAXIMAL:
            return f"Maximal(C={self.concurrence:.12g})"
        return f"NotMaximal({self.concurrence:.12g})"


def _dephase(coords):
    """Rotate the global phase so the largest coordinate is real positive."""
    k = int(np.argmax(np.abs(coords)))
    return coords * np.exp(-1j * np.angle(coords[k]))


def classify(s, tol=MAXIMALITY_TOL):
    s = normalize(s)
    c = concurrence(s)
    coords = bell_coords(s)
    weights = np.abs(coords) ** 2
    k = int(np.argmax(weights))
    if weights[k] >= 1.0 - tol:
        return BellClassification(Kind.BELL, c, which=BELL_LABELS[k], fidelity=float(weights[k]))
    if c < 1.0 - tol:
        return BellClassification(Kind.NOT_MAXIMAL, c)
    real = _dephase(coords)
    for plane in PLANES:
        i, j = (BELL_LABELS.index(lbl) for lbl in plane)
        outside = [q for q in range(4) if q not in (i, j)]
        if np.sum(np.abs(real[outside]) ** 2) > tol:
            continue
        if abs(real[i].imag) > math.sqrt(tol) or abs(real[j].imag) > math.sqrt(tol):
            continue
        xi = math.atan2(real[j].real, real[i].real)
        # fold into (-pi/2, pi/2]: xi and xi + pi are the same ray
        if xi <= -math.pi / 2:
            xi += math.pi
        elif xi > math.pi / 2:
            xi -= math.pi
        return BellClassification(Kind.PLANAR, c, plane=plane, xi=xi)
    return BellClassification(Kind.MAXIMAL, c)


def haar_unitary(rng, dim=2):
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_maximally_entangled(rng):
    """(U x V) Phi+ with independent Haar single-qubit unitaries."""
    u, v = haar_unitary(rng), haar_unitary(rng)
    return normalize(np.kron(u, v) @ PHI_PLUS.amps)


def random_state(rng):
    z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    return normalize(z)
