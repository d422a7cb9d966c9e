"""Tree-level QED helicity amplitudes in the centre-of-mass frame.

Phase convention
----------------
* Chiral (Weyl) representation of the Dirac matrices, metric (+,-,-,-).
* Particle 1 travels along +z, particle 2 along -z, particle 3 at polar
  angle ``theta`` in the x-z plane and particle 4 at ``theta + pi``.
* Two-spinors of helicity h along polar angle a (azimuth 0)::

      chi_R(a) = (cos a/2, sin a/2),   chi_L(a) = (-sin a/2, cos a/2)

  so the outgoing states are the incoming ones rotated by ``theta`` about y.
  This is what makes "output |RL>" and "input |RL>" the same basis vector
  when the map is iterated.
* ``u_h = (sqrt(E - h p) chi_h, sqrt(E + h p) chi_h)`` and
  ``v_h = (sqrt(E + h p) chi_-h, -sqrt(E - h p) chi_-h)``.
* Photons: ``eps_h(a) = -h (e1(a) + i h e2) / sqrt(2)`` with
  ``e1 = (cos a, 0, -sin a)``, ``e2 = y``; outgoing photons use ``eps*``.
* Jacob-Wick second-particle phase ``(-1)**(s - h)`` on fermion legs 2 and 4
  (a sign on L states). It acts as a similarity on fermion-fermion maps.
* Coupling ``e**2`` and the overall phase are dropped.

With these choices the Bhabha matrix has the layout::

    [[ A, -B, -B,  D],
     [ B,  E,  F, -B],
     [ B,  F,  E, -B],
     [ D,  B,  B,  A]]

with real A, B, D, E, F.
"""

import math
from dataclasses import dataclass

import numpy as np

from .basis import HELICITY_PAIRS, UR, Helicity, ProcessKind
from .errors import AngleOutOfRange, CollinearPole, NonPositiveMass, NonPositiveMu
from .maps import Basis, ScatteringMatrix

POLE_TOL = 1e-12

_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)
_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
GAMMA = np.array(
    [np.block([[_Z2, _I2], [_I2, _Z2]])]
    + [np.block([[_Z2, s], [-s, _Z2]]) for s in _PAULI]
)
GAMMA.setflags(write=False)
METRIC = np.array([1.0, -1.0, -1.0, -1.0])


def mdot(x, y):
    """Minkowski product without complex conjugation."""
    return x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3]


def slash(p):
    return np.einsum("m,mab->ab", METRIC * np.asarray(p), GAMMA)


def dirac_bar(w):
    return w.conj() @ GAMMA[0]


def current(bra, ket):
    """Vector current  bar(bra) gamma^mu ket  (upper index)."""
    return np.einsum("i,mij,j->m", dirac_bar(bra), GAMMA, ket)


def two_spinor(h, angle):
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    if h > 0:
        return np.array([c, s], dtype=complex)
    return np.array([-s, c], dtype=complex)


def u_spinor(h, energy, p, angle):
    chi = two_spinor(h, angle)
    return np.concatenate([math.sqrt(energy - h * p) * chi, math.sqrt(energy + h * p) * chi])


def v_spinor(h, energy, p, angle):
    eta = two_spinor(-h, angle)
    return np.concatenate([math.sqrt(energy + h * p) * eta, -math.sqrt(energy - h * p) * eta])


def polarization(h, angle):
    e1 = np.array([math.cos(angle), 0.0, -math.sin(angle)])
    e2 = np.array([0.0, 1.0, 0.0])
    return np.concatenate([[0.0], -h * (e1 + 1j * h * e2) / math.sqrt(2.0)])


def _jacob_wick(h):
    return 1.0 if h > 0 else -1.0


@dataclass(frozen=True)
class Kinematics:
    """On-shell COM kinematics of a 2 -> 2 process (mass in natural units)."""

    process: ProcessKind
    mu: float
    theta: float
    mass: float
    momenta: np.ndarray  # rows p1, p2, p3, p4

    @property
    def s(self):
        p = self.momenta
        return mdot(p[0] + p[1], p[0] + p[1])

    @property
    def t(self):
        p = self.momenta
        return mdot(p[0] - p[2], p[0] - p[2])

    @property
    def u(self):
        p = self.momenta
        return mdot(p[0] - p[3], p[0] - p[3])

    def leg_masses(self):
        return tuple(0.0 if leg == "gamma" else self.mass for leg in self.process.legs)


def _check_angle(theta):
    if not (0.0 < theta < 2.0 * math.pi):
        raise AngleOutOfRange(f"theta={theta!r} outside (0, 2pi)")


def _build_momenta(process, p, mass, theta):
    legs = process.legs
    e_in = [math.hypot(p, 0.0 if leg == "gamma" else mass) for leg in legs[:2]]
    total = sum(e_in)
    if process is ProcessKind.ANNIHILATION:
        k = total / 2.0  # back-to-back photons share the energy
        moduli = (p, p, k, k)
        energy = e_in + [k, k]
    else:
        moduli = (p, p, p, p)
        energy = e_in + e_in
    n = np.array([math.sin(theta), 0.0, math.cos(theta)])
    z = np.array([0.0, 0.0, 1.0])
    directions = (z, -z, n, -n)
    return np.array([np.concatenate([[e], q * d]) for e, q, d in zip(energy, moduli, directions)])


def com_kinematics(process, mu, theta, mass=1.0):
    process = ProcessKind.parse(process)
    if not mu > 0:
        raise NonPositiveMu(f"mu={mu!r} must be > 0")
    if not mass > 0:
        raise NonPositiveMass(f"mass={mass!r} must be > 0")
    if math.isinf(mu):
        raise NonPositiveMu("use amplitude_matrix(process, UR, theta) for the massless limit")
    _check_angle(theta)
    p = mu * mass
    return Kinematics(process, float(mu), float(theta), float(mass), _build_momenta(process, p, mass, theta))


class _Legs:
    """External wavefunctions for one kinematic point, cached per helicity."""

    def __init__(self, process, momenta, mass, theta):
        self.process = process
        self.momenta = momenta
        self.mass = mass
        angles = (0.0, math.pi, theta, theta + math.pi)
        self._wf = {}
        for leg, (kind, angle, mom) in enumerate(zip(process.legs, angles, momenta)):
            energy, p = mom[0], math.sqrt(mom[1] ** 2 + mom[2] ** 2 + mom[3] ** 2)
            for h in (1, -1):
                phase = _jacob_wick(h) if leg in (1, 3) and kind != "gamma" else 1.0
                if kind == "f":
                    w = u_spinor(h, energy, p, angle)
                elif kind == "fbar":
                    w = v_spinor(h, energy, p, angle)
                else:
                    w = polarization(h, angle)
                    if leg >= 2:
                        w = w.conj()
                self._wf[leg, h] = phase * w

    def __getitem__(self, key):
        return self._wf[key]


def _denominators(process, momenta, mass):
    p1, p2, p3, p4 = momenta
    m2 = mass * mass
    if process is ProcessKind.BHABHA:
        return {"t": mdot(p1 - p3, p1 - p3), "s": mdot(p1 + p2, p1 + p2)}
    if process is ProcessKind.MOLLER:
        return {"t": mdot(p1 - p3, p1 - p3), "u": mdot(p1 - p4, p1 - p4)}
    if process is ProcessKind.ANNIHILATION:
        return {"t": mdot(p1 - p3, p1 - p3) - m2, "u": mdot(p1 - p4, p1 - p4) - m2}
    return {"s": mdot(p1 + p2, p1 + p2) - m2, "u": mdot(p1 - p4, p1 - p4) - m2}


def _check_poles(dens, s):
    for name, d in dens.items():
        if abs(d) < POLE_TOL * abs(s):
            raise CollinearPole(f"{name}-channel propagator vanishes (|d|={abs(d):.3g})")


def _amplitude(process, legs, dens, a, b, r, s_):
    p1, p2, p3, p4 = legs.momenta
    m = legs.mass
    if process is ProcessKind.BHABHA:
        u1, v2, u3, v4 = legs[0, a], legs[1, b], legs[2, r], legs[3, s_]
        return (mdot(current(u3, u1), current(v2, v4)) / dens["t"]
                - mdot(current(u3, v4), current(v2, u1)) / dens["s"])
    if process is ProcessKind.MOLLER:
        u1, u2, u3, u4 = legs[0, a], legs[1, b], legs[2, r], legs[3, s_]
        return (mdot(current(u3, u1), current(u4, u2)) / dens["t"]
                - mdot(current(u4, u1), current(u3, u2)) / dens["u"])
    mm = m * np.eye(4)
    if process is ProcessKind.ANNIHILATION:
        u1, v2, e3, e4 = legs[0, a], legs[1, b], legs[2, r], legs[3, s_]
        t_term = slash(e4) @ (slash(p1 - p3) + mm) @ slash(e3) / dens["t"]
        u_term = slash(e3) @ (slash(p1 - p4) + mm) @ slash(e4) / dens["u"]
        return dirac_bar(v2) @ (t_term + u_term) @ u1
    u1, e2, u3, e4 = legs[0, a], legs[1, b], legs[2, r], legs[3, s_]
    s_term = slash(e4) @ (slash(p1 + p2) + mm) @ slash(e2) / dens["s"]
    u_term = slash(e2) @ (slash(p1 - p4) + mm) @ slash(e4) / dens["u"]
    return dirac_bar(u3) @ (s_term + u_term) @ u1


def tree_amplitude(process, kin, incoming, outgoing):
    """Single helicity amplitude M_{ab;rs} for ``kin``."""
    process = ProcessKind.parse(process)
    dens = _denominators(process, kin.momenta, kin.mass)
    _check_poles(dens, kin.s)
    legs = _Legs(process, kin.momenta, kin.mass, kin.theta)
    a, b = (int(Helicity(h)) for h in incoming)
    r, s_ = (int(Helicity(h)) for h in outgoing)
    return complex(_amplitude(process, legs, dens, a, b, r, s_))


def spinor_matrix(process, theta, p, mass):
    """4x4 amplitude grid from explicit wavefunctions; ``mass=0`` is allowed."""
    momenta = _build_momenta(process, p, mass, theta)
    dens = _denominators(process, momenta, mass)
    _check_poles(dens, mdot(momenta[0] + momenta[1], momenta[0] + momenta[1]))
    legs = _Legs(process, momenta, mass, theta)
    out = np.empty((4, 4), dtype=complex)
    for j, (a, b) in enumerate(HELICITY_PAIRS):
        for i, (r, s_) in enumerate(HELICITY_PAIRS):
            out[i, j] = _amplitude(process, legs, dens, int(a), int(b), int(r), int(s_))
    return out


def _ur_pole(value, name):
    if abs(value) < POLE_TOL:
        raise CollinearPole(f"{name} vanishes in the massless limit")


def ur_entries(process, theta):
    """Exact mu -> infinity amplitude matrix in closed form."""
    process = ProcessKind.parse(process)
    _check_angle(theta)
    h = theta / 2.0
    sh, ch = math.sin(h), math.cos(h)
    out = np.zeros((4, 4), dtype=complex)
    if process is ProcessKind.BHABHA:
        _ur_pole(sh, "t")
        a = -2.0 / sh**2
        e = -2.0 * ch**4 / sh**2
        f = -2.0 * sh**2
        out[0, 0] = out[3, 3] = a
        out[1, 1] = out[2, 2] = e
        out[1, 2] = out[2, 1] = f
    elif process is ProcessKind.MOLLER:
        _ur_pole(sh, "t")
        _ur_pole(ch, "u")
        out[0, 0] = out[3, 3] = -2.0 / (sh * ch) ** 2
        out[1, 1] = out[2, 2] = -2.0 * (ch / sh) ** 2
        out[1, 2] = out[2, 1] = 2.0 * (sh / ch) ** 2
    elif process is ProcessKind.ANNIHILATION:
        _ur_pole(sh, "t")
        _ur_pole(ch, "u")
        out[1, 1] = out[2, 2] = 2.0 * ch / sh
        out[1, 2] = out[2, 1] = -2.0 * sh / ch
    else:
        _ur_pole(ch, "u")
        out[0, 0] = out[3, 3] = 2.0 / ch
        out[1, 1] = out[2, 2] = 2.0 * ch
    return out


def amplitude_matrix(process, mu, theta, mass=1.0):
    """Map matrix of Eq.-(1) layout: entry (i, j) = M_{input j; output i}.

    ``mu=UR`` (``math.inf``) selects the exact massless branch.
    """
    process = ProcessKind.parse(process)
    if isinstance(mu, str) and mu.strip().lower() == "ur":
        mu = UR
    if math.isinf(mu) and mu > 0:
        entries = ur_entries(process, theta)
        return ScatteringMatrix(entries, Basis.COMPUTATIONAL, process, UR, float(theta))
    kin = com_kinematics(process, mu, theta, mass)
    entries = spinor_matrix(process, kin.theta, kin.mu * kin.mass, kin.mass)
    return ScatteringMatrix(entries, Basis.COMPUTATIONAL, process, kin.mu, kin.theta)


def spin_averaged_squared(process, mu, theta, mass=1.0):
    """(1/4) sum over all helicities of |M|^2 (photons: 2 polarisations)."""
    m = amplitude_matrix(process, mu, theta, mass).entries
    return float(np.sum(np.abs(m) ** 2) / 4.0)
