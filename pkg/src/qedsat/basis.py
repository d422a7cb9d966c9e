"""Process tags, helicity labels and the two 4-dimensional bases.

Computational basis order is (RR, RL, LR, LL), first label for particle 1.
Bell basis order is (Phi+, Phi-, Psi+, Psi-) with

    Phi+- = (RR +- LL)/sqrt(2),   Psi+- = (RL +- LR)/sqrt(2).
"""

import enum
import math

import numpy as np

#: Sentinel for the ultrarelativistic (massless) limit, mu -> infinity.
UR = math.inf


class ProcessKind(enum.Enum):
    BHABHA = "bhabha"
    MOLLER = "moller"
    ANNIHILATION = "annihilation"
    COMPTON = "compton"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        aliases = {"møller": "moller", "moeller": "moller",
                   "annihilation": "annihilation", "eeyy": "annihilation",
                   "ee->gg": "annihilation", "pair-annihilation": "annihilation"}
        key = aliases.get(key, key)
        for member in cls:
            if member.value == key:
                return member
        raise ValueError(f"unknown process {name!r}")

    @property
    def legs(self):
        """Particle species of (in1, in2, out1, out2): 'f', 'fbar' or 'gamma'."""
        return {
            ProcessKind.BHABHA: ("f", "fbar", "f", "fbar"),
            ProcessKind.MOLLER: ("f", "f", "f", "f"),
            ProcessKind.ANNIHILATION: ("f", "fbar", "gamma", "gamma"),
            ProcessKind.COMPTON: ("f", "gamma", "f", "gamma"),
        }[self]

    @property
    def fermionic(self):
        return all(leg != "gamma" for leg in self.legs)


class Helicity(enum.IntEnum):
    R = 1
    L = -1


HELICITY_PAIRS = (
    (Helicity.R, Helicity.R),
    (Helicity.R, Helicity.L),
    (Helicity.L, Helicity.R),
    (Helicity.L, Helicity.L),
)
PAIR_LABELS = ("RR", "RL", "LR", "LL")
BELL_LABELS = ("Phi+", "Phi-", "Psi+", "Psi-")

_S = 1.0 / math.sqrt(2.0)
#: Rows are the Bell states in computational coordinates.
BELL_UNITARY = np.array(
    [
        [_S, 0.0, 0.0, _S],
        [_S, 0.0, 0.0, -_S],
        [0.0, _S, _S, 0.0],
        [0.0, _S, -_S, 0.0],
    ],
    dtype=complex,
)
BELL_UNITARY.setflags(write=False)

#: The two real Bell planes that host the maximally entangled families.
PLANES = (("Phi-", "Psi+"), ("Phi+", "Psi-"))


def pair_index(a, b):
    return HELICITY_PAIRS.index((Helicity(a), Helicity(b)))
