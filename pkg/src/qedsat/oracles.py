"""Textbook spin-averaged |M|^2 (e = 1) from Mandelstam invariants.

These are coded from the standard closed forms and share nothing with the
spinor evaluation except the kinematics, so they serve as an independent
check of the helicity amplitudes.
"""

from .amplitudes import com_kinematics, mdot
from .basis import ProcessKind


def textbook_squared(process, mu, theta, mass=1.0):
    process = ProcessKind.parse(process)
    kin = com_kinematics(process, mu, theta, mass)
    p1, p2, p3, p4 = kin.momenta
    s, t, u = kin.s, kin.t, kin.u
    m2 = mass * mass
    if process is ProcessKind.MOLLER:
        return 2.0 * (
            ((s - 2 * m2) ** 2 + (u - 2 * m2) ** 2 + 4 * m2 * t) / t**2
            + ((s - 2 * m2) ** 2 + (t - 2 * m2) ** 2 + 4 * m2 * u) / u**2
            + 2 * (s - 2 * m2) * (s - 6 * m2) / (t * u)
        )
    if process is ProcessKind.BHABHA:
        return 2.0 * (
            ((u - 2 * m2) ** 2 + (s - 2 * m2) ** 2 + 4 * m2 * t) / t**2
            + ((u - 2 * m2) ** 2 + (t - 2 * m2) ** 2 + 4 * m2 * s) / s**2
            + 2 * (u - 2 * m2) * (u - 6 * m2) / (t * s)
        )
    if process is ProcessKind.ANNIHILATION:
        a, b = mdot(p1, p3), mdot(p1, p4)
        inv = 1.0 / a + 1.0 / b
        return 2.0 * (b / a + a / b + 2 * m2 * inv - m2 * m2 * inv**2)
    a, b = mdot(p1, p2), mdot(p1, p4)  # Compton: incoming and outgoing photon
    diff = 1.0 / a - 1.0 / b
    return 2.0 * (b / a + a / b + 2 * m2 * diff + m2 * m2 * diff**2)
