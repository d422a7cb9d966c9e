"""Invariant suites behind ``qedsat verify``.

Each check returns the worst observed value against its tolerance. The
``fault`` hook swaps in a corrupted amplitude provider so the suite can be
seen to fail.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from .amplitudes import amplitude_matrix, com_kinematics
from .basis import UR, ProcessKind
from .dynamics import (
    AngleSchedule,
    closed_form_random_product,
    closed_form_ur_bhabha,
    iterate,
    iterate_map,
    power_state,
)
from .entanglement import PSI_PLUS, concurrence, fidelity, normalize, random_maximally_entangled, state
from .maps import matches_pattern, structural_pattern, to_bell_basis
from .oracles import textbook_squared
from .spectral import (
    bell_eigenvectors,
    bhabha_analytic_eigensystem,
    bhabha_params,
    eigendecompose,
    spectrum_distance,
)

FAULTS = ("amplitude",)
NO_GAIN_TOL = 1e-15
QUARTER = math.pi / 4


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tol: float
    detail: str = ""

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name:<44} worst={self.worst:.3e} tol={self.tol:.1e} {self.detail}".rstrip()


def _corrupt(provider):
    def amp(process, mu, theta):
        m = provider(process, mu, theta)
        e = np.array(m.entries)
        e[0, 1] += 1e-3 * m.norm
        return m.with_entries(e)

    return amp


def _samples(rng, k, mu_range=(-2.0, 3.0)):
    return [(10 ** rng.uniform(*mu_range), rng.uniform(0.05, math.pi - 0.05)) for _ in range(k)]


def _check(name, worst, tol, detail=""):
    return CheckResult(name, bool(worst <= tol), float(worst), float(tol), detail)


def run_suite(level="fast", fault=None, seed=2024):
    if fault not in (None, *FAULTS):
        raise ValueError(f"unknown fault {fault!r}")
    full = level == "full"
    amp = amplitude_matrix if fault is None else _corrupt(amplitude_matrix)
    rng = np.random.default_rng(seed)
    pts = _samples(rng, 20 if full else 5)
    out = []

    worst = 0.0
    for proc in ProcessKind:
        for mu, th in pts:
            kin = com_kinematics(proc, mu, th)
            p = kin.momenta
            worst = max(worst, float(np.max(np.abs(p[0] + p[1] - p[2] - p[3]))) / p[0, 0])
            for leg, m in zip(p, kin.leg_masses()):
                worst = max(worst, abs(leg[0] ** 2 - leg[1:] @ leg[1:] - m * m) / p[0, 0] ** 2)
    out.append(_check("kinematics: conservation and on-shell", worst, 1e-12))

    for proc in (ProcessKind.BHABHA, ProcessKind.MOLLER):
        worst, where = 0.0, ""
        for mu, th in pts:
            rep = matches_pattern(amp(proc, mu, th), structural_pattern(proc), math.inf)
            if rep.relative_violation > worst:
                worst, where = rep.relative_violation, f"class {rep.worst_class}"
        out.append(_check(f"maps: {proc.value} symbol pattern", worst, 1e-9, where))

    for proc in (ProcessKind.BHABHA, ProcessKind.MOLLER):
        worst = 0.0
        for mu, th in pts[: (20 if full else 3)]:
            m = amp(proc, mu, th)
            base = m.entries / m.norm
            for n in range(2, 11):
                mn = np.linalg.matrix_power(base, n)
                worst = max(worst, matches_pattern(mn, structural_pattern(proc), math.inf).relative_violation)
        out.append(_check(f"maps: {proc.value} power self-similarity", worst, 1e-9))

    worst = 0.0
    sq_points = ((1.0, math.pi / 2), (0.3, 1.0), (5.0, 2.5))
    for proc in ProcessKind:
        for mu, th in sq_points:
            m = amp(proc, mu, th).entries
            ours = float(np.sum(np.abs(m) ** 2) / 4.0)
            worst = max(worst, abs(ours / textbook_squared(proc, mu, th) - 1.0))
    out.append(_check("amplitudes: spin-averaged |M|^2 vs textbook", worst, 1e-8))

    worst = 0.0
    n_states = 1000 if full else 100
    for k in range(n_states):
        proc = (ProcessKind.BHABHA, ProcessKind.MOLLER)[k % 2]
        mu, th = 10 ** rng.uniform(-2, 3), rng.uniform(0.05, math.pi - 0.05)
        s = random_maximally_entangled(rng)
        worst = max(worst, abs(concurrence(normalize(amp(proc, mu, th).apply(s.amps))) - 1.0))
    out.append(_check(f"entanglement: maximality invariance ({n_states})", worst, 1e-9))

    worst = 0.0
    for proc in ProcessKind:
        for mu, th in pts:
            es = eigendecompose(amp(proc, mu, th))
            worst = max(worst, es.max_residual / es.matrix_norm)
    out.append(_check("spectral: eigen-residual / ||M||", worst, 1e-10))

    worst = 0.0
    for mu, th in pts:
        m = amp(ProcessKind.BHABHA, mu, th)
        try:
            an = bhabha_analytic_eigensystem(bhabha_params(m))
        except Exception as exc:  # noqa: BLE001 - report, do not crash the suite
            out.append(CheckResult("spectral: analytic vs generic (Bhabha)", False, math.inf, 1e-9, type(exc).__name__))
            break
        gap = spectrum_distance(eigendecompose(m).values, an.system.values)
        worst = max(worst, gap / m.norm)
    else:
        out.append(_check("spectral: analytic vs generic (Bhabha)", worst, 1e-9))

    traj = iterate_map(amp(ProcessKind.BHABHA, UR, QUARTER), state("RL"), 100)
    worst = max(1.0 - fidelity(traj.states[n], closed_form_ur_bhabha(math.pi / 2, QUARTER, n)) for n in range(101))
    out.append(_check("dynamics: UR Bhabha closed form (n<=100)", worst, 1e-10))

    traj = iterate_map(amp(ProcessKind.BHABHA, UR, math.pi), state("RL"), 100)
    # cos(pi/2) is 6e-17 in floating point, so "zero" means machine-epsilon level
    out.append(_check("dynamics: no gain at theta=pi", float(np.max(traj.concurrences)), NO_GAIN_TOL))

    worst_c, worst_f = 0.0, 0.0
    for seed_k in range(10 if full else 2):
        sch = AngleSchedule.random(seed_k)
        traj = iterate(ProcessKind.BHABHA, UR, sch, state("RL"), 200)
        worst_c = max(worst_c, 1.0 - traj.final_concurrence)
        worst_f = max(worst_f, 1.0 - fidelity(traj.final_state, closed_form_random_product(sch.realized)))
    out.append(_check("dynamics: random-angle saturation", worst_c, 1e-6))
    out.append(_check("dynamics: random-angle closed form", worst_f, 1e-10))

    worst = 0.0
    for mu, th in pts[:5]:
        m = amp(ProcessKind.BHABHA, mu, th)
        s0 = normalize(rng.standard_normal(4) + 1j * rng.standard_normal(4))
        c = complex(rng.standard_normal(), rng.standard_normal())
        a = iterate_map(m, s0, 30)
        b = iterate_map(m.scaled(c), s0, 30)
        worst = max(worst, 1.0 - min(fidelity(x, y) for x, y in zip(a.states, b.states)))
        worst = max(worst, 1.0 - fidelity(a.states[-1], power_state(m, s0, 30, prescale=False)))
    out.append(_check("dynamics: scale invariance, end normalization", worst, 1e-10))

    if full:
        m = amp(ProcessKind.COMPTON, 1.0, math.pi / 2)
        found = bell_eigenvectors(eigendecompose(m))
        out.append(_check("spectral: Compton has no Bell eigenvector", float(len(found)), 0.0, ",".join(found)))
        sat = []
        for name in ("RL", "RR"):
            sat.append(iterate_map(m, state(name), 10_000).saturation_step)
        out.append(_check("dynamics: Compton never saturates (1e4)", float(sum(s is not None for s in sat)), 0.0))
        traj = iterate_map(amp(ProcessKind.ANNIHILATION, UR, QUARTER), state("RL"), 200)
        out.append(
            _check("dynamics: annihilation |RL> -> Psi-", 1.0 - fidelity(traj.final_state, state("Psi-")), 1e-8)
        )
        m = to_bell_basis(amp(ProcessKind.BHABHA, UR, QUARTER)).entries
        off = float(np.max(np.abs(m - np.diag(np.diag(m))))) / float(np.max(np.abs(m)))
        out.append(_check("maps: UR Bhabha diagonal in Bell basis", off, 1e-12))
        traj = iterate_map(amp(ProcessKind.BHABHA, UR, QUARTER), state("RL"), 300)
        out.append(_check("dynamics: UR Bhabha |RL> -> Psi+", 1.0 - fidelity(traj.final_state, PSI_PLUS), 1e-10))
    return out


def report(results, elapsed=None):
    lines = [r.line() for r in results]
    failed = [r for r in results if not r.passed]
    summary = f"{len(results) - len(failed)}/{len(results)} checks passed"
    if elapsed is not None:
        summary += f" in {elapsed:.2f}s"
    if failed:
        summary += "; failed: " + ", ".join(r.name for r in failed)
    return "\n".join(lines + [summary])


def verify(level="fast", fault=None):
    start = time.perf_counter()
    results = run_suite(level, fault)
    ok = all(r.passed for r in results)
    return ok, report(results, time.perf_counter() - start)
