"""Iteration of the quantum maps, closed forms and saturation diagnostics."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .amplitudes import amplitude_matrix
from .basis import ProcessKind
from .entanglement import PureTwoQubitState, from_bell_coords, normalize
from .errors import DegenerateMap, Overflow
from .maps import as_matrix

RANDOM_EPS = 1e-6
SATURATION_TOL = 1e-6
SATURATION_WINDOW = 5
ENVELOPE_WINDOW = 10
N_MAX = 10_000
NR_MU = 0.01
UR_PROXY_MU = 1e3
DEGENERATE_NORM = 1e-300
POWER_GUARD = 30


@dataclass
class AngleSchedule:
    """Fixed angle, or seeded random angles on (eps, pi - eps).

    ``grid`` switches the random mode to draws from a finite set, which is
    the setting where angles repeat with multiplicities.
    """

    mode: str = "fixed"
    theta: float | None = None
    seed: int | None = None
    eps: float = RANDOM_EPS
    grid: tuple | None = None
    realized: list = field(default_factory=list)  # [(theta_i, k_i)]

    @classmethod
    def fixed(cls, theta):
        return cls("fixed", theta=float(theta))

    @classmethod
    def random(cls, seed, eps=RANDOM_EPS, grid=None):
        return cls("random", seed=int(seed), eps=eps, grid=tuple(grid) if grid is not None else None)

    def draw(self, n):
        """Angles for steps 1..n; records the realized multiplicities."""
        if self.mode == "fixed":
            angles = np.full(n, self.theta)
        elif self.mode == "random":
            rng = np.random.default_rng(self.seed)
            if self.grid is not None:
                angles = np.asarray(self.grid, dtype=float)[rng.integers(0, len(self.grid), n)]
            else:
                angles = rng.uniform(self.eps, math.pi - self.eps, n)
        else:
            raise ValueError(f"unknown schedule mode {self.mode!r}")
        self.realized = multiplicities(angles)
        return angles


def multiplicities(angles):
    """[(theta_i, k_i)] in order of first appearance."""
    counts = {}
    for a in np.asarray(angles, dtype=float):
        counts[float(a)] = counts.get(float(a), 0) + 1
    return list(counts.items())


@dataclass
class Trajectory:
    """Row 0 is the initial state; row k is the state after k applications."""

    states: np.ndarray  # (n+1, 4)
    concurrences: np.ndarray  # (n+1,)
    thetas: np.ndarray  # (n+1,), NaN at row 0
    norm_log: np.ndarray  # (n,), log of the pre-normalization norm at each step
    saturation_step: int | None = None
    process: ProcessKind | None = None
    mu: float | None = None

    @property
    def n(self):
        return np.arange(len(self.concurrences))

    @property
    def steps(self):
        return [
            (int(k), PureTwoQubitState(self.states[k]), float(self.concurrences[k]), float(self.thetas[k]))
            for k in range(len(self.concurrences))
        ]

    @property
    def final_state(self):
        return PureTwoQubitState(self.states[-1])

    @property
    def final_concurrence(self):
        return float(self.concurrences[-1])

    def __len__(self):
        return len(self.concurrences)

    def log_total_norm(self):
        """log of the unnormalized norm of M**n |initial>."""
        return float(np.sum(self.norm_log))


def _run(mats, index, initial, thetas, process=None, mu=None, tol=SATURATION_TOL, window=SATURATION_WINDOW):
    x0 = np.array(normalize(initial).amps)
    mats = np.ascontiguousarray(np.asarray(mats, dtype=np.complex128))
    index = np.ascontiguousarray(np.asarray(index, dtype=np.int64))
    states, conc, logn, failed = kernels.iterate_sequence(mats, index, x0, DEGENERATE_NORM)
    if failed >= 0:
        raise DegenerateMap(f"map sent the state to zero at step {failed + 1}", step=failed + 1)
    th = np.concatenate([[np.nan], np.asarray(thetas, dtype=float)])
    traj = Trajectory(states, conc, th, logn, None, process, mu)
    traj.saturation_step = detect_saturation(traj, tol, window)
    return traj


def iterate_map(m, initial, n, tol=SATURATION_TOL, window=SATURATION_WINDOW):
    """Iterate one fixed matrix ``n`` times."""
    if n < 1:
        raise ValueError("n must be >= 1")
    sm = as_matrix(m)
    theta = sm.theta if sm.theta is not None else np.nan
    return _run(sm.entries[None], np.zeros(n, np.int64), initial, np.full(n, theta), sm.process, sm.mu, tol, window)


def iterate(process, mu, schedule, initial, n, tol=SATURATION_TOL, window=SATURATION_WINDOW):
    """Apply M(theta_k) then normalize, for k = 1..n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    process = ProcessKind.parse(process)
    if not isinstance(schedule, AngleSchedule):
        schedule = AngleSchedule.fixed(schedule)
    angles = schedule.draw(n)
    uniq, index = np.unique(angles, return_inverse=True)
    mats = np.array([amplitude_matrix(process, mu, float(a)).entries for a in uniq])
    return _run(mats, index, initial, angles, process, mu, tol, window)


def iterate_by_power(process, mu, theta, initial, n, prescale=True):
    """normalize(M**n |initial>) computed from the matrix power directly."""
    m = amplitude_matrix(process, mu, theta).entries
    return power_state(m, initial, n, prescale)


def power_state(m, initial, n, prescale=True):
    m = as_matrix(m).entries
    x = normalize(initial).amps
    if prescale:
        rho = float(np.max(np.abs(np.linalg.eigvals(m))))
        m = m / (rho if rho > 0 else float(np.linalg.norm(m, ord=np.inf)))
    elif n > POWER_GUARD:
        raise Overflow(f"n={n} exceeds the unscaled power guard ({POWER_GUARD}); enable prescale")
    with np.errstate(over="raise", invalid="raise"):
        try:
            y = np.linalg.matrix_power(m, n) @ x
        except FloatingPointError as exc:
            raise Overflow(str(exc)) from exc
    if not np.all(np.isfinite(y)):
        raise Overflow("matrix power left the floating range")
    if np.linalg.norm(y) <= DEGENERATE_NORM:
        raise DegenerateMap("M**n annihilates the initial state", step=n)
    return normalize(y)


def _log_weights(logs, signs, base):
    """Normalized real combination of Bell states from log magnitudes."""
    logs = np.asarray(logs, dtype=float)
    finite = np.isfinite(logs)
    top = np.max(logs[finite])
    mags = np.where(finite, np.exp(np.where(finite, logs - top, 0.0)), 0.0)
    coords = np.zeros(4)
    for k, (mag, sign) in enumerate(zip(mags, signs)):
        coords[base[k]] += sign * mag
    return from_bell_coords(coords / np.linalg.norm(coords))


def _signed_log(x, k=1):
    """(log|x|*k, sign(x)**k); log(0) is -inf."""
    if x == 0.0:
        return (-math.inf if k > 0 else 0.0), (0.0 if k > 0 else 1.0)
    return k * math.log(abs(x)), (1.0 if x > 0 or k % 2 == 0 else -1.0)


def closed_form_ur_bhabha(alpha, theta, n, phi_eigenvalue=1.0):
    """Ultrarelativistic Bhabha state after n steps from cos(a)|RR> + sin(a)|RL>.

    Bell weights: cos(a) * phi**n on Phi+ and Phi-, sin(a) * (1 + cos^2)**n on
    Psi+ and sin(a) * (2 cos)**n on Psi-. The exact tree-level map has
    ``phi_eigenvalue = 2`` in these units; 1 gives the commonly quoted form.
    The two agree whenever cos(a) = 0.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    c = math.cos(theta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    l_phi, s_phi = _signed_log(phi_eigenvalue, n)
    l_p, s_p = _signed_log(1.0 + c * c, n)
    l_m, s_m = _signed_log(2.0 * c, n)
    la, sga = _signed_log(ca)
    lb, sgb = _signed_log(sa)
    logs = [l_phi + la, l_phi + la, l_p + lb, l_m + lb]
    signs = [s_phi * sga, s_phi * sga, s_p * sgb, s_m * sgb]
    return _log_weights(logs, signs, [0, 1, 2, 3])


def closed_form_random_product(angles):
    """UR Bhabha state from |RL> after the angle multiset [(theta_i, k_i)]."""
    l_p, l_m = 0.0, 0.0
    s_m = 1.0
    for theta, k in angles:
        if not 0.0 < theta < math.pi:
            raise ValueError(f"angle {theta!r} outside (0, pi)")
        c = math.cos(theta)
        l_p += k * math.log1p(c * c)
        lm, sm = _signed_log(2.0 * c, int(k))
        l_m += lm
        s_m *= sm
    return _log_weights([l_p, l_m], [1.0, s_m], [2, 3])


def closed_form_concurrence_ur_bhabha(theta, n):
    """C_n from |RL> in closed form: |1 - r^2| / (1 + r^2), r = (2c / (1 + c^2))**n."""
    c = math.cos(theta)
    if c == 0.0:
        return 1.0
    log_r = n * (math.log(abs(2.0 * c)) - math.log1p(c * c))
    r2 = math.exp(2.0 * log_r)
    return abs(1.0 - r2) / (1.0 + r2)


def detect_saturation(traj, tol=SATURATION_TOL, window=SATURATION_WINDOW):
    """Smallest n with C >= 1 - tol for ``window`` consecutive steps."""
    if window < 1:
        raise ValueError("window must be >= 1")
    conc = traj.concurrences if isinstance(traj, Trajectory) else np.asarray(traj)
    run = 0
    for k, c in enumerate(conc):
        run = run + 1 if c >= 1.0 - tol else 0
        if run >= window:
            return k - window + 1
    return None


def envelope(conc, window=ENVELOPE_WINDOW):
    """Running (max, min) over a trailing window."""
    conc = np.asarray(conc, dtype=float)
    padded = np.concatenate([np.full(window - 1, conc[0]), conc])
    view = np.lib.stride_tricks.sliding_window_view(padded, window)
    return view.max(axis=1), view.min(axis=1)


def is_entanglophobous(traj, threshold=1e-12):
    """True if concurrence drops by more than ``threshold`` at some step."""
    conc = traj.concurrences if isinstance(traj, Trajectory) else np.asarray(traj)
    return bool(np.any(np.diff(conc) < -threshold))


def sweep(process, mus, thetas, initial, n, workers=None):
    """Trajectories over a (mu, theta) grid; results keyed by (mu, theta)."""
    keys = [(mu, th) for mu in mus for th in thetas]

    def job(key):
        return key, iterate(process, key[0], AngleSchedule.fixed(key[1]), initial, n)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = dict(pool.map(job, keys))
    return {k: results[k] for k in keys}
