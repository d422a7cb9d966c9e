"""Eigen-analysis of scattering matrices and asymptotic-state prediction.

For a map obeying the Bhabha pattern the Bell basis splits it into

* Phi+ with eigenvalue A + D,
* Psi- with eigenvalue E - F,
* a 2x2 block on (Phi-, Psi+)::

      K = [[A - D, -2B],
           [ 2B,   E + F]]

  with eigenvalues (s1 +- sqrt(t)) / 2, where s1 = A - D + E + F and
  t = (-A + D + E + F)**2 - 16 B**2.

When t < 0 the block has a complex-conjugate pair of equal modulus and the
iterate keeps rotating inside the real (Phi-, Psi+) plane.
"""

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import BELL_LABELS, BELL_UNITARY, PLANES
from .entanglement import (
    PSI_PLUS,
    BellClassification,
    Kind,
    PureTwoQubitState,
    bell_coords,
    classify,
    concurrence,
    from_bell_coords,
    normalize,
)
from .errors import ComplexParams, SolverFailure
from .maps import BHABHA_PATTERN, as_matrix, require_pattern

RESIDUAL_TOL = 1e-10
TIE_TOL = 1e-9
ZERO_COEFF_TOL = 1e-9


@dataclass(frozen=True)
class EigenPair:
    value: complex
    vector: PureTwoQubitState
    residual: float  # ||M v - lambda v||


@dataclass(frozen=True)
class EigenSystem:
    pairs: tuple
    degenerate_dominant: bool
    matrix_norm: float

    @property
    def values(self):
        return np.array([p.value for p in self.pairs])

    @property
    def vectors(self):
        """Eigenvectors as columns."""
        return np.column_stack([p.vector.amps for p in self.pairs])

    @property
    def max_residual(self):
        return max(p.residual for p in self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def _clusters(values, tol):
    """Group indices of (numerically) equal eigenvalues."""
    scale = max(np.max(np.abs(values)), np.finfo(float).tiny)
    groups = []
    for k, lam in enumerate(values):
        for grp in groups:
            if abs(values[grp[0]] - lam) <= tol * scale:
                grp.append(k)
                break
        else:
            groups.append([k])
    return groups


def _bell_align(vectors, groups):
    """Inside each degenerate cluster prefer Bell states lying in the eigenspace."""
    out = vectors.copy()
    for grp in groups:
        if len(grp) < 2:
            continue
        q, r = np.linalg.qr(vectors[:, grp])
        rank = int(np.sum(np.abs(np.diag(r)) > 1e-8))
        if rank < len(grp):  # defective: leave LAPACK's vectors
            continue
        picked = []
        for b in range(4):
            bell = BELL_UNITARY[b]
            if np.linalg.norm(q.conj().T @ bell) ** 2 >= 1.0 - 1e-9:
                picked.append(bell.copy())
            if len(picked) == len(grp):
                break
        # fill with the orthogonal complement of the picked Bell states
        basis = list(picked)
        for col in q.T:
            if len(basis) == len(grp):
                break
            v = col - sum(np.vdot(b, col) * b for b in basis)
            if np.linalg.norm(v) > 1e-6:
                basis.append(v / np.linalg.norm(v))
        for k, v in zip(grp, basis):
            out[:, k] = v
    return out


def _make_system(m, values, vectors, tie_tol=TIE_TOL):
    norm = float(np.linalg.norm(m, ord=np.inf))
    pairs = []
    for lam, v in zip(values, vectors.T):
        v = v / np.linalg.norm(v)
        # fix the phase: largest component real positive, for reproducibility
        k = int(np.argmax(np.abs(v)))
        v = v * np.exp(-1j * np.angle(v[k]))
        res = float(np.linalg.norm(m @ v - lam * v))
        pairs.append(EigenPair(complex(lam), PureTwoQubitState(v), res))
    pairs.sort(key=lambda p: (-abs(p.value), -p.value.real, -p.value.imag))
    mags = [abs(p.value) for p in pairs]
    degenerate = len(mags) > 1 and abs(mags[0] - mags[1]) <= tie_tol * mags[0]
    return EigenSystem(tuple(pairs), degenerate, norm)


def eigendecompose(m, tol=RESIDUAL_TOL):
    """Full eigensystem of a 4x4 map; residuals bounded by ``tol * ||M||``."""
    arr = as_matrix(m).entries
    norm = float(np.linalg.norm(arr, ord=np.inf))
    values, vectors = np.linalg.eig(arr)
    vectors = _bell_align(vectors, _clusters(values, TIE_TOL))
    system = _make_system(arr, values, vectors)
    if system.max_residual > tol * norm:
        system = _refine(arr, system)
    if system.max_residual > tol * norm:
        raise SolverFailure(
            f"eigen-residual {system.max_residual:.3g} exceeds {tol:g}*||M||", best_residual=system.max_residual
        )
    return system


def _refine(arr, system, sweeps=3):
    """Inverse-iteration polish of each pair."""
    eye = np.eye(4)
    vals, vecs = [], []
    for p in system.pairs:
        lam, v = p.value, p.vector.amps.copy()
        shift = lam + 1e-13 * max(1.0, abs(lam))
        for _ in range(sweeps):
            try:
                w = np.linalg.solve(arr - shift * eye, v)
            except np.linalg.LinAlgError:
                break
            v = w / np.linalg.norm(w)
            lam = np.vdot(v, arr @ v)
        vals.append(lam)
        vecs.append(v)
    return _make_system(arr, np.array(vals), np.column_stack(vecs))


# -- analytic Bhabha system --------------------------------------------------


@dataclass(frozen=True)
class BhabhaParams:
    """Symbols of the Bhabha pattern and the derived block quantities.

    ``r`` and ``eta`` follow the polar form of ``s1 + i s2``; the block's
    eigenvalues are ``(s1 +- sqrt(t)) / 2``, so on the t < 0 branch they are
    ``(r / 2) exp(+-i eta)``.
    """

    A: complex
    B: complex
    D: complex
    E: complex
    F: complex

    @property
    def s1(self):
        return self.A - self.D + self.E + self.F

    @property
    def t(self):
        return (-self.A + self.D + self.E + self.F) ** 2 - 16.0 * self.B**2

    @property
    def s2(self):
        return cmath.sqrt(self.t) if not self.is_real else math.sqrt(abs(self.t.real))

    @property
    def r(self):
        return abs(cmath.sqrt(self.s1**2 + self.s2**2))

    @property
    def eta(self):
        return math.atan2(self.s2.real, self.s1.real)

    @property
    def is_real(self):
        vals = np.array([self.A, self.B, self.D, self.E, self.F])
        return bool(np.max(np.abs(vals.imag)) <= 1e-9 * max(np.max(np.abs(vals)), 1e-300))

    @property
    def branch(self):
        return "real" if self.t.real >= 0 else "complex"

    def matrix(self):
        return BHABHA_PATTERN.build(A=self.A, B=self.B, D=self.D, E=self.E, F=self.F)

    def real_part(self):
        return BhabhaParams(*(complex(x.real) for x in (self.A, self.B, self.D, self.E, self.F)))


def bhabha_params(m, tol=1e-9):
    sm = as_matrix(m)
    require_pattern(sm, BHABHA_PATTERN, tol)
    vals = {s: BHABHA_PATTERN.read(sm, s) for s in "ABDEF"}
    return BhabhaParams(**vals)


@dataclass(frozen=True)
class BhabhaAnalytic:
    system: EigenSystem
    branch: str  # "real" (t >= 0) or "complex" (t < 0)
    delta3: float | None = None
    delta4: float | None = None
    beta: float | None = None
    spanning_set: tuple = ()  # real maximally entangled states (t < 0 branch)
    block_eigenvalues: tuple = ()


def _block_vector(a, e, b2, lam):
    """Eigenvector of [[a, -b2], [b2, e]] in (Phi-, Psi+) coordinates."""
    v1 = np.array([b2, a - lam])
    v2 = np.array([lam - e, b2])
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    if np.linalg.norm(v) == 0.0:  # K is a multiple of the identity
        return np.array([1.0, 0.0], dtype=complex)
    return v / np.linalg.norm(v)


def _from_block(v):
    return from_bell_coords([0.0, v[0], v[1], 0.0])


def bhabha_analytic_eigensystem(p, complex_tol=1e-9):
    if not p.is_real:
        raise ComplexParams(f"parameters carry imaginary parts beyond {complex_tol:g}; use eigendecompose")
    q = p.real_part()
    a = (q.A - q.D).real
    e = (q.E + q.F).real
    b2 = 2.0 * q.B.real
    t = q.t.real
    lam1 = (q.A + q.D).real
    lam2 = (q.E - q.F).real
    root = cmath.sqrt(t)
    lam3 = (a + e + root) / 2.0
    lam4 = (a + e - root) / 2.0
    v3 = _block_vector(a, e, b2, lam3)
    v4 = _block_vector(a, e, b2, lam4)
    values = [lam1, lam2, lam3, lam4]
    vectors = np.column_stack(
        [
            BELL_UNITARY[0],
            BELL_UNITARY[3],
            _from_block(v3).amps,
            _from_block(v4).amps,
        ]
    )
    arr = q.matrix()
    system = _make_system(arr, np.array(values), vectors)
    if t >= 0:
        d3 = math.atan2(v3[1].real, v3[0].real)
        d4 = math.atan2(v4[1].real, v4[0].real)
        return BhabhaAnalytic(system, "real", delta3=d3, delta4=d4, block_eigenvalues=(lam3, lam4))
    beta = math.atan2((a - e) / 2.0, b2)
    xi3 = from_bell_coords([0.0, math.cos(beta), math.sin(beta), 0.0])
    span = (from_bell_coords([1, 0, 0, 0]), from_bell_coords([0, 0, 0, 1]), xi3, PSI_PLUS)
    return BhabhaAnalytic(system, "complex", beta=beta, spanning_set=span, block_eigenvalues=(lam3, lam4))


def spectrum_distance(a, b):
    """Largest gap between two spectra under the best pairing."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("spectra differ in size")
    return min(float(np.max(np.abs(a - b[list(perm)]))) for perm in itertools.permutations(range(len(b))))


def bell_eigenvectors(system, tol=1e-9):
    """Labels of Bell states that appear among the eigenvectors."""
    found = []
    for p in system.pairs:
        cls = classify(p.vector, tol)
        if cls.kind is Kind.BELL:
            found.append(cls.which)
    return found


# -- asymptotics -------------------------------------------------------------


@dataclass(frozen=True)
class Asymptote:
    """Outcome of :func:`predict_asymptote`.

    kind is one of ``converges``, ``planar``, ``tie`` or ``annihilated``.
    """

    kind: str
    state: PureTwoQubitState | None = None
    plane: tuple | None = None
    classification: BellClassification | None = None
    report: dict = field(default_factory=dict)

    @property
    def label(self):
        if self.kind == "converges":
            return str(self.classification)
        if self.kind == "planar":
            return f"Planar({self.plane[0]},{self.plane[1]})"
        return self.kind


def _plane_of(vectors, tol=1e-9):
    """Bell plane containing every vector in ``vectors``, if any."""
    for plane in PLANES:
        idx = [BELL_LABELS.index(lbl) for lbl in plane]
        outside = [k for k in range(4) if k not in idx]
        if all(np.sum(np.abs(bell_coords(v)[outside]) ** 2) <= tol for v in vectors):
            return plane
    return None


def predict_asymptote(m, initial, tie_tol=TIE_TOL, zero_tol=ZERO_COEFF_TOL, system=None):
    """Dominant-eigendirection analysis of ``M**n |initial>``."""
    sm = as_matrix(m)
    x = normalize(initial).amps
    system = system or eigendecompose(sm)
    vecs = system.vectors
    values = system.values
    coeffs, *_ = np.linalg.lstsq(vecs, x, rcond=None)
    expansion_error = float(np.linalg.norm(vecs @ coeffs - x))
    scale = max(abs(values[0]), np.finfo(float).tiny)
    alive = [k for k in range(4) if abs(coeffs[k]) > zero_tol]
    report = {
        "eigenvalues": [complex(v) for v in values],
        "coefficients": [complex(c) for c in coeffs],
        "alive": alive,
        "expansion_error": expansion_error,
    }
    if not alive or max(abs(values[k]) for k in alive) <= tie_tol * scale:
        return Asymptote("annihilated", classification=BellClassification(Kind.NOT_MAXIMAL, 0.0), report=report)
    top = max(abs(values[k]) for k in alive)
    lead = [k for k in alive if abs(values[k]) >= (1.0 - tie_tol) * top]
    rest = [abs(values[k]) for k in alive if k not in lead]
    report["dominant"] = lead
    report["ratio"] = (max(rest) / top) if rest else 0.0
    report["margin"] = 1.0 - report["ratio"]
    distinct = _clusters(values[lead], tie_tol)
    if len(distinct) == 1:
        limit = normalize(vecs[:, lead] @ coeffs[lead])
        return Asymptote("converges", limit, classification=classify(limit), report=report)
    # equal moduli, distinct eigenvalues
    members = [PureTwoQubitState(vecs[:, k]) for k in lead]
    plane = _plane_of(members)
    conj_pair = (
        len(lead) == 2
        and abs(values[lead[0]] - np.conj(values[lead[1]])) <= tie_tol * top
        and abs(values[lead[0]].imag) > tie_tol * top
    )
    if plane is not None and conj_pair:
        # the combination rotates with n * eta; sample it to confirm it stays real
        phase = cmath.phase(values[lead[0]])
        samples = []
        for n in range(1, 9):
            w = sum(coeffs[k] * cmath.exp(1j * n * (phase if k == lead[0] else -phase)) * vecs[:, k] for k in lead)
            samples.append(classify(normalize(w)))
        if all(c.kind in (Kind.PLANAR, Kind.BELL) for c in samples):
            report["eta"] = abs(phase)
            report["a_n_b_n_angles"] = [c.xi for c in samples if c.xi is not None]
            cls = BellClassification(Kind.PLANAR, 1.0, plane=plane)
            return Asymptote("planar", plane=plane, classification=cls, report=report)
    return Asymptote("tie", report=report)


def asymptote_concurrence(a):
    if a.kind == "converges":
        return concurrence(a.state)
    if a.kind == "planar":
        return 1.0
    if a.kind == "annihilated":
        return 0.0
    return float("nan")
