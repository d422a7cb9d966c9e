import math

import numpy as np
import pytest

from conftest import random_points
from qedsat.amplitudes import amplitude_matrix
from qedsat.basis import BELL_LABELS, UR
from qedsat.dynamics import iterate_map
from qedsat.entanglement import (
    PHI_PLUS,
    PSI_MINUS,
    PSI_PLUS,
    Kind,
    bell_coords,
    classify,
    concurrence,
    fidelity,
    random_state,
    state,
)
from qedsat.errors import ComplexParams, PatternViolation
from qedsat.maps import ScatteringMatrix
from qedsat.spectral import (
    BhabhaParams,
    bell_eigenvectors,
    bhabha_analytic_eigensystem,
    bhabha_params,
    eigendecompose,
    predict_asymptote,
    spectrum_distance,
)


def faddeev_leverrier(m):
    """Characteristic polynomial coefficients from traces of powers."""
    n = m.shape[0]
    coeffs = [1.0 + 0j]
    mk = np.zeros_like(m)
    for k in range(1, n + 1):
        mk = m @ (mk + coeffs[-1] * np.eye(n))
        coeffs.append(-np.trace(mk) / k)
    return np.array(coeffs)


def companion_roots(coeffs):
    c = coeffs / coeffs[0]
    n = len(c) - 1
    comp = np.zeros((n, n), dtype=complex)
    comp[0, :] = -c[1:]
    comp[1:, :-1] = np.eye(n - 1)
    return np.linalg.eigvals(comp)


def random_bhabha(rng, scale=1.0):
    vals = {k: scale * rng.standard_normal() for k in "ABDEF"}
    return BhabhaParams(**{k: complex(v) for k, v in vals.items()})


def test_identity_system():
    es = eigendecompose(ScatteringMatrix(np.eye(4)))
    np.testing.assert_allclose(es.values, [1, 1, 1, 1])
    assert es.degenerate_dominant


def test_identity_params():
    p = bhabha_params(np.eye(4))
    assert (p.A, p.B, p.D, p.E, p.F) == (1, 0, 0, 1, 0)
    # (-A + D + E + F)^2 - 16 B^2 vanishes here: the block is the 2x2 identity
    assert p.s1 == 2 and p.t == 0


def test_params_need_pattern():
    with pytest.raises(PatternViolation):
        bhabha_params(amplitude_matrix("compton", 1.0, 1.0))


def test_hermitian_against_companion_oracle(rng):
    for _ in range(20):
        z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        h = z + z.conj().T
        es = eigendecompose(h)
        norm = np.linalg.norm(h, ord=np.inf)
        assert np.max(np.abs(es.values.imag)) <= 1e-12 * norm
        assert es.max_residual <= 1e-10 * norm
        ref = companion_roots(faddeev_leverrier(h))
        assert spectrum_distance(es.values, ref) <= 1e-8 * norm


def test_sorted_and_normalized(rng):
    for proc in ("bhabha", "moller", "annihilation", "compton"):
        for mu, th in random_points(rng, 20):
            es = eigendecompose(amplitude_matrix(proc, mu, th))
            mags = np.abs(es.values)
            assert np.all(np.diff(mags) <= 1e-12 * mags[0])
            for p in es.pairs:
                assert np.linalg.norm(p.vector.amps) == pytest.approx(1.0, abs=1e-12)
            assert es.max_residual <= 1e-10 * es.matrix_norm


def test_residual_on_random_pattern_matrices(rng):
    for _ in range(100):
        m = random_bhabha(rng).matrix()
        es = eigendecompose(m)
        assert es.max_residual <= 1e-10 * es.matrix_norm


@pytest.mark.parametrize("th", [0.5, math.pi / 4, 2.0])
def test_ur_bhabha_bell_eigenvectors(th):
    es = eigendecompose(amplitude_matrix("bhabha", UR, th))
    assert sorted(bell_eigenvectors(es)) == sorted(BELL_LABELS)
    c = math.cos(th)
    by_label = {classify(p.vector).which: p.value for p in es.pairs}
    ratio = [by_label[b] / by_label["Phi+"] for b in BELL_LABELS]
    np.testing.assert_allclose(ratio, [1, 1, (1 + c * c) / 2, c], atol=1e-12)


def test_nonrel_params_reconstruct_eigenvalues():
    m = amplitude_matrix("bhabha", 0.01, math.pi / 4)
    p = bhabha_params(m)
    vals = eigendecompose(m).values
    for lam in (p.A + p.D, p.E - p.F):
        assert np.min(np.abs(vals - lam)) <= 1e-10


def _find_negative_t():
    for mu in np.linspace(0.01, 1.0, 25):
        for th in np.linspace(0.1, math.pi - 0.1, 25):
            p = bhabha_params(amplitude_matrix("bhabha", mu, th))
            if p.t.real < 0:
                return mu, th, p
    raise AssertionError("no t < 0 instance")


def test_negative_t_branch():
    mu, th, p = _find_negative_t()
    an = bhabha_analytic_eigensystem(p)
    assert an.branch == "complex"
    l3, l4 = an.block_eigenvalues
    assert l3 == pytest.approx(np.conj(l4), abs=1e-12 * abs(l3))
    assert abs(l3) == pytest.approx(p.r / 2, rel=1e-12)
    assert an.spanning_set[3] is PSI_PLUS or np.array_equal(an.spanning_set[3].amps, PSI_PLUS.amps)
    for s in an.spanning_set:
        assert concurrence(s) == pytest.approx(1.0, abs=1e-9)
        assert np.max(np.abs(bell_coords(s).imag)) <= 1e-15
    # generic solver sees the same conjugate pair
    vals = eigendecompose(amplitude_matrix("bhabha", mu, th)).values
    assert spectrum_distance(vals, an.system.values) <= 1e-9 * np.max(np.abs(vals))


def _check_analytic(p):
    an = bhabha_analytic_eigensystem(p)
    m = p.matrix()
    gen = eigendecompose(m)
    scale = max(np.max(np.abs(gen.values)), 1e-300)
    assert spectrum_distance(gen.values, an.system.values) <= 1e-9 * scale
    assert an.system.max_residual <= 1e-10 * np.linalg.norm(m, ord=np.inf)
    for pa in an.system.pairs:
        # eigenvectors of simple eigenvalues are unique up to phase
        k = int(np.argmin(np.abs(gen.values - pa.value)))
        gaps = np.abs(gen.values - pa.value)
        if np.sort(gaps)[1] > 1e-6 * scale:
            assert fidelity(pa.vector, gen.pairs[k].vector) >= 1 - 1e-9
    return an


def test_analytic_matches_generic_both_branches(rng):
    seen = set()
    for _ in range(200):
        an = _check_analytic(random_bhabha(rng))
        seen.add(an.branch)
    for mu, th in random_points(rng, 40):
        an = _check_analytic(bhabha_params(amplitude_matrix("bhabha", mu, th)))
        seen.add(an.branch)
    assert seen == {"real", "complex"}


def test_analytic_fixed_eigenvectors(rng):
    for _ in range(50):
        p = random_bhabha(rng)
        m = p.matrix()
        np.testing.assert_allclose(m @ PHI_PLUS.amps, (p.A + p.D) * PHI_PLUS.amps, atol=1e-12)
        np.testing.assert_allclose(m @ PSI_MINUS.amps, (p.E - p.F) * PSI_MINUS.amps, atol=1e-12)


def test_real_branch_vectors_in_plane(rng):
    for _ in range(50):
        p = random_bhabha(rng)
        an = bhabha_analytic_eigensystem(p)
        if an.branch != "real":
            continue
        for pair in an.system.pairs:
            assert concurrence(pair.vector) == pytest.approx(1.0, abs=1e-9)
        for d in (an.delta3, an.delta4):
            assert d is not None


def test_complex_params_rejected():
    p = BhabhaParams(1 + 0.5j, 0.1, 0.2, 0.3, 0.4)
    with pytest.raises(ComplexParams):
        bhabha_analytic_eigensystem(p)


@pytest.mark.parametrize("proc", ["bhabha", "moller"])
def test_fermion_eigenvectors_maximal(proc, rng):
    """Real-branch eigenvectors are maximal; a conjugate pair spans a real Bell plane."""
    for mu, th in random_points(rng, 40):
        es = eigendecompose(amplitude_matrix(proc, mu, th))
        vals = es.values
        for k, pair in enumerate(es.pairs):
            if abs(pair.value.imag) <= 1e-9 * abs(vals[0]):
                assert concurrence(pair.vector) == pytest.approx(1.0, abs=1e-9)
                continue
            w = np.abs(bell_coords(pair.vector)) ** 2
            support = {BELL_LABELS[j] for j in range(4) if w[j] > 1e-9}
            assert support in ({"Phi-", "Psi+"}, {"Phi+", "Psi-"})


def test_compton_has_no_bell_eigenvector(rng):
    lowest = 1.0
    for mu, th in [(1.0, math.pi / 2)] + random_points(rng, 30):
        es = eigendecompose(amplitude_matrix("compton", mu, th))
        assert bell_eigenvectors(es) == []
        lowest = min(lowest, min(concurrence(p.vector) for p in es.pairs))
    print(f"lowest Compton eigenvector concurrence {lowest:.4f}")


def test_predict_ur_bhabha_rl():
    a = predict_asymptote(amplitude_matrix("bhabha", UR, math.pi / 4), state("RL"))
    assert a.kind == "converges"
    assert a.classification.kind is Kind.BELL and a.classification.which == "Psi+"


def test_predict_ur_moller_rl():
    for th in (0.7, math.pi / 4, 1.2):
        a = predict_asymptote(amplitude_matrix("moller", UR, th), state("RL"))
        assert a.kind == "converges" and a.classification.which == "Psi-"


def test_predict_theta_pi_tie():
    a = predict_asymptote(amplitude_matrix("bhabha", UR, math.pi), state("RL"))
    assert a.kind == "tie"


def test_predict_bell_initial_is_fixed():
    m = amplitude_matrix("bhabha", 0.3, 1.0)
    a = predict_asymptote(m, PHI_PLUS)
    assert a.kind == "converges" and a.classification.which == "Phi+"


def test_predict_agrees_with_iteration():
    """50 random instances; instances needing more than 1e6 steps are redrawn."""
    rng = np.random.default_rng(99)
    checked = drawn = 0
    while checked < 50:
        drawn += 1
        proc = ("bhabha", "moller")[int(rng.integers(2))]
        mu, th = 10 ** rng.uniform(-1, 3), rng.uniform(0.1, math.pi - 0.1)
        m = amplitude_matrix(proc, mu, th)
        s = random_state(rng)
        a = predict_asymptote(m, s)
        ratio = a.report.get("ratio", 0.0)
        need = math.ceil(math.log(1e-9) / math.log(ratio)) if ratio > 0 else 10
        if a.kind == "tie" or need > 1_000_000:
            continue
        final = iterate_map(m, s, max(need, 10)).final_state
        if a.kind == "converges":
            assert fidelity(final, a.state) >= 1 - 1e-6
        else:
            assert a.kind == "planar"
            cls = classify(final)
            assert cls.kind is Kind.BELL or cls.plane == a.plane
        checked += 1
    assert drawn < 100
