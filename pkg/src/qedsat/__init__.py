"""Tree-level QED helicity maps, iterated, and the entanglement they build up."""

from .amplitudes import amplitude_matrix, com_kinematics, spin_averaged_squared, tree_amplitude
from .basis import UR, Helicity, ProcessKind
from .dynamics import (
    AngleSchedule,
    Trajectory,
    closed_form_random_product,
    closed_form_ur_bhabha,
    detect_saturation,
    iterate,
    iterate_by_power,
    iterate_map,
)
from .entanglement import (
    BellClassification,
    PureTwoQubitState,
    bell_coords,
    classify,
    concurrence,
    fidelity,
    normalize,
    state,
)
from .kernels import BACKEND
from .maps import ScatteringMatrix, SymbolPattern, from_bell_basis, matches_pattern, structural_pattern, to_bell_basis
from .spectral import (
    BhabhaParams,
    EigenSystem,
    bhabha_analytic_eigensystem,
    bhabha_params,
    eigendecompose,
    predict_asymptote,
)

__version__ = "0.1.0"
