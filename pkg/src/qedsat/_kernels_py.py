"""Pure-Python twin of the compiled kernels (same signatures and results)."""

import math

import numpy as np


def iterate_sequence(mats, index, x0, tiny):
    n = len(index)
    states = np.empty((n + 1, 4), dtype=np.complex128)
    conc = np.empty(n + 1, dtype=np.float64)
    logn = np.empty(n, dtype=np.float64)
    states[0] = x0
    conc[0] = _conc(states[0])
    mats = [np.asarray(m) for m in mats]
    x = np.asarray(x0, dtype=np.complex128)
    for k in range(n):
        y = mats[index[k]] @ x
        nrm = math.sqrt(float(np.real(np.vdot(y, y))))
        if not nrm > tiny:
            return states[: k + 1], conc[: k + 1], logn[:k], k
        x = y / nrm
        states[k + 1] = x
        logn[k] = math.log(nrm)
        conc[k + 1] = _conc(x)
    return states, conc, logn, -1


def _conc(x):
    return min(1.0, 2.0 * abs(x[0] * x[3] - x[1] * x[2]))
