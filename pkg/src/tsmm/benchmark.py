"""Deterministic 48-state structural benchmark and its probe-frequency sets.

The plant mimics a lightly damped multi-storey structure: 24 vibration modes
with natural frequencies spread geometrically over 0.5-75 rad/s, modal decay
rates between 0.75 and 1.2 1/s, and deterministic (formula-based, seedless)
input/output couplings, mixed by a fixed orthogonal change of coordinates so
the realization is dense.  The two probe sets target magnitude-peak and
phase-feature frequencies of such structures and yield a reduced order of 20.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .generators import InterpolationSet
from .lti import StateSpaceModel

N_MODES = 24

# Receiving-side probe frequencies (rad/s), magnitude-peak flavored.
Q_FREQUENCIES = (0.01, 5.22, 10.3, 13.5, 22.2, 24.5, 36.0, 42.4, 55.9, 70.0)
# Exciting-side probe frequencies (rad/s), phase-feature flavored.
S_FREQUENCIES = (2.3, 19.89, 11.77, 6.73, 17.13, 17.8, 28.77, 40.4, 33.43, 45.2)


def building_model() -> StateSpaceModel:
    """Construct the benchmark plant; deterministic and free of RNG state."""
    j = np.arange(N_MODES, dtype=float)
    freqs = 0.5 * (75.0 / 0.5) ** (j / (N_MODES - 1))
    decay = 0.75 + 0.45 * ((7.0 * j) % N_MODES) / (N_MODES - 1)
    gain = np.sqrt(freqs / 10.0)
    b1 = (1.0 + 0.6 * np.sin(2.1 * j + 0.7)) * gain
    c1 = (1.0 + 0.6 * np.cos(1.7 * j + 0.3)) * gain
    c2 = 0.3 * np.sin(1.3 * j + 1.1) * gain

    blocks = [np.array([[-decay[i], freqs[i]], [-freqs[i], -decay[i]]]) for i in range(N_MODES)]
    A = scipy.linalg.block_diag(*blocks)
    B = np.zeros((2 * N_MODES, 1))
    B[0::2, 0] = b1
    C = np.zeros((1, 2 * N_MODES))
    C[0, 0::2] = c1
    C[0, 1::2] = c2

    n = 2 * N_MODES
    idx = np.arange(n, dtype=float)
    skew = 0.02 * np.sin(1.0 + 3.0 * idx[:, None] + 5.0 * idx[None, :])
    skew = skew - skew.T
    T = scipy.linalg.expm(skew)
    return StateSpaceModel(A=T @ A @ T.T, B=T @ B, C=C @ T.T)


def building_interpolation_sets():
    """(exciting set, receiving set) used with the benchmark plant; order 20."""
    return InterpolationSet(S_FREQUENCIES), InterpolationSet(Q_FREQUENCIES)
