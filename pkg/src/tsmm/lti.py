"""Dense state-space fundamentals: models, exponentials, transfer evaluation, rank tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

# |s - lambda| <= POLE_TOL * (1 + |lambda|) counts as evaluating on a pole.
POLE_TOL = 1e-9
DEFAULT_RANK_TOL = 1e-10


class PoleProximityError(ValueError):
    """Evaluation point is numerically indistinguishable from a system pole."""


def _as_matrix(M, name: str) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got ndim={M.ndim}")
    return M


@dataclass(frozen=True)
class StateSpaceModel:
    """Continuous-time SISO LTI plant  x' = A x + B u,  y = C x.

    A is n-by-n, B n-by-1, C 1-by-n.  One-dimensional B or C inputs are
    reshaped to the column/row convention.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = _as_matrix(self.A, "A")
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError(f"A must be square, got shape {A.shape}")
        B = np.asarray(self.B, dtype=float).reshape(-1, 1)
        C = np.asarray(self.C, dtype=float).reshape(1, -1)
        if B.shape != (n, 1):
            raise ValueError(f"B must be a column of height {n}, got shape {B.shape}")
        if C.shape != (1, n):
            raise ValueError(f"C must be a row of width {n}, got shape {C.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def n(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the stability/minimality screen of a plant."""

    n: int
    max_real_eig: float
    stable: bool
    ctrb_rank: int
    obsv_rank: int
    minimal: bool
    rank_tol: float

    @property
    def ok(self) -> bool:
        return self.stable and self.minimal


def numerical_rank(M: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> int:
    """Rank as the number of singular values above rank_tol * sigma_max."""
    sv = np.linalg.svd(np.atleast_2d(M), compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > rank_tol * sv[0]))


def controllability_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    cols = [B]
    for _ in range(n - 1):
        cols.append(A @ cols[-1])
    return np.hstack(cols)


def observability_matrix(A: np.ndarray, C: np.ndarray) -> np.ndarray:
    return controllability_matrix(A.T, C.T).T


def validate_model(m: StateSpaceModel, rank_tol: float = DEFAULT_RANK_TOL) -> ValidationReport:
    """Check asymptotic stability and minimality of a plant.

    Stability requires every eigenvalue of A in the open left half plane;
    minimality requires the controllability and observability matrices to
    reach full numerical rank at the given relative threshold.
    """
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    eigs = np.linalg.eigvals(m.A)
    max_real = float(np.max(eigs.real))
    cr = numerical_rank(controllability_matrix(m.A, m.B), rank_tol)
    orank = numerical_rank(observability_matrix(m.A, m.C), rank_tol)
    return ValidationReport(
        n=m.n,
        max_real_eig=max_real,
        stable=max_real < 0.0,
        ctrb_rank=cr,
        obsv_rank=orank,
        minimal=(cr == m.n and orank == m.n),
        rank_tol=rank_tol,
    )


def transfer_eval(m: StateSpaceModel, s: complex) -> complex:
    """Evaluate the transfer function C (sI - A)^{-1} B at a single point.

    Raises PoleProximityError when s is within POLE_TOL (relative) of an
    eigenvalue of A.
    """
    return complex(frequency_response(m, [s])[0])


def frequency_response(m: StateSpaceModel, points) -> np.ndarray:
    """Vectorized transfer-function evaluation at an iterable of complex points."""
    pts = np.asarray(list(points), dtype=complex)
    eigs = np.linalg.eigvals(m.A)
    out = np.empty(pts.shape, dtype=complex)
    eye = np.eye(m.n)
    for i, s in enumerate(pts):
        if np.min(np.abs(s - eigs) / (1.0 + np.abs(eigs))) <= POLE_TOL:
            raise PoleProximityError(f"point {s} lies on (or too close to) a pole")
        out[i] = (m.C @ np.linalg.solve(s * eye - m.A, m.B))[0, 0]
    return out


def matrix_exponential(M: np.ndarray, t: float) -> np.ndarray:
    """exp(M t) by scaling-and-squaring (scipy.linalg.expm)."""
    M = _as_matrix(M, "M")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix must be finite")
    E = scipy.linalg.expm(M * float(t))
    if not np.all(np.isfinite(E)):
        raise OverflowError("matrix exponential overflowed")
    return E


def exact_discretize(M: np.ndarray, dt: float) -> np.ndarray:
    """One-step propagator exp(M dt) for the autonomous system x' = M x."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return matrix_exponential(M, dt)
