"""Model-based ground truth: Sylvester solutions and exact moment matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .generators import EIG_DISJOINT_TOL, GeneratorPair
from .lti import StateSpaceModel

# Relative residual allowed for a Sylvester solution, scaled by the factor norms.
RESIDUAL_TOL = 1e-10
# Cross moment matrices worse conditioned than this are treated as non-invertible.
COND_LIMIT = 1e12


class SylvesterUniquenessError(ValueError):
    """Coefficient spectra overlap, so the Sylvester equation has no unique solution."""


def _check_disjoint(e1: np.ndarray, e2: np.ndarray, what: str) -> None:
    gap = float(np.min(np.abs(e1[:, None] - e2[None, :])))
    if gap <= EIG_DISJOINT_TOL:
        raise SylvesterUniquenessError(
            f"spectra of {what} overlap (min gap {gap:.3g}); no unique solution"
        )


def _residual_check(lhs: np.ndarray, scale: float, what: str) -> None:
    r = float(np.linalg.norm(lhs))
    if r > RESIDUAL_TOL * scale:
        raise ArithmeticError(f"{what} residual {r:.3g} exceeds {RESIDUAL_TOL * scale:.3g}")


def solve_sylvester_pi(m: StateSpaceModel, g: GeneratorPair, method: str = "schur") -> np.ndarray:
    """Unique Pi with A Pi + B L = Pi S.

    method="schur" uses the Bartels-Stewart solver; method="kron" solves the
    vectorized linear system directly and serves as an independent cross-check.
    """
    A, B = m.A, m.B
    S, L = g.S, g.L
    _check_disjoint(np.linalg.eigvals(A), np.linalg.eigvals(S), "A and S")
    n, nu = m.n, g.nu
    rhs = -B @ L
    if method == "schur":
        Pi = scipy.linalg.solve_sylvester(A, -S, rhs)
    elif method == "kron":
        K = np.kron(np.eye(nu), A) - np.kron(S.T, np.eye(n))
        Pi = np.linalg.solve(K, rhs.flatten(order="F")).reshape((n, nu), order="F")
    else:
        raise ValueError(f"unknown method {method!r}")
    scale = np.linalg.norm(A) * np.linalg.norm(Pi) + np.linalg.norm(B) * np.linalg.norm(L)
    _residual_check(A @ Pi + B @ L - Pi @ S, scale, "Pi equation")
    return Pi


def solve_sylvester_upsilon(m: StateSpaceModel, g: GeneratorPair, method: str = "schur") -> np.ndarray:
    """Unique Upsilon with Q Upsilon = Upsilon A + R C."""
    A, C = m.A, m.C
    Q, R = g.Q, g.R
    _check_disjoint(np.linalg.eigvals(Q), np.linalg.eigvals(A), "Q and A")
    n, nu = m.n, g.nu
    rhs = R @ C
    if method == "schur":
        U = scipy.linalg.solve_sylvester(Q, -A, rhs)
    elif method == "kron":
        K = np.kron(np.eye(n), Q) - np.kron(A.T, np.eye(nu))
        U = np.linalg.solve(K, rhs.flatten(order="F")).reshape((nu, n), order="F")
    else:
        raise ValueError(f"unknown method {method!r}")
    scale = np.linalg.norm(Q) * np.linalg.norm(U) + np.linalg.norm(R) * np.linalg.norm(C)
    _residual_check(Q @ U - U @ A - R @ C, scale, "Upsilon equation")
    return U


@dataclass(frozen=True)
class MomentMatrices:
    """Exact moment-related matrices of a plant/generator combination."""

    Pi: np.ndarray
    Upsilon: np.ndarray
    CPi: np.ndarray
    UB: np.ndarray
    UPi: np.ndarray
    UPi_inv: Optional[np.ndarray]
    cond_upi: float

    @property
    def upi_invertible(self) -> bool:
        return self.UPi_inv is not None


def exact_moment_matrices(
    m: StateSpaceModel,
    g: GeneratorPair,
    method: str = "schur",
    cond_limit: float = COND_LIMIT,
) -> MomentMatrices:
    """Assemble C Pi, Upsilon B, Upsilon Pi and, when well conditioned, its inverse."""
    Pi = solve_sylvester_pi(m, g, method=method)
    U = solve_sylvester_upsilon(m, g, method=method)
    UPi = U @ Pi
    cond = float(np.linalg.cond(UPi))
    if np.isfinite(cond) and cond <= cond_limit:
        UPi_inv = np.linalg.solve(UPi, np.eye(g.nu))
    else:
        UPi_inv = None
    return MomentMatrices(
        Pi=Pi,
        Upsilon=U,
        CPi=m.C @ Pi,
        UB=U @ m.B,
        UPi=UPi,
        UPi_inv=UPi_inv,
        cond_upi=cond,
    )
