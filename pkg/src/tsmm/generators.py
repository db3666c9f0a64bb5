"""Signal-generator construction from interpolation frequencies, plus the assumption screen."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.linalg

from .lti import DEFAULT_RANK_TOL, StateSpaceModel

# Absolute gap below which two generator/plant eigenvalues count as shared.
EIG_DISJOINT_TOL = 1e-8


class AssumptionViolation(ValueError):
    """Interpolation data breaks a structural requirement of the method."""


@dataclass(frozen=True)
class InterpolationSet:
    """Non-negative frequencies f (rad/s); each f > 0 stands for the pair +-i f, f = 0 for the origin."""

    frequencies: tuple

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.frequencies)
        if any(f < 0 for f in freqs):
            raise ValueError("frequencies must be non-negative")
        if len(set(freqs)) != len(freqs):
            raise ValueError("frequencies must be pairwise distinct")
        object.__setattr__(self, "frequencies", freqs)

    @property
    def nu(self) -> int:
        return sum(1 if f == 0.0 else 2 for f in self.frequencies)

    def points(self) -> np.ndarray:
        """All represented complex points (+i f and -i f, or 0)."""
        pts = []
        for f in self.frequencies:
            if f == 0.0:
                pts.append(0.0 + 0.0j)
            else:
                pts.extend([1j * f, -1j * f])
        return np.asarray(pts, dtype=complex)


@dataclass(frozen=True)
class GeneratorPair:
    """Real realizations of the exciting generator (S, L, omega0) and the receiving one (Q, R)."""

    S: np.ndarray
    L: np.ndarray
    omega0: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    nu: int

    def __post_init__(self):
        S = np.asarray(self.S, dtype=float)
        Q = np.asarray(self.Q, dtype=float)
        L = np.asarray(self.L, dtype=float).reshape(1, -1)
        R = np.asarray(self.R, dtype=float).reshape(-1, 1)
        w0 = np.asarray(self.omega0, dtype=float).reshape(-1, 1)
        nu = int(self.nu)
        if S.shape != (nu, nu) or Q.shape != (nu, nu):
            raise ValueError("S and Q must be nu-by-nu")
        if L.shape != (1, nu) or R.shape != (nu, 1) or w0.shape != (nu, 1):
            raise ValueError("L, R, omega0 must have length nu")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "omega0", w0)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "nu", nu)


def _rotation_realization(freqs: Iterable[float]):
    """Block-diagonal realization: one 2x2 rotation per f > 0, a scalar zero per f = 0.

    The tap vector picks the first coordinate of each block; it serves as the
    output row L of the exciting generator and, transposed, as the input
    column R of the receiving one.  This pattern is observable/controllable
    for any set of distinct frequencies.
    """
    blocks = []
    taps = []
    for f in freqs:
        if f == 0.0:
            blocks.append(np.zeros((1, 1)))
            taps.append([1.0])
        else:
            blocks.append(np.array([[0.0, f], [-f, 0.0]]))
            taps.append([1.0, 0.0])
    M = scipy.linalg.block_diag(*blocks)
    tap = np.concatenate(taps)
    return M, tap


def build_generator_pair(set_s: InterpolationSet, set_q: InterpolationSet) -> GeneratorPair:
    """Build the two real generators from disjoint, equal-order frequency sets."""
    if set_s.nu != set_q.nu:
        raise AssumptionViolation(
            f"generator orders differ: {set_s.nu} vs {set_q.nu}; "
            "both sets must yield the same order"
        )
    for f in set_s.frequencies:
        for gfreq in set_q.frequencies:
            if abs(f - gfreq) <= EIG_DISJOINT_TOL:
                raise AssumptionViolation(
                    f"frequency {f} appears in both sets; spectra must be disjoint"
                )
    S, ltap = _rotation_realization(set_s.frequencies)
    Q, rtap = _rotation_realization(set_q.frequencies)
    nu = set_s.nu
    return GeneratorPair(
        S=S,
        L=ltap.reshape(1, nu),
        omega0=np.ones((nu, 1)),
        Q=Q,
        R=rtap.reshape(nu, 1),
        nu=nu,
    )


@dataclass(frozen=True)
class AssumptionReport:
    """Per-condition verdicts for a plant/generator combination."""

    plant_stable: bool
    plant_max_real: float
    s_simple_imaginary: bool
    q_simple_imaginary: bool
    sl_observable: bool
    qr_controllable: bool
    s_excitable: bool
    disjoint_s_plant: bool
    disjoint_q_plant: bool
    disjoint_s_q: bool
    min_gap_s_plant: float
    min_gap_q_plant: float
    min_gap_s_q: float
    reduced_order_feasible: bool

    @property
    def ok(self) -> bool:
        return (
            self.plant_stable
            and self.s_simple_imaginary
            and self.q_simple_imaginary
            and self.sl_observable
            and self.qr_controllable
            and self.s_excitable
            and self.disjoint_s_plant
            and self.disjoint_q_plant
            and self.disjoint_s_q
        )

    def to_text(self) -> str:
        def mark(b):
            return "pass" if b else "FAIL"

        lines = [
            f"plant_stable = {mark(self.plant_stable)} (max Re eig = {self.plant_max_real:.6g})",
            f"s_simple_imaginary = {mark(self.s_simple_imaginary)}",
            f"q_simple_imaginary = {mark(self.q_simple_imaginary)}",
            f"sl_observable = {mark(self.sl_observable)}",
            f"qr_controllable = {mark(self.qr_controllable)}",
            f"s_excitable = {mark(self.s_excitable)}",
            f"disjoint_s_plant = {mark(self.disjoint_s_plant)} (min gap = {self.min_gap_s_plant:.6g})",
            f"disjoint_q_plant = {mark(self.disjoint_q_plant)} (min gap = {self.min_gap_q_plant:.6g})",
            f"disjoint_s_q = {mark(self.disjoint_s_q)} (min gap = {self.min_gap_s_q:.6g})",
            f"reduced_order_feasible = {mark(self.reduced_order_feasible)} (order vs plant dimension)",
            f"overall = {mark(self.ok)}",
        ]
        return "\n".join(lines) + "\n"


def _min_gap(e1: np.ndarray, e2: np.ndarray) -> float:
    return float(np.min(np.abs(e1[:, None] - e2[None, :])))


def _simple_imaginary(eigs: np.ndarray, tol: float) -> bool:
    if np.max(np.abs(eigs.real)) > tol:
        return False
    if eigs.size < 2:
        return True
    diffs = np.abs(eigs[:, None] - eigs[None, :])
    np.fill_diagonal(diffs, np.inf)
    return bool(np.min(diffs) > tol)


def _pbh_observable(M: np.ndarray, row: np.ndarray, rank_tol: float) -> bool:
    """Eigenvalue-wise full-rank test of [M - lam I; row].

    Equivalent to the stacked-powers rank condition for simple eigenvalues,
    but stays well scaled for wide frequency ranges where explicit matrix
    powers overflow the floating-point dynamic range.
    """
    nu = M.shape[0]
    for lam in np.linalg.eigvals(M):
        sv = np.linalg.svd(np.vstack([M - lam * np.eye(nu), row]), compute_uv=False)
        if sv[-1] <= rank_tol * sv[0]:
            return False
    return True


def _pbh_controllable(M: np.ndarray, col: np.ndarray, rank_tol: float) -> bool:
    return _pbh_observable(M.T, col.T, rank_tol)


def check_assumptions(
    m: StateSpaceModel,
    g: GeneratorPair,
    eig_tol: float = EIG_DISJOINT_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> AssumptionReport:
    """Screen every structural requirement; purely reporting, never raises."""
    ea = np.linalg.eigvals(m.A)
    es = np.linalg.eigvals(g.S)
    eq = np.linalg.eigvals(g.Q)
    gap_sa = _min_gap(es, ea)
    gap_qa = _min_gap(eq, ea)
    gap_sq = _min_gap(es, eq)
    return AssumptionReport(
        plant_stable=bool(np.max(ea.real) < 0.0),
        plant_max_real=float(np.max(ea.real)),
        s_simple_imaginary=_simple_imaginary(es, eig_tol),
        q_simple_imaginary=_simple_imaginary(eq, eig_tol),
        sl_observable=_pbh_observable(g.S, g.L, rank_tol),
        qr_controllable=_pbh_controllable(g.Q, g.R, rank_tol),
        s_excitable=_pbh_controllable(g.S, g.omega0, rank_tol),
        disjoint_s_plant=gap_sa > eig_tol,
        disjoint_q_plant=gap_qa > eig_tol,
        disjoint_s_q=gap_sq > eig_tol,
        min_gap_s_plant=gap_sa,
        min_gap_q_plant=gap_qa,
        min_gap_s_q=gap_sq,
        reduced_order_feasible=g.nu <= m.n,
    )
