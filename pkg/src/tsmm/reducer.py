"""Assembly of the unique two-sided reduced model and moment-match reporting."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .generators import GeneratorPair
from .lti import PoleProximityError, StateSpaceModel, transfer_eval
from .oracle import COND_LIMIT


class InvertibilityError(ValueError):
    """Cross moment matrix is numerically singular; ROM assembly deferred."""


@dataclass(frozen=True)
class Provenance:
    """Where the moment matrices came from: 'oracle' or 'data', with sample times."""

    source: str
    t_k: Optional[float] = None
    t_i: Optional[float] = None


@dataclass(frozen=True)
class ReducedOrderModel:
    """State-space triple of the reduced model, tagged with its assembly form."""

    F: np.ndarray
    G: np.ndarray
    Hrow: np.ndarray
    form: str
    provenance: Provenance

    def __post_init__(self):
        F = np.asarray(self.F, dtype=float)
        nu = F.shape[0]
        G = np.asarray(self.G, dtype=float).reshape(nu, 1)
        H = np.asarray(self.Hrow, dtype=float).reshape(1, nu)
        if F.shape != (nu, nu):
            raise ValueError("F must be square")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "Hrow", H)

    @property
    def nu(self) -> int:
        return self.F.shape[0]

    def to_state_space(self) -> StateSpaceModel:
        return StateSpaceModel(A=self.F, B=self.G, C=self.Hrow)


def _solve_right_inverse(row: np.ndarray, UPi: np.ndarray, cond_limit: float) -> np.ndarray:
    """row @ UPi^{-1} via a linear solve, guarded by the conditioning gate."""
    cond = float(np.linalg.cond(UPi))
    if not np.isfinite(cond) or cond > cond_limit:
        raise InvertibilityError(
            f"cross moment matrix condition {cond:.3g} exceeds the gate {cond_limit:.3g}"
        )
    return np.linalg.solve(UPi.T, row.T).T


def _solve_left_inverse(UPi: np.ndarray, col: np.ndarray, cond_limit: float) -> np.ndarray:
    cond = float(np.linalg.cond(UPi))
    if not np.isfinite(cond) or cond > cond_limit:
        raise InvertibilityError(
            f"cross moment matrix condition {cond:.3g} exceeds the gate {cond_limit:.3g}"
        )
    return np.linalg.solve(UPi, col)


def build_rom_q_form(
    g: GeneratorPair,
    cpi: np.ndarray,
    ub: np.ndarray,
    upi: Optional[np.ndarray] = None,
    upi_inv: Optional[np.ndarray] = None,
    provenance: Provenance = Provenance(source="data"),
    cond_limit: float = COND_LIMIT,
) -> ReducedOrderModel:
    """Reduced model built around the receiving generator: (Q - R H, Upsilon B, H).

    H is cpi @ inv(upi); when the directly estimated inverse is supplied the
    product is formed without any inversion, otherwise a guarded linear solve
    against upi is used.
    """
    cpi = np.asarray(cpi, dtype=float).reshape(1, g.nu)
    ub = np.asarray(ub, dtype=float).reshape(g.nu, 1)
    if (upi is None) == (upi_inv is None):
        raise ValueError("exactly one of upi / upi_inv must be supplied")
    if upi_inv is not None:
        H = cpi @ np.asarray(upi_inv, dtype=float)
    else:
        H = _solve_right_inverse(cpi, np.asarray(upi, dtype=float), cond_limit)
    F = g.Q - g.R @ H
    return ReducedOrderModel(F=F, G=ub, Hrow=H, form="Q", provenance=provenance)


def build_rom_s_form(
    g: GeneratorPair,
    cpi: np.ndarray,
    ub: np.ndarray,
    upi: Optional[np.ndarray] = None,
    upi_inv: Optional[np.ndarray] = None,
    provenance: Provenance = Provenance(source="data"),
    cond_limit: float = COND_LIMIT,
) -> ReducedOrderModel:
    """Equivalent reduced model built around the exciting generator: (S - G L, G, C Pi)."""
    cpi = np.asarray(cpi, dtype=float).reshape(1, g.nu)
    ub = np.asarray(ub, dtype=float).reshape(g.nu, 1)
    if (upi is None) == (upi_inv is None):
        raise ValueError("exactly one of upi / upi_inv must be supplied")
    if upi_inv is not None:
        Gcol = np.asarray(upi_inv, dtype=float) @ ub
    else:
        Gcol = _solve_left_inverse(np.asarray(upi, dtype=float), ub, cond_limit)
    if np.all(Gcol == 0.0):
        warnings.warn(
            "input moment vector is zero: the reduced model degenerates to the "
            "marginally stable generator with no input path",
            RuntimeWarning,
            stacklevel=2,
        )
    F = g.S - Gcol @ g.L
    return ReducedOrderModel(F=F, G=Gcol, Hrow=cpi, form="S", provenance=provenance)


@dataclass(frozen=True)
class MomentMatchPoint:
    s: complex
    w_full: complex
    w_rom: Optional[complex]
    abs_err: float
    rel_err: float
    rom_pole: bool


@dataclass(frozen=True)
class MomentMatchReport:
    points: List[MomentMatchPoint]

    @property
    def max_rel_err(self) -> float:
        errs = [p.rel_err for p in self.points if not p.rom_pole]
        return max(errs) if errs else np.nan

    @property
    def max_abs_err(self) -> float:
        errs = [p.abs_err for p in self.points if not p.rom_pole]
        return max(errs) if errs else np.nan


def interpolation_points(g: GeneratorPair) -> np.ndarray:
    """The 2*nu prescribed points: eigenvalues of both generator matrices."""
    return np.concatenate([np.linalg.eigvals(g.S), np.linalg.eigvals(g.Q)])


def moment_match_report(
    full: StateSpaceModel,
    rom: ReducedOrderModel,
    g: GeneratorPair,
    extra_points: Sequence[complex] = (),
) -> MomentMatchReport:
    """Compare full and reduced transfer functions at the prescribed points.

    Evaluation at (or numerically on top of) a ROM pole is flagged per point
    rather than failing the report.
    """
    rom_ss = rom.to_state_space()
    pts = np.concatenate([interpolation_points(g), np.asarray(list(extra_points), dtype=complex)])
    entries = []
    for s in pts:
        wf = transfer_eval(full, s)
        try:
            wr = transfer_eval(rom_ss, s)
        except PoleProximityError:
            entries.append(MomentMatchPoint(s=s, w_full=wf, w_rom=None,
                                            abs_err=np.inf, rel_err=np.inf, rom_pole=True))
            continue
        err = abs(wr - wf)
        rel = err / abs(wf) if wf != 0 else np.inf
        entries.append(MomentMatchPoint(s=s, w_full=wf, w_rom=wr,
                                        abs_err=err, rel_err=rel, rom_pole=False))
    return MomentMatchReport(points=entries)
