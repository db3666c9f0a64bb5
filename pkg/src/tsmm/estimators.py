"""Online least-squares estimators for the moment matrices, and the joint driver.

Every estimator solves its regression by orthogonal decomposition
(numpy.linalg.lstsq, SVD based), which agrees with the defining
normal-equation formulas in exact arithmetic while being far better
conditioned.  The Kronecker-structured regressions are solved in factored
matrix form (min ||X Omega - B||_F); the stacked forms are still available
from the snapshot builders for diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .generators import GeneratorPair
from .interconnect import Trajectory, simulate_d_dynamics
from .lti import DEFAULT_RANK_TOL, matrix_exponential, numerical_rank


@dataclass(frozen=True)
class Tolerances:
    """Stopping and rank thresholds; the eta_* are per-second drift rates."""

    eta_cpi: float = 1e-7
    eta_upi: float = 1e-7
    eta_ub: float = 1e-7
    rank_tol: float = DEFAULT_RANK_TOL

    def __post_init__(self):
        for name in ("eta_cpi", "eta_upi", "eta_ub", "rank_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class LsEstimate:
    """One windowed least-squares solve; value is None when the window lacked rank."""

    value: Optional[np.ndarray]
    rank: int
    rank_ok: bool
    residual: Optional[float]
    window: int


@dataclass
class EstimateTrace:
    """Time-indexed history of one estimator."""

    times: List[float] = field(default_factory=list)
    values: List[Optional[np.ndarray]] = field(default_factory=list)
    residual_norms: List[float] = field(default_factory=list)
    rank_ok: List[bool] = field(default_factory=list)

    def append(self, t: float, est: LsEstimate) -> None:
        self.times.append(float(t))
        self.values.append(est.value if est.rank_ok else None)
        self.residual_norms.append(float(est.residual) if est.residual is not None else np.nan)
        self.rank_ok.append(bool(est.rank_ok))

    def last_value(self) -> Optional[np.ndarray]:
        for v in reversed(self.values):
            if v is not None:
                return v
        return None


def _window_bounds(k: int, width: int, what: str):
    lo = k - width + 1
    if width < 1 or lo < 0:
        raise ValueError(f"insufficient samples for {what}: k={k}, window={width}")
    return lo, k + 1


def build_cpi_snapshots(traj: Trajectory, k: int, w: int):
    """Stacked regressor/response pair for the output-moment regression."""
    if traj.omega is None or traj.y is None:
        raise ValueError("trajectory must carry omega and y channels")
    lo, hi = _window_bounds(k, w, "output-moment window")
    return traj.omega[:, lo:hi].T.copy(), traj.y[lo:hi].copy()


def estimate_cpi(traj: Trajectory, k: int, w: int,
                 rank_tol: float = DEFAULT_RANK_TOL) -> LsEstimate:
    """Windowed estimate of the steady-state output coefficients (1-by-nu).

    Uses the w most recent omega/y samples ending at index k.  Returns a
    rank-deficiency flag instead of a value when the window is not
    persistently exciting, so the caller can enlarge w.
    """
    R, gam = build_cpi_snapshots(traj, k, w)
    nu = R.shape[1]
    rank = numerical_rank(R, rank_tol)
    if rank < nu:
        return LsEstimate(value=None, rank=rank, rank_ok=False, residual=None, window=w)
    sol, *_ = np.linalg.lstsq(R, gam, rcond=None)
    residual = float(np.linalg.norm(R @ sol - gam))
    return LsEstimate(value=sol.reshape(1, nu), rank=rank, rank_ok=True,
                      residual=residual, window=w)


def estimate_upsilon_b(g: GeneratorPair, traj: Trajectory, t_i: float) -> np.ndarray:
    """Impulse-response estimate exp(-Q t_i) varpi(t_i) from a swapped run."""
    if traj.varpi is None:
        raise ValueError("trajectory must carry the varpi channel")
    k = traj.index_of(t_i)
    return matrix_exponential(g.Q, -t_i) @ traj.varpi[:, k:k + 1]


@dataclass(frozen=True)
class UpsilonBResult:
    value: np.ndarray
    trace: EstimateTrace
    converged: bool
    stop_index: int

    @property
    def t_stop(self) -> float:
        return self.trace.times[self.stop_index]


def run_upsilon_b_experiment(g: GeneratorPair, traj: Trajectory,
                             eta_ub: float = 1e-7) -> UpsilonBResult:
    """Scan the swapped-run estimate over time, stopping when its drift settles.

    Stops at the first sample where the successive estimate difference falls
    below (t_i - t_{i-1}) * eta_ub; otherwise returns the final estimate with
    converged=False.  The trace stores the drift norms in residual_norms
    (first entry is inf: no predecessor).
    """
    if traj.varpi is None:
        raise ValueError("trajectory must carry the varpi channel")
    step_back = matrix_exponential(g.Q, -traj.dt)
    E = np.eye(g.nu)
    trace = EstimateTrace()
    prev = None
    converged = False
    stop = traj.K - 1
    for k in range(traj.K):
        if k > 0:
            E = E @ step_back
        est = E @ traj.varpi[:, k:k + 1]
        drift = np.inf if prev is None else float(np.linalg.norm(est - prev))
        trace.times.append(float(traj.t[k]))
        trace.values.append(est)
        trace.residual_norms.append(drift)
        trace.rank_ok.append(True)
        if prev is not None and drift <= traj.dt * eta_ub:
            converged = True
            stop = k
            break
        prev = est
    return UpsilonBResult(value=trace.values[stop], trace=trace,
                          converged=converged, stop_index=stop)


def _response_channel(traj: Trajectory, use_surrogate: bool) -> np.ndarray:
    src = traj.dhat if use_surrogate else traj.d
    name = "dhat" if use_surrogate else "d"
    if src is None:
        raise ValueError(f"trajectory does not carry the {name} channel")
    if traj.varpi is None:
        raise ValueError("trajectory must carry the varpi channel")
    return src - traj.varpi


def build_upi_snapshots(traj: Trajectory, k: int, p: int, use_surrogate: bool = False):
    """Stacked Kronecker regression for the cross moment matrix (diagnostics form)."""
    if traj.omega is None:
        raise ValueError("trajectory must carry the omega channel")
    resp = _response_channel(traj, use_surrogate)
    lo, hi = _window_bounds(k, p, "cross-moment window")
    nu = traj.omega.shape[0]
    O = np.kron(traj.omega[:, lo:hi].T, np.eye(nu))
    P = resp[:, lo:hi].T.reshape(-1)
    return O, P


def build_upi_inverse_snapshots(traj: Trajectory, k: int, p: int, use_surrogate: bool = False):
    """Stacked Kronecker regression for the inverse cross moment matrix."""
    if traj.omega is None:
        raise ValueError("trajectory must carry the omega channel")
    resp = _response_channel(traj, use_surrogate)
    lo, hi = _window_bounds(k, p, "inverse cross-moment window")
    nu = traj.omega.shape[0]
    M = np.kron(resp[:, lo:hi].T, np.eye(nu))
    N = traj.omega[:, lo:hi].T.reshape(-1)
    return M, N


def _factored_ls(regressors: np.ndarray, responses: np.ndarray, rank_tol: float,
                 window: int) -> LsEstimate:
    """Solve min_X ||X @ regressors - responses||_F; both arguments are (nu, p).

    Equivalent to the stacked Kronecker least squares: the rows of the stacked
    regressor are regressors-columns Kronecker identity, so the unique
    minimizer coincides and rank(stacked) = nu * rank(regressors).
    """
    nu = regressors.shape[0]
    rank = numerical_rank(regressors.T, rank_tol)
    if rank < nu:
        return LsEstimate(value=None, rank=rank * nu, rank_ok=False,
                          residual=None, window=window)
    Xt, *_ = np.linalg.lstsq(regressors.T, responses.T, rcond=None)
    X = Xt.T
    residual = float(np.linalg.norm(X @ regressors - responses))
    return LsEstimate(value=X, rank=rank * nu, rank_ok=True,
                      residual=residual, window=window)


def estimate_upi(traj: Trajectory, k: int, p: int, use_surrogate: bool = False,
                 rank_tol: float = DEFAULT_RANK_TOL) -> LsEstimate:
    """Windowed estimate of the cross moment matrix (nu-by-nu).

    Regresses d - varpi (or its surrogate dhat - varpi) on omega over the p
    most recent samples ending at index k.  Flags rank deficiency of the
    stacked regressor so the caller can enlarge p.
    """
    resp = _response_channel(traj, use_surrogate)
    lo, hi = _window_bounds(k, p, "cross-moment window")
    return _factored_ls(traj.omega[:, lo:hi], resp[:, lo:hi], rank_tol, p)


def estimate_upi_inverse(traj: Trajectory, k: int, p: int, use_surrogate: bool = False,
                         rank_tol: float = DEFAULT_RANK_TOL) -> LsEstimate:
    """Windowed direct estimate of the inverse cross moment matrix (nu-by-nu).

    Regresses omega on d - varpi (or the surrogate channel), avoiding any
    explicit matrix inversion downstream.
    """
    resp = _response_channel(traj, use_surrogate)
    lo, hi = _window_bounds(k, p, "inverse cross-moment window")
    return _factored_ls(resp[:, lo:hi], traj.omega[:, lo:hi], rank_tol, p)


@dataclass(frozen=True)
class Algorithm1Result:
    """Outcome of the joint online estimation over a two-sided run."""

    cpi: Optional[np.ndarray]
    upi: Optional[np.ndarray]
    sigma: Optional[np.ndarray]
    cpi_trace: EstimateTrace
    upi_trace: EstimateTrace
    converged: bool
    stop_index: Optional[int]
    w_final: int
    p_final: int
    mode: str

    @property
    def t_stop(self) -> Optional[float]:
        if self.stop_index is None:
            return None
        return self.cpi_trace.times[-1]


def run_algorithm1(
    g: GeneratorPair,
    traj: Trajectory,
    upsilon_b: np.ndarray,
    tol: Tolerances = Tolerances(),
    mode: str = "upi",
    w_init: Optional[int] = None,
    p_init: Optional[int] = None,
    k_start: Optional[int] = None,
) -> Algorithm1Result:
    """Joint online estimation of the output and cross moment matrices.

    Walks the two-sided trajectory in time order; at each step it generates
    the surrogate channel sample, solves both windowed regressions, grows the
    failing window on rank deficiency (windows never shrink), and terminates
    at the first step whose consecutive estimate drifts both fall below
    (t_k - t_{k-1}) times their tolerances.  mode="upi" estimates the cross
    moment matrix itself; mode="upi_inverse" estimates its inverse directly
    and reports it in the sigma slot.

    If the stream ends before the stopping test triggers, the best (latest
    valid) estimates are returned with converged=False.
    """
    if mode not in ("upi", "upi_inverse"):
        raise ValueError(f"unknown mode {mode!r}")
    if traj.omega is None or traj.y is None or traj.varpi is None:
        raise ValueError("two-sided trajectory with omega, y, varpi channels required")
    nu = g.nu
    w = int(w_init) if w_init is not None else nu
    p = int(p_init) if p_init is not None else nu
    if w < nu or p < nu:
        raise ValueError("initial windows must be at least the generator order")

    dhat = simulate_d_dynamics(g, upsilon_b, traj.omega, traj.dt)
    stream = traj.with_channels(dhat=dhat)
    cross_estimator = estimate_upi if mode == "upi" else estimate_upi_inverse

    cpi_trace = EstimateTrace()
    upi_trace = EstimateTrace()
    prev_c = prev_u = None
    prev_k = None
    converged = False
    stop_index = None

    k = int(k_start) if k_start is not None else max(w, p) - 1
    if k < 0:
        raise ValueError("k_start must be non-negative")
    while k < traj.K:
        est_c = estimate_cpi(stream, k, min(w, k + 1), tol.rank_tol)
        if not est_c.rank_ok:
            w += 1
        cpi_trace.append(traj.t[k], est_c)

        est_u = cross_estimator(stream, k, min(p, k + 1), use_surrogate=True,
                                rank_tol=tol.rank_tol)
        if not est_u.rank_ok:
            p += 1
        upi_trace.append(traj.t[k], est_u)

        if est_c.rank_ok and est_u.rank_ok:
            if prev_k == k - 1:
                dt_k = float(traj.t[k] - traj.t[k - 1])
                drift_c = float(np.linalg.norm(est_c.value - prev_c))
                drift_u = float(np.linalg.norm(est_u.value - prev_u))
                if drift_c <= dt_k * tol.eta_cpi and drift_u <= dt_k * tol.eta_upi:
                    converged = True
                    stop_index = k
                    break
            prev_c, prev_u, prev_k = est_c.value, est_u.value, k
        else:
            prev_k = None
        k += 1

    cross_final = upi_trace.last_value()
    return Algorithm1Result(
        cpi=cpi_trace.last_value(),
        upi=cross_final if mode == "upi" else None,
        sigma=cross_final if mode == "upi_inverse" else None,
        cpi_trace=cpi_trace,
        upi_trace=upi_trace,
        converged=converged,
        stop_index=stop_index,
        w_final=w,
        p_final=p,
        mode=mode,
    )
