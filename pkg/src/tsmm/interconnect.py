"""Exact-propagation simulation of the generator/plant interconnections.

All interconnections are autonomous LTI systems once the generators are
attached, so sampled trajectories are computed exactly with one matrix
exponential per run; no ODE integrator error enters the data.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .generators import GeneratorPair
from .lti import StateSpaceModel, exact_discretize, matrix_exponential


@dataclass(frozen=True)
class NoiseSpec:
    """White disturbance levels injected at the plant input and generator input.

    SNRs are in dB relative to the sample power of the noiseless signal each
    disturbance adds onto (the generator output for snr_v_db, the plant output
    for snr_z_db).  A missing SNR disables that channel.
    """

    snr_v_db: Optional[float] = None
    snr_z_db: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        for v in (self.snr_v_db, self.snr_z_db):
            if v is not None and not np.isfinite(v):
                raise ValueError("SNR values must be finite when present")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled signals from one interconnection run.

    Channels not produced by a given interconnection are None.  State-like
    channels are (dim, K) arrays sharing the sample count K of t.
    """

    dt: float
    t: np.ndarray
    omega: Optional[np.ndarray] = None
    x: Optional[np.ndarray] = None
    varpi: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None
    d: Optional[np.ndarray] = None
    dhat: Optional[np.ndarray] = None
    noise: Optional[NoiseSpec] = None
    sigma_v: Optional[float] = None
    sigma_z: Optional[float] = None

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        K = self.t.shape[0]
        for name in ("omega", "x", "varpi", "d", "dhat"):
            ch = getattr(self, name)
            if ch is not None and (ch.ndim != 2 or ch.shape[1] != K):
                raise ValueError(f"channel {name} must be (dim, {K})")
        if self.y is not None and self.y.shape != (K,):
            raise ValueError(f"channel y must have {K} samples")

    @property
    def K(self) -> int:
        return self.t.shape[0]

    def with_channels(self, **channels) -> "Trajectory":
        return replace(self, **channels)

    def index_of(self, time: float) -> int:
        """Index of a sample time on the grid; rejects off-grid times."""
        k = int(round(time / self.dt))
        if k < 0 or k >= self.K or abs(self.t[k] - time) > 1e-9 * max(1.0, abs(time)):
            raise ValueError(f"{time} is not a sample time of the trajectory")
        return k


def _grid(dt: float, duration: float) -> np.ndarray:
    if dt <= 0 or duration <= 0:
        raise ValueError("dt and duration must be positive")
    K = int(round(duration / dt)) + 1
    return np.arange(K) * dt


def _propagate(Phi: np.ndarray, x0: np.ndarray, K: int,
               Gamma: Optional[np.ndarray] = None,
               inputs: Optional[np.ndarray] = None) -> np.ndarray:
    X = np.empty((x0.size, K))
    X[:, 0] = x0
    for k in range(K - 1):
        X[:, k + 1] = Phi @ X[:, k]
        if Gamma is not None:
            X[:, k + 1] += Gamma @ inputs[:, k]
    return X


def _step_with_inputs(M: np.ndarray, Bn: np.ndarray, dt: float):
    """Propagator and zero-order-hold input map over one step (Van Loan block trick)."""
    dim, nin = M.shape[0], Bn.shape[1]
    aug = np.zeros((dim + nin, dim + nin))
    aug[:dim, :dim] = M
    aug[:dim, dim:] = Bn
    E = matrix_exponential(aug, dt)
    return E[:dim, :dim], E[:dim, dim:]


def simulate_direct(
    m: StateSpaceModel,
    g: GeneratorPair,
    dt: float,
    duration: float,
    omega0: Optional[np.ndarray] = None,
) -> Trajectory:
    """Exciting generator driving the plant: omega' = S omega, x' = A x + B L omega.

    Starts from x(0) = 0 and omega(0) = omega0 (the generator's default when
    omitted).  Records omega, x and y = C x.
    """
    t = _grid(dt, duration)
    n, nu = m.n, g.nu
    w0 = g.omega0 if omega0 is None else np.asarray(omega0, dtype=float).reshape(nu, 1)
    M = np.zeros((nu + n, nu + n))
    M[:nu, :nu] = g.S
    M[nu:, :nu] = m.B @ g.L
    M[nu:, nu:] = m.A
    Phi = exact_discretize(M, dt)
    X = _propagate(Phi, np.concatenate([w0.ravel(), np.zeros(n)]), t.shape[0])
    omega, x = X[:nu], X[nu:]
    return Trajectory(dt=dt, t=t, omega=omega, x=x, y=(m.C @ x).ravel())


def simulate_swapped_impulse(
    m: StateSpaceModel,
    g: GeneratorPair,
    dt: float,
    duration: float,
    noise: Optional[NoiseSpec] = None,
    upsilon: Optional[np.ndarray] = None,
) -> Trajectory:
    """Plant under a unit impulse feeding the receiving generator.

    The impulse is realized exactly as the state jump x(0+) = B with zero
    input afterwards; varpi starts at zero.  With noise, the plant output is
    disturbed before entering the generator: varpi' = Q varpi + R (C x + z).
    When the exact Upsilon is supplied (testing only) the synthetic channel
    d = varpi + Upsilon x is attached.
    """
    t = _grid(dt, duration)
    K = t.shape[0]
    n, nu = m.n, g.nu
    M = np.zeros((n + nu, n + nu))
    M[:n, :n] = m.A
    M[n:, :n] = g.R @ m.C
    M[n:, n:] = g.Q
    x0 = np.concatenate([m.B.ravel(), np.zeros(nu)])

    sigma_z = None
    if noise is not None and noise.snr_z_db is not None:
        Phi = exact_discretize(M, dt)
        ref = _propagate(Phi, x0, K)
        sigma_z = _sigma_from_snr((m.C @ ref[:n]).ravel(), noise.snr_z_db)
        Bn = np.zeros((n + nu, 1))
        Bn[n:, :] = g.R
        Phi, Gamma = _step_with_inputs(M, Bn, dt)
        z = np.random.default_rng(noise.seed).standard_normal(K - 1) * sigma_z
        X = _propagate(Phi, x0, K, Gamma, z[None, :])
    else:
        Phi = exact_discretize(M, dt)
        X = _propagate(Phi, x0, K)

    x, varpi = X[:n], X[n:]
    d = varpi + upsilon @ x if upsilon is not None else None
    return Trajectory(
        dt=dt, t=t, x=x, varpi=varpi, y=(m.C @ x).ravel(), d=d,
        noise=noise, sigma_z=sigma_z,
    )


def _sigma_from_snr(signal: np.ndarray, snr_db: float) -> float:
    power = float(np.mean(signal**2))
    return float(np.sqrt(power * 10.0 ** (-snr_db / 10.0)))


def simulate_two_sided(
    m: StateSpaceModel,
    g: GeneratorPair,
    dt: float,
    duration: float,
    omega0: Optional[np.ndarray] = None,
    noise: Optional[NoiseSpec] = None,
    upsilon: Optional[np.ndarray] = None,
) -> Trajectory:
    """Both generators attached at once: omega drives the plant, the plant drives varpi.

    Noise-free runs are propagated exactly.  With noise, zero-order-hold
    Gaussian samples v_k and z_k enter at the plant input (B v) and at the
    receiving generator input (R z); their standard deviations are calibrated
    against sample powers of L omega and C x measured on the noiseless run,
    and the draw is deterministic in NoiseSpec.seed (v drawn first, then z).
    """
    t = _grid(dt, duration)
    K = t.shape[0]
    n, nu = m.n, g.nu
    w0 = g.omega0 if omega0 is None else np.asarray(omega0, dtype=float).reshape(nu, 1)
    dim = nu + n + nu
    M = np.zeros((dim, dim))
    M[:nu, :nu] = g.S
    M[nu:nu + n, :nu] = m.B @ g.L
    M[nu:nu + n, nu:nu + n] = m.A
    M[nu + n:, nu:nu + n] = g.R @ m.C
    M[nu + n:, nu + n:] = g.Q
    x0 = np.concatenate([w0.ravel(), np.zeros(n + nu)])

    sigma_v = sigma_z = None
    if noise is not None and (noise.snr_v_db is not None or noise.snr_z_db is not None):
        Phi = exact_discretize(M, dt)
        ref = _propagate(Phi, x0, K)
        rng = np.random.default_rng(noise.seed)
        cols = []
        Bn_cols = []
        if noise.snr_v_db is not None:
            sigma_v = _sigma_from_snr((g.L @ ref[:nu]).ravel(), noise.snr_v_db)
            cols.append(rng.standard_normal(K - 1) * sigma_v)
            col = np.zeros((dim, 1))
            col[nu:nu + n, :] = m.B
            Bn_cols.append(col)
        if noise.snr_z_db is not None:
            sigma_z = _sigma_from_snr((m.C @ ref[nu:nu + n]).ravel(), noise.snr_z_db)
            cols.append(rng.standard_normal(K - 1) * sigma_z)
            col = np.zeros((dim, 1))
            col[nu + n:, :] = g.R
            Bn_cols.append(col)
        Phi, Gamma = _step_with_inputs(M, np.hstack(Bn_cols), dt)
        X = _propagate(Phi, x0, K, Gamma, np.vstack(cols))
    else:
        Phi = exact_discretize(M, dt)
        X = _propagate(Phi, x0, K)

    omega, x, varpi = X[:nu], X[nu:nu + n], X[nu + n:]
    d = varpi + upsilon @ x if upsilon is not None else None
    return Trajectory(
        dt=dt, t=t, omega=omega, x=x, varpi=varpi, y=(m.C @ x).ravel(), d=d,
        noise=noise, sigma_v=sigma_v, sigma_z=sigma_z,
    )


def simulate_d_dynamics(
    g: GeneratorPair,
    upsilon_b: np.ndarray,
    omega: np.ndarray,
    dt: float,
) -> np.ndarray:
    """Propagate d' = Q d + (Upsilon B) L omega exactly along a sampled omega.

    With the exact Upsilon B this reproduces the synthetic channel of the
    two-sided interconnection; with an estimate it is the computable
    surrogate of that channel.  Starts from d(0) = 0.
    """
    nu = g.nu
    ub = np.asarray(upsilon_b, dtype=float).reshape(nu, 1)
    if omega.shape[0] != nu:
        raise ValueError(f"omega must have {nu} rows")
    K = omega.shape[1]
    M = np.zeros((2 * nu, 2 * nu))
    M[:nu, :nu] = g.Q
    M[:nu, nu:] = ub @ g.L
    M[nu:, nu:] = g.S
    Phi = exact_discretize(M, dt)
    Pdd, Pdw = Phi[:nu, :nu], Phi[:nu, nu:]
    d = np.zeros((nu, K))
    for k in range(K - 1):
        d[:, k + 1] = Pdd @ d[:, k] + Pdw @ omega[:, k]
    return d
