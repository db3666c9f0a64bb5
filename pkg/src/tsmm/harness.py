"""The two-experiment workflow behind the command line: run, collect, write artifacts."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import matio
from .config import ExperimentConfig
from .estimators import run_algorithm1, run_upsilon_b_experiment
from .generators import InterpolationSet, build_generator_pair, check_assumptions
from .interconnect import NoiseSpec, simulate_swapped_impulse, simulate_two_sided
from .lti import StateSpaceModel, frequency_response, validate_model
from .oracle import exact_moment_matrices
from .reducer import (
    InvertibilityError,
    Provenance,
    build_rom_q_form,
    moment_match_report,
)

BODE_GRID = (1e-2, 1e3, 1000)


def _require_valid(m: StateSpaceModel, g, rank_tol: float):
    report = validate_model(m, rank_tol)
    if not report.stable:
        raise ValueError(
            f"plant rejected: not asymptotically stable "
            f"(max Re eig {report.max_real_eig:.3g})"
        )
    assumptions = check_assumptions(m, g, rank_tol=rank_tol)
    if not assumptions.ok:
        raise ValueError("assumption screen failed:\n" + assumptions.to_text())
    return assumptions


def _twosided_noise(config: ExperimentConfig) -> Optional[NoiseSpec]:
    """Disturbances enter the two-sided interconnection; the impulse run stays clean."""
    if config.snr_v_db is None and config.snr_z_db is None:
        return None
    return NoiseSpec(snr_v_db=config.snr_v_db, snr_z_db=config.snr_z_db,
                     seed=config.seed)


@dataclass(frozen=True)
class RunSummary:
    out: Path
    ub_converged: bool
    alg_converged: bool
    rom_built: bool
    t_stop_ub: float
    t_stop_alg: Optional[float]
    eps_ub: Optional[float]
    eps_cpi: Optional[float]
    eps_cross: Optional[float]

    @property
    def exit_status(self) -> int:
        return 0 if (self.ub_converged and self.alg_converged and self.rom_built) else 3


def run_oracle(config: ExperimentConfig) -> Path:
    """Solve the model-based ground truth and write the moment matrices."""
    m = matio.read_state_space(config.model)
    g = build_generator_pair(InterpolationSet(config.set_s), InterpolationSet(config.set_q))
    assumptions = _require_valid(m, g, config.rank_tol)
    mm = exact_moment_matrices(m, g)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    matio.write_matrix(out / "Pi.txt", mm.Pi)
    matio.write_matrix(out / "Upsilon.txt", mm.Upsilon)
    matio.write_matrix(out / "CPi.txt", mm.CPi)
    matio.write_matrix(out / "UB.txt", mm.UB)
    matio.write_matrix(out / "UPi.txt", mm.UPi)
    if mm.UPi_inv is not None:
        matio.write_matrix(out / "UPi_inv.txt", mm.UPi_inv)
    with open(out / "assumptions.txt", "w") as fh:
        fh.write(assumptions.to_text())
        fh.write(f"cross_moment_condition = {mm.cond_upi:.6g}\n")
        fh.write(f"cross_moment_invertible = {mm.upi_invertible}\n")
    return out


def _normalized_errors(trace, truth: np.ndarray):
    scale = float(np.linalg.norm(truth))
    out = []
    for v in trace.values:
        out.append(None if v is None else float(np.linalg.norm(v - truth)) / scale)
    return out


def run_experiments(config: ExperimentConfig) -> RunSummary:
    """Swapped experiment, two-sided experiment, joint estimation, ROM assembly.

    Writes trajectories, estimate traces, oracle-normalized error curves, the
    reduced model, the moment-match table and a Bode table into config.out.
    Non-convergence still produces all computable artifacts.
    """
    m = matio.read_state_space(config.model)
    g = build_generator_pair(InterpolationSet(config.set_s), InterpolationSet(config.set_q))
    assumptions = _require_valid(m, g, config.rank_tol)
    tol = config.tolerances()
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "assumptions.txt", "w") as fh:
        fh.write(assumptions.to_text())

    swapped = simulate_swapped_impulse(m, g, config.dt, config.duration_swapped)
    ub_res = run_upsilon_b_experiment(g, swapped, eta_ub=tol.eta_ub)
    matio.trajectory_to_csv(swapped, out / "swapped_trajectory.csv")
    matio.trace_to_csv(ub_res.trace, out / "ub_trace.csv", shape=(g.nu, 1))

    twosided = simulate_two_sided(m, g, config.dt, config.duration_twosided,
                                  noise=_twosided_noise(config))
    mode = "upi" if config.inverse_mode == "via_upi" else "upi_inverse"
    alg = run_algorithm1(g, twosided, ub_res.value, tol, mode=mode,
                         w_init=config.w_init, p_init=config.p_init)
    matio.trajectory_to_csv(twosided, out / "twosided_trajectory.csv")
    matio.trace_to_csv(alg.cpi_trace, out / "cpi_trace.csv", shape=(1, g.nu))
    cross_name = "upi_trace.csv" if mode == "upi" else "sigma_trace.csv"
    matio.trace_to_csv(alg.upi_trace, out / cross_name, shape=(g.nu, g.nu))

    mm = exact_moment_matrices(m, g)
    cross_truth = mm.UPi if mode == "upi" else mm.UPi_inv
    eps_cpi_curve = _normalized_errors(alg.cpi_trace, mm.CPi)
    if cross_truth is not None:
        eps_cross_curve = _normalized_errors(alg.upi_trace, cross_truth)
    else:
        eps_cross_curve = [None] * len(alg.upi_trace.values)
    matio.error_curves_csv(out / "error_curves.csv", alg.cpi_trace.times,
                           eps_cpi_curve, eps_cross_curve,
                           cross_label="eps_upi" if mode == "upi" else "eps_sigma")

    rom = None
    cross_final = alg.upi if mode == "upi" else alg.sigma
    if alg.cpi is not None and cross_final is not None:
        prov = Provenance(source="data", t_k=alg.cpi_trace.times[-1], t_i=ub_res.t_stop)
        try:
            if mode == "upi":
                rom = build_rom_q_form(g, alg.cpi, ub_res.value, upi=cross_final,
                                       provenance=prov)
            else:
                rom = build_rom_q_form(g, alg.cpi, ub_res.value, upi_inv=cross_final,
                                       provenance=prov)
        except InvertibilityError:
            rom = None

    eps_ub = float(np.linalg.norm(ub_res.value - mm.UB))
    eps_cpi = eps_cpi_curve[-1] if eps_cpi_curve else None
    eps_cross = eps_cross_curve[-1] if eps_cross_curve else None

    if rom is not None:
        matio.write_rom(out, rom, extra={
            "set_s": ",".join(repr(f) for f in config.set_s),
            "set_q": ",".join(repr(f) for f in config.set_q),
            "dt": repr(config.dt),
            "seed": config.seed,
            "snr_v_db": "" if config.snr_v_db is None else repr(config.snr_v_db),
            "snr_z_db": "" if config.snr_z_db is None else repr(config.snr_z_db),
            "inverse_mode": config.inverse_mode,
            "omega0": "ones",
        })
        report = moment_match_report(m, rom, g)
        matio.moment_match_csv(report, out / "moment_match.csv")
        freqs = np.geomspace(*BODE_GRID)
        pts = 1j * freqs
        matio.bode_csv(out / "bode.csv", freqs,
                       frequency_response(m, pts),
                       frequency_response(rom.to_state_space(), pts))

    summary = RunSummary(
        out=out,
        ub_converged=ub_res.converged,
        alg_converged=alg.converged,
        rom_built=rom is not None,
        t_stop_ub=ub_res.t_stop,
        t_stop_alg=alg.t_stop,
        eps_ub=eps_ub,
        eps_cpi=eps_cpi,
        eps_cross=eps_cross,
    )
    matio.write_keyvalues(out / "status.txt", {
        "exit_status": summary.exit_status,
        "ub_converged": summary.ub_converged,
        "alg_converged": summary.alg_converged,
        "rom_built": summary.rom_built,
        "t_stop_ub": f"{summary.t_stop_ub:.17g}",
        "t_stop_alg": "" if summary.t_stop_alg is None else f"{summary.t_stop_alg:.17g}",
        "eps_ub": "" if eps_ub is None else f"{eps_ub:.17g}",
        "eps_cpi": "" if eps_cpi is None else f"{eps_cpi:.17g}",
        "eps_cross": "" if eps_cross is None else f"{eps_cross:.17g}",
        "w_final": alg.w_final,
        "p_final": alg.p_final,
    })
    return summary
