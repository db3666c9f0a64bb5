"""Plain-text serialization: dense matrices, trajectories, traces, Bode tables."""

from __future__ import annotations

import os
from typing import Dict, Optional, Sequence

import numpy as np

from .estimators import EstimateTrace
from .interconnect import Trajectory
from .lti import StateSpaceModel
from .reducer import MomentMatchReport, ReducedOrderModel


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_matrix(path, M: np.ndarray) -> None:
    """Dense text format: 'rows cols' header, then one whitespace-separated row per line."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]}\n")
        for row in M:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: first line must be 'rows cols'")
        rows, cols = int(header[0]), int(header[1])
        data = []
        for i in range(rows):
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: expected {rows} rows, found {i}")
            vals = [float(v) for v in line.split()]
            if len(vals) != cols:
                raise ValueError(f"{path}: row {i} has {len(vals)} values, expected {cols}")
            data.append(vals)
    return np.asarray(data, dtype=float).reshape(rows, cols)


def write_state_space(directory, m: StateSpaceModel) -> None:
    os.makedirs(directory, exist_ok=True)
    write_matrix(os.path.join(directory, "A.txt"), m.A)
    write_matrix(os.path.join(directory, "B.txt"), m.B)
    write_matrix(os.path.join(directory, "C.txt"), m.C)


def read_state_space(directory) -> StateSpaceModel:
    paths = {name: os.path.join(directory, f"{name}.txt") for name in ("A", "B", "C")}
    for name, p in paths.items():
        if not os.path.isfile(p):
            raise FileNotFoundError(f"missing matrix file {p}")
    return StateSpaceModel(
        A=read_matrix(paths["A"]),
        B=read_matrix(paths["B"]),
        C=read_matrix(paths["C"]),
    )


def write_keyvalues(path, values: Dict[str, object]) -> None:
    with open(path, "w") as fh:
        for key, val in values.items():
            fh.write(f"{key} = {val}\n")


def read_keyvalues(path) -> Dict[str, str]:
    out: Dict[str, str] = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}: malformed line {line!r}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def write_rom(directory, rom: ReducedOrderModel, extra: Optional[Dict[str, object]] = None) -> None:
    """Three matrix files plus a plain-text provenance sidecar."""
    os.makedirs(directory, exist_ok=True)
    write_matrix(os.path.join(directory, "F.txt"), rom.F)
    write_matrix(os.path.join(directory, "G.txt"), rom.G)
    write_matrix(os.path.join(directory, "H.txt"), rom.Hrow)
    meta: Dict[str, object] = {
        "form": rom.form,
        "order": rom.nu,
        "source": rom.provenance.source,
        "t_k": "" if rom.provenance.t_k is None else _fmt(rom.provenance.t_k),
        "t_i": "" if rom.provenance.t_i is None else _fmt(rom.provenance.t_i),
    }
    if extra:
        meta.update(extra)
    write_keyvalues(os.path.join(directory, "provenance.txt"), meta)


def read_rom_matrices(directory):
    return (
        read_matrix(os.path.join(directory, "F.txt")),
        read_matrix(os.path.join(directory, "G.txt")),
        read_matrix(os.path.join(directory, "H.txt")),
    )


def trajectory_to_csv(traj: Trajectory, path) -> None:
    """One row per sample; only channels present in the trajectory are emitted."""
    cols = [("t", traj.t)]
    for name, label in (("omega", "omega"), ("x", "x"), ("varpi", "varpi")):
        ch = getattr(traj, name)
        if ch is not None:
            cols.extend((f"{label}_{i + 1}", ch[i]) for i in range(ch.shape[0]))
    if traj.y is not None:
        cols.append(("y", traj.y))
    for name in ("d", "dhat"):
        ch = getattr(traj, name)
        if ch is not None:
            cols.extend((f"{name}_{i + 1}", ch[i]) for i in range(ch.shape[0]))
    with open(path, "w") as fh:
        fh.write(",".join(label for label, _ in cols) + "\n")
        for k in range(traj.K):
            fh.write(",".join(_fmt(series[k]) for _, series in cols) + "\n")


def trace_to_csv(trace: EstimateTrace, path, shape) -> None:
    """Estimate history: t_k, row-major entries (blank when rank failed), residual, rank_ok."""
    rows, cols = shape
    labels = [f"entry_{r + 1}{c + 1}" for r in range(rows) for c in range(cols)]
    with open(path, "w") as fh:
        fh.write("t_k," + ",".join(labels) + ",residual,rank_ok\n")
        for t, val, res, ok in zip(trace.times, trace.values, trace.residual_norms,
                                   trace.rank_ok):
            if val is not None:
                body = ",".join(_fmt(v) for v in np.asarray(val).reshape(-1))
            else:
                body = "," * (len(labels) - 1)
            res_s = "" if np.isnan(res) else _fmt(res)
            fh.write(f"{_fmt(t)},{body},{res_s},{1 if ok else 0}\n")


def bode_csv(path, freqs: np.ndarray,
             full: Optional[np.ndarray], rom: Optional[np.ndarray]) -> None:
    """Magnitude/phase table; missing models and exact zeros are emitted as blanks."""

    def cells(values: Optional[np.ndarray], k: int):
        if values is None:
            return "", ""
        w = values[k]
        if w == 0:
            return "", _fmt(0.0)
        return _fmt(20.0 * np.log10(abs(w))), _fmt(np.degrees(np.angle(w)))

    with open(path, "w") as fh:
        fh.write("freq_rad_s,mag_full_db,phase_full_deg,mag_rom_db,phase_rom_deg\n")
        for k, f in enumerate(freqs):
            mf, pf = cells(full, k)
            mr, pr = cells(rom, k)
            fh.write(f"{_fmt(f)},{mf},{pf},{mr},{pr}\n")


def moment_match_csv(report: MomentMatchReport, path) -> None:
    with open(path, "w") as fh:
        fh.write("s_re,s_im,w_full_re,w_full_im,w_rom_re,w_rom_im,abs_err,rel_err,rom_pole\n")
        for p in report.points:
            wr_re = "" if p.w_rom is None else _fmt(p.w_rom.real)
            wr_im = "" if p.w_rom is None else _fmt(p.w_rom.imag)
            fh.write(
                f"{_fmt(p.s.real)},{_fmt(p.s.imag)},"
                f"{_fmt(p.w_full.real)},{_fmt(p.w_full.imag)},"
                f"{wr_re},{wr_im},"
                f"{'' if np.isinf(p.abs_err) else _fmt(p.abs_err)},"
                f"{'' if np.isinf(p.rel_err) else _fmt(p.rel_err)},"
                f"{1 if p.rom_pole else 0}\n"
            )


def error_curves_csv(path, times: Sequence[float],
                     eps_cpi: Sequence[Optional[float]],
                     eps_cross: Sequence[Optional[float]],
                     cross_label: str = "eps_upi") -> None:
    with open(path, "w") as fh:
        fh.write(f"t_k,eps_cpi,{cross_label}\n")
        for t, ec, eu in zip(times, eps_cpi, eps_cross):
            ec_s = "" if ec is None else _fmt(ec)
            eu_s = "" if eu is None else _fmt(eu)
            fh.write(f"{_fmt(t)},{ec_s},{eu_s}\n")
