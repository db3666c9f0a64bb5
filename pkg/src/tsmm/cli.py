"""Command-line front end: oracle, run, bode and convert subcommands."""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import matio
from .benchmark import building_model
from .config import resolve_config
from .harness import BODE_GRID, run_experiments, run_oracle
from .lti import StateSpaceModel, frequency_response

EXIT_INPUT_ERROR = 2
EXIT_NOT_CONVERGED = 3


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_INPUT_ERROR)


@click.group()
def main():
    """Data-driven model reduction by two-sided moment matching."""


_config_opt = click.option("--config", "config_path", type=click.Path(), default=None,
                           help="Key=value config file; flags override its entries.")


@main.command()
@_config_opt
@click.option("--model", type=click.Path(), default=None,
              help="Directory containing A.txt, B.txt, C.txt.")
@click.option("--set-s", default=None, help="Comma-separated exciting frequencies (rad/s).")
@click.option("--set-q", default=None, help="Comma-separated receiving frequencies (rad/s).")
@click.option("--out", type=click.Path(), default=None)
def oracle(config_path, model, set_s, set_q, out):
    """Solve the model-based moment matrices and write them as text files."""
    try:
        cfg = resolve_config(config_path, model=model, set_s=set_s, set_q=set_q, out=out)
        run_oracle(cfg)
    except (OSError, ValueError, ArithmeticError) as exc:
        _fail(str(exc))
    click.echo(f"oracle matrices written to {cfg.out}")


@main.command()
@_config_opt
@click.option("--model", type=click.Path(), default=None)
@click.option("--set-s", default=None)
@click.option("--set-q", default=None)
@click.option("--dt", type=float, default=None)
@click.option("--duration-swapped", type=float, default=None)
@click.option("--duration-twosided", type=float, default=None)
@click.option("--eta-cpi", type=float, default=None)
@click.option("--eta-upi", type=float, default=None)
@click.option("--eta-ub", type=float, default=None)
@click.option("--snr-v-db", type=float, default=None)
@click.option("--snr-z-db", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--inverse-mode", type=click.Choice(["via_upi", "via_upi_inverse"]),
              default=None)
@click.option("--out", type=click.Path(), default=None)
def run(config_path, model, set_s, set_q, dt, duration_swapped, duration_twosided,
        eta_cpi, eta_upi, eta_ub, snr_v_db, snr_z_db, seed, inverse_mode, out):
    """Run both experiments, estimate the moment matrices, assemble the reduced model."""
    try:
        cfg = resolve_config(
            config_path, model=model, set_s=set_s, set_q=set_q, dt=dt,
            duration_swapped=duration_swapped, duration_twosided=duration_twosided,
            eta_cpi=eta_cpi, eta_upi=eta_upi, eta_ub=eta_ub,
            snr_v_db=snr_v_db, snr_z_db=snr_z_db, seed=seed,
            inverse_mode=inverse_mode, out=out,
        )
        summary = run_experiments(cfg)
    except (OSError, ValueError, ArithmeticError) as exc:
        _fail(str(exc))
    click.echo(
        f"run complete: impulse stop at {summary.t_stop_ub:g} s "
        f"(converged={summary.ub_converged}), joint estimation "
        f"converged={summary.alg_converged}, rom_built={summary.rom_built}"
    )
    if summary.exit_status != 0:
        sys.exit(summary.exit_status)


@main.command()
@click.option("--model", "model_dir", type=click.Path(), default=None,
              help="Full-model directory (A.txt, B.txt, C.txt).")
@click.option("--rom", "rom_dir", type=click.Path(), default=None,
              help="Reduced-model directory (F.txt, G.txt, H.txt).")
@click.option("--fmin", type=float, default=BODE_GRID[0], show_default=True)
@click.option("--fmax", type=float, default=BODE_GRID[1], show_default=True)
@click.option("--points", type=int, default=BODE_GRID[2], show_default=True)
@click.option("--out", type=click.Path(), required=True)
def bode(model_dir, rom_dir, fmin, fmax, points, out):
    """Magnitude/phase table over a log-spaced frequency grid."""
    if model_dir is None and rom_dir is None:
        _fail("at least one of --model / --rom is required")
    if fmin <= 0 or fmax < fmin or points < 1:
        _fail("grid must satisfy 0 < fmin <= fmax and points >= 1")
    try:
        freqs = np.geomspace(fmin, fmax, points)
        pts = 1j * freqs
        full = rom = None
        if model_dir is not None:
            full = frequency_response(matio.read_state_space(model_dir), pts)
        if rom_dir is not None:
            F, G, H = matio.read_rom_matrices(rom_dir)
            rom = frequency_response(StateSpaceModel(A=F, B=G, C=H), pts)
        matio.bode_csv(out, freqs, full, rom)
    except (OSError, ValueError) as exc:
        _fail(str(exc))
    click.echo(f"bode table written to {out}")


@main.command()
@click.option("--input", "input_path", type=click.Path(), default=None,
              help="MATLAB .mat file holding A, B, C.")
@click.option("--builtin", type=click.Choice(["building"]), default=None,
              help="Materialize a bundled benchmark model instead of converting.")
@click.option("--out", type=click.Path(), required=True)
def convert(input_path, builtin, out):
    """Convert external state-space data into the dense text format."""
    if (input_path is None) == (builtin is None):
        _fail("exactly one of --input / --builtin is required")
    try:
        if builtin is not None:
            m = building_model()
        else:
            m = _load_mat_model(input_path)
        matio.write_state_space(out, m)
    except (OSError, ValueError, KeyError) as exc:
        _fail(str(exc))
    click.echo(f"state-space files written to {out}")


def _load_mat_model(path) -> StateSpaceModel:
    import scipy.io

    if not Path(path).is_file():
        raise FileNotFoundError(f"input file not found: {path}")
    data = scipy.io.loadmat(path)
    found = {}
    for key, val in data.items():
        if key.lower() in ("a", "b", "c") and not key.startswith("__"):
            found[key.lower()] = np.asarray(val, dtype=float)
    missing = [k.upper() for k in ("a", "b", "c") if k not in found]
    if missing:
        raise ValueError(f"{path}: missing variables {', '.join(missing)}")
    return StateSpaceModel(A=found["a"], B=found["b"], C=found["c"])


if __name__ == "__main__":
    main()
