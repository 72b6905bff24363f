"""Plain-text field snapshots.

Format: one header line ``# n_s n_t h_s h_t nu1 nu2 periodic_t [tau_slope s0 t0]`` followed
by the n_s*n_t samples of u (linear tau part included) in row-major order. The trailing
header tokens are optional when reading.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np

from ..errors import GridError
from .grid import Grid2D, ScalarField, unit_frame

logger = logging.getLogger(__name__)


def save_field(field: ScalarField, path: Union[str, Path]) -> Path:
    grid = field.grid
    path = Path(path)
    header = (
        f"{grid.n_s} {grid.n_t} {grid.h_s!r} {grid.h_t!r} {grid.nu[0]!r} {grid.nu[1]!r} "
        f"{int(grid.periodic_t)} {field.tau_slope!r} {grid.s0!r} {grid.t0!r}"
    )
    np.savetxt(path, field.full().reshape(-1), fmt="%.17g", header=header, comments="# ")
    logger.info("Wrote field snapshot %s (%dx%d)", path, grid.n_s, grid.n_t)
    return path


def load_field(path: Union[str, Path]) -> ScalarField:
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        header = handle.readline()
    if not header.startswith("#"):
        raise GridError(f"{path}: missing '# n_s n_t h_s h_t nu1 nu2 periodic_t' header")
    tokens = header.lstrip("#").split()
    if len(tokens) < 7:
        raise GridError(f"{path}: header has {len(tokens)} tokens, expected at least 7")
    n_s, n_t = int(tokens[0]), int(tokens[1])
    h_s, h_t = float(tokens[2]), float(tokens[3])
    nu, tau = unit_frame((float(tokens[4]), float(tokens[5])))
    periodic_t = bool(int(tokens[6]))
    tau_slope = float(tokens[7]) if len(tokens) > 7 else 0.0
    s0 = float(tokens[8]) if len(tokens) > 8 else 0.0
    t0 = float(tokens[9]) if len(tokens) > 9 else 0.0

    grid = Grid2D(n_s, n_t, h_s, h_t, nu, tau, periodic_t, s0, t0)
    samples = np.loadtxt(path, comments="#", ndmin=1)
    if samples.size != n_s * n_t:
        raise GridError(f"{path}: expected {n_s * n_t} samples, found {samples.size}")
    values = samples.reshape(grid.shape)
    if tau_slope != 0.0:
        _, t = grid.st_mesh()
        values = values - tau_slope * t
    return ScalarField(grid, values, tau_slope)
