"""Fourier-in-t preconditioner for the cell problem.

Every difference operator is a sum of kron(A_s, B_t) with B_t circulant, and the weights
are uniform along t. For a field whose slope dx u and strain C do not depend on t, the
Hessian of E_h,

    H = J^T W J / eps - Dx^T diag(w C / eps) Dx + eps Dxx^T W Dxx,    J = Dz - diag(dx u) Dx,

therefore splits into one Hermitian banded block over the free s rows per Fourier mode of
t. Row means along t stand in for dx u and C of a general iterate. Modes whose block is not
positive definite (C > 0 makes the middle term negative) use |C| instead.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg, sparse

from ..core.quadrature import weights_1d
from ..core.stencils import operators
from ..errors import SmecticError
from .cell_problem import PINNED_ROWS, CellProblem

logger = logging.getLogger(__name__)

DIAGONAL_SHIFT = 1e-12


class ModalPreconditioner:
    """Banded Cholesky factors of the t-averaged Hessian, one per rfft mode along t."""

    def __init__(self, cp: CellProblem, eps: Optional[float] = None):
        grid = cp.grid
        self.shape = grid.shape
        self.eps = cp.eps if eps is None else float(eps)
        self.free_rows = slice(PINNED_ROWS, grid.n_s - PINNED_ROWS)
        ops = operators(grid)
        columns = np.arange(grid.n_s)[self.free_rows]
        self._ds = ops.d1_s.tocsc()[:, columns].astype(complex)
        self._dss = ops.d2_s.tocsc()[:, columns].astype(complex)
        self._select = sparse.identity(grid.n_s, format="csc")[:, columns].astype(complex)
        self._row_weights = weights_1d(grid.n_s, grid.h_s, periodic=False) * grid.h_t
        # symbols of the periodic t stencils in numpy's transform convention
        self._symbol_1 = np.fft.rfft(ops.d1_t[:, [0]].toarray().ravel())
        self._symbol_2 = np.fft.rfft(ops.d2_t[:, [0]].toarray().ravel())
        self._nu, self._tau = grid.nu, grid.tau
        self.factors: List[Tuple[np.ndarray, bool]] = []
        self.modified_modes = 0
        self.updates = 0

    @property
    def n_modes(self) -> int:
        return len(self._symbol_1)

    def _mode_operators(self, a: complex, b: complex):
        (nu1, nu2), (tau1, tau2) = self._nu, self._tau
        dx = nu1 * self._ds + (tau1 * a) * self._select
        dz = nu2 * self._ds + (tau2 * a) * self._select
        dxx = (nu1 * nu1) * self._dss + (2.0 * nu1 * tau1 * a) * self._ds + (tau1 * tau1 * b) * self._select
        return dx, dz, dxx

    def _mode_block(self, k: int, slope: np.ndarray, strain: np.ndarray, modified: bool) -> sparse.csc_matrix:
        dx, dz, dxx = self._mode_operators(self._symbol_1[k], self._symbol_2[k])
        w = self._row_weights
        j = dz - sparse.diags(slope) @ dx
        stretch = np.abs(strain) if modified else -strain
        block = (
            j.conj().T @ sparse.diags(w / self.eps) @ j
            + dx.conj().T @ sparse.diags(w * stretch / self.eps) @ dx
            + self.eps * (dxx.conj().T @ sparse.diags(w) @ dxx)
        )
        return block.tocsc()

    @staticmethod
    def _upper_band(block: sparse.csc_matrix) -> np.ndarray:
        coo = block.tocoo()
        width = int(max(0, np.max(coo.col - coo.row)))
        n = block.shape[0]
        band = np.zeros((width + 1, n), dtype=complex)
        for offset in range(width + 1):
            band[width - offset, offset:] = block.diagonal(offset)
        band[width] = band[width].real * (1.0 + DIAGONAL_SHIFT)
        return band

    def update(self, slope: np.ndarray, strain: np.ndarray) -> "ModalPreconditioner":
        """Refactor from (n_s, n_t) slope and strain samples of the current iterate."""
        slope_rows = np.asarray(slope).reshape(self.shape).mean(axis=1)
        strain_rows = np.asarray(strain).reshape(self.shape).mean(axis=1)
        factors = []
        modified = 0
        for k in range(self.n_modes):
            try:
                band = self._upper_band(self._mode_block(k, slope_rows, strain_rows, modified=False))
                factor = linalg.cholesky_banded(band, lower=False)
            except linalg.LinAlgError:
                modified += 1
                band = self._upper_band(self._mode_block(k, slope_rows, strain_rows, modified=True))
                factor = linalg.cholesky_banded(band, lower=False)
            factors.append((factor, False))
        self.factors = factors
        self.modified_modes = modified
        self.updates += 1
        logger.debug("Preconditioner refactored: %d modes, %d with |C|", self.n_modes, modified)
        return self

    def apply(self, grad: np.ndarray) -> np.ndarray:
        """H^-1 grad on the free rows, zero on the pinned ones."""
        if not self.factors:
            raise SmecticError("ModalPreconditioner.update() must run before apply()")
        values = grad.reshape(self.shape)[self.free_rows]
        modes = np.fft.rfft(values, axis=1)
        for k, factor in enumerate(self.factors):
            modes[:, k] = linalg.cho_solve_banded(factor, modes[:, k])
        out = np.zeros(self.shape)
        out[self.free_rows] = np.fft.irfft(modes, n=self.shape[1], axis=1)
        return out.reshape(-1)
