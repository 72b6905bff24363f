"""Second-order finite-difference operators as sparse matrices.

Fields are flattened row-major (index i*n_t + j). Operators along s and t are Kronecker
products of 1D stencils, so the physical derivatives

    d/dx = nu1 d/ds + tau1 d/dt,   d/dz = nu2 d/ds + tau2 d/dt,
    d2/dx2 = nu1^2 d2/ds2 + 2 nu1 tau1 d2/dsdt + tau1^2 d2/dt2

are plain sparse matrices whose transposes give the exact adjoints used by the optimizer.
"""

from functools import cached_property, lru_cache

import numpy as np
from scipy import sparse

from ..errors import GridError
from .grid import Grid2D, ScalarField, VectorField2

MIN_SAMPLES = 3


def first_derivative_1d(n: int, h: float, periodic: bool) -> sparse.csr_matrix:
    """Central differences; one-sided second-order rows on non-periodic ends."""
    if n < MIN_SAMPLES:
        raise GridError(f"Need at least {MIN_SAMPLES} samples to differentiate, got {n}")
    op = sparse.lil_matrix((n, n))
    for i in range(1, n - 1):
        op[i, i - 1] = -0.5
        op[i, i + 1] = 0.5
    if periodic:
        op[0, n - 1] = -0.5
        op[0, 1] = 0.5
        op[n - 1, n - 2] = -0.5
        op[n - 1, 0] = 0.5
    else:
        op[0, 0:3] = [-1.5, 2.0, -0.5]
        op[n - 1, n - 3:n] = [0.5, -2.0, 1.5]
    return (op / h).tocsr()


def second_derivative_1d(n: int, h: float, periodic: bool) -> sparse.csr_matrix:
    """Three-point Laplacian; four-point one-sided rows on non-periodic ends when n >= 4."""
    if n < MIN_SAMPLES:
        raise GridError(f"Need at least {MIN_SAMPLES} samples to differentiate, got {n}")
    op = sparse.lil_matrix((n, n))
    for i in range(1, n - 1):
        op[i, i - 1 : i + 2] = [1.0, -2.0, 1.0]
    if periodic:
        op[0, n - 1] = 1.0
        op[0, 0:2] = [-2.0, 1.0]
        op[n - 1, n - 2 : n] = [1.0, -2.0]
        op[n - 1, 0] = 1.0
    elif n >= 4:
        op[0, 0:4] = [2.0, -5.0, 4.0, -1.0]
        op[n - 1, n - 4 : n] = [-1.0, 4.0, -5.0, 2.0]
    else:
        op[0, 0:3] = [1.0, -2.0, 1.0]
        op[n - 1, 0:3] = [1.0, -2.0, 1.0]
    return (op / (h * h)).tocsr()


def _combine(*terms) -> sparse.csr_matrix:
    """Sum coefficient * operator pairs, skipping exact zero coefficients."""
    live = [(c, op) for c, op in terms if c != 0.0]
    result = live[0][0] * live[0][1]()
    for coefficient, op in live[1:]:
        result = result + coefficient * op()
    return result.tocsr()


class DifferenceOperators:
    """Lazily assembled 2D operators for one grid.

    Only operators for directions that are actually differentiated are built, so an
    axis-aligned grid with n_t < 3 can still be differentiated along x.
    """

    def __init__(self, grid: Grid2D):
        self.grid = grid

    @cached_property
    def _eye_s(self):
        return sparse.identity(self.grid.n_s, format="csr")

    @cached_property
    def _eye_t(self):
        return sparse.identity(self.grid.n_t, format="csr")

    @cached_property
    def d1_s(self):
        return first_derivative_1d(self.grid.n_s, self.grid.h_s, periodic=False)

    @cached_property
    def d1_t(self):
        return first_derivative_1d(self.grid.n_t, self.grid.h_t, self.grid.periodic_t)

    @cached_property
    def d2_s(self):
        return second_derivative_1d(self.grid.n_s, self.grid.h_s, periodic=False)

    @cached_property
    def d2_t(self):
        return second_derivative_1d(self.grid.n_t, self.grid.h_t, self.grid.periodic_t)

    @cached_property
    def ds(self):
        return sparse.kron(self.d1_s, self._eye_t, format="csr")

    @cached_property
    def dt(self):
        return sparse.kron(self._eye_s, self.d1_t, format="csr")

    @cached_property
    def dss(self):
        return sparse.kron(self.d2_s, self._eye_t, format="csr")

    @cached_property
    def dtt(self):
        return sparse.kron(self._eye_s, self.d2_t, format="csr")

    @cached_property
    def dst(self):
        return sparse.kron(self.d1_s, self.d1_t, format="csr")

    @cached_property
    def dx(self):
        (nu1, _), (tau1, _) = self.grid.nu, self.grid.tau
        return _combine((nu1, lambda: self.ds), (tau1, lambda: self.dt))

    @cached_property
    def dz(self):
        (_, nu2), (_, tau2) = self.grid.nu, self.grid.tau
        return _combine((nu2, lambda: self.ds), (tau2, lambda: self.dt))

    @cached_property
    def dxx(self):
        (nu1, _), (tau1, _) = self.grid.nu, self.grid.tau
        return _combine(
            (nu1 * nu1, lambda: self.dss),
            (2.0 * nu1 * tau1, lambda: self.dst),
            (tau1 * tau1, lambda: self.dtt),
        )

    def apply(self, op, values: np.ndarray) -> np.ndarray:
        return (op @ values.reshape(-1)).reshape(self.grid.shape)


@lru_cache(maxsize=64)
def operators(grid: Grid2D) -> DifferenceOperators:
    return DifferenceOperators(grid)


def deriv_t(f: ScalarField) -> ScalarField:
    ops = operators(f.grid)
    return ScalarField(f.grid, ops.apply(ops.dt, f.values) + f.tau_slope)


def deriv_x(f: ScalarField) -> ScalarField:
    ops = operators(f.grid)
    return ScalarField(f.grid, ops.apply(ops.dx, f.values) + f.grid.tau[0] * f.tau_slope)


def deriv_z(f: ScalarField) -> ScalarField:
    ops = operators(f.grid)
    return ScalarField(f.grid, ops.apply(ops.dz, f.values) + f.grid.tau[1] * f.tau_slope)


def deriv_xx(f: ScalarField) -> ScalarField:
    ops = operators(f.grid)
    return ScalarField(f.grid, ops.apply(ops.dxx, f.values))


def gradient(f: ScalarField) -> VectorField2:
    """(d/dx f, d/dz f) on the sample points."""
    return VectorField2(f.grid, deriv_x(f).values, deriv_z(f).values, label="grad")


def curl(m: VectorField2) -> ScalarField:
    """Discrete d/dx m2 - d/dz m1."""
    ops = operators(m.grid)
    return ScalarField(m.grid, ops.apply(ops.dx, m.second) - ops.apply(ops.dz, m.first))


def divergence(m: VectorField2) -> ScalarField:
    """Discrete d/dx m1 + d/dz m2."""
    ops = operators(m.grid)
    return ScalarField(m.grid, ops.apply(ops.dx, m.first) + ops.apply(ops.dz, m.second))


def interior_mask(grid: Grid2D, margin: int = 1) -> np.ndarray:
    """True away from non-periodic edges, where the central stencils apply."""
    mask = np.zeros(grid.shape, dtype=bool)
    t_slice = slice(None) if grid.periodic_t else slice(margin, grid.n_t - margin)
    mask[margin : grid.n_s - margin, t_slice] = True
    return mask
