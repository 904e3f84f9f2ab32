"""Independent brute-force solvers used to cross-check the main path.

These are deliberately dumb and kept apart from the production solver:
a dense 1D plane-wave solver for a single cosine well, the tensor-product
spectrum of the beta = 0 four-junction circuit (which separates into three
1D problems), and a real-space finite-difference solver for the
three-junction circuit on a periodic 2D grid including the mixed
derivative of the kinetic form.  Tests compare the plane-wave solver
against these; none of this is needed at runtime.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import eigsh

from .circuit import TWO_PI, CircuitParams, Variant, mass_matrix


@dataclass(frozen=True)
class Oracle1DResult:
    eigenvalues: np.ndarray  # ascending, E_C units
    mass_scale: float
    coupling: float


def solve_1d(coupling: float, mass_scale: float, m: int, k_bound: int = 32) -> Oracle1DResult:
    """Lowest m levels of H = 4 k^2/mass_scale + coupling*(1 - cos phi).

    Dense solve over plane waves k in [-k_bound, k_bound]; energies in E_C
    units with the potential shifted to a zero minimum.
    """
    if coupling < 0.0:
        raise ValueError("coupling must be nonnegative")
    if mass_scale <= 0.0:
        raise ValueError("mass_scale must be positive")
    k = np.arange(-k_bound, k_bound + 1)
    n = k.size
    H = np.diag(4.0 * k.astype(float) ** 2 / mass_scale + coupling)
    off = np.full(n - 1, -coupling / 2.0)
    H += np.diag(off, 1) + np.diag(off, -1)
    w = np.linalg.eigvalsh(H)
    return Oracle1DResult(eigenvalues=w[:m], mass_scale=mass_scale, coupling=coupling)


def separable_beta0(params: CircuitParams, m: int) -> np.ndarray:
    """Lowest m levels of the beta = 0 four-junction circuit by separation.

    With the fourth junction removed the potential splits into three
    independent cosine wells (the third carrying coupling and mass alpha);
    the spectrum is all sums of the 1D levels, sorted ascending.
    """
    if params.variant is not Variant.FOUR_JUNCTION or params.beta != 0.0:
        raise ValueError("separable oracle applies to four-junction params with beta = 0")
    ej = params.ej_over_ec
    per_axis = m + 4
    e12 = solve_1d(ej, 1.0, per_axis).eigenvalues
    e3 = solve_1d(params.alpha * ej, params.alpha, per_axis).eigenvalues
    sums = sorted(a + b + c for a, b, c in itertools.product(e12, e12, e3))
    return np.array(sums[:m])


def fd_matrix_3j(params: CircuitParams, n_grid: int) -> sparse.csr_matrix:
    """Discretized three-junction Hamiltonian on a periodic n_grid^2 mesh.

    Second-order central differences for 4 E_C grad^T A^{-1} grad over
    [0, 2pi)^2; the off-diagonal inverse-mass entry uses the symmetric
    four-corner cross stencil so the discrete operator stays symmetric.
    """
    if params.variant is not Variant.THREE_JUNCTION:
        raise ValueError("finite-difference oracle is for the three-junction circuit")
    if n_grid < 64:
        raise ValueError("n_grid must be at least 64")
    if n_grid > 256:
        raise MemoryError("n_grid above 256 exceeds the oracle memory guard")

    n = n_grid
    h = TWO_PI / n
    a_inv = np.linalg.inv(mass_matrix(params))

    e = np.ones(n)
    d2 = sparse.diags([e, -2.0 * e, e], [-1, 0, 1], (n, n)).tolil()
    d2[0, -1] = 1.0
    d2[-1, 0] = 1.0
    d2 = (d2 / h**2).tocsr()
    d1 = sparse.diags([-e, e], [-1, 1], (n, n)).tolil()
    d1[0, -1] = -1.0
    d1[-1, 0] = 1.0
    d1 = (d1 / (2.0 * h)).tocsr()
    eye = sparse.identity(n, format="csr")

    lap = (
        a_inv[0, 0] * sparse.kron(d2, eye)
        + a_inv[1, 1] * sparse.kron(eye, d2)
        + 2.0 * a_inv[0, 1] * sparse.kron(d1, d1)
    )
    x = np.arange(n) * h
    p1, p2 = np.meshgrid(x, x, indexing="ij")
    u = params.ej_over_ec * (
        2.0 + params.alpha
        - np.cos(p1) - np.cos(p2)
        - params.alpha * np.cos(p1 - p2 + TWO_PI * params.f_e)
    )
    return (-4.0 * lap + sparse.diags(u.ravel())).tocsr()


def fd_oracle_3j(params: CircuitParams, n_grid: int, m: int) -> np.ndarray:
    """Lowest m levels of the three-junction circuit on a periodic FD grid.

    Eigenvalue error is O(h^2) in the grid spacing.
    """
    H = fd_matrix_3j(params, n_grid)
    rng = np.random.default_rng(417)
    n = n_grid
    w = eigsh(H, k=m, which="SA", v0=rng.standard_normal(n * n), tol=0, return_eigenvectors=False)
    return np.sort(w)


def richardson_3j(params: CircuitParams, m: int, grids=(101, 201)) -> tuple[np.ndarray, np.ndarray]:
    """Richardson-extrapolated FD levels and the per-level error bound.

    Runs the FD oracle on two grids, removes the leading O(h^2) error and
    returns (extrapolated values, |extrapolated - fine-grid| correction
    magnitudes), the latter serving as the error bound of the fine grid.
    """
    coarse, fine = grids
    w_coarse = fd_oracle_3j(params, coarse, m)
    w_fine = fd_oracle_3j(params, fine, m)
    r = (fine / coarse) ** 2
    extrapolated = w_fine + (w_fine - w_coarse) / (r - 1.0)
    return extrapolated, np.abs(extrapolated - w_fine)
