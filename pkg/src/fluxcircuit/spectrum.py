"""Plane-wave eigenproblem for the periodic Josephson potential.

The stationary Schroedinger equation of the reduced circuit Hamiltonian is
the problem of a particle in a 2*pi-periodic potential in d = 2 or 3 phase
coordinates.  Expanding the (periodic, zero-quasimomentum) wavefunction in
plane waves exp(i K . phi) over integer reciprocal-lattice vectors K turns
it into a sparse Hermitian eigenproblem: the kinetic term 4 E_C K^T A^{-1} K
is diagonal and each cosine of the potential couples K only to K +/- u for
its own integer direction u.  All energies are in units of E_C.

Assembly conventions: the coupling stored on (K+u <- K) carries
exp(+i*theta) with theta = 2*pi*f_e on the flux-bearing cosine (the
beta-junction term for four junctions, the alpha term for three); the
``gauge="alpha"`` alternative moves that phase onto a single-junction term
by a constant phase translation and must leave the spectrum unchanged.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .circuit import TWO_PI, CircuitParams, Variant, mass_matrix

DENSE_LIMIT = 2000
_EIGSH_SEED = 20240913


class SolverError(RuntimeError):
    """Eigensolver failed to converge."""


@dataclass(frozen=True)
class Cube:
    """Cubic cutoff: every integer K with |K_i| <= k_max."""

    k_max: int

    def __post_init__(self):
        if self.k_max < 0:
            raise ValueError("k_max must be nonnegative")


@dataclass(frozen=True)
class Ellipsoid:
    """Kinetic-energy cutoff: keep K with 4 K^T A^{-1} K <= e_cut (E_C units)."""

    e_cut: float


@dataclass(frozen=True)
class BasisSpec:
    dimension: int
    cutoff: Cube | Ellipsoid

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise ValueError("dimension must be 2 or 3")


def enumerate_basis(spec: BasisSpec, mass: np.ndarray) -> np.ndarray:
    """Ordered integer reciprocal-lattice vectors for the given cutoff.

    The ordering is plain lexicographic over the integer tuples, so it is
    deterministic and always contains the zero vector.
    """
    d = spec.dimension
    if isinstance(spec.cutoff, Cube):
        k = spec.cutoff.k_max
        ks = np.array(list(itertools.product(range(-k, k + 1), repeat=d)), dtype=int)
        return ks
    e_cut = spec.cutoff.e_cut
    if e_cut < 0.0:
        raise ValueError("ellipsoid cutoff produced an empty basis")
    # bounding box from the smallest quadratic-form eigenvalue
    a_inv = np.linalg.inv(mass)
    lo = np.linalg.eigvalsh(a_inv)[0]
    k_bound = int(math.floor(math.sqrt(e_cut / (4.0 * lo)))) if e_cut > 0 else 0
    ks = np.array(list(itertools.product(range(-k_bound, k_bound + 1), repeat=d)), dtype=int)
    keep = 4.0 * np.einsum("ij,jk,ik->i", ks, a_inv, ks) <= e_cut
    ks = ks[keep]
    if ks.size == 0:
        raise ValueError("ellipsoid cutoff produced an empty basis")
    return ks


def _coupling_terms(params: CircuitParams, gauge: str):
    """(u, coefficient, theta) for each cosine of the potential, E_J units."""
    f = params.f_e
    if params.variant is Variant.FOUR_JUNCTION:
        a, b = params.alpha, params.beta
        if gauge == "beta":
            terms = [
                ((1, 0, 0), 1.0, 0.0),
                ((0, 1, 0), 1.0, 0.0),
                ((0, 0, 1), a, 0.0),
                ((1, 1, 1), b, TWO_PI * f),
            ]
        elif gauge == "alpha":
            # phi3 -> phi3 - 2*pi*f moves the flux phase onto the third junction
            terms = [
                ((1, 0, 0), 1.0, 0.0),
                ((0, 1, 0), 1.0, 0.0),
                ((0, 0, 1), a, -TWO_PI * f),
                ((1, 1, 1), b, 0.0),
            ]
        else:
            raise ValueError(f"unknown gauge {gauge!r}")
        return [t for t in terms if t[1] != 0.0]
    a = params.alpha
    if gauge == "beta":
        # canonical: flux phase rides on the small-junction term
        return [
            ((1, 0), 1.0, 0.0),
            ((0, 1), 1.0, 0.0),
            ((1, -1), a, TWO_PI * f),
        ]
    if gauge == "alpha":
        # phi1 -> phi1 - 2*pi*f
        return [
            ((1, 0), 1.0, -TWO_PI * f),
            ((0, 1), 1.0, 0.0),
            ((1, -1), a, 0.0),
        ]
    raise ValueError(f"unknown gauge {gauge!r}")


@dataclass
class HamiltonianOperator:
    """Sparse Hermitian operator over an ordered plane-wave basis.

    ``diagonal`` holds the real diagonal; ``couplings`` stores each
    independent off-diagonal element once as (row, col, amplitude) with
    row > col.  ``matrix()`` materializes the full Hermitian matrix.
    """

    basis_spec: BasisSpec
    vectors: np.ndarray  # (n, d) integer lattice vectors
    diagonal: np.ndarray  # (n,) real, E_C units
    couplings: list[tuple[int, int, complex]]
    _matrix: sparse.csr_matrix | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    def matrix(self) -> sparse.csr_matrix:
        if self._matrix is None:
            n = self.n
            if self.couplings:
                rows, cols, vals = map(np.array, zip(*self.couplings))
            else:
                rows = cols = np.array([], dtype=int)
                vals = np.array([], dtype=complex)
            lower = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n), dtype=complex)
            self._matrix = lower + lower.getH() + sparse.diags(self.diagonal.astype(complex))
        return self._matrix

    def index_of(self, vector) -> int:
        key = tuple(int(x) for x in vector)
        return _index_map(self)[key]


def _index_map(op: HamiltonianOperator) -> dict:
    if not hasattr(op, "_index_cache"):
        op._index_cache = {tuple(v): i for i, v in enumerate(op.vectors.tolist())}
    return op._index_cache


def _assemble(vectors, index, terms):
    """Shared off-diagonal assembly: terms are (u, complex amplitude)."""
    couplings = []
    for u, amp in terms:
        du = np.asarray(u, dtype=int)
        camp = complex(np.conj(amp))
        amp = complex(amp)
        for i, K in enumerate(vectors):
            j = index.get(tuple(K + du))
            if j is None:
                continue
            # element (j <- i) equals amp; store the lower triangle once
            if j > i:
                couplings.append((j, i, amp))
            else:
                couplings.append((i, j, camp))
    return couplings


def assemble_hamiltonian(
    params: CircuitParams, basis: BasisSpec | np.ndarray, gauge: str = "beta"
) -> HamiltonianOperator:
    """Circuit Hamiltonian in the plane-wave basis, in E_C units.

    Diagonal: 4 K^T A^{-1} K plus the constant potential offset
    (2+alpha+beta) E_J (four junctions) or (2+alpha) E_J (three).
    Off-diagonal: -x*E_J/2 * exp(+/- i theta) on K +/- u for each cosine
    term x*cos(u.phi + theta).
    """
    spec, vectors = _resolve_basis(params, basis)
    index = {tuple(v): i for i, v in enumerate(vectors.tolist())}
    A = mass_matrix(params)
    a_inv = np.linalg.inv(A)
    ej = params.ej_over_ec
    const = (2.0 + params.alpha + (params.beta or 0.0)) * ej
    diagonal = 4.0 * np.einsum("ij,jk,ik->i", vectors, a_inv, vectors) + const
    terms = [
        (u, -0.5 * coeff * ej * np.exp(1j * theta))
        for u, coeff, theta in _coupling_terms(params, gauge)
    ]
    couplings = _assemble(vectors, index, terms)
    return HamiltonianOperator(spec, vectors, diagonal, couplings)


def assemble_current(
    params: CircuitParams, basis: BasisSpec | np.ndarray
) -> HamiltonianOperator:
    """Loop-current operator in the same basis, in I_c units.

    Each sine term s*sin(u.phi + theta) contributes
    s*exp(+i theta)/(2i) on (K+u <- K); the diagonal vanishes.
    """
    spec, vectors = _resolve_basis(params, basis)
    index = {tuple(v): i for i, v in enumerate(vectors.tolist())}
    f = params.f_e
    if params.variant is Variant.FOUR_JUNCTION:
        a, b = params.alpha, params.beta
        pref = a * b / (a + b + 2.0 * a * b)
        sines = [
            ((1, 0, 0), 1.0, 0.0),
            ((0, 1, 0), 1.0, 0.0),
            ((0, 0, 1), 1.0, 0.0),
            ((1, 1, 1), -1.0, TWO_PI * f),
        ]
    else:
        a = params.alpha
        pref = a / (1.0 + 2.0 * a)
        sines = [
            ((1, 0), 1.0, 0.0),
            ((0, 1), -1.0, 0.0),
            ((1, -1), -1.0, TWO_PI * f),
        ]
    terms = [(u, pref * s * np.exp(1j * theta) / 2j) for u, s, theta in sines]
    diagonal = np.zeros(vectors.shape[0])
    couplings = _assemble(vectors, index, terms)
    return HamiltonianOperator(spec, vectors, diagonal, couplings)


def _resolve_basis(params: CircuitParams, basis) -> tuple[BasisSpec, np.ndarray]:
    if isinstance(basis, BasisSpec):
        return basis, enumerate_basis(basis, mass_matrix(params))
    vectors = np.asarray(basis, dtype=int)
    spec = BasisSpec(vectors.shape[1], Cube(int(np.max(np.abs(vectors))) if vectors.size else 0))
    return spec, vectors


@dataclass(frozen=True)
class SpectrumResult:
    """Lowest eigenpairs: ascending eigenvalues (E_C units), unit-norm vectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None  # (n, m), column i pairs with eigenvalues[i]
    residuals: np.ndarray


def eigensolve(
    op: HamiltonianOperator,
    m: int,
    tol: float = 1e-10,
    method: str = "auto",
) -> SpectrumResult:
    """Lowest ``m`` eigenpairs of the Hermitian operator.

    ``method`` is "dense", "iterative" or "auto" (dense up to a basis size
    of 2000).  The iterative path is ARPACK Lanczos seeded with a fixed
    starting vector so results are reproducible; on non-convergence it
    restarts once with an enlarged subspace before giving up.
    """
    n = op.n
    if not 1 <= m <= n:
        raise ValueError(f"level count m={m} outside [1, {n}]")
    H = op.matrix()

    if method == "auto":
        method = "dense" if n <= DENSE_LIMIT else "iterative"
    if method == "iterative" and m >= n - 1:
        method = "dense"  # ARPACK requires k < n - 1
    if method == "dense":
        w, v = scipy.linalg.eigh(H.toarray())
        w, v = w[:m], v[:, :m]
    elif method == "iterative":
        rng = np.random.default_rng(_EIGSH_SEED)
        v0 = rng.standard_normal(n)
        try:
            w, v = eigsh(H, k=m, which="SA", v0=v0, tol=0)
        except ArpackNoConvergence:
            try:
                ncv = min(n, max(4 * m + 20, 80))
                w, v = eigsh(H, k=m, which="SA", v0=v0, tol=0, ncv=ncv, maxiter=20 * n)
            except ArpackNoConvergence as exc:
                raise SolverError(f"iterative eigensolver failed to converge: {exc}") from exc
    else:
        raise ValueError(f"unknown method {method!r}")

    order = np.argsort(w, kind="stable")
    w, v = w[order], v[:, order]
    residuals = np.linalg.norm(H @ v - v * w[None, :], axis=0)
    worst = float(np.max(residuals))
    if worst > max(tol, 1e-12) * max(1.0, float(np.max(np.abs(w)))):
        raise SolverError(f"eigenpair residual {worst:.3e} exceeds tolerance {tol:.1e}")
    return SpectrumResult(eigenvalues=w, eigenvectors=v, residuals=residuals)


def solve_circuit(
    params: CircuitParams,
    basis: BasisSpec,
    m: int,
    tol: float = 1e-10,
    method: str = "auto",
    gauge: str = "beta",
) -> SpectrumResult:
    """Convenience wrapper: assemble and diagonalize in one call."""
    return eigensolve(assemble_hamiltonian(params, basis, gauge), m, tol, method)


@dataclass(frozen=True)
class SweepTable:
    """Energies on a flux grid: row i holds the ascending levels at f_values[i]."""

    f_values: np.ndarray
    energies: np.ndarray  # (n_f, m), E_C units
    params: CircuitParams
    basis: BasisSpec


def _sweep_point(args):
    params, f, basis, m, tol, method = args
    try:
        res = solve_circuit(params.replace(f_e=f), basis, m, tol, method)
    except SolverError as exc:
        raise SolverError(f"eigensolve failed at f_e={f}: {exc}") from exc
    return res.eigenvalues


def sweep_flux(
    params: CircuitParams,
    f_grid,
    m: int,
    basis: BasisSpec,
    tol: float = 1e-10,
    method: str = "auto",
    jobs: int = 1,
) -> SweepTable:
    """Eigenvalues of the lowest ``m`` levels at every flux point.

    Grid points are independent; with ``jobs > 1`` they are distributed
    over a process pool and merged back in grid order, so the result does
    not depend on scheduling.
    """
    f_grid = np.asarray(f_grid, dtype=float)
    if f_grid.size == 0:
        raise ValueError("empty flux grid")
    work = [(params, float(f), basis, m, tol, method) for f in f_grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, work))
    else:
        rows = [_sweep_point(w) for w in work]
    return SweepTable(f_values=f_grid, energies=np.vstack(rows), params=params, basis=basis)


DEFAULT_PAIRS = ((0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class TransitionTable:
    """|<i| I/I_c |j>| magnitudes per flux point, units of I_c*Phi_a^(0).

    ``magnitudes[(i, j)]`` is an array over ``f_values``;
    ``degenerate`` flags flux points where some pair of the involved
    levels is quasi-degenerate (splitting below 1e-10 E_C), where the
    individual elements within the degenerate subspace are basis
    dependent.
    """

    f_values: np.ndarray
    magnitudes: dict[tuple[int, int], np.ndarray]
    degenerate: np.ndarray


def transition_elements(
    spec: SpectrumResult,
    current_op: HamiltonianOperator,
    phi_a0: float = 1.0,
    pairs=DEFAULT_PAIRS,
) -> dict[tuple[int, int], float]:
    """Magnetic-dipole transition magnitudes |t_ij| in I_c*Phi_a^(0) units."""
    if spec.eigenvectors is None:
        raise ValueError("transition elements require eigenvectors")
    v = spec.eigenvectors
    need = max(max(p) for p in pairs)
    if v.shape[1] <= need:
        raise ValueError(f"need at least {need + 1} eigenvectors, have {v.shape[1]}")
    I = current_op.matrix()
    out = {}
    for i, j in pairs:
        out[(i, j)] = float(abs(np.vdot(v[:, i], I @ v[:, j]))) * phi_a0
    return out


def sweep_transitions(
    params: CircuitParams,
    f_grid,
    basis: BasisSpec,
    m: int = 3,
    tol: float = 1e-10,
    method: str = "auto",
    pairs=DEFAULT_PAIRS,
    degeneracy_tol: float = 1e-10,
) -> TransitionTable:
    """Transition magnitudes along a flux grid."""
    f_grid = np.asarray(f_grid, dtype=float)
    m = max(m, max(max(p) for p in pairs) + 1)
    mags = {p: np.empty(f_grid.size) for p in pairs}
    degenerate = np.zeros(f_grid.size, dtype=bool)
    for k, f in enumerate(f_grid):
        pt = params.replace(f_e=float(f))
        res = solve_circuit(pt, basis, m, tol, method)
        cur = assemble_current(pt, basis)
        vals = transition_elements(res, cur, pairs=pairs)
        for p in pairs:
            mags[p][k] = vals[p]
        gaps = np.diff(res.eigenvalues[: max(max(p) for p in pairs) + 1])
        degenerate[k] = bool(np.any(np.abs(gaps) < degeneracy_tol))
    return TransitionTable(f_values=f_grid, magnitudes=mags, degenerate=degenerate)


@dataclass(frozen=True)
class ConvergenceReport:
    """Basis-size study: eigenvalues on a k_max ladder and their increments."""

    k_values: list[int]
    energies: np.ndarray  # (len(k_values), m)
    deltas: list[float]  # max |E(k) - E(k_prev)| per rung
    converged_k_max: int
    monotone_ground_state: bool


def converge(
    params: CircuitParams,
    m: int,
    tol: float,
    f_e: float | None = None,
    k_cap: int = 14,
    tol_solver: float = 1e-10,
    method: str = "auto",
) -> ConvergenceReport:
    """Smallest cube k_max whose next rung (k_max+2) moves no level by >= tol.

    Raises SolverError if the cap is reached without convergence.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    pt = params if f_e is None else params.replace(f_e=f_e)
    k_values: list[int] = []
    rows: list[np.ndarray] = []
    deltas: list[float] = []
    for k in range(0, k_cap + 2, 2):
        basis = BasisSpec(pt.dimension, Cube(k))
        if (2 * k + 1) ** pt.dimension < m:
            continue
        res = solve_circuit(pt, basis, m, tol_solver, method)
        k_values.append(k)
        rows.append(res.eigenvalues)
        if len(rows) >= 2:
            deltas.append(float(np.max(np.abs(rows[-1] - rows[-2]))))
            if deltas[-1] < tol:
                energies = np.vstack(rows)
                ground = energies[:, 0]
                monotone = bool(np.all(np.diff(ground) <= 1e-12))
                return ConvergenceReport(
                    k_values=k_values,
                    energies=energies,
                    deltas=deltas,
                    converged_k_max=k_values[-2],
                    monotone_ground_state=monotone,
                )
    raise SolverError(f"no convergence below tol={tol} up to k_max={k_cap}")
