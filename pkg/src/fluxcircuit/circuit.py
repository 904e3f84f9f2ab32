"""Closed-form circuit algebra for three- and four-junction flux circuits.

A superconducting loop interrupted by four Josephson junctions (two large,
identical ones plus two smaller ones scaled by ``alpha`` and ``beta``) is
described, after eliminating one phase through fluxoid quantization, by
three independent phase drops (phi1, phi2, phi3).  The three-junction loop
is the classic comparator circuit with a single reduced junction ``alpha``
and two independent phases.

Everything in this module is a pure function of plain values: the
normal-mode transformation coefficients of the kinetic quadratic form, the
Josephson potentials and loop-current expressions in original phases, the
capacitance (mass) matrices, the potential-landscape analysis and the
loop-inductance oscillator frequency.  Energies are measured in units of
the large-junction coupling E_J; currents in units of the large-junction
critical current I_c = 2*pi*E_J/Phi_0.
"""

from __future__ import annotations

import enum
import itertools
import math
import dataclasses
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# single-electron charge and flux quantum, SI
_E_CHARGE = 1.602176634e-19
_PLANCK = 6.62607015e-34
PHI0 = _PLANCK / (2.0 * _E_CHARGE)


class Variant(enum.Enum):
    """Loop topology: four junctions (3 free phases) or three (2 free phases)."""

    FOUR_JUNCTION = "4j"
    THREE_JUNCTION = "3j"

    @property
    def dimension(self) -> int:
        return 3 if self is Variant.FOUR_JUNCTION else 2


@dataclass(frozen=True)
class CircuitParams:
    """Dimensionless circuit parameters.

    Parameters
    ----------
    variant : Variant
        Loop topology.
    alpha : float
        Size ratio of the third junction, in (0, 1].
    beta : float, optional
        Size ratio of the fourth junction (four-junction loops only),
        in (0, 1].  ``beta = 0`` is additionally admitted as the separable
        limit used by cross-check oracles; it removes the fourth junction.
    ej_over_ec : float
        Josephson coupling of the large junctions in units of the
        single-particle charging energy E_C = e^2/(2C).
    f_e : float
        Reduced static flux threading the loop, Phi_e/Phi_0.
    capacitance : float, optional
        Large-junction capacitance C in farads (only needed for the
        loop-oscillator frequency).
    inductance : float, optional
        Loop inductance L in henries (same purpose).
    """

    variant: Variant
    alpha: float
    beta: float | None = None
    ej_over_ec: float = 50.0
    f_e: float = 0.5
    capacitance: float | None = None
    inductance: float | None = None

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.variant is Variant.FOUR_JUNCTION:
            if self.beta is None:
                raise ValueError("four-junction circuit requires beta")
            if not 0.0 <= self.beta <= 1.0:
                raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        elif self.beta is not None:
            raise ValueError("three-junction circuit takes no beta")
        if self.ej_over_ec < 0.0:
            raise ValueError(f"ej_over_ec must be nonnegative, got {self.ej_over_ec}")

    @property
    def dimension(self) -> int:
        return self.variant.dimension

    def replace(self, **kw) -> "CircuitParams":
        return dataclasses.replace(self, **kw)


@dataclass(frozen=True)
class TransformCoefficients:
    """Coefficients of the normal-mode transformation of the kinetic form.

    ``lambda_plus/minus`` are the two mode eigenvalues entering the
    symmetric sector, ``b_plus/minus`` the corresponding (nonnegative)
    mixing amplitudes, ``b`` the negative flux-mode coefficient and
    ``gamma_*`` the diagonal masses of the transformed quadratic form
    (all strictly positive).
    """

    alpha: float
    beta: float
    lambda_plus: float
    lambda_minus: float
    b_plus: float
    b_minus: float
    b: float
    gamma_plus: float
    gamma_minus: float
    gamma_xi: float

    @property
    def phi3_coeff_plus(self) -> float:
        """Coefficient of the plus mode in phi3."""
        return -2.0 * self.beta * self.b_plus / (self.alpha + self.beta - self.lambda_plus)

    @property
    def phi3_coeff_minus(self) -> float:
        """Coefficient of the minus mode in phi3."""
        return -2.0 * self.beta * self.b_minus / (self.alpha + self.beta - self.lambda_minus)


def compute_transform(alpha: float, beta: float) -> TransformCoefficients:
    """Closed-form normal-mode coefficients for the four-junction loop.

    Raises
    ------
    ValueError
        If ``alpha`` or ``beta`` falls outside (0, 1].
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")

    radical = math.sqrt(1.0 + (alpha - beta) ** 2 + 8.0 * beta**2 + 2.0 * (beta - alpha))
    lambda_plus = ((1.0 + alpha + 3.0 * beta) + radical) / 2.0
    lambda_minus = ((1.0 + alpha + 3.0 * beta) - radical) / 2.0

    def _b(lam: float) -> float:
        den = math.sqrt(
            2.0 * (alpha + beta) ** 2
            + 4.0 * beta**2
            - 4.0 * (beta + alpha) * lam
            + 2.0 * lam**2
        )
        return abs(alpha + beta - lam) / den

    b_plus = _b(lambda_plus)
    b_minus = _b(lambda_minus)
    b = -TWO_PI * beta / (alpha + beta + 2.0 * alpha * beta)

    def _gamma(lam: float, bpm: float) -> float:
        d = alpha + beta - lam
        return 2.0 * bpm**2 * (1.0 + 2.0 * beta - 4.0 * beta**2 / d + 2.0 * beta**2 * (alpha + beta) / d**2)

    gamma_plus = _gamma(lambda_plus, b_plus)
    gamma_minus = _gamma(lambda_minus, b_minus)
    gamma_xi = (
        (2.0 * alpha**2 + 4.0 * beta * alpha**2 + alpha + beta + 4.0 * alpha * beta) * b**2
        + 4.0 * math.pi * beta * (1.0 + 2.0 * alpha) * b
        + 4.0 * math.pi**2 * beta
    )
    return TransformCoefficients(
        alpha=alpha,
        beta=beta,
        lambda_plus=lambda_plus,
        lambda_minus=lambda_minus,
        b_plus=b_plus,
        b_minus=b_minus,
        b=b,
        gamma_plus=gamma_plus,
        gamma_minus=gamma_minus,
        gamma_xi=gamma_xi,
    )


def numeric_transform_masses(alpha: float, beta: float) -> tuple[float, float, float, float]:
    """Independent check of the transformed masses by congruence.

    Builds the kinetic quadratic form of the four-junction loop in the
    coordinates (phi1, phi2, phi3, xi) and conjugates it with the
    closed-form mode map; the result must be diagonal with entries
    (1, gamma_plus, gamma_minus, gamma_xi).  Returns those four diagonal
    entries; raises if the conjugated form is not diagonal.
    """
    t = compute_transform(alpha, beta)
    B = np.array(
        [
            [1.0 + beta, beta, beta, TWO_PI * beta],
            [beta, 1.0 + beta, beta, TWO_PI * beta],
            [beta, beta, alpha + beta, TWO_PI * beta],
            [TWO_PI * beta, TWO_PI * beta, TWO_PI * beta, (TWO_PI**2) * beta],
        ]
    )
    M = np.zeros((4, 4))
    M[:3, :] = mode_matrix(t)
    M[3, 3] = 1.0
    G = M.T @ B @ M
    off = G - np.diag(np.diag(G))
    if np.max(np.abs(off)) > 1e-9 * max(1.0, np.max(np.abs(G))):
        raise ArithmeticError(
            "mode map fails to diagonalize the kinetic form; "
            f"worst off-diagonal {np.max(np.abs(off)):.3e} at alpha={alpha}, beta={beta}"
        )
    return tuple(np.diag(G))


def mode_matrix(t: TransformCoefficients) -> np.ndarray:
    """3x4 matrix mapping mode coordinates (phi, phi+, phi-, xi) to (phi1, phi2, phi3)."""
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    return np.array(
        [
            [inv_sqrt2, t.b_plus, t.b_minus, t.alpha * t.b],
            [-inv_sqrt2, t.b_plus, t.b_minus, t.alpha * t.b],
            [0.0, t.phi3_coeff_plus, t.phi3_coeff_minus, t.b],
        ]
    )


@dataclass(frozen=True)
class PhasePoint:
    """A point in the reduced phase space (length 3 for 4J, 2 for 3J)."""

    phases: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "phases", np.atleast_1d(np.asarray(self.phases, dtype=float)))

    def wrapped(self) -> "PhasePoint":
        """Canonical representative with each component in [-pi, pi)."""
        return PhasePoint(wrap_phases(self.phases))


def wrap_phases(phases: np.ndarray) -> np.ndarray:
    """Map each phase to its representative in [-pi, pi)."""
    return (np.asarray(phases, dtype=float) + math.pi) % TWO_PI - math.pi


def map_phases(
    t: TransformCoefficients,
    varphi: float,
    varphi_plus: float,
    varphi_minus: float,
    xi: float,
    f_e: float = 0.0,
) -> tuple[PhasePoint, float]:
    """Map mode coordinates to junction phases.

    Returns the PhasePoint (phi1, phi2, phi3) and the fourth phase drop,
    fixed by fluxoid quantization with total flux f_e + xi.
    """
    v = np.array([varphi, varphi_plus, varphi_minus, xi], dtype=float)
    phases = mode_matrix(t) @ v
    f_tot = f_e + xi
    phi4 = -phases.sum() - TWO_PI * f_tot
    return PhasePoint(phases), phi4


def _phases_array(p, dim: int) -> np.ndarray:
    arr = p.phases if isinstance(p, PhasePoint) else np.asarray(p, dtype=float)
    if arr.shape[-1] != dim:
        raise ValueError(f"expected {dim} phases, got shape {arr.shape}")
    return arr


def potential_4j(p, alpha: float, beta: float, f_tot: float):
    """Four-junction Josephson potential in E_J units (>= 0 everywhere).

    Accepts a PhasePoint or any array whose last axis holds
    (phi1, phi2, phi3); broadcasts over leading axes.
    """
    arr = _phases_array(p, 3)
    p1, p2, p3 = arr[..., 0], arr[..., 1], arr[..., 2]
    return (
        2.0 + alpha + beta
        - np.cos(p1) - np.cos(p2) - alpha * np.cos(p3)
        - beta * np.cos(p1 + p2 + p3 + TWO_PI * f_tot)
    )


def potential_3j(p, alpha: float, f_tot: float):
    """Three-junction Josephson potential in E_J units (>= 0 everywhere)."""
    arr = _phases_array(p, 2)
    p1, p2 = arr[..., 0], arr[..., 1]
    return 2.0 + alpha - np.cos(p1) - np.cos(p2) - alpha * np.cos(p1 - p2 + TWO_PI * f_tot)


def potential(p, params: CircuitParams, f_tot: float | None = None):
    """Dispatch to the variant's potential, defaulting the flux to params.f_e."""
    f = params.f_e if f_tot is None else f_tot
    if params.variant is Variant.FOUR_JUNCTION:
        return potential_4j(p, params.alpha, params.beta, f)
    return potential_3j(p, params.alpha, f)


def gradient_4j(p, alpha: float, beta: float, f_tot: float) -> np.ndarray:
    """Gradient of potential_4j with respect to (phi1, phi2, phi3), E_J per radian."""
    arr = _phases_array(p, 3)
    s = np.sin(arr[..., 0] + arr[..., 1] + arr[..., 2] + TWO_PI * f_tot)
    return np.stack(
        [
            np.sin(arr[..., 0]) + beta * s,
            np.sin(arr[..., 1]) + beta * s,
            alpha * np.sin(arr[..., 2]) + beta * s,
        ],
        axis=-1,
    )


def gradient_3j(p, alpha: float, f_tot: float) -> np.ndarray:
    """Gradient of potential_3j with respect to (phi1, phi2)."""
    arr = _phases_array(p, 2)
    s = np.sin(arr[..., 0] - arr[..., 1] + TWO_PI * f_tot)
    return np.stack(
        [np.sin(arr[..., 0]) + alpha * s, np.sin(arr[..., 1]) - alpha * s],
        axis=-1,
    )


def potential_gradient(p, params: CircuitParams, f_tot: float | None = None) -> np.ndarray:
    f = params.f_e if f_tot is None else f_tot
    if params.variant is Variant.FOUR_JUNCTION:
        return gradient_4j(p, params.alpha, params.beta, f)
    return gradient_3j(p, params.alpha, f)


def current_4j(p, alpha: float, beta: float, f_e: float):
    """Loop current of the four-junction circuit in units of I_c = 2*pi*E_J/Phi_0."""
    arr = _phases_array(p, 3)
    p1, p2, p3 = arr[..., 0], arr[..., 1], arr[..., 2]
    pref = alpha * beta / (alpha + beta + 2.0 * alpha * beta)
    return pref * (
        np.sin(p1) + np.sin(p2) + np.sin(p3) - np.sin(p1 + p2 + p3 + TWO_PI * f_e)
    )


def current_3j(p, alpha: float, f_e: float):
    """Loop current of the three-junction circuit in I_c units."""
    arr = _phases_array(p, 2)
    p1, p2 = arr[..., 0], arr[..., 1]
    pref = alpha / (1.0 + 2.0 * alpha)
    return pref * (np.sin(p1) - np.sin(p2) - np.sin(p1 - p2 + TWO_PI * f_e))


def xi_potential_4j(p, alpha: float, beta: float, f_e: float, xi: float):
    """potential_4j continued to nonzero flux mode xi at fixed mode coordinates.

    The junction phases shift along the xi column of the mode map while
    the total flux becomes f_e + xi; used by the current/energy
    consistency check I = -(1/Phi_0) dU/dxi at xi = 0.
    """
    t = compute_transform(alpha, beta)
    arr = _phases_array(p, 3)
    shifted = arr + xi * np.array([alpha * t.b, alpha * t.b, t.b])
    return potential_4j(shifted, alpha, beta, f_e + xi)


def xi_potential_3j(p, alpha: float, f_e: float, xi: float):
    """potential_3j continued to nonzero flux mode xi at fixed mode coordinates."""
    arr = _phases_array(p, 2)
    c = TWO_PI * alpha / (1.0 + 2.0 * alpha)
    # the xi shift lives in the antisymmetric combination only:
    # phi1 -> phi1 - c*xi, phi2 -> phi2 + c*xi
    shifted = arr + xi * np.array([-c, c])
    return potential_3j(shifted, alpha, f_e + xi)


def mass_matrix(params: CircuitParams) -> np.ndarray:
    """Dimensionless capacitance (mass) matrix of the velocity quadratic form.

    The plane-wave kinetic energy is 4*E_C * K^T A^{-1} K with this A.
    """
    if params.variant is Variant.FOUR_JUNCTION:
        a, b = params.alpha, params.beta
        return np.array(
            [
                [1.0 + b, b, b],
                [b, 1.0 + b, b],
                [b, b, a + b],
            ]
        )
    a = params.alpha
    return np.array([[1.0 + a, -a], [-a, 1.0 + a]])


def phase_star(beta: float) -> float:
    """Common phase of the two symmetric potential minima at alpha=1, f_e=1/2.

    Defined for beta in [1/3, 1]; at the boundary beta = 1/3 the two
    minima merge at the origin and 0 is returned.
    """
    if not 1.0 / 3.0 <= beta <= 1.0:
        raise ValueError(f"double-well phase exists for beta in [1/3, 1], got {beta}")
    return math.asin(math.sqrt((3.0 * beta - 1.0) / (4.0 * beta)))


class Regime(enum.Enum):
    DOUBLE_WELL = "DoubleWell"
    SINGLE_WELL = "SingleWell"


@dataclass(frozen=True)
class WellReport:
    """Minima of the Josephson potential inside one unit cell."""

    minima: list[PhasePoint]
    regime: Regime
    potential_at_minima: list[float]
    barrier_estimate: float | None = None


def _numeric_hessian(grad, p: np.ndarray, step: float = 1e-5) -> np.ndarray:
    d = p.size
    H = np.empty((d, d))
    for j in range(d):
        e = np.zeros(d)
        e[j] = step
        H[:, j] = (grad(p + e) - grad(p - e)) / (2.0 * step)
    return 0.5 * (H + H.T)


def _newton_minimize(pot, grad, start: np.ndarray, grad_tol: float, max_iter: int):
    """Damped Newton descent to a stationary point of the potential.

    Far from stationarity: descent steps along the positively shifted
    numerical Hessian with a norm cap and Armijo backtracking.  Once the
    gradient is small the potential no longer resolves decrease in double
    precision, so the endgame switches to plain Newton root polishing on
    the gradient.  Returns (point, converged).
    """
    p = np.asarray(start, dtype=float).copy()
    eye = np.eye(p.size)
    for _ in range(max_iter):
        g = grad(p)
        gnorm = np.linalg.norm(g)
        if gnorm < grad_tol:
            return p, True
        H = _numeric_hessian(grad, p)
        if gnorm < 1e-5:
            # endgame: unshifted Newton converges to the stationary point
            try:
                p = p + np.linalg.solve(H + 1e-12 * eye, -g)
            except np.linalg.LinAlgError:
                p = p - g
            continue
        lo = np.linalg.eigvalsh(H)[0]
        shift = max(0.0, 1e-4 - lo)
        step = np.linalg.solve(H + shift * eye, -g)
        norm = np.linalg.norm(step)
        if norm > 2.0:
            step *= 2.0 / norm
        descent = -float(step @ g)
        f0 = pot(p)
        t = 1.0
        for _ in range(60):
            trial = p + t * step
            if pot(trial) < f0 - 1e-4 * t * descent or np.linalg.norm(grad(trial)) < 0.5 * gnorm:
                p = trial
                break
            t *= 0.5
        else:
            # fall back to a capped gradient step
            step = -g / max(1.0, gnorm)
            t = 1.0
            for _ in range(60):
                trial = p + t * step
                if pot(trial) < f0:
                    p = trial
                    break
                t *= 0.5
            else:
                return p, bool(np.linalg.norm(grad(p)) < grad_tol)
    return p, bool(np.linalg.norm(grad(p)) < grad_tol)


def find_minima(
    params: CircuitParams,
    grad_tol: float = 1e-10,
    max_iter: int = 200,
    dedup_tol: float = 1e-6,
) -> WellReport:
    """Locate all potential minima in the unit cell [-pi, pi)^d.

    Deterministic multi-start damped Newton (3 starts per axis), saddle
    rejection by the sign of the smallest Hessian eigenvalue, and
    deduplication modulo 2*pi.  The barrier estimate for a double well is
    the potential maximum along the straight segment joining the two
    minima (a coarse upper-bound style figure, not a saddle search).

    Raises
    ------
    RuntimeError
        If any start fails to reach the gradient tolerance within the
        iteration cap.
    """
    dim = params.dimension
    pot = lambda q: float(potential(q, params))
    grad = lambda q: potential_gradient(q, params)

    offsets = (-TWO_PI / 3.0, 0.0, TWO_PI / 3.0)
    minima: list[np.ndarray] = []
    for start in itertools.product(offsets, repeat=dim):
        p, ok = _newton_minimize(pot, grad, np.array(start), grad_tol, max_iter)
        if not ok:
            raise RuntimeError(
                f"minimum search failed to converge from start {start} "
                f"(gradient norm {np.linalg.norm(grad(p)):.3e})"
            )
        p = wrap_phases(p)
        H = _numeric_hessian(grad, p)
        if np.linalg.eigvalsh(H)[0] <= 1e-7:
            continue  # saddle or maximum
        if not any(np.linalg.norm(wrap_phases(p - q)) < dedup_tol for q in minima):
            minima.append(p)

    minima.sort(key=lambda q: tuple(q))
    values = [pot(q) for q in minima]
    regime = Regime.DOUBLE_WELL if len(minima) >= 2 else Regime.SINGLE_WELL

    barrier = None
    if len(minima) == 2:
        seg = np.linspace(0.0, 1.0, 201)[:, None]
        path = minima[0][None, :] * (1.0 - seg) + minima[1][None, :] * seg
        barrier = float(np.max(potential(path, params)) - min(values))

    return WellReport(
        minima=[PhasePoint(q) for q in minima],
        regime=regime,
        potential_at_minima=values,
        barrier_estimate=barrier,
    )


@dataclass(frozen=True)
class OscillatorReport:
    """Loop-inductance oscillator frequency and optional adiabaticity figure."""

    omega: float  # angular frequency, rad/s
    frequency_hz: float  # omega / (2*pi)
    adiabaticity: float | None = None  # gap / (omega/2pi), both in Hz


def oscillator_frequency(
    params: CircuitParams,
    capacitance: float | None = None,
    inductance: float | None = None,
    gap_hz: float | None = None,
) -> OscillatorReport:
    """Angular frequency of the flux-mode harmonic oscillator.

    Four-junction loops use omega = 2*pi/sqrt(gamma_xi*C*L); the
    three-junction loop has the closed form omega = sqrt((1+2a)/(a*C*L)).
    Both follow from quantizing the flux mode with the transformed mass
    and the inductive energy Phi_0^2 xi^2/(2L); the two expressions agree
    through gamma_xi(3j) = 4*pi^2*alpha/(1+2*alpha).
    """
    C = params.capacitance if capacitance is None else capacitance
    L = params.inductance if inductance is None else inductance
    if C is None or L is None:
        raise ValueError("oscillator frequency requires capacitance and inductance")
    if C <= 0.0 or L <= 0.0:
        raise ValueError("capacitance and inductance must be positive")

    if params.variant is Variant.FOUR_JUNCTION:
        gamma_xi = compute_transform(params.alpha, params.beta).gamma_xi
        omega = TWO_PI / math.sqrt(gamma_xi * C * L)
    else:
        a = params.alpha
        omega = math.sqrt((1.0 + 2.0 * a) / (a * C * L))

    freq = omega / TWO_PI
    adiabaticity = None if gap_hz is None else gap_hz / freq
    return OscillatorReport(omega=omega, frequency_hz=freq, adiabaticity=adiabaticity)
