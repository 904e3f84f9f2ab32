"""Physics extraction on top of the spectrum solver.

Qubit parameters of the two-level model near the degeneracy point,
comparison of that model against the exact gap, ladder-vs-cyclic
classification of the lowest three levels from the transition magnitudes,
and the adiabaticity check for the loop-inductance oscillator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import TWO_PI, CircuitParams, oscillator_frequency
from .spectrum import BasisSpec, SweepTable, TransitionTable, solve_circuit

XI_THRESHOLD = 1e-3  # |t02| < threshold*|t01| defines the ladder type
QUBIT_LEAKAGE_THRESHOLD = 1e-2
QUTRIT_T12_THRESHOLD = 0.1
ADIABATIC_THRESHOLD = 1e-2
IP_EVAL_POINT = 0.45
IP_STEP = 1e-4


@dataclass(frozen=True)
class QubitParams:
    """Two-level model: gap = sqrt(epsilon^2 + delta^2), epsilon = slope*(f_e - 1/2).

    ``delta`` is the splitting at the degeneracy point (E_C units),
    ``i_p`` the persistent-current magnitude (I_c units) from the flux
    derivative of the ground level, and ``epsilon_slope`` the flux-bias
    energy slope 2*I_p*Phi_0 expressed in E_C per unit f_e.
    """

    delta: float
    i_p: float
    epsilon_slope: float

    def epsilon(self, f_e: float) -> float:
        return self.epsilon_slope * (f_e - 0.5)


def extract_qubit(
    params: CircuitParams,
    basis: BasisSpec,
    ip_point: float = IP_EVAL_POINT,
    ip_step: float = IP_STEP,
    tol: float = 1e-10,
    method: str = "auto",
) -> QubitParams:
    """Delta at f_e = 1/2 and I_p from a central difference at ``ip_point``."""
    at_half = solve_circuit(params.replace(f_e=0.5), basis, 2, tol, method)
    delta = float(at_half.eigenvalues[1] - at_half.eigenvalues[0])

    e_plus = solve_circuit(params.replace(f_e=ip_point + ip_step), basis, 1, tol, method)
    e_minus = solve_circuit(params.replace(f_e=ip_point - ip_step), basis, 1, tol, method)
    dE_df = (e_plus.eigenvalues[0] - e_minus.eigenvalues[0]) / (2.0 * ip_step)
    # dE/df in E_C units -> current in I_c = 2*pi*E_J/Phi_0 units
    i_p = abs(dE_df) / (TWO_PI * params.ej_over_ec)
    epsilon_slope = 2.0 * TWO_PI * i_p * params.ej_over_ec
    return QubitParams(delta=delta, i_p=i_p, epsilon_slope=epsilon_slope)


def two_level_gap(q: QubitParams, f_e) -> np.ndarray:
    """Model gap sqrt(epsilon^2 + delta^2), E_C units."""
    eps = q.epsilon_slope * (np.asarray(f_e, dtype=float) - 0.5)
    return np.hypot(eps, q.delta)


def compare_two_level(
    params: CircuitParams,
    basis: BasisSpec,
    window: float = 0.01,
    n_points: int = 11,
    q: QubitParams | None = None,
    tol: float = 1e-10,
    method: str = "auto",
) -> float:
    """Max relative deviation of the model gap from the exact E1 - E0.

    Evaluated on ``n_points`` flux values across |f_e - 1/2| <= window.
    """
    if q is None:
        q = extract_qubit(params, basis, tol=tol, method=method)
    worst = 0.0
    for f in np.linspace(0.5 - window, 0.5 + window, n_points):
        res = solve_circuit(params.replace(f_e=float(f)), basis, 2, tol, method)
        exact = float(res.eigenvalues[1] - res.eigenvalues[0])
        model = float(two_level_gap(q, f))
        worst = max(worst, abs(model - exact) / exact)
    return worst


@dataclass(frozen=True)
class LevelClassification:
    """Per-flux-point three-level character and aggregate suitability verdict.

    ``labels[i]`` is "XiType" (ladder: 0 <-> 2 forbidden) or "DeltaType"
    (cyclic: all three transitions allowed) at ``f_values[i]``;
    ``leakage_figure`` is max over the grid of max(|t02|, |t12|)/|t01|.
    """

    f_values: np.ndarray
    labels: list[str]
    xi_threshold: float
    leakage_figure: float
    verdict: str


def classify_levels(
    sweep: SweepTable,
    transitions: TransitionTable,
    xi_threshold: float = XI_THRESHOLD,
) -> LevelClassification:
    """Ladder/cyclic labels plus a qubit-vs-qutrit suitability verdict.

    The verdict is "qubit-suited" when the worst leakage ratio stays below
    1e-2, "qutrit-suited" when the third level keeps a gap to the fourth
    exceeding the 1-2 spacing across the grid and |t12|/|t01| is
    appreciable somewhere, otherwise "unclassified".
    """
    if sweep.f_values.shape != transitions.f_values.shape or np.any(
        sweep.f_values != transitions.f_values
    ):
        raise ValueError("sweep and transition tables use different flux grids")

    t01 = transitions.magnitudes[(0, 1)]
    t02 = transitions.magnitudes[(0, 2)]
    t12 = transitions.magnitudes[(1, 2)]
    labels = ["XiType" if t2 < xi_threshold * t1 else "DeltaType" for t1, t2 in zip(t01, t02)]
    with np.errstate(divide="ignore", invalid="ignore"):
        leak = np.maximum(t02, t12) / t01
    leakage = float(np.max(leak))

    if leakage < QUBIT_LEAKAGE_THRESHOLD:
        verdict = "qubit-suited"
    else:
        verdict = "unclassified"
        if sweep.energies.shape[1] >= 4:
            e = sweep.energies
            third_separated = bool(np.all(e[:, 3] - e[:, 2] > e[:, 2] - e[:, 1]))
            if third_separated and float(np.max(t12 / t01)) > QUTRIT_T12_THRESHOLD:
                verdict = "qutrit-suited"
    return LevelClassification(
        f_values=sweep.f_values,
        labels=labels,
        xi_threshold=xi_threshold,
        leakage_figure=leakage,
        verdict=verdict,
    )


@dataclass(frozen=True)
class AdiabaticReport:
    """Gap versus oscillator frequency, both in Hz."""

    gap_hz: float
    oscillator_hz: float
    ratio: float
    valid: bool
    borderline: bool


def adiabatic_check(
    params: CircuitParams,
    capacitance: float | None = None,
    inductance: float | None = None,
    ec_ghz: float | None = None,
    gap_ec: float | None = None,
    basis: BasisSpec | None = None,
    threshold: float = ADIABATIC_THRESHOLD,
) -> AdiabaticReport:
    """Check that the qubit gap is far below the loop-oscillator frequency.

    ``ec_ghz`` converts the dimensionless gap (E_C units) to physical
    frequency; the gap itself may be supplied or computed from a basis.
    """
    if ec_ghz is None:
        raise ValueError("adiabatic check requires ec_ghz to express the gap in hertz")
    if ec_ghz <= 0.0:
        raise ValueError("ec_ghz must be positive")
    if gap_ec is None:
        if basis is None:
            raise ValueError("supply either gap_ec or a basis to compute it")
        res = solve_circuit(params.replace(f_e=0.5), basis, 2)
        gap_ec = float(res.eigenvalues[1] - res.eigenvalues[0])

    osc = oscillator_frequency(params, capacitance, inductance)
    gap_hz = gap_ec * ec_ghz * 1e9
    ratio = gap_hz / osc.frequency_hz
    return AdiabaticReport(
        gap_hz=gap_hz,
        oscillator_hz=osc.frequency_hz,
        ratio=ratio,
        valid=ratio < threshold,
        borderline=ratio == threshold,
    )
