"""Effective decoherence rate from per-gate error budgets.

The headline quantity is the per-spin, per-unit-time error sum

    gamma_eff = sum_g epsilon_g / (N * tau)

over the gates of exactly one Trotter step.  It bounds the energy scale
a noisy run can resolve: couplings with 2*pi*J below gamma_eff are
candidates for dropping from the Hamiltonian before synthesis.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .circuit_builder import Circuit
from .noisy_simulator import NoiseModel
from .spectrum_pipeline import Spectrum
from .spin_system import HamiltonianTerms, MoleculeSpec, larmor_frequency_hz


@dataclass(frozen=True)
class BudgetEntry:
    kind: str
    qubits: tuple[int, ...]
    epsilon: float
    t_gate: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError(f"epsilon out of [0,1): {self.epsilon}")


@dataclass(frozen=True)
class ErrorBudget:
    """Per-gate error entries for one Trotter step."""

    entries: tuple[BudgetEntry, ...]
    n_spins: int
    tau: float

    def __post_init__(self):
        if self.n_spins < 1:
            raise ValueError("n_spins must be >= 1")
        if not self.tau > 0:
            raise ValueError("tau must be positive")

    @property
    def total_error(self) -> float:
        return float(sum(e.epsilon for e in self.entries))


def gamma_eff(budget: ErrorBudget) -> float:
    """Effective decoherence rate sum(eps)/(N tau) in s^-1."""
    if not budget.entries:
        warnings.warn("empty error budget; gamma_eff is 0", stacklevel=2)
        return 0.0
    return budget.total_error / (budget.n_spins * budget.tau)


def linewidth_ppm(gamma: float, spec: MoleculeSpec) -> float:
    """Lorentzian FWHM (2*gamma angular) converted to ppm."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    nu0 = larmor_frequency_hz(spec)
    return 2 * gamma / (2 * np.pi * nu0 * 1e-6)


def reduction_advice(budget: ErrorBudget, terms: HamiltonianTerms) -> list[tuple[int, int, float]]:
    """Pair terms whose angular coupling is below gamma_eff.

    Pure advice: the returned pairs are candidates for
    ``spin_system.reduce_couplings``; nothing is mutated here.
    """
    rate = gamma_eff(budget)
    return [(i, j, ang) for i, j, ang in terms.pairs if abs(ang) < rate]


def budget_from_circuit(circuit: Circuit, model: NoiseModel, tau: float) -> ErrorBudget:
    """Join a step circuit's physical gates with per-kind error rates."""
    entries = []
    for g in circuit.gates:
        if g.is_virtual:
            continue
        entries.append(
            BudgetEntry(
                kind=g.kind,
                qubits=g.qubits,
                epsilon=model.error_for(g),
                t_gate=model.per_gate_time.get(g.kind),
            )
        )
    return ErrorBudget(entries=tuple(entries), n_spins=circuit.width, tau=tau)


def ingest_calibration(path, circuit: Circuit, tau: float) -> ErrorBudget:
    """Build the budget for one Trotter step from a calibration file.

    The file uses the noise-model format (``gate KIND ARITY EPS [T]``);
    entries mirror the circuit's physical gate census.  Gates appearing
    in the circuit but not in the file are an error.
    """
    model = NoiseModel.from_file(path)
    missing = sorted(
        {g.kind for g in circuit.gates if not g.is_virtual} - set(model.per_gate_error)
    )
    if missing:
        raise ValueError(f"calibration file lacks entries for gate kinds: {missing}")
    return budget_from_circuit(circuit, model, tau)


# ---------------------------------------------------------------------------
# peak measurement (budget validation against simulated spectra)

def find_spectral_peaks(spectrum: Spectrum, min_rel_height: float = 0.05) -> list[int]:
    """Indices of local maxima above a fraction of the global maximum."""
    a = spectrum.amplitude
    floor = np.median(a)
    thresh = floor + min_rel_height * (a.max() - floor)
    idx = [
        k
        for k in range(1, len(a) - 1)
        if a[k] > a[k - 1] and a[k] >= a[k + 1] and a[k] > thresh
    ]
    return idx


def interpolated_peak_position(spectrum: Spectrum, k: int) -> float:
    """Sub-bin peak frequency (rad/s) by parabolic interpolation."""
    a = spectrum.amplitude
    w = spectrum.freq_rad_s
    if k == 0 or k == len(a) - 1:
        return float(w[k])
    denom = a[k - 1] - 2 * a[k] + a[k + 1]
    if denom == 0:
        return float(w[k])
    shift = 0.5 * (a[k - 1] - a[k + 1]) / denom
    return float(w[k] + shift * (w[1] - w[0]))


def fit_peak_fwhm(spectrum: Spectrum) -> tuple[float, float, float]:
    """FWHM of the tallest peak via interpolated half-maximum crossings.

    The spectrum median is subtracted as a baseline first.  Returns
    (fwhm in rad/s, peak frequency in rad/s, peak height).
    """
    a = spectrum.amplitude - np.median(spectrum.amplitude)
    w = spectrum.freq_rad_s
    k = int(np.argmax(a))
    half = a[k] / 2
    lo = k
    while lo > 0 and a[lo] > half:
        lo -= 1
    hi = k
    while hi < len(a) - 1 and a[hi] > half:
        hi += 1
    if a[lo] > half or a[hi] > half:
        raise ValueError("peak does not drop to half maximum inside the grid")

    def cross(i0, i1):
        # linear interpolation of the half-max crossing between bins
        return w[i0] + (half - a[i0]) / (a[i1] - a[i0]) * (w[i1] - w[i0])

    left = cross(lo, lo + 1)
    right = cross(hi, hi - 1)
    return float(right - left), interpolated_peak_position(spectrum, k), float(a[k])


def budget_report(
    budget: ErrorBudget,
    spec: MoleculeSpec,
    terms: HamiltonianTerms,
) -> dict:
    """JSON-ready summary: gamma_eff, linewidth and flagged couplings."""
    rate = gamma_eff(budget)
    flagged = reduction_advice(budget, terms)
    kinds: dict[str, int] = {}
    for e in budget.entries:
        kinds[e.kind] = kinds.get(e.kind, 0) + 1
    return {
        "molecule": spec.name,
        "n_spins": budget.n_spins,
        "tau": budget.tau,
        "gate_counts": dict(sorted(kinds.items())),
        "total_error_per_step": budget.total_error,
        "gamma_eff_per_s": rate,
        "fwhm_ppm": linewidth_ppm(rate, spec),
        "flagged_couplings": [
            {"i": i, "j": j, "j_hz": ang / (2 * np.pi), "angular_rad_s": ang}
            for i, j, ang in flagged
        ],
    }


def write_budget_report(report: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
