"""Dense-matrix ground truth: exact Hamiltonians, evolution and spectra.

Deliberately small and dense; everything is checked against this module.
Evolution uses one Hermitian eigendecomposition reused across the whole
time grid, and the spectrum goes through the same discrete transform as
the circuit pipeline so the two paths are bin-for-bin comparable.
"""

from __future__ import annotations

import numpy as np

from . import operators as ops
from .noisy_simulator import CorrelationRecord
from .spectrum_pipeline import Spectrum, spectrum_from_record
from .spin_system import FrameConfig, HamiltonianTerms

# A DenseOperator is a plain complex ndarray of shape (2^n, 2^n).
DenseOperator = np.ndarray


def dense_hamiltonian(terms: HamiltonianTerms, n_spins: int | None = None) -> DenseOperator:
    """Sum of on-site X terms and Heisenberg pair terms as a dense matrix."""
    n = terms.n_spins if n_spins is None else n_spins
    ops.check_n_qubits(n)
    h = np.zeros((2**n, 2**n), dtype=complex)
    for i, w in terms.onsite:
        h += w * ops.spin_operator("x", i, n)
    for i, j, ang in terms.pairs:
        for axis in "xyz":
            h += ang * ops.spin_operator(axis, i, n) @ ops.spin_operator(axis, j, n)
    return h


def exact_correlations(
    terms: HamiltonianTerms, n_spins: int, t_grid: np.ndarray
) -> CorrelationRecord:
    """C_z(t) = Tr S^z(t) S^z and C_y(t) = Tr S^y(t) S^z by exponentiation.

    S^a(t) = e^{iHt} S^a e^{-iHt}; traces are plain (unnormalized), so
    C_z(0) = N 2^N / 4.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) == 0:
        raise ValueError("empty time grid")
    if t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("time grid must be ascending and start at 0")
    h = dense_hamiltonian(terms, n_spins)
    w, v = np.linalg.eigh(h)
    sz = v.conj().T @ ops.total_spin("z", n_spins) @ v
    sy = v.conj().T @ ops.total_spin("y", n_spins) @ v
    # Tr{e^{iHt} A e^{-iHt} B} = sum_{mn} e^{i(w_m - w_n)t} A_mn B_nm
    gaps = (w[:, None] - w[None, :]).ravel()
    za = (sz * sz.T).ravel()  # element-wise A_mn * B_nm
    ya = (sy * sz.T).ravel()
    if gaps.size * len(t_grid) <= 5_000_000:
        phases = np.exp(1j * np.outer(t_grid, gaps))
        cz = (phases @ za).real
        cy = (phases @ ya).real
    else:
        cz = np.empty(len(t_grid))
        cy = np.empty(len(t_grid))
        for k, t in enumerate(t_grid):
            ph = np.exp(1j * t * gaps)
            cz[k] = (ph @ za).real
            cy[k] = (ph @ ya).real
    return CorrelationRecord(times=t_grid, cz=cz, cy=cy)


def exact_sector_series(
    terms: HamiltonianTerms, n_spins: int, t_grid: np.ndarray, bits: str
) -> tuple[np.ndarray, np.ndarray]:
    """<b(t)| S^{z/y} |b(t)> for one computational basis state, exactly."""
    h = dense_hamiltonian(terms, n_spins)
    unitary = ops.hermitian_evolution(h)
    psi0 = ops.basis_state(bits)
    sz_op = ops.total_spin("z", n_spins)
    sy_op = ops.total_spin("y", n_spins)
    sz = np.empty(len(t_grid))
    sy = np.empty(len(t_grid))
    for k, t in enumerate(np.asarray(t_grid, dtype=float)):
        psi = unitary(t) @ psi0
        sz[k] = np.vdot(psi, sz_op @ psi).real
        sy[k] = np.vdot(psi, sy_op @ psi).real
    return sz, sy


def exact_spectrum(
    correlations: CorrelationRecord,
    gamma: float,
    frame: FrameConfig,
    pad_to: int | None = None,
) -> Spectrum:
    """Reference spectrum through the shared discrete transform.

    ``gamma`` is the explicit decoherence window; exact correlations do
    not decay on their own, so it must be chosen by the caller.
    """
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    return spectrum_from_record(
        correlations, gamma_window=gamma, frame=frame, symmetrize=False, pad_to=pad_to,
        extra_metadata={"source": "exact"},
    )
