"""Dense operator helpers on small n-qubit Hilbert spaces.

Qubit 0 is the most significant bit of a basis index, i.e. the state
|b0 b1 ... b_{n-1}> has index sum(b_q << (n-1-q)).  Spin-up is |0>
(sigma^z eigenvalue +1) and all spin operators use S = sigma/2.

Everything here is a pure function over immutable inputs; results can be
shared freely across threads.
"""

from __future__ import annotations

import numpy as np

MAX_QUBITS = 12  # dense 2^n matrices beyond this are refused

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": I2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


class DimensionError(ValueError):
    """Hilbert space too large for the dense backend."""


def check_n_qubits(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise DimensionError(f"dense backend supports 1..{MAX_QUBITS} qubits, got {n}")


def _shuffled_indices(order: list[int], n: int) -> np.ndarray:
    """Index map realizing a reordering of tensor factors.

    order[k] is the qubit that ends up at position k.  Returns idx such
    that idx[i] picks, for each basis state i in the reordered register,
    the corresponding state of the standard register.
    """
    idx = np.zeros(2**n, dtype=np.intp)
    for k, q in enumerate(order):
        bit = (np.arange(2**n) >> (n - 1 - k)) & 1
        idx += bit << (n - 1 - q)
    return idx


def embed(op: np.ndarray, qubits: tuple[int, ...] | list[int], n: int) -> np.ndarray:
    """Embed an operator acting on the given qubits into the full register."""
    check_n_qubits(n)
    k = len(qubits)
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not match {k} qubits")
    if len(set(qubits)) != k or any(not 0 <= q < n for q in qubits):
        raise ValueError(f"bad qubit indices {qubits} for register of {n}")
    rest = [q for q in range(n) if q not in qubits]
    big = np.kron(op, np.eye(2 ** (n - k), dtype=complex))
    idx = _shuffled_indices(list(qubits) + rest, n)
    out = np.zeros_like(big)
    out[np.ix_(idx, idx)] = big
    return out


def spin_operator(axis: str, qubit: int, n: int) -> np.ndarray:
    """S^axis on one spin (sigma/2 convention)."""
    return 0.5 * embed(PAULIS[axis.upper()], (qubit,), n)


def total_spin(axis: str, n: int) -> np.ndarray:
    return sum(spin_operator(axis, q, n) for q in range(n))


def pauli_string(label: str) -> np.ndarray:
    """Dense matrix for a Pauli string such as 'XiZ' ('i'/'I' = identity)."""
    mats = []
    for ch in label:
        if ch.upper() not in PAULIS and ch != "i":
            raise ValueError(f"unknown Pauli letter {ch!r} in {label!r}")
        mats.append(PAULIS[ch.upper() if ch != "i" else "I"])
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def basis_index(bits: str) -> int:
    if set(bits) - {"0", "1"}:
        raise ValueError(f"bitstring expected, got {bits!r}")
    return int(bits, 2)


def basis_state(bits: str) -> np.ndarray:
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[basis_index(bits)] = 1.0
    return psi


def basis_density(bits: str) -> np.ndarray:
    psi = basis_state(bits)
    return np.outer(psi, psi.conj())


def magnetization(bits: str) -> float:
    """Total S^z eigenvalue of a computational basis state."""
    return (len(bits) - 2 * bits.count("1")) / 2


def partial_trace(rho: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Trace out the given qubits, returning the state of the remainder."""
    t = rho.reshape([2] * (2 * n))
    for q in sorted(qubits, reverse=True):
        t = np.trace(t, axis1=q, axis2=t.ndim // 2 + q)
    return t.reshape(2 ** (n - len(qubits)), 2 ** (n - len(qubits)))


def replace_with_mixed(rho: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Replace the marginal on the given qubits by the maximally mixed state."""
    k = len(qubits)
    sigma = partial_trace(rho, qubits, n)
    big = np.kron(np.eye(2**k, dtype=complex) / 2**k, sigma)
    idx = _shuffled_indices(list(qubits) + [q for q in range(n) if q not in qubits], n)
    out = np.zeros_like(rho)
    out[np.ix_(idx, idx)] = big
    return out


def expectation(rho: np.ndarray, op: np.ndarray) -> float:
    return float(np.trace(op @ rho).real)


def is_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.linalg.norm(m - m.conj().T) <= tol * max(1.0, np.linalg.norm(m)))


def phase_aligned_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Operator-norm distance between u and v minimized over a global phase."""
    tr = np.trace(v.conj().T @ u)
    phase = tr / abs(tr) if abs(tr) > 1e-300 else 1.0
    return float(np.linalg.norm(u - phase * v, 2))


def hermitian_evolution(h: np.ndarray):
    """Return U(t) = exp(-i h t) as a callable, via one eigendecomposition."""
    w, v = np.linalg.eigh(h)

    def unitary(t: float) -> np.ndarray:
        return (v * np.exp(-1j * w * t)) @ v.conj().T

    return unitary
