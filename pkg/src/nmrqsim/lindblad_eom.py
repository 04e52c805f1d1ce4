"""Lindblad master equation over Pauli-string noise operators.

The generator is, with a Hermitian positive-semidefinite rate matrix
gamma_{ab} over noise operators O_a,

    rho' = -i[H, rho] + sum_ab gamma_ab (O_a rho O_b^+ - 1/2 {O_a O_b^+, rho})

(the anticommutator carries O_a O_b^+ in this order; for the diagonal
Pauli case this is the standard depolarizing/dephasing generator).

Two-time correlations come from the quantum regression theorem: evolve
B rho(0) under the same generator and trace against A, with rho(0) fixed
to the maximally mixed state and the result scaled by 2^N so that the
t = 0 value equals Tr{A B}.

Per-gate error budgets map onto rates through the fidelity bridge
epsilon = c(d) * t_gate * sum_i gamma_i with c(d) = 3d/(4(d+1)), and the
Trotter rescaling gamma_tilde * tau = gamma * t_gate; the optional
simplified prefactor c = 1/2 reproduces sum(eps) = tau/2 * sum(gamma_tilde)
exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import operators as ops
from .noise_budget import ErrorBudget


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian, Pauli-string noise operators and their rate matrix."""

    hamiltonian: np.ndarray
    op_labels: tuple[str, ...]
    gamma: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.hamiltonian, dtype=complex)
        g = np.atleast_2d(np.asarray(self.gamma, dtype=complex))
        if g.shape != (len(self.op_labels), len(self.op_labels)):
            raise ValueError("gamma matrix shape does not match operator count")
        if np.linalg.norm(g - g.conj().T) > 1e-12 * max(1.0, np.linalg.norm(g)):
            raise ValueError("gamma matrix must be Hermitian")
        if len(self.op_labels) and np.linalg.eigvalsh(g).min() < -1e-10:
            raise ValueError("gamma matrix must be positive semidefinite")
        dim = h.shape[0]
        for label in self.op_labels:
            if 2 ** len(label) != dim:
                raise ValueError(f"operator label {label!r} does not match dimension {dim}")
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "gamma", g)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def noise_operators(self) -> list[np.ndarray]:
        return [ops.pauli_string(label) for label in self.op_labels]


@dataclass(frozen=True)
class EomEstimate:
    """Fitted envelope decay of a correlation function, with context."""

    decay_rate: float
    residual: float
    gamma_eff_reference: float

    def __post_init__(self):
        if self.decay_rate < 0:
            raise ValueError("decay rate must be >= 0")


def master_rhs(rho: np.ndarray, model: LindbladModel) -> np.ndarray:
    """Right-hand side of the master equation for one state."""
    if rho.shape != model.hamiltonian.shape:
        raise ValueError("state dimension does not match the model")
    h = model.hamiltonian
    out = -1j * (h @ rho - rho @ h)
    ops_list = model.noise_operators()
    for a, oa in enumerate(ops_list):
        for b, ob in enumerate(ops_list):
            g = model.gamma[a, b]
            if g == 0:
                continue
            obd = ob.conj().T
            oo = oa @ obd
            out = out + g * (oa @ rho @ obd - 0.5 * (oo @ rho + rho @ oo))
    return out


def liouvillian_matrix(model: LindbladModel) -> np.ndarray:
    """Dense superoperator L with vec(rho') = L vec(rho) (row-major vec)."""
    d = model.dim
    ident = np.eye(d, dtype=complex)
    h = model.hamiltonian
    # vec(A X B) = (A kron B^T) vec(X) for row-major vec
    lio = -1j * (np.kron(h, ident) - np.kron(ident, h.T))
    ops_list = model.noise_operators()
    for a, oa in enumerate(ops_list):
        for b, ob in enumerate(ops_list):
            g = model.gamma[a, b]
            if g == 0:
                continue
            obd = ob.conj().T
            oo = oa @ obd
            lio = lio + g * (
                np.kron(oa, obd.T)
                - 0.5 * (np.kron(oo, ident) + np.kron(ident, oo.T))
            )
    return lio


def integrate(
    model: LindbladModel,
    rho0: np.ndarray,
    t_grid: np.ndarray,
    tol: float = 1e-8,
) -> list[np.ndarray]:
    """Fixed-step RK4 trajectory on the given time grid.

    The internal step is refined (halved) until the final state moves by
    less than ``tol`` in trace distance, so results are step-converged.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) == 0 or np.any(np.diff(t_grid) < 0):
        raise ValueError("time grid must be non-empty and ascending")
    lio = liouvillian_matrix(model)
    scale = max(np.linalg.norm(lio, np.inf), 1e-30)

    def run(substep: float) -> list[np.ndarray]:
        vec = np.asarray(rho0, dtype=complex).reshape(-1).copy()
        out = []
        t_now = t_grid[0]
        out.append(vec.copy())
        for t_next in t_grid[1:]:
            span = t_next - t_now
            n_sub = max(1, int(math.ceil(span / substep)))
            h = span / n_sub
            for _ in range(n_sub):
                k1 = lio @ vec
                k2 = lio @ (vec + 0.5 * h * k1)
                k3 = lio @ (vec + 0.5 * h * k2)
                k4 = lio @ (vec + h * k3)
                vec = vec + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            t_now = t_next
            out.append(vec.copy())
        return out

    d = model.dim
    substep = 0.1 / scale
    traj = run(substep)
    for _ in range(12):
        finer = run(substep / 2)
        diff = (traj[-1] - finer[-1]).reshape(d, d)
        delta = 0.5 * np.linalg.svd(diff, compute_uv=False).sum()
        traj = finer
        substep /= 2
        if delta < tol:
            break
    else:
        raise RuntimeError("RK4 refinement did not converge")
    return [v.reshape(d, d) for v in traj]


def regression_correlation(
    model: LindbladModel,
    a_op: np.ndarray,
    b_op: np.ndarray,
    t_grid: np.ndarray,
) -> np.ndarray:
    """<A(t) B(0)> with rho(0) = I/2^N, scaled so t=0 gives Tr{A B}."""
    d = model.dim
    if a_op.shape != (d, d) or b_op.shape != (d, d):
        raise ValueError("operator dimensions do not match the model")
    x0 = b_op / d
    traj = integrate(model, x0, t_grid)
    return np.array([d * np.trace(a_op @ x) for x in traj])


# ---------------------------------------------------------------------------
# budget bridge and envelope fitting

def error_rate_prefactor(n_qubits: int, simplified: bool = False) -> float:
    """c(d) in epsilon = c(d) * t_gate * sum_i gamma_i, d = 2^n."""
    if simplified:
        return 0.5
    d = 2**n_qubits
    return 3 * d / (4 * (d + 1))


def rates_from_budget(budget: ErrorBudget, prefactor: str = "matched") -> np.ndarray:
    """Per-qubit depolarizing semigroup rates on the Trotter clock.

    The returned rate gamma is the decay of single-spin Pauli
    expectations, <sigma_i^a>' = -gamma_i <sigma_i^a>.  Two bridges:

    * ``matched`` (default): gamma*tau = -ln(1 - eps/n) per touched qubit
      per gate, so continuous evolution over one Trotter step reproduces
      the discrete per-gate channel exactly (the gate-time rescaling
      gamma_tilde*tau = gamma*t_gate applied to the implemented channel).
    * ``simplified``: gamma*tau = 2*eps/n, the one-half-prefactor
      fidelity bridge; it makes sum(eps) = tau/2 * sum(gamma) an identity.
    """
    if prefactor not in ("matched", "simplified"):
        raise ValueError(f"unknown prefactor convention {prefactor!r}")
    rates = np.zeros(budget.n_spins)
    for e in budget.entries:
        k = len(e.qubits)
        if prefactor == "matched":
            per_qubit = -math.log(1.0 - e.epsilon / k) / budget.tau
        else:
            per_qubit = 2.0 * e.epsilon / (k * budget.tau)
        for q in e.qubits:
            rates[q] += per_qubit
    return rates


def model_from_budget(
    budget: ErrorBudget,
    hamiltonian: np.ndarray,
    prefactor: str = "matched",
) -> LindbladModel:
    """Depolarizing Lindblad model equivalent to a per-gate budget.

    Per-qubit semigroup rates become diagonal rates gamma/4 on each of
    the X, Y, Z jump operators of that qubit.
    """
    n = budget.n_spins
    rates = rates_from_budget(budget, prefactor)
    labels = []
    diag = []
    for q in range(n):
        for axis in "XYZ":
            labels.append("".join(axis if k == q else "i" for k in range(n)))
            diag.append(rates[q] / 4.0)
    return LindbladModel(
        hamiltonian=hamiltonian, op_labels=tuple(labels), gamma=np.diag(diag)
    )


def fit_envelope_rate(times: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """Exponential envelope rate of an oscillatory series.

    Log-linear least squares on the local maxima of |values|; returns
    (rate >= 0, rms residual of the log fit).  A non-decaying series
    yields rate 0 with an infinite residual flag.
    """
    times = np.asarray(times, dtype=float)
    mags = np.abs(np.asarray(values, dtype=float))
    peaks = [
        k
        for k in range(1, len(mags) - 1)
        if mags[k] >= mags[k - 1] and mags[k] >= mags[k + 1] and mags[k] > 0
    ]
    if mags[0] >= (mags[1] if len(mags) > 1 else 0):
        peaks = [0] + peaks
    if len(peaks) < 3:
        peaks = [k for k in range(len(mags)) if mags[k] > 0]
    if len(peaks) < 2:
        return 0.0, float("inf")
    t = times[peaks]
    y = np.log(mags[peaks])
    coeffs, res = np.polyfit(t, y, 1, full=True)[:2]
    slope = coeffs[0]
    rms = float(np.sqrt(res[0] / len(t))) if len(res) else 0.0
    if slope >= 0:
        return 0.0, float("inf")
    return float(-slope), rms


def broadening_estimate(
    model: LindbladModel,
    a_op: np.ndarray,
    b_op: np.ndarray,
    t_grid: np.ndarray,
    gamma_eff_reference: float,
) -> EomEstimate:
    """Fit the decay of <A(t)B> under the model and report it vs gamma_eff."""
    series = regression_correlation(model, a_op, b_op, t_grid).real
    rate, residual = fit_envelope_rate(np.asarray(t_grid), series)
    return EomEstimate(
        decay_rate=rate, residual=residual, gamma_eff_reference=gamma_eff_reference
    )


# ---------------------------------------------------------------------------
# gamma-matrix file

def parse_gamma_matrix(text: str) -> tuple[tuple[str, ...], np.ndarray]:
    """Parse the rate-matrix file: explicit units line, operator labels,
    then one matrix row per line (entries real or python complex).

    Example::

        units s^-1
        ops Xi iX Yi iY
        0.5 0 0 0
        0 0.5 0 0
        0 0 0.5 0
        0 0 0 0.5
    """
    labels: tuple[str, ...] | None = None
    units_seen = False
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("units"):
            unit = line.split(None, 1)[1].strip()
            if unit not in ("s^-1", "1/s", "s-1"):
                raise ValueError(f"line {lineno}: rates must be given in s^-1, got {unit!r}")
            units_seen = True
        elif line.startswith("ops"):
            labels = tuple(line.split()[1:])
        else:
            try:
                rows.append([complex(x) for x in line.split()])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from exc
    if not units_seen:
        raise ValueError("gamma-matrix file must declare 'units s^-1'")
    if labels is None:
        raise ValueError("gamma-matrix file must list operator labels with 'ops'")
    gamma = np.array(rows, dtype=complex)
    if gamma.shape != (len(labels), len(labels)):
        raise ValueError(
            f"rate matrix is {gamma.shape}, expected square of size {len(labels)}"
        )
    return labels, gamma


def load_gamma_matrix(path) -> tuple[tuple[str, ...], np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        return parse_gamma_matrix(fh.read())
