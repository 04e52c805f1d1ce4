"""Density-matrix circuit simulation with per-gate depolarizing noise.

Noise is applied as a discrete channel after each physical gate: first
the gate unitary, then optional coherent-error rotations, then local
depolarizing on each qubit the gate touched.  Virtual Rz gates carry no
noise.

A gate's reported error probability epsilon is interpreted literally as
the probability of a noise event on that gate, split evenly over its
qubits: each touched qubit receives a local depolarizing channel of
strength p = epsilon / n_qubits.  The alternative average-gate-infidelity
calibration (``depolarizing_probability``; p = eps*d/(d-1) for the
d-dimensional channel) is provided as the documented bridge between
channel strength and the fidelities quoted by hardware providers.

Sector runs are independent jobs with no shared mutable state; shot-mode
RNG streams derive from (seed, sector index) so results do not depend on
scheduling order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import operators as ops
from .circuit_builder import (
    GATE_KINDS,
    Circuit,
    Gate,
    circuit_unitary,
    permutation_matrix,
    rz_matrix,
)

#: Coherent-error angles in the style of IBM-device emulation: a small
#: Rz(phi_z) after every physical gate, and after each CNOT an extra
#: Rx on control and target plus an Rz on the control.
DEFAULT_COHERENT_1Q_Z = -0.027
DEFAULT_COHERENT_2Q = (0.05, -0.047, -0.05)  # (rx control, rx target, rz control)


@dataclass(frozen=True)
class NoiseModel:
    """Per-gate error probabilities, durations and coherent-error angles."""

    per_gate_error: dict = field(default_factory=dict)
    per_gate_time: dict = field(default_factory=dict)
    coherent_z_after_gate: float | None = None
    coherent_after_cnot: tuple[float, float, float] | None = None
    seed: int = 0

    def __post_init__(self):
        for kind, eps in self.per_gate_error.items():
            if not 0.0 <= eps < 1.0:
                raise ValueError(f"error probability for {kind} out of [0,1): {eps}")
        angles = list(self.coherent_after_cnot or ())
        if self.coherent_z_after_gate is not None:
            angles.append(self.coherent_z_after_gate)
        if not all(math.isfinite(a) for a in angles):
            raise ValueError("coherent-error angles must be finite")

    def error_for(self, gate: Gate) -> float:
        if gate.is_virtual:
            return 0.0
        return float(self.per_gate_error.get(gate.kind, 0.0))

    @property
    def is_noiseless(self) -> bool:
        return (
            all(e == 0.0 for e in self.per_gate_error.values())
            and self.coherent_z_after_gate is None
            and self.coherent_after_cnot is None
        )

    @classmethod
    def noiseless(cls) -> "NoiseModel":
        return cls()

    @classmethod
    def from_file(cls, path) -> "NoiseModel":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

    @classmethod
    def loads(cls, text: str) -> "NoiseModel":
        """Parse the noise-model / calibration file format.

        Lines: ``gate KIND ARITY EPSILON [T_GATE]``, optional
        ``coherent_1q_z PHI``, ``coherent_2q PHI_XC PHI_XT PHI_ZC`` and
        ``seed N``; '#' starts a comment.
        """
        errors: dict = {}
        times: dict = {}
        z1q = None
        c2q = None
        seed = 0
        seen = False
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            seen = True
            key, *rest = line.split()
            try:
                if key == "gate":
                    kind = rest[0].upper()
                    if kind not in GATE_KINDS:
                        raise ValueError(f"unknown gate kind {kind!r}")
                    arity = int(rest[1])
                    expected = 2 if kind in ("CNOT", "SWAP") else 1
                    if arity != expected:
                        raise ValueError(f"{kind} has arity {expected}, file says {arity}")
                    errors[kind] = float(rest[2])
                    if len(rest) > 3:
                        times[kind] = float(rest[3])
                elif key == "coherent_1q_z":
                    (z1q,) = map(float, rest)
                elif key == "coherent_2q":
                    c2q = tuple(map(float, rest))
                    if len(c2q) != 3:
                        raise ValueError("coherent_2q needs three angles")
                elif key == "seed":
                    seed = int(rest[0])
                else:
                    raise ValueError(f"unknown key {key!r}")
            except (ValueError, IndexError) as exc:
                raise ValueError(f"noise model line {lineno}: {exc}") from exc
        if not seen:
            raise ValueError("noise model file is empty")
        return cls(
            per_gate_error=errors, per_gate_time=times,
            coherent_z_after_gate=z1q, coherent_after_cnot=c2q, seed=seed,
        )


@dataclass(frozen=True)
class CorrelationRecord:
    """Time series of the z/y total-spin correlation functions."""

    times: np.ndarray
    cz: np.ndarray
    cy: np.ndarray
    per_sector: dict | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        cz = np.asarray(self.cz, dtype=float)
        cy = np.asarray(self.cy, dtype=float)
        if not len(t) == len(cz) == len(cy):
            raise ValueError("times, cz, cy must have equal lengths")
        if len(t) == 0:
            raise ValueError("empty record")
        if cz[0] <= 0:
            raise ValueError("cz[0] must be positive")
        for a in (t, cz, cy):
            a.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "cz", cz)
        object.__setattr__(self, "cy", cy)

    @property
    def tau(self) -> float:
        if len(self.times) < 2:
            raise ValueError("record too short to define a time step")
        dt = np.diff(self.times)
        if not np.allclose(dt, dt[0], rtol=1e-9, atol=1e-15):
            raise ValueError("record is not on a uniform time grid")
        return float(dt[0])


def write_correlation_csv(record: CorrelationRecord, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,cz,cy\n")
        for t, z, y in zip(record.times, record.cz, record.cy):
            fh.write(f"{t!r},{z!r},{y!r}\n")


# ---------------------------------------------------------------------------
# channel calibration

def depolarizing_probability(epsilon: float, n_qubits: int) -> float:
    """Strength p of the d-dimensional depolarizing channel with average
    gate infidelity exactly epsilon: p = epsilon * d / (d - 1), d = 2^n."""
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("epsilon must be in [0,1)")
    d = 2**n_qubits
    p = epsilon * d / (d - 1)
    if p > 1.0:
        raise ValueError(f"epsilon {epsilon} exceeds the depolarizing limit {(d-1)/d}")
    return p


def per_qubit_error_probability(epsilon: float, n_qubits: int) -> float:
    """Local depolarizing strength on each qubit of a noisy gate: eps/n.

    The gate errs with probability epsilon, attributed evenly to its
    qubits as local depolarizing events.
    """
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("epsilon must be in [0,1)")
    if n_qubits not in (1, 2):
        raise ValueError("only 1- and 2-qubit gates carry noise")
    return epsilon / n_qubits


def depolarize(rho: np.ndarray, qubits: tuple[int, ...], p: float, n: int) -> np.ndarray:
    """d-dimensional depolarizing channel on a subset of qubits."""
    if p == 0.0:
        return rho
    return (1.0 - p) * rho + p * ops.replace_with_mixed(rho, qubits, n)


def gate_noise_map(gate: Gate, model: NoiseModel, n: int):
    """List of (channel) callables applied after the gate unitary."""
    steps = []
    if gate.is_virtual:
        return steps
    if model.coherent_after_cnot is not None and gate.kind == "CNOT":
        phi_xc, phi_xt, phi_zc = model.coherent_after_cnot
        rx = lambda a: np.cos(a / 2) * ops.I2 - 1j * np.sin(a / 2) * ops.PAULI_X
        ctrl, tgt = gate.qubits
        for u, q in ((rx(phi_xc), ctrl), (rx(phi_xt), tgt), (rz_matrix(phi_zc), ctrl)):
            full = ops.embed(u, (q,), n)
            steps.append(lambda r, u=full: u @ r @ u.conj().T)
    if model.coherent_z_after_gate is not None:
        for q in gate.qubits:
            full = ops.embed(rz_matrix(model.coherent_z_after_gate), (q,), n)
            steps.append(lambda r, u=full: u @ r @ u.conj().T)
    eps = model.error_for(gate)
    if eps > 0.0:
        p = per_qubit_error_probability(eps, len(gate.qubits))
        for q in gate.qubits:
            steps.append(lambda r, q=q, p=p: depolarize(r, (q,), p, n))
    return steps


def apply_gate_with_noise(rho: np.ndarray, gate: Gate, model: NoiseModel, n: int) -> np.ndarray:
    """rho -> U rho U^dagger, then coherent errors, then depolarizing."""
    u = ops.embed(gate.matrix(), gate.qubits, n)
    rho = u @ rho @ u.conj().T
    for step in gate_noise_map(gate, model, n):
        rho = step(rho)
    return rho


# ---------------------------------------------------------------------------
# sector simulation

def positive_sectors(n_spins: int) -> list[str]:
    """Computational basis states with positive total magnetization."""
    out = []
    for idx in range(2**n_spins):
        bits = format(idx, f"0{n_spins}b")
        if ops.magnetization(bits) > 0:
            out.append(bits)
    return out


class _CompiledStep:
    """Pre-embedded unitaries and channels for one step circuit."""

    def __init__(self, circuit: Circuit, model: NoiseModel):
        n = circuit.width
        ops.check_n_qubits(n)
        self.ops = []
        for g in circuit.gates:
            u = ops.embed(g.matrix(), g.qubits, n)
            self.ops.append((u, gate_noise_map(g, model, n)))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        for u, noise in self.ops:
            rho = u @ rho @ u.conj().T
            for step in noise:
                rho = step(rho)
        return rho


def _physical_bits(bits: str, layout: tuple[int, ...]) -> str:
    phys = ["0"] * len(bits)
    for logical, b in enumerate(bits):
        phys[layout[logical]] = b
    return "".join(phys)


def _y_readout_gates(n: int) -> list[Gate]:
    # H . S^dagger per qubit (maps sigma^y onto sigma^z), up to phase
    gates = []
    for q in range(n):
        gates.append(Gate("SQRTX", (q,), origin="readout:y"))
        gates.append(Gate("RZ", (q,), angle=math.pi / 2, origin="readout:y"))
    return gates


def run_sector(
    circuit_step: Circuit,
    n_steps: int,
    initial_basis_state: str,
    model: NoiseModel | None = None,
    shots: int | None = None,
    sector_index: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Evolve one initial basis state and record total-spin expectations.

    Returns (sz, sy) arrays of length n_steps + 1 (step 0 included).  In
    expectation mode the values are exact traces against the density
    matrix; with ``shots`` set, measurement outcomes are sampled instead,
    and the y readout prepends basis-rotation gates that are themselves
    noisy.
    """
    model = model or NoiseModel.noiseless()
    n = circuit_step.width
    if len(initial_basis_state) != n:
        raise ValueError("initial state length does not match circuit width")
    if ops.magnetization(initial_basis_state) <= 0:
        raise ValueError(f"initial magnetization of {initial_basis_state!r} is not positive")

    sz_op = ops.total_spin("z", n)
    sy_op = ops.total_spin("y", n)
    phys_bits = _physical_bits(initial_basis_state, circuit_step.logical_to_physical)

    sz = np.empty(n_steps + 1)
    sy = np.empty(n_steps + 1)

    if model.is_noiseless and shots is None:
        u_step = circuit_unitary(circuit_step)
        p = permutation_matrix(circuit_step.logical_to_physical)
        u_step = p @ u_step @ p.conj().T  # physical-basis step unitary
        psi = ops.basis_state(phys_bits)
        for k in range(n_steps + 1):
            sz[k] = np.vdot(psi, sz_op @ psi).real
            sy[k] = np.vdot(psi, sy_op @ psi).real
            if k < n_steps:
                psi = u_step @ psi
        return sz, sy

    compiled = _CompiledStep(circuit_step, model)
    rho = ops.basis_density(phys_bits)
    rng = np.random.default_rng([model.seed, sector_index]) if shots else None
    y_rot = None
    if shots is not None:
        y_rot = _CompiledStep(Circuit(width=n, gates=tuple(_y_readout_gates(n))), model)
    mags = np.array([ops.magnetization(format(i, f"0{n}b")) for i in range(2**n)])

    for k in range(n_steps + 1):
        if shots is None:
            sz[k] = ops.expectation(rho, sz_op)
            sy[k] = ops.expectation(rho, sy_op)
        else:
            pz = np.clip(np.diag(rho).real, 0, None)
            pz = pz / pz.sum()
            sz[k] = mags[rng.choice(len(mags), size=shots, p=pz)].mean()
            rho_y = y_rot.apply(rho)
            py = np.clip(np.diag(rho_y).real, 0, None)
            py = py / py.sum()
            sy[k] = mags[rng.choice(len(mags), size=shots, p=py)].mean()
        if k < n_steps:
            rho = compiled.apply(rho)
    return sz, sy


def run_all_sectors(
    circuit_step: Circuit,
    n_steps: int,
    tau: float,
    model: NoiseModel | None = None,
    shots: int | None = None,
) -> CorrelationRecord:
    """Run every positive-magnetization sector and assemble the record."""
    series = {}
    for idx, bits in enumerate(positive_sectors(circuit_step.width)):
        series[bits] = run_sector(circuit_step, n_steps, bits, model, shots, sector_index=idx)
    times = np.arange(n_steps + 1) * tau
    return assemble_correlations(series, times)


def assemble_correlations(sector_series: dict, times: np.ndarray) -> CorrelationRecord:
    """C_{z/y}(t) = 2 sum over positive-m sectors of m0 <S_{z/y}>(t)."""
    if not sector_series:
        raise ValueError("no sector series given")
    n = len(next(iter(sector_series)))
    expected = set(positive_sectors(n))
    missing = expected - set(sector_series)
    if missing:
        raise ValueError(f"missing sectors: {sorted(missing)}")
    times = np.asarray(times, dtype=float)
    cz = np.zeros_like(times)
    cy = np.zeros_like(times)
    for bits, (sz, sy) in sector_series.items():
        m0 = ops.magnetization(bits)
        if m0 <= 0:
            raise ValueError(f"sector {bits!r} does not have positive magnetization")
        cz = cz + 2.0 * m0 * np.asarray(sz)
        cy = cy + 2.0 * m0 * np.asarray(sy)
    per_sector = {bits: (np.asarray(sz), np.asarray(sy)) for bits, (sz, sy) in sector_series.items()}
    return CorrelationRecord(times=times, cz=cz, cy=cy, per_sector=per_sector)
