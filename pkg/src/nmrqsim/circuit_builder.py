"""Native-gate Trotter circuits: synthesis, chain routing, gate accounting.

The gate set is the IBM-style {CNOT, X, sqrt(X), Rz}; Rz is virtual
(zero duration, no noise by default).  SWAPs inserted while routing on a
linear chain are emitted directly as 3 CNOTs so that gate counts match
what a device would execute.

Single-qubit rotations are compiled through the ZXZXZ identity

    U = Rz(alpha) . sqrt(X) . Rz(pi - beta) . sqrt(X) . Rz(gamma - pi)

(up to a global phase), where (alpha, beta, gamma) are the ZYZ Euler
angles of U.  The Heisenberg-exchange block exp(-i theta (XX+YY+ZZ)/4)
uses a three-CNOT realization with inner angles linear in theta.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .operators import PAULI_X, check_n_qubits, embed

GATE_KINDS = ("CNOT", "X", "SQRTX", "RZ", "SWAP")
VIRTUAL_KINDS = ("RZ",)  # zero duration, zero error by default

SQRTX_MATRIX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)
CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def rz_matrix(angle: float) -> np.ndarray:
    return np.array([[np.exp(-1j * angle / 2), 0], [0, np.exp(1j * angle / 2)]])


@dataclass(frozen=True)
class Gate:
    """One native operation on physical qubit indices.

    ``origin`` ties the gate back to the Hamiltonian term (or routing
    step) that produced it, for error-budget attribution.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    origin: str = ""

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        arity = 2 if self.kind in ("CNOT", "SWAP") else 1
        if len(self.qubits) != arity or len(set(self.qubits)) != arity:
            raise ValueError(f"{self.kind} needs {arity} distinct qubits, got {self.qubits}")
        if self.kind == "RZ":
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError("RZ needs a finite angle")
        elif self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")

    @property
    def is_virtual(self) -> bool:
        return self.kind in VIRTUAL_KINDS

    def matrix(self) -> np.ndarray:
        if self.kind == "CNOT":
            return CNOT_MATRIX
        if self.kind == "SWAP":
            return SWAP_MATRIX
        if self.kind == "X":
            return PAULI_X
        if self.kind == "SQRTX":
            return SQRTX_MATRIX
        return rz_matrix(self.angle)


@dataclass(frozen=True)
class Circuit:
    """Ordered native gates on a register plus the logical-to-physical layout.

    Trotter-step circuits built here always restore their layout, so the
    stored permutation holds both before and after the step and repeated
    application is well defined.
    """

    width: int
    gates: tuple[Gate, ...]
    logical_to_physical: tuple[int, ...] = ()

    def __post_init__(self):
        layout = self.logical_to_physical or tuple(range(self.width))
        object.__setattr__(self, "logical_to_physical", tuple(layout))
        if sorted(self.logical_to_physical) != list(range(self.width)):
            raise ValueError("logical_to_physical must be a permutation")
        for g in self.gates:
            if any(q >= self.width for q in g.qubits):
                raise ValueError(f"gate {g} exceeds circuit width {self.width}")


# ---------------------------------------------------------------------------
# single-qubit synthesis

def zyz_angles(u: np.ndarray) -> tuple[float, float, float]:
    """ZYZ Euler angles with U ~ Rz(alpha) Ry(beta) Rz(gamma) up to phase."""
    det = np.linalg.det(u)
    v = u / np.sqrt(det)
    beta = 2 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    if abs(v[0, 0]) < 1e-12:
        return 2 * np.angle(v[1, 0]), beta, 0.0
    if abs(v[1, 0]) < 1e-12:
        return -2 * np.angle(v[0, 0]), beta, 0.0
    summ = -2 * np.angle(v[0, 0])
    diff = 2 * np.angle(v[1, 0])
    return (summ + diff) / 2, beta, (summ - diff) / 2


def native_1q(alpha: float, beta: float, gamma: float, qubit: int, origin: str = "") -> list[Gate]:
    """ZXZXZ gate list for Rz(alpha) Ry(beta) Rz(gamma); zero Rz dropped."""
    seq = [
        ("RZ", gamma - math.pi),
        ("SQRTX", None),
        ("RZ", math.pi - beta),
        ("SQRTX", None),
        ("RZ", alpha),
    ]
    gates = []
    for kind, angle in seq:  # time order: first element acts first
        if kind == "RZ" and abs(angle) < 1e-15:
            continue
        gates.append(Gate(kind, (qubit,), angle=angle, origin=origin))
    return gates


def decompose_1q(u: np.ndarray, qubit: int, origin: str = "") -> list[Gate]:
    a, b, g = zyz_angles(u)
    return native_1q(a, b, g, qubit, origin)


def rx_native(theta: float, qubit: int, origin: str = "") -> list[Gate]:
    return native_1q(-math.pi / 2, theta, math.pi / 2, qubit, origin)


def ry_native(theta: float, qubit: int, origin: str = "") -> list[Gate]:
    return native_1q(0.0, theta, 0.0, qubit, origin)


# ---------------------------------------------------------------------------
# Heisenberg exchange block

def decompose_heisenberg(theta: float, q0: int, q1: int, origin: str = "") -> list[Gate]:
    """Three-CNOT block equal (up to phase) to exp(-i theta (XX+YY+ZZ)/4).

    Gate list in time order; single-qubit rotations are already expanded
    into the native Rz/sqrt(X) set.
    """
    if not math.isfinite(theta):
        raise ValueError("angle must be finite")
    gates: list[Gate] = [Gate("RZ", (q0,), angle=-math.pi / 2, origin=origin)]
    gates.append(Gate("CNOT", (q1, q0), origin=origin))
    gates += ry_native(theta / 2 - math.pi / 2, q1, origin)
    gates.append(Gate("CNOT", (q0, q1), origin=origin))
    gates.append(Gate("RZ", (q0,), angle=theta / 2 + math.pi / 2, origin=origin))
    gates += ry_native(math.pi / 2 - theta / 2, q1, origin)
    gates.append(Gate("CNOT", (q1, q0), origin=origin))
    gates.append(Gate("RZ", (q0,), angle=-math.pi, origin=origin))
    gates.append(Gate("RZ", (q1,), angle=-math.pi / 2, origin=origin))
    return gates


# ---------------------------------------------------------------------------
# routing on a linear chain

def _greedy_route_cost(pairs, layout: list[int]) -> int:
    """Number of SWAPs the greedy router would emit, including the restore."""
    lay = list(layout)  # lay[logical] = physical position
    swaps = 0
    for i, j, _ in pairs:
        while abs(lay[i] - lay[j]) > 1:
            hi = max(lay[i], lay[j])
            a = lay.index(hi)
            b = lay.index(hi - 1)
            lay[a], lay[b] = lay[b], lay[a]
            swaps += 1
    target = list(layout)
    while lay != target:
        for logical, phys in enumerate(lay):
            want = target[logical]
            if phys != want:
                step = phys - 1 if phys > want else phys + 1
                other = lay.index(step)
                lay[logical], lay[other] = lay[other], lay[logical]
                swaps += 1
                break
    return swaps


def _chain_embedding(terms, max_search: int = 8) -> tuple[int, ...]:
    """Initial placement on the chain minimizing greedy SWAP count."""
    from itertools import permutations

    n = terms.n_spins
    if n > max_search:
        return tuple(range(n))
    pairs = sorted(terms.pairs)
    best, best_cost = tuple(range(n)), None
    for perm in permutations(range(n)):
        cost = _greedy_route_cost(pairs, list(perm))
        if best_cost is None or cost < best_cost:
            best, best_cost = perm, cost
    return tuple(best)


def trotter_step(terms, tau: float, order: int = 2, topology: str = "all-to-all") -> Circuit:
    """One Trotter step exp(-i H tau) in native gates.

    order 1 applies on-site terms then pair terms once each; order 2
    sandwiches the pair blocks between half-angle on-site layers.  On a
    linear chain, non-adjacent pairs are routed with greedy SWAPs (each 3
    CNOTs) and the layout is restored at the end of the step so the same
    circuit can be applied repeatedly.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if topology not in ("all-to-all", "linear"):
        raise ValueError(f"unknown topology {topology!r}")

    n = terms.n_spins
    embedding = _chain_embedding(terms) if topology == "linear" else tuple(range(n))
    lay = list(embedding)  # lay[logical] = physical
    gates: list[Gate] = []

    def onsite_layer(scale: float):
        for i, w in terms.onsite:
            gates.extend(rx_native(w * tau * scale, lay[i], origin=f"onsite:{i}"))

    def swap_physical(pa: int, pb: int):
        origin = "route:swap"
        gates.append(Gate("CNOT", (pa, pb), origin=origin))
        gates.append(Gate("CNOT", (pb, pa), origin=origin))
        gates.append(Gate("CNOT", (pa, pb), origin=origin))
        la = lay.index(pa)
        lb = lay.index(pb)
        lay[la], lay[lb] = lay[lb], lay[la]

    def route_adjacent(i: int, j: int):
        while abs(lay[i] - lay[j]) > 1:
            hi = max(lay[i], lay[j])
            swap_physical(hi - 1, hi)

    def pair_layer(scale: float):
        for i, j, ang in sorted(terms.pairs):
            if topology == "linear":
                route_adjacent(i, j)
            gates.extend(
                decompose_heisenberg(ang * tau * scale, lay[i], lay[j], origin=f"pair:{i},{j}")
            )

    if order == 1:
        onsite_layer(1.0)
        pair_layer(1.0)
    else:
        onsite_layer(0.5)
        pair_layer(1.0)
        onsite_layer(0.5)

    # restore the embedding so repeated steps compose correctly
    while tuple(lay) != embedding:
        for logical in range(n):
            want = embedding[logical]
            if lay[logical] != want:
                step = lay[logical] - 1 if lay[logical] > want else lay[logical] + 1
                swap_physical(min(lay[logical], step), max(lay[logical], step))
                break

    return Circuit(width=n, gates=tuple(gates), logical_to_physical=embedding)


# ---------------------------------------------------------------------------
# verification and accounting

def permutation_matrix(layout: tuple[int, ...]) -> np.ndarray:
    """Unitary mapping logical basis states onto their physical positions."""
    n = len(layout)
    p = np.zeros((2**n, 2**n))
    for idx in range(2**n):
        phys = 0
        for logical in range(n):
            bit = (idx >> (n - 1 - logical)) & 1
            phys |= bit << (n - 1 - layout[logical])
        p[phys, idx] = 1.0
    return p


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of the circuit, expressed on the logical register."""
    check_n_qubits(circuit.width)
    dim = 2**circuit.width
    u = np.eye(dim, dtype=complex)
    for g in circuit.gates:
        u = embed(g.matrix(), g.qubits, circuit.width) @ u
    p = permutation_matrix(circuit.logical_to_physical)
    return p.conj().T @ u @ p


def gate_census(circuit: Circuit) -> tuple[Counter, dict[str, Counter]]:
    """Exact multiset of gate kinds, in total and per origin tag."""
    kinds: Counter = Counter()
    origins: dict[str, Counter] = {}
    for g in circuit.gates:
        kinds[g.kind] += 1
        origins.setdefault(g.origin, Counter())[g.kind] += 1
    return kinds, origins


def dump_circuit(circuit: Circuit) -> str:
    """Line-oriented text form, one gate per line, for golden-file tests."""
    lines = [f"# width {circuit.width}",
             f"# layout {' '.join(map(str, circuit.logical_to_physical))}"]
    for g in circuit.gates:
        parts = [g.kind, *map(str, g.qubits)]
        if g.angle is not None:
            parts.append(repr(g.angle))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    width = None
    layout: tuple[int, ...] | None = None
    gates = []
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("# width"):
            width = int(line.split()[-1])
            continue
        if line.startswith("# layout"):
            layout = tuple(int(x) for x in line.split()[2:])
            continue
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "RZ":
            gates.append(Gate(kind, (int(parts[1]),), angle=float(parts[2])))
        elif kind in ("CNOT", "SWAP"):
            gates.append(Gate(kind, (int(parts[1]), int(parts[2]))))
        else:
            gates.append(Gate(kind, (int(parts[1]),)))
    if width is None:
        width = 1 + max((max(g.qubits) for g in gates), default=0)
    return Circuit(width=width, gates=tuple(gates), logical_to_physical=layout or ())
