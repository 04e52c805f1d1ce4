"""Molecules as spin-1/2 systems and their rotating-frame Hamiltonian terms.

Conventions used throughout the package:

* the static field B points along the laboratory x axis, the observable
  axis is z;
* chemical shifts are in ppm, scalar couplings J in Hz;
* spin operators are S = sigma/2;
* in the rotating frame each spin keeps an on-site X term with angular
  frequency -gamma*B*(delta_i - delta_ref)*1e-6 and each nonzero coupling
  contributes a Heisenberg term 2*pi*J_ij S_i.S_j.

All types are frozen dataclasses holding read-only arrays; they are safe
to share across threads.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

#: gyromagnetic ratio of the proton, rad s^-1 T^-1
PROTON_GYROMAGNETIC_RATIO = 2.6752218744e8


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MoleculeSpec:
    """Physics input: shifts, couplings, field and gyromagnetic ratio."""

    name: str
    shifts_ppm: np.ndarray
    couplings_hz: np.ndarray
    field_tesla: float
    gyromagnetic_ratio: float = PROTON_GYROMAGNETIC_RATIO

    def __post_init__(self):
        object.__setattr__(self, "shifts_ppm", _readonly(np.atleast_1d(self.shifts_ppm)))
        object.__setattr__(self, "couplings_hz", _readonly(np.atleast_2d(self.couplings_hz)))
        n = self.n_spins
        if n < 1:
            raise ValueError("need at least one spin")
        j = self.couplings_hz
        if j.shape != (n, n):
            raise ValueError(f"couplings matrix {j.shape} does not match {n} spins")
        if not np.array_equal(j, j.T):
            raise ValueError("couplings matrix must be symmetric")
        if np.any(np.diag(j) != 0.0):
            raise ValueError("couplings matrix must have zero diagonal")
        if not self.field_tesla > 0:
            raise ValueError("field_tesla must be positive")
        if not np.all(np.isfinite(self.shifts_ppm)):
            raise ValueError("shifts must be finite")

    @property
    def n_spins(self) -> int:
        return len(self.shifts_ppm)


@dataclass(frozen=True)
class FrameConfig:
    """Rotating-frame definition: carrier frequency and ppm reference.

    The frame removes the mean Larmor precession about x; what remains are
    the shift offsets relative to ``reference_ppm``.  ``larmor_hz`` is the
    carrier gamma*B/2pi and is what converts angular offsets back to ppm.
    """

    reference_ppm: float
    larmor_hz: float

    def __post_init__(self):
        if not (math.isfinite(self.reference_ppm) and math.isfinite(self.larmor_hz)):
            raise ValueError("frame parameters must be finite")

    def ppm_from_angular(self, omega_rad_s) -> np.ndarray:
        return self.reference_ppm + np.asarray(omega_rad_s) / (2e-6 * np.pi * self.larmor_hz)


@dataclass(frozen=True)
class HamiltonianTerms:
    """Partial-Hamiltonian list: on-site X terms plus Heisenberg pairs.

    onsite entries are (spin, angular frequency rad/s); pair entries are
    (i, j, angular coupling rad/s) with i < j.
    """

    n_spins: int
    onsite: tuple[tuple[int, float], ...]
    pairs: tuple[tuple[int, int, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        for i, w in self.onsite:
            if not 0 <= i < self.n_spins:
                raise ValueError(f"onsite index {i} out of range")
            if not math.isfinite(w):
                raise ValueError("onsite frequency must be finite")
        for i, j, a in self.pairs:
            if not (0 <= i < j < self.n_spins):
                raise ValueError(f"pair ({i},{j}) must satisfy 0 <= i < j < n_spins")
            if not math.isfinite(a):
                raise ValueError("pair coupling must be finite")


def larmor_frequency_hz(spec: MoleculeSpec) -> float:
    """Carrier frequency gamma*B/2pi in Hz."""
    return spec.gyromagnetic_ratio * spec.field_tesla / (2 * math.pi)


def mean_shift_reference(spec: MoleculeSpec) -> float:
    """Default frame center: arithmetic mean of the chemical shifts."""
    return float(np.mean(spec.shifts_ppm))


def frame_for(spec: MoleculeSpec, reference_ppm: float | None = None) -> FrameConfig:
    ref = mean_shift_reference(spec) if reference_ppm is None else float(reference_ppm)
    return FrameConfig(reference_ppm=ref, larmor_hz=larmor_frequency_hz(spec))


def build_rotating_frame_terms(spec: MoleculeSpec, frame: FrameConfig | None = None) -> HamiltonianTerms:
    """Rotating-frame partial Hamiltonians for a molecule.

    On-site terms carry -gamma*B*(delta_i - delta_ref)*1e-6; couplings with
    J_ij = 0 generate no term.
    """
    if frame is None:
        frame = frame_for(spec)
    gb = spec.gyromagnetic_ratio * spec.field_tesla
    onsite = tuple(
        (i, -gb * (spec.shifts_ppm[i] - frame.reference_ppm) * 1e-6)
        for i in range(spec.n_spins)
    )
    pairs = tuple(
        (i, j, 2 * math.pi * spec.couplings_hz[i, j])
        for i in range(spec.n_spins)
        for j in range(i + 1, spec.n_spins)
        if spec.couplings_hz[i, j] != 0.0
    )
    return HamiltonianTerms(n_spins=spec.n_spins, onsite=onsite, pairs=pairs)


def reduce_couplings(terms: HamiltonianTerms, threshold_rad_s: float) -> HamiltonianTerms:
    """Drop every pair whose |angular coupling| is below the threshold."""
    if threshold_rad_s < 0:
        raise ValueError("threshold must be >= 0")
    kept = tuple(p for p in terms.pairs if abs(p[2]) >= threshold_rad_s)
    removed = [p for p in terms.pairs if abs(p[2]) < threshold_rad_s]
    if removed:
        log.info(
            "dropping %d coupling(s) below %.6g rad/s: %s",
            len(removed), threshold_rad_s,
            ", ".join(f"({i},{j})={a:.6g}" for i, j, a in removed),
        )
    return HamiltonianTerms(n_spins=terms.n_spins, onsite=terms.onsite, pairs=kept)


# ---------------------------------------------------------------------------
# molecule file parsing

def parse_molecule(text: str) -> tuple[MoleculeSpec, float | None]:
    """Parse the molecule file format.

    Line-oriented key/value text; '#' starts a comment.  Required keys:
    ``name``, ``field_tesla``, ``shifts_ppm`` (N floats).  Couplings are
    given as upper-triangle lines ``coupling i j J_hz`` with 1-based
    indices and i < j; lower-triangle or duplicate entries are rejected.
    Optional keys: ``gyromagnetic_ratio``, ``reference_ppm``.

    Returns the molecule plus the optional frame reference in ppm.
    """
    name = None
    field_tesla = None
    shifts = None
    gamma = PROTON_GYROMAGNETIC_RATIO
    reference = None
    couplings: dict[tuple[int, int], float] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        try:
            if key == "name":
                name = " ".join(rest)
            elif key == "field_tesla":
                (field_tesla,) = map(float, rest)
            elif key == "shifts_ppm":
                shifts = [float(x) for x in rest]
            elif key == "gyromagnetic_ratio":
                (gamma,) = map(float, rest)
            elif key == "reference_ppm":
                (reference,) = map(float, rest)
            elif key == "coupling":
                i, j, val = int(rest[0]), int(rest[1]), float(rest[2])
                if i >= j:
                    raise ValueError(
                        f"coupling indices must be upper-triangle (i < j), got {i} {j}"
                    )
                if (i, j) in couplings:
                    raise ValueError(f"duplicate coupling ({i},{j})")
                couplings[(i, j)] = val
            else:
                raise ValueError(f"unknown key {key!r}")
        except (ValueError, IndexError) as exc:
            raise ValueError(f"molecule file line {lineno}: {exc}") from exc

    if name is None or field_tesla is None or shifts is None:
        raise ValueError("molecule file must define name, field_tesla and shifts_ppm")
    n = len(shifts)
    j = np.zeros((n, n))
    for (a, b), val in couplings.items():
        if not (1 <= a < b <= n):
            raise ValueError(f"coupling ({a},{b}) out of range for {n} spins")
        j[a - 1, b - 1] = j[b - 1, a - 1] = val
    spec = MoleculeSpec(
        name=name, shifts_ppm=np.array(shifts), couplings_hz=j,
        field_tesla=field_tesla, gyromagnetic_ratio=gamma,
    )
    return spec, reference


def load_molecule(path) -> tuple[MoleculeSpec, float | None]:
    with open(path, encoding="utf-8") as fh:
        return parse_molecule(fh.read())


# Reference molecules used throughout the tests and examples.

def cis_3_chloroacrylic_acid(field_tesla: float = 11.7) -> MoleculeSpec:
    """Two coupled vinyl protons; the carboxylic proton exchanges away."""
    j = np.zeros((2, 2))
    j[0, 1] = j[1, 0] = 7.92
    return MoleculeSpec(
        name="cis-3-chloroacrylic acid",
        shifts_ppm=np.array([6.375, 6.302]),
        couplings_hz=j,
        field_tesla=field_tesla,
    )


def trichlorobenzene(field_tesla: float = 11.7) -> MoleculeSpec:
    """1,2,4-trichlorobenzene: three protons with all-to-all couplings."""
    j = np.zeros((3, 3))
    j[0, 1] = j[1, 0] = 8.5
    j[0, 2] = j[2, 0] = 2.5
    j[1, 2] = j[2, 1] = 0.5
    return MoleculeSpec(
        name="1,2,4-trichlorobenzene",
        shifts_ppm=np.array([7.194, 7.377, 7.467]),
        couplings_hz=j,
        field_tesla=field_tesla,
    )
