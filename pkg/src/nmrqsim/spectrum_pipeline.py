"""Correlation records to spectra: zero padding, windowed DFT, ppm axis.

The transform is the one-sided plain Riemann sum over the sampled window

    A(w_k) = Re sum_j e^{-i w_k t_j - Gamma t_j} C_z(t_j) * tau
           - Im sum_j e^{-i w_k t_j - Gamma t_j} C_y(t_j) * tau

evaluated on the Nyquist grid w_k in [-pi/tau, pi/tau) with spacing
2*pi/(L*tau), L the padded length.  ``symmetrize`` drops the C_y term
entirely, which makes the spectrum exactly mirror symmetric about the
frame center whenever C_z is real.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .noisy_simulator import CorrelationRecord
from .spin_system import FrameConfig


@dataclass(frozen=True)
class Spectrum:
    freq_rad_s: np.ndarray
    freq_ppm: np.ndarray
    amplitude: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.freq_rad_s, dtype=float)
        p = np.asarray(self.freq_ppm, dtype=float)
        a = np.asarray(self.amplitude, dtype=float)
        if not len(w) == len(p) == len(a):
            raise ValueError("frequency grids and amplitude must share a length")
        if np.any(np.diff(w) <= 0) or np.any(np.diff(p) <= 0):
            raise ValueError("frequency grids must be strictly ascending")
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitude must be finite")
        for arr in (w, p, a):
            arr.setflags(write=False)
        object.__setattr__(self, "freq_rad_s", w)
        object.__setattr__(self, "freq_ppm", p)
        object.__setattr__(self, "amplitude", a)


def default_padded_length(n: int) -> int:
    """Next power of two at least 8x the record length."""
    target = 8 * n
    length = 1
    while length < target:
        length *= 2
    return length


def zero_pad(record: CorrelationRecord, target_length: int) -> CorrelationRecord:
    """Extend the record with exact zeros on the same tau grid."""
    n = len(record.times)
    if target_length < n:
        raise ValueError(f"cannot shrink record from {n} to {target_length}")
    if target_length == n:
        return record
    tau = record.tau
    times = np.arange(target_length) * tau + record.times[0]
    cz = np.concatenate([record.cz, np.zeros(target_length - n)])
    cy = np.concatenate([record.cy, np.zeros(target_length - n)])
    return CorrelationRecord(times=times, cz=cz, cy=cy, per_sector=record.per_sector)


def spectrum_from_record(
    record: CorrelationRecord,
    gamma_window: float,
    frame: FrameConfig,
    symmetrize: bool = False,
    pad_to: int | None = None,
    extra_metadata: dict | None = None,
) -> Spectrum:
    """Windowed one-sided DFT of a correlation record."""
    if gamma_window < 0:
        raise ValueError("gamma_window must be >= 0")
    n_data = len(record.times)
    if pad_to is not None:
        record = zero_pad(record, pad_to)
    tau = record.tau
    t = record.times
    damp = np.exp(-gamma_window * t)
    fz = np.fft.fft(record.cz * damp)
    amplitude = fz.real * tau
    if not symmetrize:
        fy = np.fft.fft(record.cy * damp)
        amplitude = amplitude - fy.imag * tau
    length = len(t)
    freqs = 2 * np.pi * np.fft.fftfreq(length, d=tau)
    order = np.argsort(freqs, kind="stable")
    freqs = freqs[order]
    amplitude = amplitude[order]
    meta = {
        "tau": tau,
        "n_samples": n_data,
        "padded_length": length,
        "gamma_window": gamma_window,
        "symmetrized": bool(symmetrize),
        "reference_ppm": frame.reference_ppm,
        "larmor_hz": frame.larmor_hz,
    }
    meta.update(extra_metadata or {})
    return Spectrum(
        freq_rad_s=freqs,
        freq_ppm=frame.ppm_from_angular(freqs),
        amplitude=amplitude,
        metadata=meta,
    )


def mirror_asymmetry(spectrum: Spectrum) -> float:
    """Max |A(+w_k) - A(-w_k)| over bins mirrored about the frame center."""
    a = spectrum.amplitude
    length = len(a)
    half = length // 2  # index of w = 0 after the ascending sort
    worst = 0.0
    for k in range(1, half):
        worst = max(worst, abs(a[half + k] - a[half - k]))
    return worst


def write_spectrum_csv(spectrum: Spectrum, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("ppm,rad_s,amplitude\n")
        for p, w, a in zip(spectrum.freq_ppm, spectrum.freq_rad_s, spectrum.amplitude):
            fh.write(f"{p!r},{w!r},{a!r}\n")


def write_spectrum_metadata(spectrum: Spectrum, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spectrum.metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_plot_text(spectrum: Spectrum, path) -> None:
    """Two-column (ppm, amplitude) text for external plotting tools."""
    with open(path, "w", encoding="utf-8") as fh:
        for p, a in zip(spectrum.freq_ppm, spectrum.amplitude):
            fh.write(f"{p!r} {a!r}\n")
