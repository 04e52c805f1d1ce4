"""Matplotlib rendering of spectra, correlation records and budgets.

Figures are written straight to files (Agg backend); the CLI drops them
next to the CSV outputs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .noisy_simulator import CorrelationRecord
from .spectrum_pipeline import Spectrum


def plot_spectrum(spectrum: Spectrum, path, title: str | None = None) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(spectrum.freq_ppm, spectrum.amplitude, lw=1.0, color="C0")
    ax.set_xlabel("chemical shift (ppm)")
    ax.set_ylabel("amplitude (arb.)")
    ax.invert_xaxis()  # NMR convention: shift decreases to the right
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_correlation(record: CorrelationRecord, path, title: str | None = None) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(record.times, record.cz, lw=1.0, label="$C_z(t)$")
    if np.any(record.cy != 0):
        ax.plot(record.times, record.cy, lw=1.0, label="$C_y(t)$")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("correlation")
    ax.legend(loc="upper right")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_budget(report: dict, couplings_hz: list[tuple[str, float]], path) -> None:
    """Couplings vs the resolvability limit set by the effective rate."""
    fig, ax = plt.subplots(figsize=(7, 4))
    labels = [name for name, _ in couplings_hz]
    values = [abs(j) for _, j in couplings_hz]
    ax.bar(labels, values, color="C0", label="|J| (Hz)")
    limit_hz = report["gamma_eff_per_s"] / (2 * np.pi)
    ax.axhline(limit_hz, color="C3", ls="--",
               label=r"$\Gamma_{\mathrm{eff}}/2\pi$")
    ax.set_ylabel("frequency (Hz)")
    ax.set_yscale("log")
    ax.legend()
    ax.set_title(f"{report['molecule']}: couplings vs effective decoherence rate")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
