"""Fourier decomposition of a sampled cyclical signal, reported in angular frequency."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Two-sided DFT coefficients ``a_k = X_k / N`` at angular frequencies ``omega_k``.

    With this normalisation ``x(t) = sum_k a_k exp(i omega_k t)`` on the sample
    grid, and a unit cosine shows ``|a| = 0.5`` at both ``+omega`` and ``-omega``.
    """

    frequencies: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        f = np.asarray(self.frequencies, dtype=float)
        a = np.asarray(self.amplitudes, dtype=complex)
        if f.shape != a.shape:
            raise ValueError("frequencies and amplitudes differ in length")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "amplitudes", a)

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __len__(self) -> int:
        return len(self.frequencies)

    def write_csv(self, path: str | Path) -> None:
        order = np.argsort(self.frequencies, kind="stable")
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["omega", "re", "im", "power"])
            for i in order:
                a = self.amplitudes[i]
                w.writerow([repr(float(self.frequencies[i])), repr(a.real), repr(a.imag), repr(float(abs(a) ** 2))])


def decompose(
    signal: Sequence[float],
    sample_spacing: float,
    window: Literal["hann"] | None = None,
) -> Spectrum:
    """DFT of ``signal`` sampled every ``sample_spacing`` units of t.

    ``window="hann"`` tapers the samples and rescales by the window mean so a
    cosine keeps its amplitude at the peak bin.
    """
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1 or len(x) < 2:
        raise ValueError("signal needs at least two samples")
    if not sample_spacing > 0:
        raise ValueError("sample_spacing must be positive")
    if window == "hann":
        w = np.hanning(len(x))
        x = x * w / w.mean()
    elif window is not None:
        raise ValueError(f"unknown window {window!r}")
    n = len(x)
    amps = np.fft.fft(x) / n
    omega = 2.0 * np.pi * np.fft.fftfreq(n, d=sample_spacing)
    return Spectrum(omega, amps)


def reconstruct(spectrum: Spectrum, t_grid: Sequence[float]) -> np.ndarray:
    """Real part of ``sum_k a_k exp(i omega_k t)`` on ``t_grid``."""
    t = np.asarray(t_grid, dtype=float)
    if len(spectrum) == 0:
        return np.zeros_like(t)
    return np.real(np.exp(1j * np.outer(t, spectrum.frequencies)) @ spectrum.amplitudes)


def top_peaks(spectrum: Spectrum, k: int, rtol: float = 1e-9) -> list[tuple[float, float]]:
    """The ``k`` strongest positive-frequency local maxima of ``|a|``.

    Returned as ``(omega, |a|)`` sorted by descending amplitude, ties toward
    lower omega.  Bins with amplitude below ``rtol`` times the largest
    amplitude (DC included) do not count as peaks, so a constant signal has
    none.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    f = spectrum.frequencies
    pos = f > 0
    # an unpaired negative bin is the Nyquist bin of an even-length transform
    mirror = (f < 0) & ~np.isin(np.round(-f, 9), np.round(f[pos], 9))
    idx = np.flatnonzero(pos | mirror)
    if k > idx.size:
        raise ValueError(f"k={k} exceeds the {idx.size} positive-frequency bins")
    order = np.argsort(np.abs(f[idx]), kind="stable")
    omega = np.abs(f[idx][order])
    mag = np.abs(spectrum.amplitudes[idx][order])

    floor = rtol * max(float(np.abs(spectrum.amplitudes).max()), np.finfo(float).tiny)
    left = np.concatenate(([0.0], mag[:-1]))
    right = np.concatenate((mag[1:], [0.0]))
    is_peak = (mag > floor) & (mag >= left) & (mag >= right)
    # amplitudes equal to 12 significant digits count as tied
    top = float(mag.max()) if mag.size else 1.0
    peaks = sorted(zip(omega[is_peak], mag[is_peak]), key=lambda p: (-round(p[1] / top, 12), p[0]))
    return [(float(w), float(a)) for w, a in peaks[:k]]


def keep_peaks(spectrum: Spectrum, peaks: Sequence[tuple[float, float]], atol: float = 1e-9) -> Spectrum:
    """Zero every bin except the listed peak frequencies and their mirrors."""
    keep = np.zeros(len(spectrum), dtype=bool)
    for w, _ in peaks:
        keep |= np.isclose(np.abs(spectrum.frequencies), w, atol=atol, rtol=0)
    return Spectrum(spectrum.frequencies, np.where(keep, spectrum.amplitudes, 0))
