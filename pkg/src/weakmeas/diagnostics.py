"""Chain diagnostics and histogram comparisons."""
from __future__ import annotations

import numpy as np


def autocorrelation(x) -> np.ndarray:
    """Normalized autocorrelation function via FFT."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 2:
        return np.ones(n)
    f = np.fft.rfft(x - x.mean(), n=2 * n)
    acf = np.fft.irfft(f * np.conj(f))[:n]
    if acf[0] == 0:
        return np.ones(n)
    return acf / acf[0]


def integrated_autocorr_time(x, c: float = 5.0) -> float:
    """Integrated autocorrelation time with Sokal's adaptive window."""
    rho = autocorrelation(x)
    if len(rho) < 2:
        return 1.0
    taus = 2.0 * np.cumsum(rho) - 1.0
    window = np.arange(len(taus)) < c * taus
    m = int(np.argmin(window)) if not window.all() else len(taus) - 1
    return float(max(taus[m], 1.0))


def effective_sample_size(x) -> float:
    x = np.asarray(x)
    return len(x) / integrated_autocorr_time(x) if len(x) else 0.0


def histogram_probabilities(samples, edges) -> tuple[np.ndarray, float]:
    """Per-bin fractions of ``samples`` and the fraction falling outside ``edges``."""
    samples = np.asarray(samples, dtype=float)
    counts, _ = np.histogram(samples, bins=edges)
    n = len(samples)
    if n == 0:
        return np.zeros(len(edges) - 1), 0.0
    p = counts / n
    return p, float(1.0 - p.sum())


def total_variation(samples, mixture, edges) -> float:
    """TV distance between the binned sample and the binned mixture law.

    Mass outside ``edges`` is treated as one extra bin on both sides.
    """
    p, p_out = histogram_probabilities(samples, edges)
    q = mixture.bin_probabilities(edges)
    q_out = 1.0 - q.sum()
    return 0.5 * float(np.abs(p - q).sum() + abs(p_out - q_out))
