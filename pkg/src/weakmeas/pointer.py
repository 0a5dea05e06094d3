"""Gaussian pointers: overlaps, N-pointer superpositions and the law of the mean.

Everything is parameterized by ``s``, the standard deviation of the position
probability density ``|phi(x)|^2`` of a single pointer. A wavefunction
``exp(-x^2 / 4 d^2)`` has ``s = d``; a wavefunction ``exp(-x^2 / 2 d^2)`` has
``s = d / sqrt(2)``. The default shape is the latter with ``d = 1``.

An :class:`EnsembleSuperposition` ``sum_k c_k |Phi^{eps_k}>`` of N identical
pointers has the (unnormalized) position density::

    pi(X) = ( sum_k c_k prod_i exp(-(x_i - eps_k)^2 / (4 s^2)) )^2

Expanding the square, the pair (k, l) contributes a product of Gaussians
centred on ``(eps_k + eps_l) / 2`` with per-pointer variance ``s^2``, scaled
by ``c_k c_l <phi^{eps_k}|phi^{eps_l}>^N``. The sample mean ``xi`` is therefore
an exact Gaussian mixture with common standard deviation ``s / sqrt(N)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import ndtr

from .errors import LengthMismatch, ZeroNorm

ZERO_NORM_TOL = 1e-15
_NEG_CLAMP = 1e-15


@dataclass(frozen=True)
class PointerShape:
    s: float

    def __post_init__(self):
        s = float(self.s)
        if not (math.isfinite(s) and s > 0):
            raise ValueError(f"pointer width s must be positive and finite, got {self.s!r}")
        object.__setattr__(self, "s", s)

    @classmethod
    def from_wavefunction_width(cls, d: float) -> "PointerShape":
        """Shape of ``exp(-x^2 / 4 d^2)``."""
        return cls(d)

    @classmethod
    def from_gaussian_width(cls, d: float = 1.0) -> "PointerShape":
        """Shape of ``exp(-x^2 / 2 d^2)``."""
        return cls(d / math.sqrt(2.0))


DEFAULT_SHAPE = PointerShape.from_gaussian_width(1.0)


class EnsembleBranch(NamedTuple):
    coeff: float
    shift: float


def _as_real(value, what):
    if isinstance(value, complex) or np.iscomplexobj(value):
        if complex(value).imag != 0.0:
            raise TypeError(f"{what} must be real, got {value!r}")
        value = complex(value).real
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{what} must be finite, got {value!r}")
    return value


@dataclass(frozen=True, eq=False)
class EnsembleSuperposition:
    """Unnormalized state ``sum_k coeff_k |Phi^{shift_k}>`` of ``n_pointers`` pointers."""

    branches: tuple
    n_pointers: int
    shape: PointerShape

    def __post_init__(self):
        branches = tuple(
            EnsembleBranch(_as_real(c, "branch coefficient"), _as_real(e, "branch shift"))
            for c, e in self.branches
        )
        if not branches:
            raise ValueError("a superposition needs at least one branch")
        if int(self.n_pointers) != self.n_pointers or self.n_pointers < 1:
            raise ValueError(f"n_pointers must be a positive integer, got {self.n_pointers!r}")
        if all(b.coeff == 0.0 for b in branches):
            raise ZeroNorm("all branch coefficients are zero")
        object.__setattr__(self, "branches", branches)
        object.__setattr__(self, "n_pointers", int(self.n_pointers))
        if self.squared_norm() <= ZERO_NORM_TOL:
            raise ZeroNorm("superposition interferes to zero norm")

    @classmethod
    def single(cls, shift, n_pointers, shape, coeff=1.0):
        return cls(((coeff, shift),), n_pointers, shape)

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([b.coeff for b in self.branches])

    @property
    def shifts(self) -> np.ndarray:
        return np.array([b.shift for b in self.branches])

    def squared_norm(self) -> float:
        """``<Phi|Phi>`` up to the common factor carried by every product state."""
        return float(sum(_pair_terms(self)[0]))

    def __repr__(self):
        terms = " + ".join(f"{b.coeff:.6g}|eps={b.shift:.6g}>" for b in self.branches)
        return f"EnsembleSuperposition({terms}, N={self.n_pointers}, s={self.shape.s:.6g})"


def single_overlap(eps1: float, eps2: float, shape: PointerShape) -> float:
    """``<phi^{eps1}|phi^{eps2}>`` for real Gaussian pointer wavefunctions."""
    return math.exp(-((eps1 - eps2) ** 2) / (8.0 * shape.s**2))


def ensemble_overlap(eps1: float, eps2: float, shape: PointerShape, n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.exp(-n * (eps1 - eps2) ** 2 / (8.0 * shape.s**2))


class SignedLog(NamedTuple):
    """``log_abs`` is ``log pi(X)``; ``sign`` is the sign of the amplitude (0 on a node)."""

    log_abs: float
    sign: int


def branch_log_amplitudes(x, psi: EnsembleSuperposition) -> tuple[np.ndarray, np.ndarray]:
    """Per-branch ``log|c_k| - sum_i (x_i - eps_k)^2 / 4s^2`` and ``sign(c_k)``.

    ``x`` may carry leading batch dimensions; the last axis indexes pointers.
    Zero coefficients get ``-inf``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != psi.n_pointers:
        got = x.shape[-1] if x.ndim else 0
        raise LengthMismatch(f"sample has {got} positions, superposition has {psi.n_pointers} pointers")
    inv = 1.0 / (4.0 * psi.shape.s**2)
    c = psi.coeffs
    with np.errstate(divide="ignore"):
        log_c = np.log(np.abs(c))
    sq = ((x[..., None, :] - psi.shifts[:, None]) ** 2).sum(axis=-1)
    return log_c - inv * sq, np.sign(c)


def signed_logsumexp(logs: np.ndarray, signs: np.ndarray):
    """``log|sum_k signs_k exp(logs_k)|`` and its sign, over the last axis."""
    m = np.max(logs, axis=-1, keepdims=True)
    finite = np.isfinite(m)
    m_safe = np.where(finite, m, 0.0)
    acc = np.sum(signs * np.exp(logs - m_safe), axis=-1)
    with np.errstate(divide="ignore"):
        out = np.log(np.abs(acc)) + m_safe[..., 0]
    out = np.where(finite[..., 0] & (acc != 0.0), out, -np.inf)
    return out, np.sign(acc).astype(int)


def log_density(x, psi: EnsembleSuperposition) -> SignedLog:
    """Unnormalized ``log pi(X)`` with the amplitude sign.

    Destructive-interference nodes return ``SignedLog(-inf, 0)``.
    """
    logs, signs = branch_log_amplitudes(x, psi)
    log_amp, sign = signed_logsumexp(logs, signs)
    log_pi = 2.0 * log_amp
    if np.ndim(log_pi) == 0:
        return SignedLog(float(log_pi), int(sign))
    return SignedLog(log_pi, sign)


@dataclass(frozen=True, eq=False)
class XiMixture:
    """Gaussian mixture law of the pointer mean ``xi``.

    ``weights`` sum to one and may be individually negative (interference
    terms). ``norm`` is the raw total weight, i.e. the squared norm of the
    superposition the mixture came from.
    """

    weights: np.ndarray
    means: np.ndarray
    std: float
    norm: float = 1.0

    @property
    def components(self) -> list[tuple[float, float, float]]:
        return [(float(w), float(m), self.std) for w, m in zip(self.weights, self.means)]

    @property
    def raw_weights(self) -> np.ndarray:
        return self.weights * self.norm

    def raw_pdf(self, xi):
        """Density scaled by ``norm``."""
        return self.norm * self.pdf(xi)

    def pdf(self, xi):
        xi = np.asarray(xi, dtype=float)
        z = (xi[..., None] - self.means) / self.std
        val = (self.weights * np.exp(-0.5 * z * z)).sum(axis=-1) / (self.std * math.sqrt(2 * math.pi))
        val = np.where((val < 0) & (val >= -_NEG_CLAMP), 0.0, val)
        return float(val) if val.ndim == 0 else val

    def cdf(self, xi):
        xi = np.asarray(xi, dtype=float)
        val = (self.weights * ndtr((xi[..., None] - self.means) / self.std)).sum(axis=-1)
        return float(val) if val.ndim == 0 else val

    def bin_probabilities(self, edges) -> np.ndarray:
        return np.diff(self.cdf(np.asarray(edges, dtype=float)))

    def mean(self) -> float:
        return float(self.weights @ self.means)

    def variance(self) -> float:
        mu = self.mean()
        return float(self.std**2 + self.weights @ self.means**2 - mu**2)

    def merged(self, tol: float = 1e-15) -> "XiMixture":
        """Combine components with coinciding means; sort by mean."""
        return _from_raw(self.raw_weights, self.means, self.std, tol)

    def __repr__(self):
        comps = ", ".join(f"({w:.6g}, {m:.6g})" for w, m in zip(self.weights, self.means))
        return f"XiMixture([{comps}], std={self.std:.6g}, norm={self.norm:.6g})"


def _from_raw(raw, means, std, tol=1e-15) -> XiMixture:
    raw = np.asarray(raw, dtype=float)
    means = np.asarray(means, dtype=float)
    order = np.argsort(means, kind="stable")
    out_w, out_m = [], []
    for w, m in zip(raw[order], means[order]):
        if out_m and abs(m - out_m[-1]) <= tol:
            out_w[-1] += w
        else:
            out_w.append(w)
            out_m.append(m)
    total = math.fsum(out_w)
    if total <= ZERO_NORM_TOL:
        raise ZeroNorm(f"total mixture weight {total:.3e} is not positive")
    return XiMixture(np.array(out_w) / total, np.array(out_m), std, total)


def combine_mixtures(mixtures: Sequence[XiMixture], scales=None, tol: float = 1e-15) -> XiMixture:
    """Sum of ``scale_i * norm_i * mixture_i``, renormalized and merged."""
    if not mixtures:
        raise ValueError("nothing to combine")
    std = mixtures[0].std
    if any(abs(m.std - std) > 1e-15 * std for m in mixtures):
        raise ValueError("mixtures must share the component width")
    scales = [1.0] * len(mixtures) if scales is None else scales
    raw = np.concatenate([sc * m.raw_weights for sc, m in zip(scales, mixtures)])
    means = np.concatenate([m.means for m in mixtures])
    return _from_raw(raw, means, std, tol)


def _pair_terms(psi: EnsembleSuperposition):
    raw, means = [], []
    br = psi.branches
    for k in range(len(br)):
        raw.append(br[k].coeff ** 2)
        means.append(br[k].shift)
    for k in range(len(br)):
        for l in range(k + 1, len(br)):
            ov = ensemble_overlap(br[k].shift, br[l].shift, psi.shape, psi.n_pointers)
            raw.append(2.0 * br[k].coeff * br[l].coeff * ov)
            means.append(0.5 * (br[k].shift + br[l].shift))
    return raw, means


def xi_mixture(psi: EnsembleSuperposition) -> XiMixture:
    """Exact law of ``xi = sum_i X_i / N`` under ``|<X|psi>|^2``.

    Components are ordered diagonal terms first (one per branch), then the
    cross terms ``(k, l)`` with ``k < l``.
    """
    raw, means = _pair_terms(psi)
    total = math.fsum(raw)
    if total <= ZERO_NORM_TOL:
        raise ZeroNorm(f"superposition norm {total:.3e} is not positive")
    std = psi.shape.s / math.sqrt(psi.n_pointers)
    return XiMixture(np.array(raw) / total, np.array(means), std, total)


def xi_moments(psi: EnsembleSuperposition) -> tuple[float, float]:
    mix = xi_mixture(psi)
    return mix.mean(), math.sqrt(mix.variance())


def xi_density(psi: EnsembleSuperposition, xi):
    return xi_mixture(psi).pdf(xi)
