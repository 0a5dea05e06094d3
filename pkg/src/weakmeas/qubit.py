"""Two-level state algebra in the sigma_z eigenbasis {|+>, |->}.

Amplitudes are stored as Python complex numbers. Spin bases are rotations
in the x-z plane of the Bloch sphere: angle 0 is sigma_z, angle pi/2 is
sigma_x.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NearOrthogonalPostSelection

ORTHOGONALITY_TOL = 1e-12

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class QubitState:
    """Pure qubit state ``plus|+> + minus|->``."""

    plus: complex
    minus: complex

    def __post_init__(self):
        p, m = complex(self.plus), complex(self.minus)
        if not (cmath.isfinite(p) and cmath.isfinite(m)):
            raise ValueError("qubit amplitudes must be finite")
        object.__setattr__(self, "plus", p)
        object.__setattr__(self, "minus", m)

    @classmethod
    def from_amplitudes(cls, plus, minus, normalize=True):
        state = cls(plus, minus)
        return state.normalized() if normalize else state

    @property
    def norm(self) -> float:
        return math.hypot(abs(self.plus), abs(self.minus))

    def normalized(self) -> "QubitState":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return QubitState(self.plus / n, self.minus / n)

    def as_array(self) -> np.ndarray:
        return np.array([self.plus, self.minus], dtype=complex)


@dataclass(frozen=True)
class SpinBasis:
    """Eigenbasis of the spin projection at angle ``theta`` in the x-z plane."""

    theta: float
    plus_state: QubitState
    minus_state: QubitState

    def state(self, sign: int) -> QubitState:
        return self.plus_state if sign > 0 else self.minus_state


@dataclass(frozen=True)
class Observable:
    """Pauli operator ``n . sigma`` along a unit Bloch vector ``n``."""

    bloch_direction: tuple

    def __post_init__(self):
        n = np.asarray(self.bloch_direction, dtype=float)
        if n.shape != (3,) or not np.all(np.isfinite(n)):
            raise ValueError("bloch_direction must be a finite 3-vector")
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError("bloch_direction must have unit norm")
        object.__setattr__(self, "bloch_direction", tuple(float(v) for v in n))

    @classmethod
    def from_angle(cls, theta: float) -> "Observable":
        """Spin projection whose eigenbasis is ``basis_from_angle(theta)``."""
        return cls((math.sin(theta), 0.0, math.cos(theta)))

    def matrix(self) -> np.ndarray:
        nx, ny, nz = self.bloch_direction
        return nx * _PAULI[0] + ny * _PAULI[1] + nz * _PAULI[2]

    def apply(self, state: QubitState) -> QubitState:
        v = self.matrix() @ state.as_array()
        return QubitState(v[0], v[1])


def basis_from_angle(theta: float) -> SpinBasis:
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return SpinBasis(float(theta), QubitState(c, s), QubitState(-s, c))


Z_BASIS = basis_from_angle(0.0)
# exact equal amplitudes: cos(pi/4) and sin(pi/4) differ in the last bit, which
# the post-selection ratio would raise to the N-th power
_H = math.sqrt(0.5)
X_BASIS = SpinBasis(math.pi / 2, QubitState(_H, _H), QubitState(-_H, _H))
PLUS = Z_BASIS.plus_state
MINUS = Z_BASIS.minus_state
PLUS_X = X_BASIS.plus_state
MINUS_X = X_BASIS.minus_state
SIGMA_Z = Observable((0.0, 0.0, 1.0))
SIGMA_X = Observable((1.0, 0.0, 0.0))


def inner(a: QubitState, b: QubitState) -> complex:
    """Hermitian inner product <a|b>."""
    return a.plus.conjugate() * b.plus + a.minus.conjugate() * b.minus


def born_probabilities(state: QubitState, basis: SpinBasis) -> tuple[float, float]:
    p_plus = abs(inner(basis.plus_state, state)) ** 2
    p_minus = abs(inner(basis.minus_state, state)) ** 2
    return p_plus, p_minus


def weak_value(pre_state: QubitState, post_state: QubitState, obs: Observable) -> complex:
    """Weak value ``<post|O|pre> / <post|pre>``.

    Raises
    ------
    NearOrthogonalPostSelection
        If ``|<post|pre>| <= 1e-12``; the weak value diverges there.
    """
    overlap = inner(post_state, pre_state)
    if abs(overlap) <= ORTHOGONALITY_TOL:
        raise NearOrthogonalPostSelection(
            f"|<post|pre>| = {abs(overlap):.3e} is below {ORTHOGONALITY_TOL:g}"
        )
    return inner(post_state, obs.apply(pre_state)) / overlap


def expectation(state: QubitState, obs: Observable) -> float:
    return inner(state, obs.apply(state)).real


def pointer_shift(g: float, wv: complex) -> float:
    """Pointer displacement ``g * Re(wv)``; imaginary parts are not read out."""
    if g < 0:
        raise ValueError("coupling strength g must be non-negative")
    return g * complex(wv).real
