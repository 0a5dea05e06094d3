"""Physical scenarios: multipartite state, Bob's update, frame R' and posteriors.

The entangled state is::

    alpha |+u>^N |+w> + beta |-u>^N |+w> + gamma |+u>^N |-w>

Alice weakly couples one Gaussian pointer to each of her N qubits and
post-selects every qubit on ``|f>``. Two orderings are modelled:

* frame R: Bob measures qubit B first (in any basis), Alice's pointers then
  carry one of two superpositions ``a |Phi^{eps+}> + b |Phi^{eps->}``;
* frame R': the pointers are coupled first, giving a joint pointer/qubit-B
  state whose reduced pointer law does not depend on Bob's basis.

The common factor ``<f|+u>^N`` is dropped throughout. When
``<f|-u> != <f|+u>`` the remaining ratio ``(<f|-u>/<f|+u>)^N`` multiplies
``beta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    LengthMismatch,
    NearOrthogonalPostSelection,
    NodeSample,
    UndefinedPosterior,
    ZeroNorm,
)
from .pointer import (
    DEFAULT_SHAPE,
    EnsembleSuperposition,
    PointerShape,
    XiMixture,
    combine_mixtures,
    ensemble_overlap,
    xi_mixture,
)
from .qubit import (
    ORTHOGONALITY_TOL,
    PLUS_X,
    SIGMA_Z,
    Z_BASIS,
    Observable,
    QubitState,
    SpinBasis,
    born_probabilities,
    inner,
    pointer_shift,
    weak_value,
)

WEIGHTINGS = ("postselected", "born")
_DROP_TOL = 1e-15
POSTERIOR_FLOOR = 1e-300


def _validate_common(obj):
    for name in ("alpha", "beta", "gamma", "g"):
        v = getattr(obj, name)
        if isinstance(v, complex):
            raise TypeError(f"{name} must be real")
        if not math.isfinite(float(v)):
            raise ValueError(f"{name} must be finite")
        object.__setattr__(obj, name, float(v))
    total = obj.alpha**2 + obj.beta**2 + obj.gamma**2
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"alpha^2 + beta^2 + gamma^2 = {total!r}, expected 1")
    if obj.g < 0:
        raise ValueError("coupling g must be non-negative")
    if obj.weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Multipartite scenario; ``defaults`` fills in the standard coefficients."""

    alpha: float
    beta: float
    gamma: float
    n_pointers: int = 200
    g: float = 0.1
    shape: PointerShape = DEFAULT_SHAPE
    post_select: QubitState = PLUS_X
    observable: Observable = SIGMA_Z
    alice_basis: SpinBasis = Z_BASIS
    bob_w_basis: SpinBasis = Z_BASIS
    # "postselected": outcome weights are the exact post-selected norms;
    # "born": naive Born probabilities a^2 + b^2, kept for comparison only.
    weighting: str = "postselected"

    def __post_init__(self):
        _validate_common(self)
        if int(self.n_pointers) != self.n_pointers or self.n_pointers < 1:
            raise ValueError("n_pointers must be a positive integer")
        object.__setattr__(self, "n_pointers", int(self.n_pointers))

    @classmethod
    def defaults(cls, n_pointers: int = 200, **overrides) -> "ScenarioConfig":
        return cls(
            alpha=1 / math.sqrt(12),
            beta=math.sqrt(5 / 6),
            gamma=1 / math.sqrt(12),
            n_pointers=n_pointers,
            **overrides,
        )

    @property
    def shifts(self) -> tuple[float, float]:
        return _shifts(self)

    @property
    def beta_eff(self) -> float:
        return self.beta * _postselection_ratio(self) ** self.n_pointers

    def overlap(self) -> float:
        """``<Phi^{eps+}|Phi^{eps-}>`` for the N pointers."""
        ep, em = self.shifts
        return ensemble_overlap(ep, em, self.shape, self.n_pointers)


@dataclass(frozen=True)
class BipartiteScenario:
    """The two-qubit setting: one weakly measured qubit A, one qubit B."""

    alpha: float
    beta: float
    gamma: float
    g: float = 0.1
    shape: PointerShape = DEFAULT_SHAPE
    post_select: QubitState = PLUS_X
    observable: Observable = SIGMA_Z
    alice_basis: SpinBasis = Z_BASIS
    bob_w_basis: SpinBasis = Z_BASIS
    weighting: str = "postselected"

    def __post_init__(self):
        _validate_common(self)

    n_pointers = 1

    @property
    def shifts(self) -> tuple[float, float]:
        return _shifts(self)

    @property
    def beta_eff(self) -> float:
        return self.beta * _postselection_ratio(self)

    def as_config(self) -> ScenarioConfig:
        return ScenarioConfig(
            self.alpha, self.beta, self.gamma, 1, self.g, self.shape, self.post_select,
            self.observable, self.alice_basis, self.bob_w_basis, self.weighting,
        )


def _shifts(cfg) -> tuple[float, float]:
    u = cfg.alice_basis
    ep = pointer_shift(cfg.g, weak_value(u.plus_state, cfg.post_select, cfg.observable))
    em = pointer_shift(cfg.g, weak_value(u.minus_state, cfg.post_select, cfg.observable))
    return ep, em


def _real(z: complex, what: str) -> float:
    if abs(z.imag) > 1e-12:
        raise ValueError(f"{what} is complex ({z!r}); only real coefficients are supported")
    return z.real


def _postselection_ratio(cfg) -> float:
    fp = inner(cfg.post_select, cfg.alice_basis.plus_state)
    fm = inner(cfg.post_select, cfg.alice_basis.minus_state)
    if abs(fp) <= ORTHOGONALITY_TOL:
        raise NearOrthogonalPostSelection("post-selected state is orthogonal to |+u>")
    return _real(fm / fp, "<f|-u>/<f|+u>")


@dataclass(frozen=True)
class OutcomeBranch:
    """One outcome of Bob's measurement in frame R.

    ``superposition`` is ``None`` for an impossible outcome (``a = b = 0``).
    """

    theta: float
    sign: int
    a: float
    b: float
    raw: float
    weight: float
    superposition: EnsembleSuperposition | None = field(repr=False)

    @property
    def label(self) -> str:
        return f"{'+' if self.sign > 0 else '-'}theta={self.theta:.6g}"

    @property
    def is_empty(self) -> bool:
        return self.superposition is None

    def mixture(self) -> XiMixture | None:
        return None if self.superposition is None else xi_mixture(self.superposition)


def _superposition(pairs, n, shape):
    kept = tuple((c, e) for c, e in pairs if abs(c) > _DROP_TOL)
    if not kept:
        return None
    try:
        return EnsembleSuperposition(kept, n, shape)
    except ZeroNorm:
        return None


def update_after_B(cfg: ScenarioConfig, bob_basis: SpinBasis) -> tuple[OutcomeBranch, OutcomeBranch]:
    """Alice's pointer superpositions after Bob measures in ``bob_basis``.

    For outcome ``o`` the pointers end in ``a_o |Phi^{eps+}> + b_o |Phi^{eps->}>``
    with ``a_o = alpha <o|+w> + gamma <o|-w>`` and ``b_o = beta <o|+w>``.
    Returns the ``(+, -)`` branches.
    """
    ep, em = cfg.shifts
    beta = cfg.beta_eff
    w = cfg.bob_w_basis
    ov = cfg.overlap()
    parts = []
    for sign in (1, -1):
        o = bob_basis.state(sign)
        to_plus = _real(inner(o, w.plus_state), "<o|+w>")
        to_minus = _real(inner(o, w.minus_state), "<o|-w>")
        a = cfg.alpha * to_plus + cfg.gamma * to_minus
        b = beta * to_plus
        raw = a * a + b * b + 2.0 * a * b * ov
        born = a * a + b * b
        sup = _superposition(((a, ep), (b, em)), cfg.n_pointers, cfg.shape)
        if sup is None:
            raw = born = 0.0
        parts.append((sign, a, b, raw, born, sup))
    key = 3 if cfg.weighting == "postselected" else 4
    total = sum(p[key] for p in parts)
    if total <= 0:
        raise ZeroNorm("both outcomes have zero weight")
    return tuple(
        OutcomeBranch(bob_basis.theta, p[0], p[1], p[2], p[3], p[key] / total, p[5]) for p in parts
    )


def outcome_weighted_mixture(branches) -> XiMixture:
    """``sum_o weight_o * law(xi | o)``, merged into canonical form."""
    live = [b for b in branches if not b.is_empty and b.weight != 0.0]
    mixes = [b.mixture() for b in live]
    return combine_mixtures(mixes, [b.weight / m.norm for b, m in zip(live, mixes)])


@dataclass(frozen=True)
class FrameRPrimeState:
    """Joint pointer / qubit-B state after all couplings, before Bob measures.

    ``plus_w`` / ``minus_w`` are the pointer amplitudes attached to ``|+w>`` /
    ``|-w>`` (``None`` when identically zero).
    """

    plus_w: EnsembleSuperposition | None
    minus_w: EnsembleSuperposition | None

    def parts(self):
        return [p for p in (self.plus_w, self.minus_w) if p is not None]

    def squared_norm(self) -> float:
        return math.fsum(p.squared_norm() for p in self.parts())

    def reduced_xi_mixture(self) -> XiMixture:
        """Law of xi with qubit B traced out."""
        return combine_mixtures([xi_mixture(p) for p in self.parts()])


def frame_Rprime_state(cfg: ScenarioConfig) -> FrameRPrimeState:
    ep, em = cfg.shifts
    return FrameRPrimeState(
        _superposition(((cfg.alpha, ep), (cfg.beta_eff, em)), cfg.n_pointers, cfg.shape),
        _superposition(((cfg.gamma, ep),), cfg.n_pointers, cfg.shape),
    )


def unconditional_xi_density(cfg: ScenarioConfig) -> XiMixture:
    """Bob-basis independent law of xi (components merged, sorted by mean)."""
    return frame_Rprime_state(cfg).reduced_xi_mixture()


def posterior_given_xi(cfg: ScenarioConfig, bob_basis: SpinBasis, xi: float) -> tuple[float, float]:
    """``P(+theta | xi), P(-theta | xi)`` by Bayes over the outcome mixtures."""
    dens = []
    for br in update_after_B(cfg, bob_basis):
        dens.append(0.0 if br.is_empty else br.weight * br.mixture().pdf(xi))
    total = dens[0] + dens[1]
    if not total > POSTERIOR_FLOOR:
        raise UndefinedPosterior(f"xi density {total:.3e} at xi={xi!r} is too small")
    p_plus = dens[0] / total
    return p_plus, 1.0 - p_plus


class OutcomeState(NamedTuple):
    label: str
    state: QubitState | None
    probability: float


def update_single_after_B(sc: BipartiteScenario) -> tuple[OutcomeState, OutcomeState]:
    """Qubit A's state after Bob measures sigma_w: outcomes ``(+w, -w)``."""
    u = sc.alice_basis
    p_plus = sc.alpha**2 + sc.beta**2
    p_minus = sc.gamma**2
    plus_state = None
    if p_plus > 0:
        n = math.sqrt(p_plus)
        plus_state = QubitState(
            (sc.alpha * u.plus_state.plus + sc.beta * u.minus_state.plus) / n,
            (sc.alpha * u.plus_state.minus + sc.beta * u.minus_state.minus) / n,
        )
    minus_state = u.plus_state if p_minus > 0 else None
    return OutcomeState("+w", plus_state, p_plus), OutcomeState("-w", minus_state, p_minus)


def pointer_after_single_wm(pre_state: QubitState, sc: BipartiteScenario) -> EnsembleSuperposition:
    """Post-selected state of one pointer coupled to qubit A in ``pre_state``.

    Coefficients are the ``|+-u>`` amplitudes of ``pre_state``, the ``-u`` one
    multiplied by ``<f|-u>/<f|+u>``.
    """
    if abs(inner(sc.post_select, pre_state)) <= ORTHOGONALITY_TOL:
        raise NearOrthogonalPostSelection("post-selected state is orthogonal to the pre-selected state")
    u = sc.alice_basis
    amp_p = inner(u.plus_state, pre_state)
    amp_m = inner(u.minus_state, pre_state)
    pairs = []
    if abs(amp_p) > _DROP_TOL:
        ep = pointer_shift(sc.g, weak_value(u.plus_state, sc.post_select, sc.observable))
        pairs.append((_real(amp_p, "pre-state amplitude"), ep))
    if abs(amp_m) > _DROP_TOL:
        em = pointer_shift(sc.g, weak_value(u.minus_state, sc.post_select, sc.observable))
        pairs.append((_real(amp_m, "pre-state amplitude") * _postselection_ratio(sc), em))
    return EnsembleSuperposition(tuple(pairs), 1, sc.shape)


class ConditionalQubit(NamedTuple):
    state: QubitState
    probabilities: tuple[float, float]
    w_amplitudes: tuple[float, float]


def qubitB_given_sample(cfg, x, basis: SpinBasis | None = None) -> ConditionalQubit:
    """Qubit B's state once Alice has read the pointer positions ``x``.

    Unnormalized amplitudes are ``alpha A+(X) + beta A-(X)`` on ``|+w>`` and
    ``gamma A+(X)`` on ``|-w>``, where ``A+-(X) = prod_i phi^{eps+-}(x_i)``.
    Probabilities are for ``basis`` (default: the w basis).
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (cfg.n_pointers,):
        raise LengthMismatch(f"expected {cfg.n_pointers} positions, got shape {x.shape}")
    ep, em = cfg.shifts
    inv = 1.0 / (4.0 * cfg.shape.s**2)
    log_ap = -inv * float(np.sum((x - ep) ** 2))
    log_am = -inv * float(np.sum((x - em) ** 2))
    m = max(log_ap, log_am)
    ap, am = math.exp(log_ap - m), math.exp(log_am - m)
    c_plus = cfg.alpha * ap + cfg.beta_eff * am
    c_minus = cfg.gamma * ap
    n = math.hypot(c_plus, c_minus)
    if n == 0.0:
        raise NodeSample("both qubit-B amplitudes vanish at this sample")
    c_plus, c_minus = c_plus / n, c_minus / n
    w = cfg.bob_w_basis
    state = QubitState(
        c_plus * w.plus_state.plus + c_minus * w.minus_state.plus,
        c_plus * w.plus_state.minus + c_minus * w.minus_state.minus,
    )
    return ConditionalQubit(state, born_probabilities(state, basis or w), (c_plus, c_minus))
