"""Random-walk Metropolis-Hastings over the N pointer positions.

The chain state is the full vector ``X = (x_1, ..., x_N)``. Proposals
perturb every coordinate by an independent ``Normal(0, sigma_q)`` and the
whole vector is accepted with probability ``min(1, pi(X*) / pi(X_t))``.
Because ``pi`` depends on ``X`` only through ``sum x`` and ``sum x^2``, the
inner loop needs O(N) work per step; it lives in ``_kernel`` (Cython) with
``_pykernel`` as a drop-in fallback. Both consume the same random stream:
chunks of standard normals and uniforms drawn from
``numpy.random.default_rng(seed)``.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _pykernel
from .errors import InitOnNode, InvalidChainState
from .pointer import EnsembleSuperposition, PointerShape, SignedLog, log_density

log = logging.getLogger(__name__)

try:
    from . import _kernel as _ckernel
except ImportError:  # pragma: no cover - depends on the build
    _ckernel = None

INIT_POLICIES = ("at_origin", "at_branch_mean", "from_mixture")
CHUNK = 4096


def available_backends() -> list[str]:
    return (["cython"] if _ckernel is not None else []) + ["python"]


def get_kernel(backend: str | None = None):
    """Kernel module for ``backend`` ("cython", "python" or None for the fastest).

    ``WEAKMEAS_BACKEND`` in the environment overrides the default choice.
    """
    backend = backend or os.environ.get("WEAKMEAS_BACKEND")
    if backend is None:
        return _ckernel or _pykernel
    if backend == "cython":
        if _ckernel is None:
            raise RuntimeError("compiled kernel is not built; reinstall with Cython available")
        return _ckernel
    if backend == "python":
        return _pykernel
    raise ValueError(f"unknown backend {backend!r}")


def default_sigma(n: int, shape: PointerShape) -> float:
    """Random-walk scale ``2.4 s / sqrt(n)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.4 * shape.s / math.sqrt(n)


@dataclass(frozen=True)
class MHConfig:
    """Sampler settings.

    ``n_iterations`` counts every step including burn-in. ``None`` for
    ``sigma_q`` or ``burn_in`` means ``default_sigma`` and ``10 * N``.
    """

    n_iterations: int
    sigma_q: float | None = None
    burn_in: int | None = None
    thinning: int = 5
    seed: int = 0
    init_policy: str = "from_mixture"
    init_branch: int = 0

    def __post_init__(self):
        if self.n_iterations < 0:
            raise ValueError("n_iterations must be non-negative")
        if self.sigma_q is not None and not self.sigma_q > 0:
            raise ValueError("sigma_q must be positive")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")
        if self.burn_in is not None and not 0 <= self.burn_in <= self.n_iterations:
            raise ValueError("burn_in must lie in [0, n_iterations]")
        if self.init_policy not in INIT_POLICIES:
            raise ValueError(f"init_policy must be one of {INIT_POLICIES}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @classmethod
    def for_retained(cls, n_retained: int, n_pointers: int, thinning: int = 5, **kw) -> "MHConfig":
        """Config that keeps exactly ``n_retained`` states after the default burn-in."""
        burn_in = kw.pop("burn_in", 10 * n_pointers)
        return cls(burn_in + thinning * n_retained, burn_in=burn_in, thinning=thinning, **kw)

    def resolved(self, target: EnsembleSuperposition) -> "MHConfig":
        sigma = self.sigma_q if self.sigma_q is not None else default_sigma(target.n_pointers, target.shape)
        burn = self.burn_in if self.burn_in is not None else min(10 * target.n_pointers, self.n_iterations)
        return replace(self, sigma_q=sigma, burn_in=burn)


@dataclass(frozen=True)
class ChainState:
    x: np.ndarray
    log_pi: SignedLog


@dataclass(eq=False)
class SampleRecord:
    xi_values: np.ndarray
    accept_count: int
    total_proposals: int
    final_state: np.ndarray | None = None
    seeds: tuple = ()
    mode_fractions: dict = field(default_factory=dict)

    @property
    def acceptance_rate(self) -> float:
        return self.accept_count / self.total_proposals if self.total_proposals else 0.0

    def __len__(self):
        return len(self.xi_values)


def propose(x_t, sigma_q: float, rng: np.random.Generator) -> np.ndarray:
    if not sigma_q > 0:
        raise ValueError("sigma_q must be positive")
    x_t = np.asarray(x_t, dtype=float)
    return x_t + sigma_q * rng.standard_normal(x_t.shape)


def _as_log(value) -> float:
    return value.log_abs if isinstance(value, SignedLog) else float(value)


def accept_prob(log_pi_star, log_pi_t) -> float:
    """``min(1, pi* / pi_t)`` from log densities (floats or ``SignedLog``)."""
    lt = _as_log(log_pi_t)
    ls = _as_log(log_pi_star)
    if not math.isfinite(lt):
        raise InvalidChainState(f"current log density is {lt}")
    return math.exp(min(0.0, ls - lt))


def initial_state(target: EnsembleSuperposition, cfg: MHConfig, rng: np.random.Generator) -> np.ndarray:
    n = target.n_pointers
    if cfg.init_policy == "at_origin":
        return np.zeros(n)
    if cfg.init_policy == "at_branch_mean":
        return np.full(n, target.branches[cfg.init_branch].shift)
    c2 = target.coeffs**2
    k = rng.choice(len(c2), p=c2 / c2.sum())
    return target.branches[k].shift + target.shape.s * rng.standard_normal(n)


def _kernel_params(target: EnsembleSuperposition):
    live = [b for b in target.branches if b.coeff != 0.0]
    log_c = np.array([math.log(abs(b.coeff)) for b in live])
    sgn = np.array([math.copysign(1.0, b.coeff) for b in live])
    eps = np.array([b.shift for b in live])
    return log_c, sgn, eps, 1.0 / (4.0 * target.shape.s**2)


def _mode_fractions(xi, shifts) -> dict:
    modes = sorted(set(float(e) for e in shifts))
    if len(xi) == 0:
        return {m: 0.0 for m in modes}
    idx = np.argmin(np.abs(np.asarray(xi)[:, None] - np.array(modes)), axis=1)
    return {m: float(np.mean(idx == j)) for j, m in enumerate(modes)}


def run_chain(target: EnsembleSuperposition, cfg: MHConfig, backend: str | None = None) -> SampleRecord:
    """Run one chain and keep every ``thinning``-th state after burn-in.

    Steps after the last retained state are not simulated, so
    ``final_state`` is the last retained state.
    """
    cfg = cfg.resolved(target)
    kern = get_kernel(backend)
    rng = np.random.default_rng(cfg.seed)
    n = target.n_pointers

    x = initial_state(target, cfg, rng)
    lp = log_density(x, target).log_abs
    if not math.isfinite(lp):
        raise InitOnNode(f"initial state ({cfg.init_policy}) has zero target density")

    post = cfg.n_iterations - cfg.burn_in
    n_keep = post // cfg.thinning
    n_steps = cfg.burn_in + n_keep * cfg.thinning if n_keep else cfg.n_iterations

    log_c, sgn, eps, inv = _kernel_params(target)
    prop = np.empty(n)
    work = np.empty(max(1, len(log_c)))
    xi_steps = np.empty(n_steps)
    accepts = 0
    for start in range(0, n_steps, CHUNK):
        m = min(CHUNK, n_steps - start)
        z = rng.standard_normal((m, n))
        u = rng.random(m)
        lp, acc = kern.advance(x, lp, z, u, cfg.sigma_q, log_c, sgn, eps, inv, xi_steps[start:start + m], prop, work)
        accepts += acc
        if not math.isfinite(lp):
            raise InvalidChainState(f"chain reached zero density near step {start + m}")

    steps = np.arange(1, n_steps + 1)
    keep = (steps > cfg.burn_in) & ((steps - cfg.burn_in) % cfg.thinning == 0)
    xi = xi_steps[keep]
    rec = SampleRecord(
        xi_values=xi,
        accept_count=int(accepts),
        total_proposals=int(n_steps),
        final_state=x.copy() if n_keep else None,
        seeds=(cfg.seed,),
        mode_fractions=_mode_fractions(xi, eps),
    )
    log.debug("chain seed=%d steps=%d acceptance=%.3f", cfg.seed, n_steps, rec.acceptance_rate)
    return rec


def merge_records(records, shifts=None) -> SampleRecord:
    """Concatenate chains in ascending seed order."""
    records = sorted(records, key=lambda r: r.seeds)
    xi = np.concatenate([r.xi_values for r in records]) if records else np.empty(0)
    seeds = tuple(s for r in records for s in r.seeds)
    rec = SampleRecord(
        xi_values=xi,
        accept_count=sum(r.accept_count for r in records),
        total_proposals=sum(r.total_proposals for r in records),
        final_state=records[-1].final_state if records else None,
        seeds=seeds,
    )
    if shifts is not None:
        rec.mode_fractions = _mode_fractions(xi, shifts)
    return rec


def run_chains(target: EnsembleSuperposition, cfg: MHConfig, n_chains: int,
               backend: str | None = None, workers: int | None = None) -> SampleRecord:
    """Independent chains with seeds ``cfg.seed + i``, merged in seed order.

    The compiled kernel releases the GIL, so threads run chains in parallel.
    """
    if n_chains < 1:
        raise ValueError("n_chains must be >= 1")
    cfgs = [replace(cfg, seed=cfg.seed + i) for i in range(n_chains)]
    if workers == 1 or n_chains == 1:
        records = [run_chain(target, c, backend) for c in cfgs]
    else:
        with ThreadPoolExecutor(max_workers=workers or min(n_chains, os.cpu_count() or 1)) as pool:
            records = list(pool.map(lambda c: run_chain(target, c, backend), cfgs))
    return merge_records(records, target.shifts)


def one_shot(target: EnsembleSuperposition, cfg: MHConfig, backend: str | None = None) -> np.ndarray:
    """A single realization of the N pointer positions (final retained state)."""
    rec = run_chain(target, cfg, backend)
    if rec.final_state is None:
        raise ValueError("configuration retains no state; increase n_iterations")
    return rec.final_state
