"""Invariant suites behind ``weakmeas verify``.

Each check returns a :class:`CheckResult` with the measured and the expected
value so failures can be reported without re-running anything.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from .diagnostics import total_variation
from .pointer import EnsembleSuperposition, PointerShape, single_overlap, xi_moments
from .qubit import basis_from_angle
from .sampler import MHConfig, run_chains
from .scenario import (
    ScenarioConfig,
    frame_Rprime_state,
    outcome_weighted_mixture,
    unconditional_xi_density,
    update_after_B,
)

SWEEP = (0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2)
FAULTS = ("weight",)
SUITES = ("no_signaling", "frame_consistency", "overlap_quadrature", "xi_scaling", "oracle_convergence")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    expected: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: measured={self.measured:.6g} expected={self.expected:.6g} "
                f"tol={self.tolerance:.3g} {self.detail}").rstrip()


def mixture_distance(a, b) -> float:
    """Largest component-wise difference of two merged mixtures (inf if shapes differ)."""
    a, b = a.merged(1e-12), b.merged(1e-12)
    if len(a.weights) != len(b.weights) or abs(a.std - b.std) > 1e-15:
        return math.inf
    return float(max(np.max(np.abs(a.weights - b.weights)), np.max(np.abs(a.means - b.means))))


def _branches(cfg, theta, fault=None, index=0):
    branches = update_after_B(cfg, basis_from_angle(theta))
    if fault == "weight" and index == 1:
        plus, minus = branches
        raw = plus.raw * 1.01
        total = raw + minus.raw
        branches = (replace(plus, raw=raw, weight=raw / total), replace(minus, weight=minus.raw / total))
    return branches


def check_no_signaling(cfg: ScenarioConfig, thetas=SWEEP, fault=None, tol=1e-12) -> CheckResult:
    ref = unconditional_xi_density(cfg)
    totals, dists = [], []
    for i, th in enumerate(thetas):
        br = _branches(cfg, th, fault, i)
        totals.append(math.fsum(b.raw for b in br))
        dists.append(mixture_distance(outcome_weighted_mixture(br), ref))
    spread = max(totals) - min(totals)
    worst = max(spread, max(dists))
    return CheckResult("no_signaling", worst <= tol, worst, 0.0, tol,
                       f"total_norm={totals[0]:.12g} norm_spread={spread:.3g} mixture_dist={max(dists):.3g}")


def check_frame_consistency(cfg: ScenarioConfig, thetas=SWEEP, tol=1e-12) -> CheckResult:
    state = frame_Rprime_state(cfg)
    reduced = state.reduced_xi_mixture()
    norm_err = max(abs(math.fsum(b.raw for b in update_after_B(cfg, basis_from_angle(th))) - state.squared_norm())
                   for th in thetas)
    mix_err = mixture_distance(reduced, unconditional_xi_density(cfg))
    worst = max(norm_err, mix_err)
    return CheckResult("frame_consistency", worst <= tol, worst, 0.0, tol,
                       f"frame_Rprime_norm={state.squared_norm():.12g}")


def quadrature_overlap(eps1: float, eps2: float, s: float) -> float:
    """``int phi(x - eps1) phi(x - eps2) dx`` with normalized real Gaussian wavefunctions."""
    norm = (2 * math.pi * s * s) ** -0.25

    def f(x):
        return norm * math.exp(-((x - eps1) ** 2) / (4 * s * s)) * norm * math.exp(-((x - eps2) ** 2) / (4 * s * s))

    mid = 0.5 * (eps1 + eps2)
    val, _ = integrate.quad(f, mid - 40 * s, mid + 40 * s, points=[mid], epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def check_overlap_quadrature(tol=1e-8) -> CheckResult:
    worst = 0.0
    for s in (1.0, 1 / math.sqrt(2)):
        shape = PointerShape(s)
        for e1 in (0.0, 0.1, -0.1, 0.3, -0.3):
            for e2 in (0.0, 0.1, -0.1, 0.3, -0.3):
                q = quadrature_overlap(e1, e2, s)
                worst = max(worst, abs(single_overlap(e1, e2, shape) - q) / q)
    return CheckResult("overlap_quadrature", worst <= tol, worst, 0.0, tol, "max relative error")


def check_xi_scaling(shape: PointerShape, n_values=(50, 200, 400), seed=0, backend=None,
                     retained=40_000, chains=4, tol=0.05) -> CheckResult:
    worst_exact, worst_emp = 0.0, 0.0
    details = []
    for n in n_values:
        target = EnsembleSuperposition.single(0.1, n, shape)
        expected = shape.s / math.sqrt(n)
        worst_exact = max(worst_exact, abs(xi_moments(target)[1] - expected) / expected)
        thin = max(5, n // 5)
        cfg = MHConfig.for_retained(retained // chains, n, thinning=thin, seed=seed)
        rec = run_chains(target, cfg, chains, backend)
        rel = abs(np.std(rec.xi_values) - expected) / expected
        worst_emp = max(worst_emp, rel)
        details.append(f"N={n}:{rel:.3%}")
    passed = worst_exact <= 1e-15 and worst_emp <= tol
    return CheckResult("xi_scaling", passed, worst_emp, 0.0, tol,
                       f"oracle_rel_err={worst_exact:.1e} " + " ".join(details))


def check_oracle_convergence(cfg: ScenarioConfig, thetas=(0.0, math.pi / 4), edges=None, seed=0,
                             backend=None, retained=20_000, chains=8, thinning=None, tol=0.05) -> CheckResult:
    edges = np.linspace(-0.25, 0.25, 51) if edges is None else edges
    thinning = thinning or max(5, cfg.n_pointers // 2)
    worst, details = 0.0, []
    for i, th in enumerate(thetas):
        for j, br in enumerate(update_after_B(cfg, basis_from_angle(th))):
            if br.is_empty:
                continue
            mh = MHConfig.for_retained(retained // chains, cfg.n_pointers, thinning=thinning,
                                       seed=seed + 1000 * (2 * i + j))
            rec = run_chains(br.superposition, mh, chains, backend)
            tv = total_variation(rec.xi_values, br.mixture(), edges)
            worst = max(worst, tv)
            details.append(f"{br.label}:{tv:.4f}")
    return CheckResult("oracle_convergence", worst <= tol, worst, 0.0, tol, " ".join(details))


def run_verification(cfg: ScenarioConfig, suites=SUITES, fault=None, seed=0, backend=None, edges=None):
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    results = []
    for name in suites:
        if name == "no_signaling":
            results.append(check_no_signaling(cfg, fault=fault))
        elif name == "frame_consistency":
            results.append(check_frame_consistency(cfg))
        elif name == "overlap_quadrature":
            results.append(check_overlap_quadrature())
        elif name == "xi_scaling":
            results.append(check_xi_scaling(cfg.shape, seed=seed, backend=backend))
        elif name == "oracle_convergence":
            results.append(check_oracle_convergence(cfg, seed=seed, backend=backend, edges=edges))
        else:
            raise ValueError(f"unknown suite {name!r}")
    return results
