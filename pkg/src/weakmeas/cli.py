"""Command-line front end.

Subcommands ``branches``, ``xi-oracle``, ``mh-run``, ``one-shot``, ``infer``
and ``verify``. Exit codes: 0 success, 1 configuration error, 2 verification
failure, 3 sampler or computation failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np
from scipy.special import ndtr

from . import __version__
from .config import PRESETS, RunConfig, eval_number, load_config, load_preset
from .diagnostics import effective_sample_size, total_variation
from .errors import ConfigError, WeakMeasError
from .qubit import basis_from_angle
from .sampler import MHConfig, one_shot, run_chains
from .scenario import posterior_given_xi, unconditional_xi_density, update_after_B
from .tables import format_csv, write_csv, write_histogram_svg
from .verify import FAULTS, SUITES, run_verification

log = logging.getLogger("weakmeas")

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_SAMPLER = 0, 1, 2, 3


def _angle(text):
    try:
        return eval_number(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def target_seed(base: int, theta_index: int, outcome_index: int) -> int:
    """First chain seed for one (theta, outcome) target; chains use consecutive seeds."""
    return base + 1000 * (2 * theta_index + outcome_index)


def _resolve_config(args) -> RunConfig:
    if args.config and args.preset:
        raise ConfigError("use either --config or --preset")
    if args.config:
        cfg = load_config(args.config)
    elif args.preset:
        cfg = load_preset(args.preset)
    else:
        cfg = RunConfig()
    try:
        return cfg.with_overrides(seed=args.seed, out_dir=args.out)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def _out(cfg: RunConfig) -> Path:
    return Path(cfg.out_dir)


def _meta(cfg: RunConfig, **extra):
    meta = {
        "alpha": cfg.alpha, "beta": cfg.beta, "gamma": cfg.gamma, "n_pointers": cfg.n_pointers,
        "g": cfg.g, "pointer_s": cfg.pointer_s, "weighting": cfg.weighting,
    }
    meta.update(extra)
    return meta


def cmd_branches(cfg: RunConfig, args) -> int:
    sc = cfg.scenario()
    ep, em = sc.shifts
    header = ["theta", "outcome", "a", "b", "eps_a", "eps_b", "raw_norm", "weight"]
    rows = []
    for th in cfg.thetas:
        for br in update_after_B(sc, basis_from_angle(th)):
            rows.append([th, br.sign, br.a, br.b, ep, em, br.raw, br.weight])
    meta = _meta(cfg, overlap=sc.overlap())
    sys.stdout.write(format_csv(header, rows, meta))
    write_csv(_out(cfg) / "branches.csv", header, rows, meta)
    return EXIT_OK


def _oracle_grid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(cfg.xi_min, cfg.xi_max, 10 * cfg.bins + 1)


def cmd_xi_oracle(cfg: RunConfig, args) -> int:
    sc = cfg.scenario()
    grid = _oracle_grid(cfg)
    total = unconditional_xi_density(sc).pdf(grid)
    for i, th in enumerate(cfg.thetas):
        br = update_after_B(sc, basis_from_angle(th))
        dens = [np.zeros_like(grid) if b.is_empty else b.weight * b.mixture().pdf(grid) for b in br]
        rows = np.column_stack([grid, dens[0], dens[1], total])
        meta = _meta(cfg, theta=th, weight_plus=br[0].weight, weight_minus=br[1].weight,
                     component_std=sc.shape.s / math.sqrt(sc.n_pointers))
        path = write_csv(_out(cfg) / f"xi_oracle_t{i}.csv", ["xi", "density_plus", "density_minus", "density_total"],
                         rows.tolist(), meta)
        print(f"theta={th:.6g}: wrote {path}")
    return EXIT_OK


def _weighted_hist(xi, weight, edges):
    counts, _ = np.histogram(xi, bins=edges)
    width = np.diff(edges)
    return weight * counts / (len(xi) * width) if len(xi) else np.zeros(len(width))


def cmd_mh_run(cfg: RunConfig, args) -> int:
    sc = cfg.scenario()
    edges = cfg.edges
    width = np.diff(edges)
    uncond = unconditional_xi_density(sc)
    totals = []
    for i, th in enumerate(cfg.thetas):
        branches = update_after_B(sc, basis_from_angle(th))
        cols, oracle, meta = [], [], _meta(cfg, theta=th, seed=cfg.seed, chains=cfg.chains,
                                             iterations=cfg.iterations, thinning=cfg.thinning)
        for j, br in enumerate(branches):
            tag = "plus" if br.sign > 0 else "minus"
            meta[f"weight_{tag}"] = br.weight
            if br.is_empty:
                cols.append(np.zeros(len(width)))
                oracle.append(np.zeros(len(width)))
                continue
            mh = cfg.mh_config(seed=target_seed(cfg.seed, i, j))
            rec = run_chains(br.superposition, mh, cfg.chains)
            cols.append(_weighted_hist(rec.xi_values, br.weight, edges))
            mix = br.mixture()
            oracle.append(br.weight * mix.bin_probabilities(edges) / width)
            meta[f"retained_{tag}"] = len(rec)
            meta[f"acceptance_{tag}"] = rec.acceptance_rate
            meta[f"ess_{tag}"] = effective_sample_size(rec.xi_values)
            meta[f"tv_{tag}"] = total_variation(rec.xi_values, mix, edges)
            log.info("theta=%.4g %s: %d samples, acceptance %.3f", th, tag, len(rec), rec.acceptance_rate)
        total = cols[0] + cols[1]
        totals.append(total)
        rows = np.column_stack([edges[:-1], edges[1:], cols[0], cols[1], total,
                                oracle[0], oracle[1], oracle[0] + oracle[1]])
        header = ["bin_left", "bin_right", "density_plus", "density_minus", "density_total",
                  "oracle_plus", "oracle_minus", "oracle_total"]
        path = write_csv(_out(cfg) / f"mh_hist_t{i}.csv", header, rows.tolist(), meta)
        print(f"theta={th:.6g}: wrote {path} (mass {float((total * width).sum()):.4f})")
        if cfg.emit_plot:
            write_histogram_svg(_out(cfg) / f"mh_hist_t{i}.svg", edges,
                                {"+": cols[0], "-": cols[1]}, {"analytic": oracle[0] + oracle[1]},
                                title=f"N={cfg.n_pointers}, theta={th:.4g}")

    # Bob-basis independent density: average of the per-angle estimates.
    merged = np.mean(totals, axis=0)
    comps = [w * np.diff(ndtr((edges - m) / uncond.std)) / width for w, m in zip(uncond.weights, uncond.means)]
    header = ["bin_left", "bin_right", "density"] + [f"component_{k}" for k in range(len(comps))] + ["oracle"]
    rows = np.column_stack([edges[:-1], edges[1:], merged] + comps + [uncond.bin_probabilities(edges) / width])
    meta = _meta(cfg, seed=cfg.seed, thetas=" ".join(f"{t:.17g}" for t in cfg.thetas),
                 components=" ".join(f"({w:.17g};{m:.17g})" for w, m in zip(uncond.weights, uncond.means)))
    path = write_csv(_out(cfg) / "mh_unconditional.csv", header, rows.tolist(), meta)
    print(f"unconditional: wrote {path}")
    if cfg.emit_plot:
        write_histogram_svg(_out(cfg) / "mh_unconditional.svg", edges, {"sampled": merged},
                            {"analytic": uncond.bin_probabilities(edges) / width}, title=f"N={cfg.n_pointers}, frame R'")
    return EXIT_OK


def cmd_one_shot(cfg: RunConfig, args) -> int:
    sc = cfg.scenario()
    idx = 0 if args.outcome == "+" else 1
    br = update_after_B(sc, basis_from_angle(args.theta))[idx]
    if br.is_empty:
        raise ConfigError(f"outcome {args.outcome} has zero probability at theta={args.theta}")
    mh = MHConfig(args.iterations or (10 * sc.n_pointers + cfg.thinning), cfg.sigma_q, cfg.burn_in,
                  cfg.thinning, cfg.seed, cfg.init_policy)
    x = one_shot(br.superposition, mh)
    xi = float(np.mean(x))
    meta = _meta(cfg, theta=args.theta, outcome=args.outcome, seed=cfg.seed, iterations=mh.n_iterations, xi=xi)
    path = write_csv(_out(cfg) / "one_shot.csv", ["index", "position"], [[i, v] for i, v in enumerate(x)], meta)
    print(f"xi = {xi:.17g}\nwrote {path}")
    return EXIT_OK


def cmd_infer(cfg: RunConfig, args) -> int:
    sc = cfg.scenario()
    basis = basis_from_angle(args.theta)
    p_plus, p_minus = posterior_given_xi(sc, basis, args.xi)
    branches = update_after_B(sc, basis)
    dens = [0.0 if b.is_empty else b.weight * b.mixture().pdf(args.xi) for b in branches]
    header = ["xi", "theta", "p_plus", "p_minus", "density_plus", "density_minus"]
    sys.stdout.write(format_csv(header, [[args.xi, args.theta, p_plus, p_minus, dens[0], dens[1]]]))
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    suites = args.suite or SUITES
    results = run_verification(cfg.scenario(), suites, fault=args.inject_fault, seed=cfg.seed, edges=cfg.edges)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    def add_globals(parser, default):
        parser.add_argument("--config", default=default, help="key = value configuration file")
        parser.add_argument("--preset", default=default, choices=PRESETS, help="built-in configuration")
        parser.add_argument("--seed", default=default, type=int, help="override mh.seed")
        parser.add_argument("--out", default=default, help="override out_dir")
        parser.add_argument("-v", "--verbose", default=default or False, action="store_true")

    # Globals are accepted before or after the subcommand; the subcommand copy
    # only overrides when actually given.
    common = argparse.ArgumentParser(add_help=False)
    add_globals(common, argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="weakmeas", description=__doc__.splitlines()[0])
    add_globals(p, None)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser
    sub.add_parser = lambda *a, **kw: _add(*a, parents=[common], **kw)

    sub.add_parser("branches", help="outcome branches per angle").set_defaults(func=cmd_branches)
    sub.add_parser("xi-oracle", help="analytic xi densities").set_defaults(func=cmd_xi_oracle)
    sub.add_parser("mh-run", help="sampled xi histograms per angle").set_defaults(func=cmd_mh_run)

    s = sub.add_parser("one-shot", help="one realization of the N pointer positions")
    s.add_argument("--theta", type=_angle, default=math.pi / 4)
    s.add_argument("--outcome", choices=["+", "-"], default="-")
    s.add_argument("--iterations", type=int, help="chain length (default 10*N + thinning)")
    s.set_defaults(func=cmd_one_shot)

    s = sub.add_parser("infer", help="posterior of Bob's outcome given xi")
    s.add_argument("--xi", type=_angle, required=True)
    s.add_argument("--theta", type=_angle, default=0.0)
    s.set_defaults(func=cmd_infer)

    s = sub.add_parser("verify", help="run the invariant suites")
    s.add_argument("--suite", action="append", choices=SUITES)
    s.add_argument("--inject-fault", choices=FAULTS, help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _resolve_config(args)
        return args.func(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WeakMeasError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SAMPLER


if __name__ == "__main__":
    sys.exit(main())
