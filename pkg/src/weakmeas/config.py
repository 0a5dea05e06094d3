"""Flat ``key = value`` run configuration.

Numeric values may be arithmetic expressions over ``pi``, ``e``, ``sqrt``,
``sin``, ``cos``, ``exp`` and ``log`` (e.g. ``1/sqrt(12)``). ``theta`` takes a
comma-separated list. ``auto`` selects the default for ``mh.sigma_q`` and
``mh.burn_in``. Lines starting with ``#`` are comments.
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .pointer import PointerShape
from .sampler import INIT_POLICIES, MHConfig
from .scenario import WEIGHTINGS, ScenarioConfig

_FUNCS = {"sqrt": math.sqrt, "sin": math.sin, "cos": math.cos, "exp": math.exp, "log": math.log}
_CONSTS = {"pi": math.pi, "e": math.e}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def eval_number(text: str) -> float:
    """Evaluate a restricted arithmetic expression."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return node.value
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        if isinstance(node, ast.Name) and node.id in _CONSTS:
            return _CONSTS[node.id]
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
                and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(f"unsupported expression element {ast.dump(node)[:40]}")

    try:
        return float(ev(ast.parse(text.strip(), mode="eval")))
    except (SyntaxError, ValueError, TypeError, ZeroDivisionError, OverflowError) as exc:
        raise ValueError(f"cannot evaluate {text!r}: {exc}") from None


def _int(text):
    v = eval_number(text)
    if v != int(v):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(v)


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _auto(conv):
    return lambda t: None if t.strip().lower() == "auto" else conv(t)


def _choice(options):
    def conv(t):
        t = t.strip()
        if t not in options:
            raise ValueError(f"expected one of {options}, got {t!r}")
        return t
    return conv


_KEYS = {
    "alpha": ("alpha", eval_number),
    "beta": ("beta", eval_number),
    "gamma": ("gamma", eval_number),
    "n_pointers": ("n_pointers", _int),
    "g": ("g", eval_number),
    "pointer_s": ("pointer_s", eval_number),
    "theta": ("thetas", lambda t: tuple(eval_number(p) for p in t.split(",") if p.strip())),
    "weighting": ("weighting", _choice(WEIGHTINGS)),
    "mh.sigma_q": ("sigma_q", _auto(eval_number)),
    "mh.iterations": ("iterations", _int),
    "mh.burn_in": ("burn_in", _auto(_int)),
    "mh.thinning": ("thinning", _int),
    "mh.seed": ("seed", _int),
    "mh.chains": ("chains", _int),
    "mh.init": ("init_policy", _choice(INIT_POLICIES)),
    "hist.bins": ("bins", _int),
    "hist.min": ("xi_min", eval_number),
    "hist.max": ("xi_max", eval_number),
    "out_dir": ("out_dir", lambda t: t.strip()),
    "emit_plot": ("emit_plot", _bool),
}


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 1 / math.sqrt(12)
    beta: float = math.sqrt(5 / 6)
    gamma: float = 1 / math.sqrt(12)
    n_pointers: int = 200
    g: float = 0.1
    pointer_s: float = 1 / math.sqrt(2)
    thetas: tuple = (0.0, math.pi / 4)
    weighting: str = "postselected"
    sigma_q: float | None = None
    iterations: int = 1_002_000
    burn_in: int | None = None
    thinning: int = 40
    seed: int = 0
    chains: int = 8
    init_policy: str = "from_mixture"
    bins: int = 50
    xi_min: float = -0.25
    xi_max: float = 0.25
    out_dir: str = "out"
    emit_plot: bool = False
    source: str = field(default="<defaults>", compare=False)

    def __post_init__(self):
        if self.bins < 2:
            raise ConfigError("need at least 2 bins", key="hist.bins")
        if not self.xi_min < self.xi_max:
            raise ConfigError("hist.min must be below hist.max", key="hist.min")
        if not self.thetas:
            raise ConfigError("at least one angle is required", key="theta")
        if not 1 <= self.chains <= 1000:
            raise ConfigError("mh.chains must lie in [1, 1000]", key="mh.chains")
        try:
            self.scenario()
            self.mh_config()
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None

    def scenario(self) -> ScenarioConfig:
        return ScenarioConfig(self.alpha, self.beta, self.gamma, self.n_pointers, self.g,
                              PointerShape(self.pointer_s), weighting=self.weighting)

    def mh_config(self, seed: int | None = None) -> MHConfig:
        return MHConfig(self.iterations, self.sigma_q, self.burn_in, self.thinning,
                        self.seed if seed is None else seed, self.init_policy)

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.xi_min, self.xi_max, self.bins + 1)

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def parse_config(text: str, source: str = "<string>", base: RunConfig | None = None) -> RunConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, _, value = (p.strip() for p in line.partition("="))
        if key not in _KEYS:
            raise ConfigError("unknown key", key=key, line=lineno)
        attr, conv = _KEYS[key]
        try:
            values[attr] = conv(value)
        except ValueError as exc:
            raise ConfigError(str(exc), key=key, line=lineno) from None
    try:
        return replace(base or RunConfig(), source=source, **values)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}", key=exc.key, line=exc.line) from None


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, str(path))


PRESETS = ("n200", "n400")


def load_preset(name: str) -> RunConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESETS}")
    text = resources.files("weakmeas").joinpath("presets", f"{name}.cfg").read_text()
    return parse_config(text, f"preset:{name}")
