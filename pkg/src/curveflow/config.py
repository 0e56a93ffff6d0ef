"""Flat ``key = value`` experiment configuration.

Lines are ``key = value``; ``#`` starts a comment.  Step parameters
(``tau``, ``gamma``, ``epsilon``, ``delta``, ``stop_tol``) may be arithmetic
expressions in the mesh size ``h``, ``J`` and ``pi``, e.g. ``epsilon = h^2``.
They are checked at parse time and evaluated once the partition is known.
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CurveflowError

SCENARIOS = ("torus-bending", "torus-geodesic", "torus-instability", "indentation", "custom")
GENERATORS = ("torus-seed", "random", "single-fold")
SURFACES = ("torus", "sphere")
FLOWS = ("bending", "geodesic", "indentation")
BCS = ("clamped", "both-ends-fixed", "periodic")

EXPRESSION_KEYS = ("tau", "gamma", "epsilon", "delta", "stop_tol")
EXPRESSION_NAMES = ("h", "J", "pi")

_CHOICES = {"scenario": SCENARIOS, "flow": FLOWS, "surface": SURFACES, "bc": BCS,
            "generator": GENERATORS}
_INTS = ("J", "seed", "max_steps", "quad_points", "snapshot_stride", "snapshot_samples")
_FLOATS = ("a", "b", "R", "r", "amplitude")
_BOOLS = ("midpoint_normal", "csv", "json", "svg")
_STRINGS = ("out",)
KNOWN_KEYS = tuple(_CHOICES) + _INTS + _FLOATS + _BOOLS + _STRINGS + EXPRESSION_KEYS

DEFAULTS = {
    "J": "80", "seed": "0", "max_steps": "1000", "quad_points": "4", "snapshot_stride": "0",
    "snapshot_samples": "8", "a": "1", "b": "2", "R": "2", "r": "1", "amplitude": "0.3",
    "midpoint_normal": "true", "csv": "true", "json": "true", "svg": "false",
    "out": "curveflow-out", "tau": "h", "gamma": "0", "epsilon": "1", "delta": "0",
    "stop_tol": "auto",
}

SCENARIO_DEFAULTS = {
    "torus-bending": {"flow": "bending", "surface": "torus", "bc": "clamped",
                      "generator": "torus-seed", "max_steps": "300"},
    "torus-geodesic": {"flow": "geodesic", "surface": "torus", "bc": "clamped",
                       "generator": "torus-seed", "gamma": "1 - h", "max_steps": "300"},
    "torus-instability": {"flow": "geodesic", "surface": "torus", "bc": "periodic",
                          "generator": "torus-seed", "gamma": "1", "max_steps": "500"},
    "indentation": {"flow": "indentation", "surface": "sphere", "bc": "periodic",
                    "generator": "random", "delta": "1/4", "epsilon": "h^2", "max_steps": "2000"},
    "custom": {},
}
CUSTOM_REQUIRED = ("flow", "surface", "bc", "generator")


class ConfigError(CurveflowError):
    """Unparseable or inconsistent experiment configuration."""


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_FUNCS = {"sqrt": math.sqrt}


def _check_expr(node):
    if isinstance(node, ast.Expression):
        return _check_expr(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return
    if isinstance(node, ast.Name) and node.id in EXPRESSION_NAMES:
        return
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        _check_expr(node.left)
        _check_expr(node.right)
        return
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _check_expr(node.operand)
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords:
        return _check_expr(node.args[0])
    raise ValueError(f"unsupported element {ast.dump(node)[:40]}")


def _eval(node, env):
    if isinstance(node, ast.Expression):
        return _eval(node.body, env)
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        return float(env[node.id])
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.UnaryOp):
        return _UNARY[type(node.op)](_eval(node.operand, env))
    return _FUNCS[node.func.id](_eval(node.args[0], env))


@dataclass(frozen=True)
class Expression:
    """Arithmetic in h, J and pi; ``^`` is a power."""

    text: str

    def __post_init__(self):
        try:
            tree = ast.parse(self.text.replace("^", "**"), mode="eval")
            _check_expr(tree)
        except (SyntaxError, ValueError) as exc:
            raise ConfigError(f"bad expression {self.text!r}: {exc}") from None
        object.__setattr__(self, "_tree", tree)

    def __call__(self, h: float, J: int) -> float:
        try:
            return float(_eval(self._tree, {"h": h, "J": J, "pi": math.pi}))
        except (ArithmeticError, ValueError) as exc:
            raise ConfigError(f"cannot evaluate {self.text!r}: {exc}") from None


def _bool(key, text):
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


@dataclass
class ExperimentConfig:
    scenario: str
    flow: str
    surface: str
    bc: str
    generator: str
    J: int
    seed: int
    max_steps: int
    quad_points: int
    snapshot_stride: int
    snapshot_samples: int
    a: float
    b: float
    R: float
    r: float
    amplitude: float
    midpoint_normal: bool
    csv: bool
    json: bool
    svg: bool
    out: str
    tau: Expression
    gamma: Expression
    epsilon: Expression
    delta: Expression
    stop_tol: Expression | None
    raw: dict = field(default_factory=dict)  # resolved key -> text, for echo and re-runs

    def resolve(self, h: float) -> dict:
        """Numeric step parameters for mesh size ``h``."""
        vals = {k: getattr(self, k)(h, self.J) for k in ("tau", "gamma", "epsilon", "delta")}
        vals["stop_tol"] = None if self.stop_tol is None else self.stop_tol(h, self.J)
        if not vals["tau"] > 0:
            raise ConfigError(f"tau must be positive, got {vals['tau']}")
        if not 0.0 <= vals["gamma"] <= 1.0:
            raise ConfigError(f"gamma must lie in [0, 1], got {vals['gamma']}")
        if self.flow == "indentation":
            if not vals["epsilon"] > 0:
                raise ConfigError(f"epsilon must be positive, got {vals['epsilon']}")
            if not 0.0 <= vals["delta"] < 1.0:
                raise ConfigError(f"delta must lie in [0, 1), got {vals['delta']}")
        if vals["stop_tol"] is not None and vals["stop_tol"] < 0:
            raise ConfigError("stop_tol must be nonnegative")
        return vals

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.raw.items())


def parse_text(text: str, source: str = "<config>") -> ExperimentConfig:
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        entries[key] = value
    if "scenario" not in entries:
        raise ConfigError(f"{source}: missing required key 'scenario'")
    scenario = entries["scenario"]
    if scenario not in SCENARIOS:
        raise ConfigError(f"{source}: unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    if scenario == "custom":
        missing = [k for k in CUSTOM_REQUIRED if k not in entries]
        if missing:
            raise ConfigError(f"{source}: custom scenario needs {', '.join(missing)}")
    raw = {"scenario": scenario, **DEFAULTS, **SCENARIO_DEFAULTS[scenario], **entries}
    return _build(raw, source)


def _build(raw: dict, source: str) -> ExperimentConfig:
    kw = {"raw": dict(sorted(raw.items(), key=lambda kv: KNOWN_KEYS.index(kv[0])))}
    for key, text in raw.items():
        try:
            if key in _CHOICES:
                if text not in _CHOICES[key]:
                    raise ConfigError(f"{key}: {text!r} is not one of {_CHOICES[key]}")
                kw[key] = text
            elif key in _INTS:
                kw[key] = int(text)
            elif key in _FLOATS:
                kw[key] = float(text)
            elif key in _BOOLS:
                kw[key] = _bool(key, text)
            elif key == "stop_tol":
                kw[key] = None if text == "auto" else Expression(text)
            elif key in EXPRESSION_KEYS:
                kw[key] = Expression(text)
            else:
                kw[key] = text
        except ValueError:
            raise ConfigError(f"{source}: {key}: cannot parse {text!r}") from None
        except ConfigError as exc:
            raise ConfigError(f"{source}: {exc}") from None
    cfg = ExperimentConfig(**kw)
    _validate(cfg, source)
    return cfg


def _validate(cfg: ExperimentConfig, source: str):
    problems = []
    if cfg.J < 2 or (cfg.generator == "random" and cfg.J < 8):
        problems.append("J too small (need J >= 2, and J >= 8 for random starts)")
    if cfg.max_steps < 0 or cfg.snapshot_stride < 0 or cfg.snapshot_samples < 1:
        problems.append("step counts must be nonnegative and snapshot_samples >= 1")
    if not 1 <= cfg.quad_points <= 10:
        problems.append("quad_points must lie in 1..10")
    if not cfg.R > cfg.r > 0:
        problems.append("torus radii need R > r > 0")
    if cfg.amplitude < 0:
        problems.append("amplitude must be nonnegative")
    if cfg.generator == "torus-seed" and cfg.surface != "torus":
        problems.append("torus-seed generator needs surface = torus")
    if cfg.generator in ("random", "single-fold") and cfg.surface != "sphere":
        problems.append(f"{cfg.generator} generator needs surface = sphere")
    if cfg.flow == "indentation" and cfg.surface != "sphere":
        problems.append("indentation flow needs surface = sphere")
    if cfg.generator == "torus-seed":
        if cfg.bc == "periodic" and not (cfg.a.is_integer() and cfg.b.is_integer()):
            problems.append("periodic bc needs integer torus-seed frequencies a, b")
    elif cfg.bc != "periodic":
        problems.append(f"{cfg.generator} generator produces closed curves; use bc = periodic")
    if cfg.generator == "torus-seed" and cfg.a == 0 and cfg.b == 0:
        problems.append("torus seed needs (a, b) != (0, 0)")
    if problems:
        raise ConfigError(f"{source}: " + "; ".join(problems))


def load(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_text(text, str(path))
