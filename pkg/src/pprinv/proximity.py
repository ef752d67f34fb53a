"""Unified PPR-based proximity construction.

One configuration type covers the whole family: a truncated random-walk sum
with per-hop stopping probabilities, degree scaling on both sides, a scalar
weight, and an elementwise activation, clamped at zero. Named presets
reproduce the proximity matrices of the published factorization methods.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass

import numpy as np

from .graph import Graph, transition_matrix

# Entries at or below this before a log activation are emitted as 0 rather
# than -inf; the outer max{0, .} would zero any such entry anyway.
LOG_FLOOR = 1e-300

IDENTITY = "identity"
LOG = "log"
ROW_L2 = "row_l2"
_ACTIVATIONS = (IDENTITY, LOG, ROW_L2)


class Preset(enum.Enum):
    STRAP = "strap"
    APPROX_PPR = "approxppr"
    NRP = "nrp"
    LEMANE = "lemane"
    SENSEI = "sensei"
    DEEPWALK = "deepwalk"


@dataclass(frozen=True)
class ProximityConfig:
    """Parameters of the truncated proximity matrix.

    b: scalar weight; beta/gamma: degree exponents applied on the left/right;
    k_start: first hop included in the sum; k_horizon: truncation horizon K;
    alphas: per-hop stopping probabilities, length K+1; epsilon: threshold;
    activation: elementwise transform applied before the zero clamp.
    """

    b: float
    beta: float
    gamma: float
    k_start: int
    k_horizon: int
    alphas: tuple[float, ...]
    epsilon: float
    activation: str

    def __post_init__(self) -> None:
        if self.b <= 0:
            raise ValueError("b must be positive")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0 <= self.k_start <= self.k_horizon:
            raise ValueError("need 0 <= k_start <= k_horizon")
        if len(self.alphas) != self.k_horizon + 1:
            raise ValueError("alphas must have length k_horizon + 1")
        # The last hop may stop with probability exactly 1 (Lemane-style
        # schedules terminate the walk at the horizon).
        if any(not 0.0 < a <= 1.0 for a in self.alphas):
            raise ValueError("stopping probabilities must lie in (0, 1]")
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")

    @classmethod
    def constant_alpha(
        cls,
        alpha: float,
        *,
        b: float,
        beta: float = 0.0,
        gamma: float = 0.0,
        k_start: int = 0,
        k_horizon: int,
        epsilon: float,
        activation: str = IDENTITY,
    ) -> "ProximityConfig":
        return cls(
            b=b,
            beta=beta,
            gamma=gamma,
            k_start=k_start,
            k_horizon=k_horizon,
            alphas=(alpha,) * (k_horizon + 1),
            epsilon=epsilon,
            activation=activation,
        )


def hop_coefficients(cfg: ProximityConfig) -> np.ndarray:
    """Walk-stop weights c_l = alpha_l * prod_{j<l}(1 - alpha_j).

    Hops below k_start get coefficient 0. For a constant schedule this is
    the geometric alpha * (1-alpha)^l.
    """
    coeffs = np.zeros(cfg.k_horizon + 1)
    survive = 1.0
    for l, alpha in enumerate(cfg.alphas):
        if l >= cfg.k_start:
            coeffs[l] = alpha * survive
        survive *= 1.0 - alpha
    return coeffs


def truncated_ppr(g: Graph, cfg: ProximityConfig) -> np.ndarray:
    """Sum of c_i * P^i for i in [k_start, K], built by iterated Q <- Q @ P."""
    p = transition_matrix(g)
    coeffs = hop_coefficients(cfg)
    acc = np.zeros_like(p)
    q = np.eye(g.n)
    for i, c in enumerate(coeffs):
        if i > 0:
            q = q @ p
        if c != 0.0:
            acc += c * q
    return acc


def _apply_activation(scaled: np.ndarray, activation: str) -> np.ndarray:
    if activation == IDENTITY:
        return np.maximum(scaled, 0.0)
    if activation == LOG:
        out = np.zeros_like(scaled)
        mask = scaled > LOG_FLOOR
        out[mask] = np.log(scaled[mask])
        return np.maximum(out, 0.0)
    norms = np.linalg.norm(scaled, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return np.maximum(scaled / norms, 0.0)


def build_proximity(g: Graph, cfg: ProximityConfig) -> np.ndarray:
    """Evaluate the full proximity pipeline for one configuration.

    Degree scaling D^beta (left) and D^gamma (right) wrap the truncated walk
    sum, the scalar b/(epsilon*K) rescales it, then the activation and the
    zero clamp apply. Row-L2 normalization replaces the elementwise
    activation when selected. Entries that are exactly zero before a log
    map to 0 (the clamp would zero them regardless), never to -inf.
    """
    if cfg.k_horizon < 1:
        raise ValueError("proximity scalar b/(epsilon*K) requires k_horizon >= 1")
    core = truncated_ppr(g, cfg)
    deg = g.degrees.astype(np.float64)
    if cfg.beta != 0.0:
        core = deg[:, None] ** cfg.beta * core
    if cfg.gamma != 0.0:
        core = core * deg[None, :] ** cfg.gamma
    scaled = (cfg.b / (cfg.epsilon * cfg.k_horizon)) * core
    return _apply_activation(scaled, cfg.activation)


def deepwalk_log_proximity(g: Graph, alpha: float, k_horizon: int) -> np.ndarray:
    """Unclamped log-form proximity used by the analytical inversion.

    log((vol/K) * sum_{i=1..K} alpha (1-alpha)^i P^i D^{-1}) - log(1-alpha),
    i.e. the DEEPWALK preset before the zero clamp. Requires every entry of
    the walk sum to be positive (every pair reachable within K hops).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if k_horizon < 1:
        raise ValueError("k_horizon must be >= 1")
    p = transition_matrix(g)
    deg = g.degrees.astype(np.float64)
    acc = np.zeros_like(p)
    q = np.eye(g.n)
    c = alpha
    for _ in range(k_horizon):
        c *= 1.0 - alpha
        if c == 0.0:
            break
        q = q @ p
        acc += c * q
    inner = (g.volume / ((1.0 - alpha) * k_horizon)) * (acc / deg[None, :])
    if np.any(inner <= 0.0):
        raise ValueError(
            "walk sum has non-positive entries; graph must connect every "
            f"pair within {k_horizon} hops"
        )
    return np.log(inner)


def preset_config(
    preset: Preset | str,
    *,
    alpha: float | None = None,
    epsilon: float | None = None,
    k_horizon: int,
    volume: float | None = None,
    alpha_schedule: tuple[float, ...] | None = None,
) -> ProximityConfig:
    """Instantiate the configuration reproducing a published method.

    DEEPWALK derives its threshold from the graph volume, epsilon =
    (1-alpha)/vol; the closed form's additive -log(1-alpha) constant is
    carried by that epsilon, inside the log activation. LEMANE takes a
    per-hop stopping-probability schedule instead of a constant alpha.
    """
    preset = Preset(preset)
    k = k_horizon

    def constant(**kw):
        if alpha is None:
            raise ValueError(f"{preset.value} preset requires alpha")
        return ProximityConfig.constant_alpha(alpha, k_horizon=k, **kw)

    def need_epsilon() -> float:
        if epsilon is None:
            raise ValueError(f"{preset.value} preset requires epsilon")
        return epsilon

    if preset is Preset.STRAP:
        return constant(b=2.0 * k, epsilon=need_epsilon(), activation=LOG)
    if preset is Preset.APPROX_PPR:
        eps = need_epsilon()
        return constant(b=eps * k, k_start=1, epsilon=eps, activation=IDENTITY)
    if preset is Preset.NRP:
        eps = need_epsilon()
        return constant(
            b=eps * k, beta=1.0, gamma=1.0, k_start=1, epsilon=eps,
            activation=IDENTITY,
        )
    if preset is Preset.LEMANE:
        if alpha_schedule is None:
            raise ValueError("lemane preset requires an alpha schedule")
        return ProximityConfig(
            b=2.0 * k,
            beta=0.0,
            gamma=0.0,
            k_start=0,
            k_horizon=k,
            alphas=tuple(alpha_schedule),
            epsilon=need_epsilon(),
            activation=LOG,
        )
    if preset is Preset.SENSEI:
        eps = need_epsilon()
        return constant(b=eps * k, epsilon=eps, activation=ROW_L2)
    if preset is Preset.DEEPWALK:
        if alpha is None:
            raise ValueError("deepwalk preset requires alpha")
        if volume is None:
            raise ValueError("deepwalk preset requires the graph volume")
        return constant(
            b=1.0,
            gamma=-1.0,
            k_start=1,
            epsilon=(1.0 - alpha) / volume,
            activation=LOG,
        )
    raise ValueError(f"unknown preset {preset!r}")


def parse_alpha_schedule(text, k_horizon: int) -> tuple[float, ...]:
    """Read one stopping probability per line; must supply K+1 values."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    elif isinstance(text, io.IOBase) or hasattr(text, "read"):
        text = text.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    values = [float(line) for line in text.splitlines() if line.strip()]
    if len(values) != k_horizon + 1:
        raise ValueError(
            f"alpha schedule has {len(values)} entries, need {k_horizon + 1}"
        )
    return tuple(values)
