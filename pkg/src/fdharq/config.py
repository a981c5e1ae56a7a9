"""Scenario parameters and derived SINR thresholds.

All powers and variances are stored in linear scale. Conversion from dB
happens only at the boundary (:func:`from_db` and scenario files).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path


class Scheme(str, enum.Enum):
    """Transmission schemes compared throughout the package."""

    S2D1 = "s2d1"
    S2D2 = "s2d2"
    AF = "af"
    SDF = "sdf"
    CONVENTIONAL = "conventional"
    ENHANCED = "enhanced"


PROCEDURES = (Scheme.CONVENTIONAL, Scheme.ENHANCED)


class ConfigError(ValueError):
    """Raised when a parameter set violates a physical invariant."""


def db2lin(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def lin2db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class SystemParams:
    """Every constant of one scenario, in linear scale.

    ``p_s2d`` is the transmit power of the relay-free reference link. When
    left as ``None`` it equals ``p_s + p_r`` so that the cooperative and
    direct systems spend the same total power.
    """

    p_s: float = 1.0
    p_r: float = 1.0
    var_sd: float = 1.0
    var_sr: float = 1.0
    var_rd: float = 1.0
    var_rr: float = 0.0
    n_r: float = 1.0
    n_d: float = 1.0
    rate: float = 1.0
    t_codewords: int = 64
    tau: int = 4
    tti_us: float = 125.0
    p_s2d: float | None = None

    @property
    def s2d_power(self) -> float:
        return self.p_s + self.p_r if self.p_s2d is None else self.p_s2d

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Thresholds:
    eta: float
    eta_i: float
    eta_iii: float


@dataclass(frozen=True)
class RateParams:
    """Rates of the exponential link-SINR distributions."""

    alpha_sd: float
    alpha_sr: float
    alpha_rd: float


def validate(params: SystemParams) -> SystemParams:
    """Return ``params`` unchanged, or raise :class:`ConfigError` naming the
    first violated invariant."""
    positive = ("p_s", "p_r", "var_sd", "var_sr", "var_rd", "n_r", "n_d", "tti_us")
    for name in positive:
        value = getattr(params, name)
        if not value > 0:
            raise ConfigError(f"{name} must be positive")
    if not params.var_rr >= 0:
        raise ConfigError("var_rr must be nonnegative")
    if not params.rate > 0:
        raise ConfigError("rate must be positive")
    if int(params.t_codewords) != params.t_codewords or params.t_codewords < 1:
        raise ConfigError("t_codewords must be a positive integer")
    if int(params.tau) != params.tau or params.tau < 0:
        raise ConfigError("tau must be a nonnegative integer")
    if params.tau >= params.t_codewords:
        raise ConfigError("tau >= t_codewords")
    if params.p_s2d is not None and not params.p_s2d > 0:
        raise ConfigError("p_s2d must be positive")
    return params


def thresholds(params: SystemParams) -> Thresholds:
    r = params.rate
    overhead = (params.t_codewords + params.tau) / params.t_codewords
    return Thresholds(
        eta=2.0**r - 1.0,
        eta_i=2.0 ** (overhead * r) - 1.0,
        eta_iii=2.0 ** (2.0 * r) - 1.0,
    )


def relay_interference(params: SystemParams) -> float:
    """Noise-plus-RSI power at the relay input, ``P_R σ²_RR + N_R``."""
    return params.p_r * params.var_rr + params.n_r


def rate_params(params: SystemParams, alpha_sr_variant: str = "rsi") -> RateParams:
    """Exponential rate parameters of γ_SD, γ_SR and γ_RD.

    ``alpha_sr_variant="rsi"`` (default) uses the mean of γ_SR including the
    residual self-interference; ``"printed"`` drops it, i.e. ``1/(P_S σ²_SR)``.
    """
    if alpha_sr_variant == "rsi":
        alpha_sr = relay_interference(params) / (params.p_s * params.var_sr)
    elif alpha_sr_variant == "printed":
        alpha_sr = 1.0 / (params.p_s * params.var_sr)
    else:
        raise ValueError(f"unknown alpha_sr variant {alpha_sr_variant!r}")
    return RateParams(
        alpha_sd=params.n_d / (params.p_s * params.var_sd),
        alpha_sr=alpha_sr,
        alpha_rd=params.n_d / (params.p_r * params.var_rd),
    )


def amplification_factor(params: SystemParams, h_sr_sq):
    """AF gain meeting the relay power constraint for an instantaneous |h_SR|²."""
    return (params.p_r / (params.p_s * h_sr_sq + relay_interference(params))) ** 0.5


_DB_KEYS = {
    "p_db": ("p_s", "p_r"),
    "p_s_db": ("p_s",),
    "p_r_db": ("p_r",),
    "p_s2d_db": ("p_s2d",),
    "var_sd_db": ("var_sd",),
    "var_sr_db": ("var_sr",),
    "var_rd_db": ("var_rd",),
    "var_sr_rd_db": ("var_sr", "var_rd"),
    "var_rr_db": ("var_rr",),
    "n_r_db": ("n_r",),
    "n_d_db": ("n_d",),
}


def from_db(**kwargs) -> SystemParams:
    """Build validated params from a mix of dB keys (``p_db``, ``var_sd_db``,
    ...) and plain linear fields.

    ``var_rr_db=None`` means negligible RSI (``var_rr = 0``).

    >>> p = from_db(p_db=0.0, var_sd_db=10.0)
    >>> p.p_s, p.var_sd
    (1.0, 10.0)
    """
    linear = {}
    names = {f.name for f in fields(SystemParams)}
    for key, value in kwargs.items():
        if key in _DB_KEYS:
            for target in _DB_KEYS[key]:
                try:
                    linear[target] = 0.0 if value is None else db2lin(value)
                except TypeError:
                    raise ConfigError(f"{key} must be a number") from None
        elif key in names:
            linear[key] = value
        else:
            raise ConfigError(f"unknown parameter {key!r}")
    try:
        return validate(SystemParams(**linear))
    except TypeError as exc:
        raise ConfigError(f"non-numeric parameter: {exc}") from None


@dataclass(frozen=True)
class Scenario:
    params: SystemParams
    seed: int | None = None


def load_scenario(path: str | Path) -> Scenario:
    """Read a JSON scenario: any :func:`from_db` keys plus an optional ``seed``."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("scenario must be a JSON object")
    seed = raw.pop("seed", None)
    if seed is not None and (not isinstance(seed, int) or seed < 0):
        raise ConfigError("seed must be a nonnegative integer")
    return Scenario(from_db(**raw), seed)


def save_scenario(path: str | Path, params: SystemParams, seed: int | None = None) -> None:
    """Write ``params`` in linear units; :func:`load_scenario` reads it back."""
    data = params.to_dict()
    if seed is not None:
        data["seed"] = seed
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
