"""Physical constants, fiber channel model, and the detector-efficiency-mismatch geometry.

Everything downstream (attack observables, decoy bounds, key rates, the Monte
Carlo validator) is driven by two inputs defined here: a :class:`SystemParams`
record holding the link constants, and an :class:`EfficiencyMatrix` holding the
four equivalent transmission-and-detection efficiencies seen by a faked state
arriving at detector ``m`` (bit value 0/1) at timing ``t_n``.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

# Tolerance for the mismatch-ratio consistency check eta_00/eta_10 == k.
RATIO_RTOL = 1e-12

# Suppression of the blinded detector relative to the nominal Bob-side path:
# eta_01 = t_AB * eta_bob * BLIND_FLOOR.
BLIND_FLOOR = 1e-4


class ConfigError(ValueError):
    """Raised when a parameter file or override contains an invalid entry."""


@dataclass(frozen=True)
class SystemParams:
    """Channel, source, and detector constants of a weak+vacuum decoy BB84 link.

    Attributes:
        alpha: fiber loss coefficient in dB/km.
        dark_count: dark count probability per gate.
        eta_bob: Bob-side transmittance.
        mu: signal-state mean photon number.
        nu: decoy-state mean photon number (0 < nu < mu).
        f_ec: bidirectional error-correction efficiency factor.
        q_sift: sifting factor (1/2 for symmetric basis choice).
        e_detector: intrinsic detector error probability.
        distance: fiber length in km.
    """

    alpha: float = 0.21
    dark_count: float = 1.7e-6
    eta_bob: float = 0.045
    mu: float = 0.48
    nu: float = 0.05
    f_ec: float = 1.22
    q_sift: float = 0.5
    e_detector: float = 0.0
    distance: float = 100.0

    def __post_init__(self) -> None:
        if not 0.0 < self.nu < self.mu:
            raise ConfigError(
                f"need 0 < nu < mu (single-photon yield bound denominator), "
                f"got nu={self.nu}, mu={self.mu}"
            )
        if not 0.0 <= self.dark_count < 1.0:
            raise ConfigError(f"dark_count must be in [0, 1), got {self.dark_count}")
        if not 0.0 < self.eta_bob <= 1.0:
            raise ConfigError(f"eta_bob must be in (0, 1], got {self.eta_bob}")
        if self.alpha <= 0.0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if self.distance < 0.0:
            raise ConfigError(f"distance must be non-negative, got {self.distance}")
        if not 0.0 <= self.e_detector <= 0.5:
            raise ConfigError(f"e_detector must be in [0, 0.5], got {self.e_detector}")
        if not 0.0 < self.q_sift <= 1.0:
            raise ConfigError(f"q_sift must be in (0, 1], got {self.q_sift}")
        if self.f_ec < 1.0:
            raise ConfigError(f"f_ec must be >= 1, got {self.f_ec}")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base: "SystemParams | None" = None) -> "SystemParams":
        """Build params from a flat key/value mapping, on top of ``base`` if given.

        Unknown keys are rejected with the offending key named in the message.
        """
        known = {f.name for f in dataclasses.fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(f"unknown parameter key: {key!r}")
        values = dataclasses.asdict(base) if base is not None else {}
        values.update(data)
        try:
            return cls(**{k: float(v) for k, v in values.items()})
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid parameter value: {exc}") from exc

    @classmethod
    def from_config(cls, path: str | Path, base: "SystemParams | None" = None) -> "SystemParams":
        """Load params from a flat JSON file (keys exactly the field names)."""
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read parameter file {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"parameter file {path} must hold a flat JSON object")
        return cls.from_dict(data, base=base)

    def replace(self, **changes: float) -> "SystemParams":
        return dataclasses.replace(self, **changes)


# GYS experimental constants; the intrinsic detector error is set to zero so
# that all error terms come from dark counts and the attack itself.
GYS = SystemParams()

PRESETS: dict[str, SystemParams] = {"gys": GYS}


def preset(name: str) -> SystemParams:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset: {name!r} (available: {sorted(PRESETS)})") from None


@dataclass(frozen=True)
class EfficiencyMatrix:
    """The four equivalent efficiencies eta_mn (detector m, faked-state timing t_n).

    The geometry is symmetric: the timing-matched pairs eta_00 and eta_11 are
    equal and exceed the blinded pairs eta_01 = eta_10 by the mismatch ratio k.
    """

    eta_00: float
    eta_01: float
    eta_10: float
    eta_11: float
    k: float

    def __post_init__(self) -> None:
        for name in ("eta_00", "eta_01", "eta_10", "eta_11"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {value}")
        if self.k < 1.0:
            raise ValueError(f"mismatch ratio k must be >= 1, got {self.k}")
        if self.eta_00 != self.eta_11:
            raise ValueError("symmetric geometry requires eta_00 == eta_11")
        for num, den in ((self.eta_00, self.eta_10), (self.eta_11, self.eta_01)):
            if not math.isclose(num / den, self.k, rel_tol=RATIO_RTOL):
                raise ValueError(
                    f"mismatch ratio inconsistent: {num}/{den} != k={self.k}"
                )


def channel_transmittance(alpha: float, distance: float) -> float:
    """Fiber transmittance 10^(-alpha*L/10) for loss ``alpha`` dB/km over L km."""
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if distance < 0.0:
        raise ValueError(f"distance must be non-negative, got {distance}")
    return 10.0 ** (-alpha * distance / 10.0)


def dem_efficiencies(k: float, t_ab: float, eta_bob: float) -> EfficiencyMatrix:
    """Efficiency matrix for mismatch ratio ``k`` on a channel of transmittance ``t_ab``.

    The blinded entries sit at the floor t_AB*eta_bob*1e-4; the timing-matched
    entries are k times larger.
    """
    if k < 1.0:
        raise ValueError(f"mismatch ratio k must be >= 1, got {k}")
    for name, value in (("t_ab", t_ab), ("eta_bob", eta_bob)):
        if not 0.0 < value <= 1.0:
            raise ValueError(f"{name} must be in (0, 1], got {value}")
    eta_blind = t_ab * eta_bob * BLIND_FLOOR
    eta_matched = k * eta_blind
    if eta_matched > 1.0:
        raise ValueError(
            f"k*eta_01 = {eta_matched} exceeds 1 (unphysical efficiency)"
        )
    return EfficiencyMatrix(
        eta_00=eta_matched, eta_01=eta_blind, eta_10=eta_blind, eta_11=eta_matched, k=k
    )


def efficiency_matrix(params: SystemParams, k: float) -> EfficiencyMatrix:
    """Efficiency matrix at the distance stored in ``params``."""
    t_ab = channel_transmittance(params.alpha, params.distance)
    return dem_efficiencies(k, t_ab, params.eta_bob)


def poisson_pmf(mean: float, count: int) -> float:
    """P[N = count] for N ~ Poisson(mean)."""
    if mean < 0.0:
        raise ValueError(f"mean must be non-negative, got {mean}")
    if count < 0 or count != int(count):
        raise ValueError(f"count must be a non-negative integer, got {count}")
    count = int(count)
    if mean == 0.0:
        return 1.0 if count == 0 else 0.0
    # exp(k*ln(mean) - mean - ln(k!)) avoids overflow of mean**k for large k.
    return math.exp(count * math.log(mean) - mean - math.lgamma(count + 1))
