"""Trap parameters, thermal state and the renormalized-frequency map.

Natural units are the default: hbar = m = k_B = 1, momenta in sqrt(hbar m Omega).
Physical units are entered by overriding the fields; nothing is converted.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.special import zeta

ZETA3 = float(zeta(3.0))


class InteractionSign(str, enum.Enum):
    """Sign of the harmonic two-body term.

    Attractive interaction lowers the internal frequency, w = sqrt(Omega^2 - N omega^2);
    repulsive raises it, w = sqrt(Omega^2 + N omega^2).
    """

    ATTRACTIVE = "attractive"
    REPULSIVE = "repulsive"


@dataclass(frozen=True)
class TrapModel:
    n_particles: int
    omega_xy: float = 1.0
    omega_z: float = 1.0
    inter_omega: float = 0.0
    inter_sign: InteractionSign = InteractionSign.ATTRACTIVE
    mass: float = 1.0
    hbar: float = 1.0
    boltzmann_k: float = 1.0

    def __post_init__(self):
        if int(self.n_particles) != self.n_particles or self.n_particles < 1:
            raise ValueError(f"n_particles must be a positive integer, got {self.n_particles!r}")
        for name in ("omega_xy", "omega_z", "mass", "hbar", "boltzmann_k"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not (self.inter_omega >= 0 and math.isfinite(self.inter_omega)):
            raise ValueError(f"inter_omega must be non-negative, got {self.inter_omega!r}")
        object.__setattr__(self, "inter_sign", InteractionSign(self.inter_sign))
        # fail early on over-strong attraction
        renormalized_frequencies(self)

    @property
    def is_ideal(self) -> bool:
        return self.inter_omega == 0.0

    @property
    def frequencies(self) -> tuple[float, float]:
        return renormalized_frequencies(self)

    @property
    def momentum_unit(self) -> float:
        """sqrt(hbar m w) with w the geometric-mean internal frequency."""
        return math.sqrt(self.hbar * self.mass * geometric_mean_frequency(self))


@dataclass(frozen=True)
class ThermalPoint:
    temperature: float
    boltzmann_k: float = 1.0

    def __post_init__(self):
        if not (self.temperature > 0 and math.isfinite(self.temperature)):
            raise ValueError(f"temperature must be positive and finite, got {self.temperature!r}")

    @property
    def beta(self) -> float:
        return 1.0 / (self.boltzmann_k * self.temperature)

    @classmethod
    def from_beta(cls, beta: float, boltzmann_k: float = 1.0) -> "ThermalPoint":
        return cls(1.0 / (boltzmann_k * beta), boltzmann_k)


def _renormalize(omega: float, n: int, inter_omega: float, sign: InteractionSign, axis: str) -> float:
    shift = n * inter_omega**2
    squared = omega**2 - shift if sign is InteractionSign.ATTRACTIVE else omega**2 + shift
    if squared <= 0:
        raise ValueError(
            f"renormalized {axis} frequency is not real: Omega_{axis}^2 - N omega^2 = {squared:g} <= 0"
        )
    return math.sqrt(squared) if inter_omega else omega


def renormalized_frequencies(model: TrapModel) -> tuple[float, float]:
    """Internal-mode frequencies (w_xy, w_z); the center of mass keeps (Omega_xy, Omega_z)."""
    sign = InteractionSign(model.inter_sign)
    w_xy = _renormalize(model.omega_xy, model.n_particles, model.inter_omega, sign, "xy")
    w_z = _renormalize(model.omega_z, model.n_particles, model.inter_omega, sign, "z")
    return w_xy, w_z


def geometric_mean_frequency(model: TrapModel) -> float:
    w_xy, w_z = renormalized_frequencies(model)
    return (w_xy * w_xy * w_z) ** (1.0 / 3.0)


def condensation_temperature(model: TrapModel) -> float:
    """T0 = hbar w (N / zeta(3))^(1/3) / k_B, w the geometric mean of (w_xy, w_xy, w_z)."""
    w = geometric_mean_frequency(model)
    return model.hbar * w * (model.n_particles / ZETA3) ** (1.0 / 3.0) / model.boltzmann_k
