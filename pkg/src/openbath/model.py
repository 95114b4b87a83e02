"""Domain types, configuration validation, and unit conventions.

Units: the hopping rate J sets the unit of energy whenever J > 0; for purely
dissipative baths (J = 0) the emitter-bath coupling Omega is the unit.
Energies are complex with the convention that a mode with complex energy
``e - 1j*g`` evolves as ``exp(-1j*e*t - g*t)``; physical poles and bath modes
therefore have non-positive imaginary part.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BadDimension,
    ConfigError,
    NonPositiveGamma,
    OverlappingEmitters,
)

DEFAULT_THETA = -math.pi / 2

BAND_KINDS = ("cosine_1d", "gapped_cosine_1d", "sqrt_sin_1d", "cosine_3d", "custom_grid")

#: default uniform k-grid sizes for custom bands, per dimension
CUSTOM_GRID_DEFAULT_1D = 4096
CUSTOM_GRID_DEFAULT_3D = 128


@dataclass(frozen=True)
class BathParams:
    """Parameters of the dissipative bath band structure.

    The reference band (``cosine_1d``) has dispersion ``eps_k = 2J cos(k+theta)``
    and dissipation ``gamma_k = gamma0 + Gamma (1 + cos k)``; with the default
    ``theta = -pi/2`` the dispersion is ``2J sin k``.  ``Nb = 0`` means the
    thermodynamic limit.
    """

    Gamma: float
    J: float = 0.0
    theta: Optional[float] = None  # None -> default -pi/2 filled by validate()
    gamma0: float = 0.0
    Nb: int = 0
    dim: int = 1
    band_kind: str = "cosine_1d"
    grid_size: int = 0  # 0 -> per-dimension default for custom_grid
    gamma_grid: Optional[tuple] = None  # uniform k-grid samples for custom_grid

    @property
    def theta_value(self) -> float:
        return DEFAULT_THETA if self.theta is None else self.theta

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["gamma_grid"] is not None:
            d["gamma_grid"] = list(d["gamma_grid"])
        return d

    @staticmethod
    def from_dict(d: dict) -> "BathParams":
        d = dict(d)
        if d.get("gamma_grid") is not None:
            d["gamma_grid"] = tuple(d["gamma_grid"])
        return BathParams(**d)


@dataclass(frozen=True)
class EmitterConfig:
    """Emitter detuning, Kerr interaction, coupling, drive, and placement."""

    Delta: float = 0.0
    U: float = 0.0
    Omega: float = 1.0
    drive_eps: float = 0.0
    omega_d: Optional[float] = None  # None -> resonant with the dominant pole
    positions: tuple = (0,)

    @property
    def n_emitters(self) -> int:
        return len(self.positions)

    @property
    def d(self) -> int:
        """Separation of the two emitters (0 for a single emitter)."""
        if len(self.positions) < 2:
            return 0
        return abs(self.positions[1] - self.positions[0])

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(d: dict) -> "EmitterConfig":
        d = dict(d)
        d["positions"] = tuple(d["positions"])
        return EmitterConfig(**d)


@dataclass(frozen=True)
class QuasiboundState:
    """A complex pole of an emitter propagator and its spectral weight."""

    pole: complex
    residue: complex
    channel: str = "single"  # single | even | odd | pair
    wavefunction: Optional[dict] = None

    @property
    def energy(self) -> float:
        return self.pole.real

    @property
    def decay_rate(self) -> float:
        return -self.pole.imag


@dataclass
class SpectralRepresentation:
    """Pole set plus discretized branch-cut density of a propagator.

    ``G(w) ~ sum_s Z_s/(w - pole_s) + sum_m weight_m/(w - node_m)`` with all
    singularities strictly below the real axis.  The sum of residues and cut
    weights equals 1 (the propagator decays as 1/w).
    """

    poles: list
    cut_positions: np.ndarray
    cut_weights: np.ndarray
    regime: str  # dispersive | dissipative

    def total_weight(self) -> complex:
        return sum(p.residue for p in self.poles) + complex(np.sum(self.cut_weights))

    def flattened(self):
        """All singular terms as (positions, weights) arrays."""
        pos = np.concatenate([np.array([p.pole for p in self.poles], dtype=complex),
                              self.cut_positions.astype(complex)])
        wts = np.concatenate([np.array([p.residue for p in self.poles], dtype=complex),
                              self.cut_weights.astype(complex)])
        return pos, wts


@dataclass(frozen=True)
class ScalingFit:
    """Result of a log-log power-law fit ``y = prefactor * x**(-exponent)``."""

    exponent: float
    prefactor: float
    window: tuple
    r_squared: float
    n_points: int


@dataclass
class TimeSeries:
    """Complex amplitudes on an ascending time grid, tagged with the method."""

    times: np.ndarray
    values: np.ndarray
    meta: str = "residues+cut"  # residues+cut | fft | oracle

    def population(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def validate(bath: BathParams, emitter: EmitterConfig) -> tuple:
    """Check invariants and fill defaults; returns the validated pair.

    Raises NonPositiveGamma, OverlappingEmitters, or BadDimension on bad input.
    The default coupling phase theta = -pi/2 is applied here, exactly once.
    """
    if not (bath.Gamma > 0):
        raise NonPositiveGamma(f"Gamma must be positive, got {bath.Gamma}")
    if bath.J < 0:
        raise ConfigError(f"J must be non-negative, got {bath.J}")
    if bath.gamma0 < 0:
        raise NonPositiveGamma(f"gamma0 must be non-negative, got {bath.gamma0}")
    if bath.Nb != 0 and bath.Nb < 2:
        raise ConfigError(f"Nb must be 0 (thermodynamic limit) or >= 2, got {bath.Nb}")
    if bath.dim not in (1, 2, 3):
        raise BadDimension(f"dim must be 1, 2, or 3, got {bath.dim}")
    if bath.band_kind not in BAND_KINDS:
        raise ConfigError(f"unknown band_kind {bath.band_kind!r}")
    if bath.band_kind == "cosine_3d" and bath.dim != 3:
        raise BadDimension("cosine_3d requires dim=3")
    if bath.band_kind.endswith("_1d") and bath.dim != 1:
        raise BadDimension(f"{bath.band_kind} requires dim=1")
    if bath.band_kind == "custom_grid" and bath.gamma_grid is None:
        raise ConfigError("custom_grid requires gamma_grid samples")

    if emitter.drive_eps < 0:
        raise ConfigError(f"drive_eps must be non-negative, got {emitter.drive_eps}")
    if emitter.Omega < 0:
        raise ConfigError(f"Omega must be non-negative, got {emitter.Omega}")
    if len(emitter.positions) not in (1, 2):
        raise ConfigError("positions must hold one or two lattice sites")
    if len(set(emitter.positions)) != len(emitter.positions):
        raise OverlappingEmitters(f"emitter positions coincide: {emitter.positions}")

    grid_size = bath.grid_size
    if bath.band_kind == "custom_grid" and grid_size == 0:
        grid_size = CUSTOM_GRID_DEFAULT_1D if bath.dim == 1 else CUSTOM_GRID_DEFAULT_3D

    bath = BathParams(
        Gamma=float(bath.Gamma),
        J=float(bath.J),
        theta=bath.theta_value,
        gamma0=float(bath.gamma0),
        Nb=int(bath.Nb),
        dim=int(bath.dim),
        band_kind=bath.band_kind,
        grid_size=int(grid_size),
        gamma_grid=bath.gamma_grid,
    )
    emitter = EmitterConfig(
        Delta=float(emitter.Delta),
        U=float(emitter.U),
        Omega=float(emitter.Omega),
        drive_eps=float(emitter.drive_eps),
        omega_d=None if emitter.omega_d is None else float(emitter.omega_d),
        positions=tuple(int(x) for x in emitter.positions),
    )
    return bath, emitter


def serialize(bath: BathParams, emitter: EmitterConfig) -> str:
    """Canonical JSON form of a validated configuration (round-trip stable)."""
    return json.dumps({"bath": bath.to_dict(), "emitter": emitter.to_dict()},
                      sort_keys=True, separators=(",", ":"))


def deserialize(text: str) -> tuple:
    d = json.loads(text)
    return BathParams.from_dict(d["bath"]), EmitterConfig.from_dict(d["emitter"])


def config_hash(bath: BathParams, emitter: EmitterConfig) -> str:
    import hashlib

    return hashlib.sha256(serialize(bath, emitter).encode()).hexdigest()[:16]
