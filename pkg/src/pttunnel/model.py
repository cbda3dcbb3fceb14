"""Physical parameter types and the derived cell geometry quantities.

Natural units throughout: 2m = 1, hbar = 1, c = 1, so the wave vector is
k = sqrt(E) and a free particle crosses a length L in time L/(2k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidEnergyError

__all__ = [
    "Particle",
    "CellSpec",
    "LatticeSpec",
    "Derived",
    "derived_quantities",
]


@dataclass(frozen=True)
class Particle:
    """Incident particle, parameterized by its energy only.

    The wave vector is always derived (k = sqrt(E)); it is never stored, so
    inconsistent (E, k) pairs cannot exist.
    """

    energy: float

    def __post_init__(self) -> None:
        if not (isinstance(self.energy, (int, float)) and math.isfinite(self.energy)):
            raise InvalidEnergyError(f"energy must be finite, got {self.energy!r}")
        if self.energy <= 0.0:
            raise InvalidEnergyError(f"energy must be positive, got {self.energy!r}")

    @property
    def k(self) -> float:
        return math.sqrt(self.energy)


@dataclass(frozen=True)
class CellSpec:
    """One gain/loss pair: +iV over a width `width`, then -iV over the same width.

    ``strength`` is the magnitude V >= 0 of the imaginary potential;
    ``width`` is the width b > 0 of each constituent barrier, so the full
    cell spans 2*width.
    """

    strength: float
    width: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.strength) and self.strength >= 0.0):
            raise ValueError(f"strength must be finite and >= 0, got {self.strength!r}")
        if not (math.isfinite(self.width) and self.width > 0.0):
            raise ValueError(f"width must be finite and > 0, got {self.width!r}")


@dataclass(frozen=True)
class LatticeSpec:
    """Repetition count and the exact total span L = 2*N*b."""

    n_cells: int
    span: float

    def __post_init__(self) -> None:
        if self.n_cells < 0:
            raise ValueError(f"n_cells must be >= 0, got {self.n_cells!r}")
        if not (math.isfinite(self.span) and self.span >= 0.0):
            raise ValueError(f"span must be finite and >= 0, got {self.span!r}")

    @classmethod
    def for_cell(cls, cell: CellSpec, n_cells: int) -> "LatticeSpec":
        return cls(n_cells, 2.0 * n_cells * cell.width)

    def cell_width(self) -> float:
        if self.n_cells == 0:
            raise ValueError("empty lattice has no cell width")
        return self.span / (2.0 * self.n_cells)


@dataclass(frozen=True)
class Derived:
    """Geometry of the complex wave number inside one cell, plus k-derivatives.

    rho and phi are modulus and phase of k2 = sqrt(k^2 + iV), so
    rho = (k^4 + V^2)^(1/4) and phi = arctan(V/k^2)/2 in [0, pi/4).
    alpha = b*rho*cos(phi) and beta = b*rho*sin(phi) are the oscillatory and
    growing phase accumulations across one barrier; u_plus/u_minus are the
    impedance combinations k/rho +- rho/k.  The *_prime fields are exact
    derivatives with respect to k at fixed (V, b).
    """

    rho: float
    phi: float
    alpha: float
    beta: float
    u_plus: float
    u_minus: float
    rho_prime: float
    phi_prime: float
    alpha_prime: float
    beta_prime: float
    u_plus_prime: float
    u_minus_prime: float


def derived_quantities(particle: Particle, cell: CellSpec) -> Derived:
    """Populate every derived geometric quantity for one (particle, cell) pair."""
    k = particle.k
    v = cell.strength
    b = cell.width
    k2 = k * k
    rho2 = math.hypot(k2, v)
    rho = math.sqrt(rho2)
    rho3 = rho * rho2
    rho4 = rho2 * rho2
    phi = 0.5 * math.atan2(v, k2)
    sin_phi = math.sin(phi)
    cos_phi = math.cos(phi)
    return Derived(
        rho=rho,
        phi=phi,
        alpha=b * rho * cos_phi,
        beta=b * rho * sin_phi,
        u_plus=k / rho + rho / k,
        u_minus=k / rho - rho / k,
        rho_prime=(k / rho) ** 3,
        phi_prime=-k * v / rho4,
        alpha_prime=b * k * (v * sin_phi + k2 * cos_phi) / rho3,
        beta_prime=b * k * (k2 * sin_phi - v * cos_phi) / rho3,
        u_plus_prime=v * v / (rho4 * rho) * (1.0 - rho2 / k2),
        u_minus_prime=v * v / (rho4 * rho) * (1.0 + rho2 / k2),
    )
