"""Coefficient triple of the velocity splitting and analogue-medium constants."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Constants:
    """Constants of the map between continuity data and the wave equation.

    The mean velocity splits as v = -alpha grad(Phi) + gamma A with div A = 0.
    beta sets the phase scale of the wavefunction (hbar_eff = 1/beta).
    eps_bar and mu_bar are the permittivity and permeability of the
    electromagnetic analogue; their defaults give D = E and B = H.
    """

    alpha: float
    beta: float
    gamma: float
    eps_bar: float = 1.0
    mu_bar: float = 1.0

    def __post_init__(self):
        if self.alpha == 0.0:
            raise ValueError("alpha must be nonzero")
        if self.beta == 0.0:
            raise ValueError("beta must be nonzero")
        if self.gamma == 0.0:
            raise ValueError("gamma must be nonzero")
        if self.eps_bar <= 0.0 or self.mu_bar <= 0.0:
            raise ValueError("eps_bar and mu_bar must be positive")

    @property
    def hbar_eff(self) -> float:
        return 1.0 / self.beta

    @staticmethod
    def physical(hbar: float = 1.0, mass: float = 1.0, charge: float = 1.0) -> "Constants":
        """Quantum preset alpha = -hbar/(2m), beta = 1/hbar, gamma = -charge/mass."""
        return Constants(
            alpha=-hbar / (2.0 * mass),
            beta=1.0 / hbar,
            gamma=-charge / mass,
        )


DEFAULT_CONSTANTS = Constants(alpha=-0.5, beta=1.0, gamma=-1.0)
