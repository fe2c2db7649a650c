"""Step-size and momentum rules for ASVRG."""
from __future__ import annotations

import math
from typing import NamedTuple, Optional

from ..estimator import tau

# Option I preset constants: eta = 1/(a sqrt(mu m L)), omega = sqrt(m mu / L)/b
PRESET_A = 2.5
PRESET_B = 12.5
# regime boundaries for m mu / L_tilde, rounded as published
OPTION1_RANGE = (0.68623, 145.72)
OPTION2_SPLIT = 0.75


class ConfigError(ValueError):
    """A solver configuration that violates a parameter constraint."""


def omega_bound(l_tilde: float, eta: float, tau_b: float = 1.0) -> float:
    """Largest admissible momentum: 1 - tau(b) L eta / (1 - L eta).

    ``tau_b`` is 1 for single-index sampling and ``tau(n, b)`` for mini-batches.
    """
    r = l_tilde * eta
    if not 0 < r < 1:
        raise ConfigError(f"L_tilde * eta = {r:g} must lie in (0, 1)")
    return 1.0 - tau_b * r / (1.0 - r)


def batch_tau(n: int, b: int) -> float:
    return 1.0 if b == 1 else tau(n, b)


def check_omega(omega: float, l_tilde: float, eta: float, tau_b: float = 1.0) -> None:
    bound = omega_bound(l_tilde, eta, tau_b)
    if not omega > 0:
        raise ConfigError(f"momentum omega = {omega:g} must be > 0")
    if omega > bound * (1 + 1e-12) + 1e-15:
        raise ConfigError(
            f"momentum omega = {omega:g} exceeds 1 - tau L eta/(1 - L eta) = {bound:g}; "
            "use a smaller eta or omega")


def contraction_factor(omega: float, m: int, mu: float, eta: float) -> float:
    """1 - omega + omega^2 / (m mu eta), the per-epoch factor for Option I."""
    return 1.0 - omega + omega * omega / (m * mu * eta)


def omega_optimal(m: int, mu: float, eta: float, l_tilde: Optional[float] = None) -> float:
    """m mu eta / 2, the minimiser of the contraction factor over omega.

    When ``l_tilde`` is given the result is checked against the momentum bound.
    """
    w = m * mu * eta / 2.0
    if l_tilde is not None:
        bound = omega_bound(l_tilde, eta)
        if w > bound * (1 + 1e-12):
            raise ConfigError(
                f"optimal omega {w:g} exceeds the bound {bound:g}; pick eta <= "
                f"{max_admissible_eta(m, mu, l_tilde):g}")
    return w


def max_admissible_eta(m: int, mu: float, l_tilde: float) -> float:
    """Largest eta for which m mu eta / 2 satisfies the momentum bound."""
    c1 = l_tilde / (m * mu)
    eta = (1 + 4 * c1 - math.sqrt(1 + 16 * c1 * c1)) / (2 * l_tilde)
    return min(eta, 4.0 / (m * mu))


def omega_next(omega_prev: float) -> float:
    """Positive root of (1 - w)/w^2 = 1/omega_prev^2."""
    w2 = omega_prev * omega_prev
    return (math.sqrt(w2 * w2 + 4.0 * w2) - w2) / 2.0


def restart_period(omega: float, eta: float, m: int, mu: float) -> int:
    """Epochs between restarts, 2 ((1 - omega)/omega + omega/(eta m mu)), rounded up."""
    s = 2.0 * ((1.0 - omega) / omega + omega / (eta * m * mu))
    # guard against 6.000000000000001 -> 7
    return max(1, math.ceil(s - 1e-9))


def option1_range() -> tuple[float, float]:
    """Unrounded regime endpoints: squared roots of x^2/b - (1/(ab) + 1) x + 2/a."""
    a, b = PRESET_A, PRESET_B
    qa, qb, qc = 1.0 / b, -(1.0 / (a * b) + 1.0), 2.0 / a
    disc = math.sqrt(qb * qb - 4 * qa * qc)
    z1 = (-qb - disc) / (2 * qa)
    z2 = (-qb + disc) / (2 * qa)
    return z1 * z1, z2 * z2


class Preset(NamedTuple):
    eta: float
    omega: float
    m: Optional[int]
    restart: Optional[int]


def table_preset(option: str, m: int, mu: float, l_tilde: float) -> Preset:
    """Suggested (eta, omega, epoch length override, restart period).

    ``m`` is None in the result when the epoch length is left at its
    Theta(n) input; ``restart`` is None for Option I.
    """
    if not mu > 0:
        raise ConfigError("presets need mu > 0")
    r = m * mu / l_tilde
    if option == "I":
        lo, hi = OPTION1_RANGE
        if lo <= r <= hi:
            eta = (2.0 / 5.0) * math.sqrt(1.0 / (mu * m * l_tilde))
            omega = (2.0 / 25.0) * math.sqrt(m * mu / l_tilde)
            return Preset(eta, omega, None, None)
        return Preset(1.0 / (5.0 * l_tilde), 1.0 / 5.0, math.ceil(2.0 * l_tilde / mu), None)
    if option == "II":
        if r <= OPTION2_SPLIT:
            eta = 1.0 / (3.0 * l_tilde)
            omega = math.sqrt(m * mu / (3.0 * l_tilde))
        else:
            eta = 1.0 / (4.0 * m * mu)
            omega = 0.5
        return Preset(eta, omega, None, restart_period(omega, eta, m, mu))
    raise ConfigError(f"unknown option {option!r}")
