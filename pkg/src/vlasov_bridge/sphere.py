"""Expansion of a uniformly charged sphere: closed form and ODE trajectories.

A ball of total charge q with spatially uniform density f(t) = 3 a(t) and
radial velocity v = b(t) r expands under its own field.  Its radius obeys

    R'' = gamma_bar / R^2,    R(0) = R0,  R'(0) = 0,

with gamma_bar = -gamma q / (4 pi eps_bar) > 0 for repulsion.  Starting
from rest the trajectory has the exact inverse

    t(R) = R0^(3/2) / sqrt(2 gamma_bar) * (sqrt(x (x - 1)) + arccosh(sqrt(x))),

x = R / R0, which serves as the oracle for the fixed-step integrator below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy.optimize import brentq

from .constants import Constants

# Step-halving agreement required from the RK4 integrator.
ODE_REL_TOL = 1e-8

_MAX_STEPS = 10_000_000


@dataclass(frozen=True)
class SphereState:
    """Sphere trajectory point; density and velocity slope derive from it."""

    t: float
    r_radius: float
    r_dot: float
    q_charge: float
    gamma_bar: float
    r0: float

    def __post_init__(self) -> None:
        if self.gamma_bar <= 0.0:
            raise ValueError("gamma_bar must be positive (repulsive expansion)")
        if self.r0 <= 0.0:
            raise ValueError("initial radius must be positive")
        if self.r_radius < self.r0 * (1.0 - 1e-12):
            raise ValueError("radius below the rest radius on an expanding branch")
        if self.q_charge == 0.0:
            raise ValueError("charge must be nonzero")

    @property
    def a_coef(self) -> float:
        """Displacement-field slope a(t): D = a r, so a = q / (4 pi R^3)."""
        return self.q_charge / (4.0 * math.pi * self.r_radius**3)

    @property
    def b_coef(self) -> float:
        """Velocity slope b(t) = R'/R in v = b r."""
        return self.r_dot / self.r_radius

    @property
    def b_dot(self) -> float:
        """db/dt from b' + b^2 = gamma_bar / R^3."""
        return self.gamma_bar / self.r_radius**3 - self.b_coef**2

    @property
    def f_value(self) -> float:
        """Uniform density f = 3 a = 3 q / (4 pi R^3)."""
        return 3.0 * self.a_coef

    @property
    def first_integral(self) -> float:
        """Conserved energy R'^2 / 2 + gamma_bar / R (= gamma_bar / R0 at rest)."""
        return 0.5 * self.r_dot**2 + self.gamma_bar / self.r_radius


def initial_state(q_charge: float, r0: float, c: Constants) -> SphereState:
    """Rest state at t = 0; requires a repulsive charge/constant combination."""
    gamma_bar = -c.gamma * q_charge / (4.0 * math.pi * c.eps_bar)
    if gamma_bar <= 0.0:
        raise ValueError(
            f"non-repulsive parameters: gamma_bar = {gamma_bar:g} must be > 0"
        )
    return SphereState(
        t=0.0, r_radius=r0, r_dot=0.0, q_charge=q_charge, gamma_bar=gamma_bar, r0=r0
    )


def state_from_gamma_bar(gamma_bar: float, r0: float, c: Constants) -> SphereState:
    """Rest state with gamma_bar prescribed directly; back-computes the charge."""
    if gamma_bar <= 0.0:
        raise ValueError("gamma_bar must be positive")
    q_charge = -4.0 * math.pi * c.eps_bar * gamma_bar / c.gamma
    return SphereState(
        t=0.0, r_radius=r0, r_dot=0.0, q_charge=q_charge, gamma_bar=gamma_bar, r0=r0
    )


def sphere_time_of_radius(r: float, state0: SphereState) -> float:
    """Exact time at which the rest-start trajectory reaches radius r."""
    r0 = state0.r0
    if r < r0:
        raise ValueError(f"radius {r:g} below initial radius {r0:g}")
    x = r / r0
    root = math.sqrt(x * (x - 1.0))
    return r0**1.5 / math.sqrt(2.0 * state0.gamma_bar) * (root + math.acosh(math.sqrt(x)))


def sphere_time_of_density(f: float, state0: SphereState) -> float:
    """Exact time at which the uniform density has dropped to f.

    Density scales as f = f0 (R0/R)^3, so x = R/R0 = (f0/f)^(1/3).
    """
    f0 = 3.0 * state0.q_charge / (4.0 * math.pi * state0.r0**3)
    if not 0.0 < f <= f0 * (1.0 + 1e-12):
        raise ValueError(f"density {f:g} outside the reachable range (0, {f0:g}]")
    x = max((f0 / f) ** (1.0 / 3.0), 1.0)
    return sphere_time_of_radius(x * state0.r0, state0)


def sphere_radius_at_time(t: float, state0: SphereState) -> float:
    """Invert the closed-form t(R) by bracketing and root finding."""
    if t < 0.0:
        raise ValueError("time must be nonnegative")
    if t == 0.0:
        return state0.r0
    hi = 2.0 * state0.r0
    while sphere_time_of_radius(hi, state0) < t:
        hi *= 2.0
    return float(
        brentq(lambda r: sphere_time_of_radius(r, state0) - t, state0.r0, hi)
    )


def _accel(r: float, gamma_bar: float) -> float:
    return gamma_bar / (r * r)


def _rk4_step(r: float, rdot: float, h: float, gamma_bar: float) -> tuple[float, float]:
    k1r, k1v = rdot, _accel(r, gamma_bar)
    k2r, k2v = rdot + 0.5 * h * k1v, _accel(r + 0.5 * h * k1r, gamma_bar)
    k3r, k3v = rdot + 0.5 * h * k2v, _accel(r + 0.5 * h * k2r, gamma_bar)
    k4r, k4v = rdot + h * k3v, _accel(r + h * k3r, gamma_bar)
    return (
        r + h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r),
        rdot + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )


def _march(
    state0: SphereState, n_steps: int, h: float, record_every: int
) -> list[tuple[float, float, float]]:
    """March RK4 from state0, recording (t, R, R') every record_every steps."""
    r, rdot = state0.r_radius, state0.r_dot
    out = [(state0.t, r, rdot)]
    for k in range(1, n_steps + 1):
        r, rdot = _rk4_step(r, rdot, h, state0.gamma_bar)
        if k % record_every == 0:
            out.append((state0.t + k * h, r, rdot))
    return out


def sphere_integrate(
    state0: SphereState, t_end: float, dt: float, rel_tol: float = ODE_REL_TOL
) -> list[SphereState]:
    """Fixed-step RK4 trajectory from state0.t to t_end sampled every dt.

    The whole march is repeated at half the step; if the two disagree beyond
    rel_tol in radius or velocity the step is too coarse and this raises
    rather than return unverified numbers.  The half-step samples are returned.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if t_end < state0.t:
        raise ValueError("t_end precedes the initial state")
    if t_end == state0.t:
        return [state0]
    span = t_end - state0.t
    n_steps = max(1, math.ceil(span / dt))
    if 2 * n_steps > _MAX_STEPS:
        raise ValueError("step count exceeds the safety cap; increase dt")
    h = span / n_steps
    coarse = _march(state0, n_steps, h, 1)
    fine = _march(state0, 2 * n_steps, 0.5 * h, 2)
    r_scale = max(row[1] for row in fine)
    v_scale = max(abs(row[2]) for row in fine) or 1.0
    gap = max(
        max(abs(rc - rf) / r_scale, abs(vc - vf) / v_scale)
        for (_, rc, vc), (_, rf, vf) in zip(coarse, fine)
    )
    if gap > rel_tol:
        raise RuntimeError(
            f"step-halving check failed: relative gap {gap:.3e} > {rel_tol:g}; "
            "reduce dt"
        )
    return [
        replace(state0, t=t, r_radius=r, r_dot=rdot) for t, r, rdot in fine
    ]


def sphere_time_of_radius_numeric(
    r_target: float, state0: SphereState, dt: float = 1e-3
) -> float:
    """Time to reach r_target measured from the ODE alone (no closed form)."""
    if r_target < state0.r_radius:
        raise ValueError("target radius below the starting radius")
    if r_target == state0.r_radius:
        return state0.t
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    t, r, rdot = state0.t, state0.r_radius, state0.r_dot
    for _ in range(_MAX_STEPS):
        r_next, rdot_next = _rk4_step(r, rdot, dt, state0.gamma_bar)
        if r_next >= r_target:
            # Root of the dense single-step solution inside [0, dt].
            def overshoot(tau: float) -> float:
                if tau == 0.0:
                    return r - r_target
                return _rk4_step(r, rdot, tau, state0.gamma_bar)[0] - r_target
            return t + float(brentq(overshoot, 0.0, dt))
        t, r, rdot = t + dt, r_next, rdot_next
    raise RuntimeError("target radius not reached within the step cap")


def first_integral_drift(trajectory: list[SphereState]) -> float:
    """Largest relative drift of R'^2/2 + gamma_bar/R along a trajectory."""
    if not trajectory:
        raise ValueError("empty trajectory")
    ref = trajectory[0].first_integral
    return max(abs(s.first_integral - ref) for s in trajectory) / abs(ref)
