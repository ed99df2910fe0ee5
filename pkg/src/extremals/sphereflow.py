"""Dynamics on the blow-up sphere {rho = 0}.

Two routes are implemented on purpose. The nonlinear route integrates
u' = H0I - <H0I, u> u - HIJ u directly on the sphere with per-step
re-projection. The linear route lifts the flow to
x' = <H0I, y>, y' = x H0I - HIJ y, whose solutions preserve the Lorentz form
Q(x, y) = x^2 - ||y||^2; cone solutions renormalized to the section x = 1
reproduce the sphere flow exactly, so the lift serves as a near-oracle for
the nonlinear integration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import IntegrationError
from .lift import _frozen_array
from .stepping import adaptive_rk

__all__ = [
    "SphereState",
    "LorentzState",
    "sphere_rhs",
    "integrate_sphere",
    "sphere_limits",
    "lorentz_matrix",
    "lorentz_form",
    "integrate_lorentz",
    "cone_directions",
]


@dataclass(frozen=True)
class SphereState:
    """Sphere coordinate u at rescaled time s."""

    u: np.ndarray
    s: float

    def __post_init__(self):
        _frozen_array(self, "u", self.u)
        object.__setattr__(self, "s", float(self.s))


@dataclass(frozen=True)
class LorentzState:
    """State (x, y) of the linear lift at rescaled time s."""

    x_scalar: float
    y: np.ndarray
    s: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x_scalar", float(self.x_scalar))
        _frozen_array(self, "y", self.y)
        object.__setattr__(self, "s", float(self.s))


def sphere_rhs(u, H0I, HIJ):
    """Right-hand side g(u) = H0I - <H0I, u> u - HIJ u; tangent to the sphere."""
    u = np.asarray(u, dtype=float)
    return H0I - (H0I @ u) * u - HIJ @ u


def _integrate_one_direction(u0, H0I, HIJ, s_target, rtol, atol, s_eval,
                             max_drift_box):
    states = []

    def project(y):
        nrm = np.linalg.norm(y)
        drift = abs(nrm - 1.0)
        if drift > max_drift_box[0]:
            max_drift_box[0] = drift
        return y / nrm

    def record(s, y):
        states.append(SphereState(y.copy(), s))

    def rhs(_, y):
        return sphere_rhs(y, H0I, HIJ)

    adaptive_rk(rhs, 0.0, u0, s_target, rtol=rtol, atol=atol, project=project,
                on_step=record, t_stops=s_eval or ())
    return states


def integrate_sphere(u0, H0I, HIJ, s_span, *, rtol=1e-10, atol=1e-12,
                     s_eval=None, return_drift=False):
    """Integrate the sphere flow with u(0) = u0 over s_span.

    The span may lie on either side of 0 or straddle it; u0 is always the
    state at s = 0. Accepted states are re-projected to the sphere each step
    and the worst pre-projection norm drift is tracked. Returns the states in
    increasing s (and the drift when requested).
    """
    u0 = np.asarray(u0, dtype=float)
    u0 = u0 / np.linalg.norm(u0)
    H0I = np.asarray(H0I, dtype=float)
    HIJ = np.asarray(HIJ, dtype=float)
    s_lo, s_hi = (float(s_span[0]), float(s_span[1]))
    if s_lo > s_hi:
        s_lo, s_hi = s_hi, s_lo
    s_eval = () if s_eval is None else list(s_eval)
    drift_box = [0.0]
    backward, forward = [], []
    if s_lo < 0:
        stops = [s for s in s_eval if s < 0]
        backward = _integrate_one_direction(u0, H0I, HIJ, s_lo, rtol, atol,
                                            stops, drift_box)
    if s_hi > 0:
        stops = [s for s in s_eval if s > 0]
        forward = _integrate_one_direction(u0, H0I, HIJ, s_hi, rtol, atol,
                                           stops, drift_box)
    if not backward and not forward:
        states = [SphereState(u0, 0.0)]
    else:
        states = list(reversed(backward))
        if states and forward:
            forward = forward[1:]  # both directions record s = 0
        states.extend(forward)
    if return_drift:
        return states, drift_box[0]
    return states


def sphere_limits(u0, H0I, HIJ, d, *, s_max=None, rtol=1e-10, atol=1e-12):
    """Forward and backward sphere-flow limits from u0.

    Integrates to +-s_max (default 40/d, scaled by the spectral gap) and
    returns (u_forward, u_backward).
    """
    if s_max is None:
        s_max = 40.0 / float(d)
    states = integrate_sphere(u0, H0I, HIJ, (-s_max, s_max), rtol=rtol, atol=atol)
    return states[-1].u, states[0].u


def lorentz_matrix(H0I, HIJ):
    """Matrix of the linear lift acting on z = (x, y)."""
    H0I = np.asarray(H0I, dtype=float)
    HIJ = np.asarray(HIJ, dtype=float)
    k = H0I.size
    B = np.zeros((k + 1, k + 1))
    B[0, 1:] = H0I
    B[1:, 0] = H0I
    B[1:, 1:] = -HIJ
    return B


def lorentz_form(state):
    """Q(x, y) = x^2 - ||y||^2."""
    return float(state.x_scalar ** 2 - state.y @ state.y)


def integrate_lorentz(z0, H0I, HIJ, s_span, *, n_samples=401):
    """Integrate the linear lift on a uniform s-grid via the matrix exponential.

    Propagation composes expm(B * ds) steps, so the Lorentz form is conserved
    to rounding accuracy per unit time.
    """
    B = lorentz_matrix(H0I, HIJ)
    s0, s1 = float(s_span[0]), float(s_span[1])
    grid = np.linspace(s0, s1, int(n_samples))
    z = np.concatenate([[z0.x_scalar], z0.y])
    if z0.s != s0:
        z = expm(B * (s0 - z0.s)) @ z
    states = [LorentzState(z[0], z[1:].copy(), grid[0])]
    if len(grid) > 1:
        step = expm(B * (grid[1] - grid[0]))
        for s in grid[1:]:
            z = step @ z
            states.append(LorentzState(z[0], z[1:].copy(), s))
    return states


def cone_directions(u0, H0I, HIJ, s_grid):
    """Sphere solution through u0 from the lift, sampled on s_grid.

    The cone point (1, u0) is propagated by the linear flow and renormalized
    to the section x = 1 after each step; since rescaling maps solutions to
    solutions of the linear system, the returned directions y/x are the exact
    sphere-flow states at the grid times, up to rounding. The grid must be
    uniform and contain 0.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    diffs = np.diff(s_grid)
    if diffs.size and not np.allclose(diffs, diffs[0], rtol=1e-12, atol=1e-15):
        raise IntegrationError("cone propagation requires a uniform s-grid")
    i0 = int(np.argmin(np.abs(s_grid)))
    if abs(s_grid[i0]) > 1e-12:
        raise IntegrationError("cone propagation grid must contain s = 0")
    u0 = np.asarray(u0, dtype=float)
    u0 = u0 / np.linalg.norm(u0)
    B = lorentz_matrix(H0I, HIJ)
    k = u0.size
    out = np.empty((s_grid.size, k))
    out[i0] = u0
    if diffs.size:
        ds = diffs[0]
        fwd = expm(B * ds)
        bwd = expm(-B * ds)
        z = np.concatenate([[1.0], u0])
        for i in range(i0 + 1, s_grid.size):
            z = fwd @ z
            if z[0] <= 0:
                raise IntegrationError("cone solution left the positive section")
            z = z / z[0]
            out[i] = z[1:]
        z = np.concatenate([[1.0], u0])
        for i in range(i0 - 1, -1, -1):
            z = bwd @ z
            if z[0] <= 0:
                raise IntegrationError("cone solution left the positive section")
            z = z / z[0]
            out[i] = z[1:]
    return out
