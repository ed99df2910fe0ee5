"""Hamiltonian lift to the cotangent chart and blow-up coordinates.

A cotangent point (xi, x) is described by the frame Hamiltonians
h_i = <xi, f_i(x)>. The blow-up replaces (h_1..h_k) with (rho, u) where
rho = ||(h_1..h_k)|| and u lives on the unit sphere, so the singular set
{h_1 = ... = h_k = 0} becomes the sphere bundle {rho = 0}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CovectorError, DimensionError, FrameError

__all__ = [
    "UNIT_TOL",
    "CotangentPoint",
    "LiftedPoint",
    "BracketData",
    "lift_h",
    "pairing_table",
    "bracket_data",
    "to_blowup",
    "from_blowup",
    "annihilator_covector",
]

UNIT_TOL = 1e-9


def _frozen_array(obj, name, value, shape=None):
    value = np.array(value, dtype=float)
    if shape is not None and value.shape != shape:
        raise DimensionError(f"{name} must have shape {shape}, got {value.shape}")
    if not np.isfinite(value).all():
        raise CovectorError(f"{name} has non-finite entries: {value!r}")
    value.setflags(write=False)
    object.__setattr__(obj, name, value)
    return value


@dataclass(frozen=True)
class CotangentPoint:
    """A point lambda = (xi, x) of the cotangent chart with xi never null."""

    xi: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        xi = _frozen_array(self, "xi", self.xi)
        _frozen_array(self, "x", self.x, shape=xi.shape)
        if not np.any(xi):
            raise CovectorError("extremal covector must be nonzero")


@dataclass(frozen=True)
class LiftedPoint:
    """Blow-up coordinates (rho, u, h_{k+1..n}, x) of a cotangent point."""

    rho: float
    u: np.ndarray
    h_tail: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho", float(self.rho))
        u = _frozen_array(self, "u", self.u)
        h_tail = _frozen_array(self, "h_tail", self.h_tail)
        _frozen_array(self, "x", self.x)
        if self.rho < 0:
            raise CovectorError(f"rho must be nonnegative, got {self.rho}")
        if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
            raise CovectorError(
                f"sphere coordinate must be unit (norm {np.linalg.norm(u)!r})"
            )
        if self.rho == 0.0 and not np.any(h_tail):
            raise CovectorError("rho and h_tail cannot vanish simultaneously")

    @property
    def k(self):
        return self.u.size

    @property
    def h_head(self):
        """The raw coordinates (h_1..h_k) = rho * u."""
        return self.rho * self.u


@dataclass(frozen=True)
class BracketData:
    """The pair H0I = (h_{0i})_i and the skew matrix HIJ = (h_{ij})_{ij}."""

    H0I: np.ndarray
    HIJ: np.ndarray

    def __post_init__(self):
        H0I = _frozen_array(self, "H0I", self.H0I)
        HIJ = _frozen_array(self, "HIJ", self.HIJ, shape=(H0I.size, H0I.size))
        if np.abs(HIJ + HIJ.T).max() > UNIT_TOL:
            raise CovectorError("HIJ must be skew-symmetric")


def lift_h(system, lam, i):
    """Frame Hamiltonian h_i(lambda) = <xi, f_i(x)> for i in 0..n."""
    return float(lam.xi @ system.field(i)(lam.x))


def pairing_table(system, xi, x, step=None):
    """Values f_a(x) and the full antisymmetric table <xi, [f_a, f_b](x)>.

    Returns (values, table) where values[a] = f_a(x) and
    table[a, b] = <xi, [f_a, f_b](x)> for a, b in 0..n; the table is exactly
    antisymmetric by construction.
    """
    values, jac = system.values_and_jacobians(x, step)
    w = np.einsum("aij,i->aj", jac, xi)
    p = values @ w.T
    return values, p - p.T


def bracket_data(system, lam, step=None):
    """Bracket Hamiltonians (H0I, HIJ) at a cotangent point.

    H0I[i] = <xi, [f0, f_{i+1}](x)> and HIJ[i][j] = <xi, [f_{i+1}, f_{j+1}](x)>;
    HIJ is skew-symmetrized exactly so downstream spectral reasoning can rely
    on eigenvalues sitting on the imaginary axis.
    """
    k = system.k
    _, table = pairing_table(system, lam.xi, lam.x, step)
    H0I = table[0, 1:k + 1]
    HIJ = table[1:k + 1, 1:k + 1]
    HIJ = 0.5 * (HIJ - HIJ.T)
    return BracketData(H0I, HIJ)


def to_blowup(system, lam, u_at_zero=None):
    """Coordinate change (xi, x) -> (rho, u, h_tail, x).

    On the singular set the sphere direction is genuinely non-unique, so a
    direction ``u_at_zero`` must be supplied there by the caller.
    """
    k = system.k
    h = system.frame_matrix(lam.x).T @ lam.xi
    head = h[:k]
    rho = float(np.linalg.norm(head))
    if rho > 0.0:
        u = head / rho
    else:
        if u_at_zero is None:
            raise CovectorError(
                "point lies on the blow-up fiber; a sphere direction is required"
            )
        u = np.asarray(u_at_zero, dtype=float)
        nu = np.linalg.norm(u)
        if abs(nu - 1.0) > UNIT_TOL:
            raise CovectorError("supplied fiber direction must be a unit vector")
    return LiftedPoint(rho, u, h[k:], lam.x)


def from_blowup(system, lp):
    """Reconstruct the unique covector with <xi, f_i(x)> = (rho*u, h_tail)."""
    frame = system.frame_matrix(lp.x)
    h = np.concatenate([lp.rho * lp.u, lp.h_tail])
    try:
        xi = np.linalg.solve(frame.T, h)
    except np.linalg.LinAlgError:
        raise FrameError(f"frame degenerate at {lp.x.tolist()}") from None
    if not np.isfinite(xi).all():
        raise FrameError(f"frame solve produced non-finite covector at {lp.x.tolist()}")
    return CotangentPoint(xi, lp.x)


def annihilator_covector(system, x, normalize=True):
    """Covector annihilating f_1..f_{n-1} at x (requires k = n - 1).

    Computed as the generalized cross product w with <w, z> =
    det(f_1, .., f_{n-1}, z); normalized to unit length with the first nonzero
    component positive so the orientation is deterministic.
    """
    n, k = system.n, system.k
    if k != n - 1:
        raise DimensionError(f"annihilator covector requires k = n - 1, got k={k}, n={n}")
    x = np.asarray(x, dtype=float)
    cols = system.frame_matrix(x)[:, :k]
    w = np.empty(n)
    eye = np.eye(n)
    for i in range(n):
        w[i] = np.linalg.det(np.column_stack([cols, eye[:, i]]))
    norm = np.linalg.norm(w)
    if norm <= 1e-300 or not np.isfinite(norm):
        raise FrameError(f"controlled fields dependent at {x.tolist()}")
    for wi in w:
        if abs(wi) > 1e-12 * norm:
            if wi < 0:
                w = -w
            break
    return w / norm if normalize else w
