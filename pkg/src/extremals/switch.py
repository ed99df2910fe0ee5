"""Pointwise singular-locus analysis.

Everything here works on the bracket pair (H0I, HIJ) at a single cotangent
point: ball/sphere membership of H0I in the image of the skew matrix HIJ,
scenario classification, the scalar switch parameter d solving
<[d^2 Id - HIJ^2]^{-1} H0I, H0I> = 1, the jump controls
u_pm = [pm d Id + HIJ]^{-1} H0I, the equilibrium Jacobian of the sphere flow,
the codimension-one determinant condition for k = n - 1, and the rejection
test for singular arcs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    NonSkewError,
    ScenarioError,
    SwitchSolveError,
)
from .fields import lie_bracket
from .lift import _frozen_array

__all__ = [
    "EPS_MEM",
    "EPS_RANK_FACTOR",
    "Scenario",
    "MembershipVerdict",
    "SwitchSolution",
    "SingularArcVerdict",
    "Codim1Result",
    "membership",
    "classify",
    "solve_d",
    "jump_controls",
    "equilibrium_jacobian",
    "tangent_basis",
    "tangent_eigenvalues",
    "codim1_condition",
    "singular_arc_check",
]

EPS_RANK_FACTOR = 1e-10
EPS_MEM = 1e-8
_SKEW_TOL = 1e-9


class Scenario(enum.Enum):
    A = "A"
    B = "B"
    C_PRIME = "Cprime"
    C_DOUBLE_PRIME = "Cdoubleprime"
    COND_EQQ_FAILS = "CondEqqFails"


class SingularArcVerdict(enum.Enum):
    CONTRADICTION_NORM = "contradiction_norm"
    GOH_EXCLUDED = "goh_excluded"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class MembershipVerdict:
    """Membership of H0I in the sphere/ball images of the skew matrix HIJ.

    ``min_norm_solution`` is the minimum-norm v with HIJ v = H0I when H0I lies
    in the range of HIJ, else None. The solution set is v + ker(HIJ) with the
    kernel orthogonal to v, so the attainable solution norms are [||v||, inf)
    when the kernel is nontrivial and exactly {||v||} otherwise.
    """

    in_sphere_image: bool
    in_open_ball_image: bool
    in_closed_ball_image: bool
    min_norm_solution: np.ndarray | None
    rank: int
    residual: float


def _as_pair(H0I, HIJ):
    H0I = np.asarray(H0I, dtype=float)
    HIJ = np.asarray(HIJ, dtype=float)
    if H0I.ndim != 1:
        raise DimensionError(f"H0I must be a vector, got shape {H0I.shape}")
    k = H0I.size
    if HIJ.shape != (k, k):
        raise DimensionError(f"HIJ must be {k}x{k}, got shape {HIJ.shape}")
    scale = max(1.0, float(np.abs(HIJ).max(initial=0.0)))
    if np.abs(HIJ + HIJ.T).max(initial=0.0) > _SKEW_TOL * scale:
        raise NonSkewError("HIJ is not skew-symmetric")
    return H0I, HIJ


def membership(H0I, HIJ, *, eps_mem=EPS_MEM, rank_factor=EPS_RANK_FACTOR):
    """Decide whether H0I lies in HIJ S^{k-1}, HIJ B^k, or the closed-ball image.

    Rank is decided from singular values with tolerance rank_factor times the
    largest one. If H0I is outside the range of HIJ all memberships are false.
    Otherwise, with v the minimum-norm solution: when the kernel is nontrivial
    the sphere and closed-ball images coincide and contain H0I iff
    ||v|| <= 1 + eps_mem, while the open-ball verdict is reserved for the
    nondegenerate case; when the kernel is trivial the verdicts compare ||v||
    against 1 with the eps_mem band reported as sphere membership.
    """
    H0I, HIJ = _as_pair(H0I, HIJ)
    k = H0I.size
    u_mat, sv, vt = np.linalg.svd(HIJ)
    top = sv[0] if sv.size else 0.0
    rank = int(np.sum(sv > rank_factor * top))
    coeffs = u_mat.T @ H0I
    residual = float(np.linalg.norm(coeffs[rank:]))
    norm_h = float(np.linalg.norm(H0I))
    in_range = residual <= max(rank_factor * top, 1e-14) * max(norm_h, 1.0)
    if not in_range:
        return MembershipVerdict(False, False, False, None, rank, residual)
    if rank:
        v = vt[:rank].T @ (coeffs[:rank] / sv[:rank])
    else:
        v = np.zeros(k)
    nv = float(np.linalg.norm(v))
    if rank == k:
        in_sphere = abs(nv - 1.0) <= eps_mem
        in_open = nv < 1.0 - eps_mem
        in_closed = nv <= 1.0 + eps_mem
    else:
        in_sphere = nv <= 1.0 + eps_mem
        in_open = False
        in_closed = in_sphere
    return MembershipVerdict(in_sphere, in_open, in_closed, v, rank, residual)


def classify(H0I, HIJ, *, eps_mem=EPS_MEM, rank_factor=EPS_RANK_FACTOR):
    """Scenario tag for the pair (H0I, HIJ).

    CondEqqFails when H0I sits on the sphere image (boundary cases within
    eps_mem included); otherwise A for odd k, B for degenerate HIJ with k
    even, and Cprime/Cdoubleprime for nondegenerate HIJ according to
    ||HIJ^{-1} H0I|| above or below 1.
    """
    H0I, HIJ = _as_pair(H0I, HIJ)
    verdict = membership(H0I, HIJ, eps_mem=eps_mem, rank_factor=rank_factor)
    if verdict.in_sphere_image:
        return Scenario.COND_EQQ_FAILS
    k = H0I.size
    if k % 2 == 1:
        return Scenario.A
    if verdict.rank < k:
        return Scenario.B
    nv = float(np.linalg.norm(verdict.min_norm_solution))
    if abs(nv - 1.0) <= eps_mem:
        return Scenario.COND_EQQ_FAILS
    return Scenario.C_PRIME if nv > 1.0 else Scenario.C_DOUBLE_PRIME


def _phi_spectral(H0I, HIJ):
    """Spectral data for phi(Z) = sum_j c_j^2 / (Z^2 + m_j)."""
    m, w = np.linalg.eigh(-HIJ @ HIJ)
    m = np.clip(m, 0.0, None)
    csq = (w.T @ H0I) ** 2
    return m, csq


def solve_d(H0I, HIJ, *, tol=1e-13):
    """The unique d > 0 with <[d^2 Id - HIJ^2]^{-1} H0I, H0I> = 1.

    phi(Z) = ||(Z Id + HIJ)^{-1} H0I||^2 is even and strictly decreasing in
    Z^2 (its derivative there equals -||[Z^2 Id - HIJ^2]^{-1} H0I||^2), so
    the root is bracketed on (0, ||H0I|| + ||HIJ|| + 1] and found by bisection
    in Z^2 followed by a Newton polish on the directly evaluated residual.
    Raises SwitchSolveError when no root exists, i.e. when H0I actually lies
    in the closed-ball image of HIJ.
    """
    H0I, HIJ = _as_pair(H0I, HIJ)
    m, csq = _phi_spectral(H0I, HIJ)
    top = m.max(initial=0.0)
    kernel = m <= 1e-14 * max(top, 1.0)
    norm_sq = float(csq.sum())
    kernel_mass = float(csq[kernel].sum())
    if kernel_mass <= 1e-18 * max(norm_sq, 1e-300):
        # H0I in range(HIJ): phi(0+) finite, condition requires it above 1
        limit0 = float(np.sum(csq[~kernel] / m[~kernel])) if (~kernel).any() else 0.0
        if limit0 <= 1.0 + 1e-12:
            raise SwitchSolveError(
                "no positive root: H0I lies in the closed-ball image of HIJ"
            )

    def phi_sec(y):
        return float(np.sum(csq / (y + m)))

    upper = float(np.linalg.norm(H0I) + np.linalg.norm(HIJ, 2) + 1.0)
    expansions = 0
    while phi_sec(upper * upper) >= 1.0:
        upper *= 2.0
        expansions += 1
        if expansions > 200:
            raise SwitchSolveError("failed to bracket the switch parameter")
    lo, hi = 0.0, upper * upper
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if phi_sec(mid) >= 1.0:
            lo = mid
        else:
            hi = mid
    y = 0.5 * (lo + hi)

    eye = np.eye(H0I.size)
    hij_sq = HIJ @ HIJ

    def phi_direct(y):
        w = np.linalg.solve(y * eye - hij_sq, H0I)
        return float(w @ H0I), -float(w @ w)

    for _ in range(60):
        val, slope = phi_direct(y)
        if abs(val - 1.0) <= tol:
            break
        step = (val - 1.0) / slope
        y_new = y - step
        if y_new <= 0.0:
            y_new = 0.5 * y
        y = y_new
    val, _ = phi_direct(y)
    if abs(val - 1.0) > 1e-12:
        raise SwitchSolveError(
            f"switch-parameter polish stalled (|phi(d) - 1| = {abs(val - 1.0):.3e})"
        )
    return float(np.sqrt(y))


@dataclass(frozen=True)
class SwitchSolution:
    """Switch parameter d and the jump controls u_plus, u_minus.

    Invariants: both controls are unit vectors, <H0I, u_pm> = pm d, and both
    are zeros of u -> H0I - <H0I, u> u - HIJ u on the sphere.
    """

    d: float
    u_plus: np.ndarray
    u_minus: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "d", float(self.d))
        up = _frozen_array(self, "u_plus", self.u_plus)
        um = _frozen_array(self, "u_minus", self.u_minus, shape=up.shape)
        if self.d <= 0:
            raise SwitchSolveError(f"switch parameter must be positive, got {self.d}")
        for name, u in (("u_plus", up), ("u_minus", um)):
            if abs(np.linalg.norm(u) - 1.0) > 1e-9:
                raise SwitchSolveError(f"{name} is not a unit vector")


def jump_controls(H0I, HIJ, d):
    """Jump controls u_pm = [pm d Id + HIJ]^{-1} H0I for the parameter d.

    The solves cannot be singular for d > 0 with skew HIJ; the returned
    solution is validated against its defining identities and a failure
    signals numerically corrupted inputs.
    """
    H0I, HIJ = _as_pair(H0I, HIJ)
    d = float(d)
    k = H0I.size
    eye = np.eye(k)
    try:
        u_plus = np.linalg.solve(d * eye + HIJ, H0I)
        u_minus = np.linalg.solve(-d * eye + HIJ, H0I)
    except np.linalg.LinAlgError:
        raise SwitchSolveError("singular jump solve: corrupted inputs") from None
    sol = SwitchSolution(d, u_plus, u_minus)
    scale = max(1.0, float(np.linalg.norm(H0I)))
    for sign, u in ((1.0, sol.u_plus), (-1.0, sol.u_minus)):
        if abs(float(H0I @ u) - sign * d) > 1e-9 * scale:
            raise SwitchSolveError("jump control pairing identity violated")
        g = H0I - (H0I @ u) * u - HIJ @ u
        if np.linalg.norm(g) > 1e-8 * scale:
            raise SwitchSolveError("jump control is not a zero of the sphere field")
    return sol


def equilibrium_jacobian(H0I, HIJ, u_pm):
    """Jacobian -[<H0I, u> Id + HIJ + u H0I^T] of the sphere field at u = u_pm.

    Restricted to the invariant tangent space of the sphere at u_pm, every
    eigenvalue has real part -<H0I, u_pm>.
    """
    H0I, HIJ = _as_pair(H0I, HIJ)
    u_pm = np.asarray(u_pm, dtype=float)
    k = H0I.size
    return -((H0I @ u_pm) * np.eye(k) + HIJ + np.outer(u_pm, H0I))


def tangent_basis(u):
    """Orthonormal basis of the hyperplane orthogonal to u, rows of shape (k-1, k)."""
    u = np.asarray(u, dtype=float)
    _, _, vt = np.linalg.svd(u[None, :] / np.linalg.norm(u))
    return vt[1:]


def tangent_eigenvalues(matrix, u):
    """Eigenvalues of ``matrix`` restricted to the tangent space at u."""
    q = tangent_basis(u)
    if q.shape[0] == 0:
        return np.empty(0, dtype=complex)
    return np.linalg.eigvals(q @ matrix @ q.T)


@dataclass(frozen=True)
class Codim1Result:
    """Determinant data (a, A) at a state point and the codimension-one verdict."""

    a: np.ndarray
    A: np.ndarray
    holds: bool


def codim1_condition(system, q, *, eps_mem=EPS_MEM, rank_factor=EPS_RANK_FACTOR,
                     step=None):
    """Codimension-one condition a(q) not in A(q) S^{n-2} for k = n - 1.

    a_i = det(f_1, .., f_{n-1}, [f_0, f_i]) and
    A_ij = det(f_1, .., f_{n-1}, [f_i, f_j]); the condition holds exactly when
    the membership check of (a, A) reports H0I outside the sphere image.
    """
    n, k = system.n, system.k
    if k != n - 1:
        raise DimensionError(f"codim-1 condition requires k = n - 1, got k={k}, n={n}")
    q = np.asarray(q, dtype=float)
    if step is None:
        step = system.fd_step
    cols = np.column_stack([f(q) for f in system.controlled])
    a = np.empty(k)
    for i in range(k):
        br = lie_bracket(system.drift, system.controlled[i], q, step)
        a[i] = np.linalg.det(np.column_stack([cols, br]))
    A = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            br = lie_bracket(system.controlled[i], system.controlled[j], q, step)
            val = np.linalg.det(np.column_stack([cols, br]))
            A[i, j] = val
            A[j, i] = -val
    verdict = membership(a, A, eps_mem=eps_mem, rank_factor=rank_factor)
    return Codim1Result(a, A, not verdict.in_sphere_image)


def singular_arc_check(H0I, HIJ, *, eps_mem=EPS_MEM, rank_factor=EPS_RANK_FACTOR):
    """Can an extremal stay on the singular locus here, and would it be optimal?

    Along a singular arc the control solves HIJ u = H0I. If there is no
    solution, or every solution has norm above 1, no admissible singular
    control exists (contradiction_norm). A solution strictly inside the ball
    means a singular extremal exists but fails the second-order optimality
    test on interior controls (goh_excluded). Callers must classify first:
    the check is undefined when H0I sits on the sphere image.
    """
    H0I, HIJ = _as_pair(H0I, HIJ)
    verdict = membership(H0I, HIJ, eps_mem=eps_mem, rank_factor=rank_factor)
    if verdict.in_sphere_image:
        raise ScenarioError("singular-arc check undefined on the boundary scenario")
    if verdict.min_norm_solution is None:
        return SingularArcVerdict.CONTRADICTION_NORM
    nv = float(np.linalg.norm(verdict.min_norm_solution))
    if nv > 1.0 + eps_mem:
        return SingularArcVerdict.CONTRADICTION_NORM
    if nv < 1.0 - eps_mem:
        return SingularArcVerdict.GOH_EXCLUDED
    return SingularArcVerdict.INCONCLUSIVE
