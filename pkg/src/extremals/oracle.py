"""Independent brute-force validators.

Nothing here shares a code path with the analytic routines it checks: sphere
membership is probed by seeded quasi-uniform sampling plus local descent,
zeros of the sphere field are found by sampling plus tangent-space Newton,
and small linear time-optimal instances are solved by enumerating
piecewise-constant schedules on a time/direction grid with exact
matrix-exponential propagation per piece.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import DimensionError, NoScheduleError
from .lift import _frozen_array

__all__ = [
    "LinearInstance",
    "GridSpec",
    "BangBangSchedule",
    "sphere_membership_oracle",
    "zero_search_g",
    "bangbang_grid_solver",
]


@dataclass(frozen=True)
class LinearInstance:
    """Linear system x' = A x + B u with ||u|| <= 1 and endpoint pair (x0, x1)."""

    A_dyn: np.ndarray
    B_ctrl: np.ndarray
    x0: np.ndarray
    x1: np.ndarray

    def __post_init__(self):
        a = _frozen_array(self, "A_dyn", self.A_dyn)
        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionError(f"A_dyn must be square, got {a.shape}")
        b = _frozen_array(self, "B_ctrl", self.B_ctrl)
        if b.ndim != 2 or b.shape[0] != n:
            raise DimensionError(f"B_ctrl must be {n} x k, got {b.shape}")
        sv = np.linalg.svd(b, compute_uv=False)
        if sv[-1] <= 1e-12 * max(1.0, sv[0]):
            raise DimensionError("columns of B_ctrl must be independent")
        _frozen_array(self, "x0", self.x0, shape=(n,))
        _frozen_array(self, "x1", self.x1, shape=(n,))

    @property
    def n(self):
        return self.A_dyn.shape[0]

    @property
    def k(self):
        return self.B_ctrl.shape[1]


def _sphere_samples(rng, k, count):
    pts = rng.normal(size=(count, k))
    norms = np.linalg.norm(pts, axis=1)
    good = norms > 1e-12
    return pts[good] / norms[good, None]


def _descend_distance(H0I, HIJ, u, iters=500):
    """Projected-gradient minimization of ||HIJ u - H0I||^2 on the sphere."""
    norm2 = np.linalg.norm(HIJ, 2) ** 2

    def f(v):
        r = HIJ @ v - H0I
        return float(r @ r)

    alpha = 1.0 / (2.0 * norm2 + 1.0)
    val = f(u)
    for _ in range(iters):
        grad = 2.0 * HIJ.T @ (HIJ @ u - H0I)
        tangent = grad - (grad @ u) * u
        tn = float(np.linalg.norm(tangent))
        if tn < 1e-13:
            break
        trial = u - alpha * tangent
        trial /= np.linalg.norm(trial)
        tval = f(trial)
        if tval <= val - 1e-4 * alpha * tn * tn:
            u, val = trial, tval
            alpha = min(alpha * 1.25, 1e3)
        else:
            alpha *= 0.5
            if alpha < 1e-18:
                break
    return math.sqrt(val)


def sphere_membership_oracle(H0I, HIJ, samples=4000, *, seed=0, n_refine=10):
    """Approximate min over the unit sphere of ||HIJ u - H0I||.

    Quasi-uniform seeded sampling (normalized standard normals) followed by
    projected-gradient refinement from the best candidates. The returned
    value is an upper bound on the true minimum and refinement never
    increases it.
    """
    H0I = np.asarray(H0I, dtype=float)
    HIJ = np.asarray(HIJ, dtype=float)
    k = H0I.size
    if k == 1:
        return float(min(abs(HIJ[0, 0] - H0I[0]), abs(-HIJ[0, 0] - H0I[0])))
    rng = np.random.default_rng(seed)
    pts = _sphere_samples(rng, k, int(samples))
    dists = np.linalg.norm(pts @ HIJ.T - H0I, axis=1)
    result = float(dists.min())
    for idx in np.argsort(dists)[:n_refine]:
        result = min(result, _descend_distance(H0I, HIJ, pts[idx].copy()))
    return result


def _g_value(H0I, HIJ, u):
    return H0I - (H0I @ u) * u - HIJ @ u


def _tangent_rows(u):
    _, _, vt = np.linalg.svd(u[None, :])
    return vt[1:]


def _newton_zero(H0I, HIJ, u, iters=60):
    k = u.size
    eye = np.eye(k)
    for _ in range(iters):
        g = _g_value(H0I, HIJ, u)
        if np.linalg.norm(g) < 1e-13:
            return u
        jac = -((H0I @ u) * eye + HIJ + np.outer(u, H0I))
        q = _tangent_rows(u)
        try:
            delta = np.linalg.solve(q @ jac @ q.T, -(q @ g))
        except np.linalg.LinAlgError:
            return None
        nd = np.linalg.norm(delta)
        if nd > 1.0:
            delta *= 1.0 / nd
        u = u + q.T @ delta
        u /= np.linalg.norm(u)
    return u if np.linalg.norm(_g_value(H0I, HIJ, u)) < 1e-10 else None


def zero_search_g(H0I, HIJ, samples=2000, *, seed=0, n_refine=50,
                  zero_tol=1e-8, cluster_tol=1e-6):
    """All zeros of u -> H0I - <H0I, u> u - HIJ u on the sphere, by search.

    Sphere sampling ranks candidates by ||g||; the best ones are polished by
    Newton iteration restricted to the tangent space, and converged zeros are
    clustered. Returns the cluster centers as rows (possibly empty).
    """
    H0I = np.asarray(H0I, dtype=float)
    HIJ = np.asarray(HIJ, dtype=float)
    k = H0I.size
    if k == 1:
        out = [np.array([s]) for s in (1.0, -1.0)
               if np.linalg.norm(_g_value(H0I, HIJ, np.array([s]))) < zero_tol]
        return np.array(out) if out else np.empty((0, 1))
    rng = np.random.default_rng(seed)
    pts = _sphere_samples(rng, k, int(samples))
    gnorms = np.linalg.norm(
        H0I - (pts @ H0I)[:, None] * pts - pts @ HIJ.T, axis=1)
    # rank candidates within each hemisphere <H0I, u> >< 0 separately: any
    # zero pairs with +-<H0I, u> != 0, so this covers both basins
    side = pts @ H0I >= 0.0
    order = np.concatenate([
        np.flatnonzero(side)[np.argsort(gnorms[side])][:n_refine // 2],
        np.flatnonzero(~side)[np.argsort(gnorms[~side])][:n_refine // 2],
    ])
    centers = []
    for idx in order:
        z = _newton_zero(H0I, HIJ, pts[idx].copy())
        if z is None or np.linalg.norm(_g_value(H0I, HIJ, z)) >= zero_tol:
            continue
        if all(np.linalg.norm(z - c) > cluster_tol for c in centers):
            centers.append(z)
    return np.array(centers) if centers else np.empty((0, k))


@dataclass(frozen=True)
class GridSpec:
    """Discretization for the schedule enumeration."""

    t_max: float
    n_time: int
    n_dir: int = 16

    def __post_init__(self):
        if self.t_max <= 0 or self.n_time <= 0 or self.n_dir <= 0:
            raise ValueError("GridSpec entries must be positive")


@dataclass(frozen=True)
class BangBangSchedule:
    """Arrival time, switch times, and per-segment directions of a schedule."""

    arrival_time: float
    switch_times: tuple
    directions: tuple
    miss: float

    @property
    def n_switches(self):
        return len(self.switch_times)


def _control_directions(k, n_dir):
    if k == 1:
        return [np.array([1.0]), np.array([-1.0])]
    if k == 2:
        angles = 2.0 * np.pi * np.arange(n_dir) / n_dir
        return [np.array([math.cos(a), math.sin(a)]) for a in angles]
    raise DimensionError(f"schedule enumeration supports k <= 2, got k = {k}")


def bangbang_grid_solver(inst, max_switches, grid, *, hit_tol=1e-3):
    """Minimal grid arrival time for piecewise-constant sphere-valued controls.

    Enumerates control directions from a grid on the unit sphere and up to
    ``max_switches`` switch times on the uniform time grid, propagating the
    linear dynamics exactly per piece through the matrix exponential of the
    augmented system. A state counts as arrived when it comes within
    ``hit_tol`` of x1. Raises NoScheduleError when nothing hits at this
    resolution.
    """
    if inst.n > 3 or inst.k > 2:
        raise DimensionError("grid solver is desk-scale: n <= 3, k <= 2")
    if max_switches < 0:
        raise ValueError("max_switches must be nonnegative")
    x1 = inst.x1
    if np.linalg.norm(inst.x0 - x1) <= hit_tol:
        return BangBangSchedule(0.0, (), (), float(np.linalg.norm(inst.x0 - x1)))
    n = inst.n
    dt = grid.t_max / grid.n_time
    dirs = _control_directions(inst.k, grid.n_dir)
    # per-direction one-step affine propagators via the augmented exponential
    steps = []
    for d in dirs:
        aug = np.zeros((n + 1, n + 1))
        aug[:n, :n] = inst.A_dyn
        aug[:n, n] = inst.B_ctrl @ d
        mat = expm(aug * dt)
        steps.append((mat[:n, :n], mat[:n, n]))

    nt = grid.n_time
    best = None  # (arrival_index, miss, switch_indices, dir_indices)

    def consider(idx, miss, sw, ds):
        nonlocal best
        if best is None or (idx, miss) < (best[0], best[1]):
            best = (idx, miss, sw, ds)

    # cumulative affine propagators: x after m steps under dir d is
    # powers[d][m] @ x + offsets[d][m]
    powers, offsets = [], []
    for e_mat, v in steps:
        pw = np.empty((nt + 1, n, n))
        off = np.empty((nt + 1, n))
        pw[0] = np.eye(n)
        off[0] = 0.0
        for m in range(1, nt + 1):
            pw[m] = e_mat @ pw[m - 1]
            off[m] = e_mat @ off[m - 1] + v
        powers.append(pw)
        offsets.append(off)

    def scan_leg(di, x_start, t_idx):
        """Earliest hit continuing from x_start at grid index t_idx under dir di."""
        horizon = nt - t_idx
        if horizon <= 0:
            return None
        ys = powers[di][1:horizon + 1] @ x_start + offsets[di][1:horizon + 1]
        miss = np.linalg.norm(ys - x1, axis=1)
        hits = np.flatnonzero(miss <= hit_tol)
        if hits.size == 0:
            return None
        m = int(hits[0]) + 1
        return t_idx + m, float(miss[hits[0]])

    for di in range(len(dirs)):
        hit = scan_leg(di, inst.x0, 0)
        if hit is not None:
            consider(hit[0], hit[1], (), (di,))

    if max_switches >= 1:
        orbits = [powers[d] @ inst.x0 + offsets[d] for d in range(len(dirs))]
        for d0 in range(len(dirs)):
            for i1 in range(1, nt):
                if best is not None and i1 >= best[0]:
                    break
                for d1 in range(len(dirs)):
                    if d1 == d0:
                        continue
                    hit = scan_leg(d1, orbits[d0][i1], i1)
                    if hit is not None:
                        consider(hit[0], hit[1], (i1,), (d0, d1))

    if max_switches >= 2:
        if max_switches > 2:
            raise NotImplementedError("schedule enumeration supports <= 2 switches")
        orbits = [powers[d] @ inst.x0 + offsets[d] for d in range(len(dirs))]
        for d0 in range(len(dirs)):
            for i1 in range(1, nt - 1):
                if best is not None and i1 >= best[0]:
                    break
                for d1 in range(len(dirs)):
                    if d1 == d0:
                        continue
                    mid = powers[d1][: nt - i1] @ orbits[d0][i1] + offsets[d1][: nt - i1]
                    for m1 in range(1, nt - i1):
                        i2 = i1 + m1
                        if best is not None and i2 >= best[0]:
                            break
                        for d2 in range(len(dirs)):
                            if d2 == d1:
                                continue
                            hit = scan_leg(d2, mid[m1], i2)
                            if hit is not None:
                                consider(hit[0], hit[1], (i1, i2), (d0, d1, d2))

    if best is None:
        raise NoScheduleError(
            f"no schedule reaches the target within {hit_tol} at this resolution"
        )
    idx, miss, sw, ds = best
    return BangBangSchedule(idx * dt, tuple(i * dt for i in sw),
                            tuple(dirs[i].copy() for i in ds), miss)
