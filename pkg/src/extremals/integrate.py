"""Integration of time-optimal extremals in blow-up coordinates.

The state is (x, rho, u, h_tail). Away from the singular set the maximized
Hamiltonian h_0 + rho generates the bang dynamics; when rho descends through
a small activation threshold and the local scenario admits a switching, the
control jumps from (approximately) u_minus to u_plus computed from the
bracket data at the crossing point, and bang integration resumes. The
time-rescaled vector field (d/ds = rho * d/dt) is kept for analysis near the
blow-up sphere and for consistency tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    EvaluationError,
    IntegrationError,
    MultipleSwitchError,
    ScenarioError,
)
from .fields import jacobian, lie_bracket
from .lift import LiftedPoint, bracket_data, from_blowup
from .stepping import Event, adaptive_rk
from .switch import Scenario, classify, jump_controls, solve_d
from .sphereflow import sphere_rhs

__all__ = [
    "IntegratorConfig",
    "LiftedRate",
    "SwitchRecord",
    "ExtremalTrajectory",
    "bang_rhs",
    "rescaled_rhs",
    "integrate_extremal",
    "hamiltonian_value",
    "passage_time_bound",
    "flow_continuity_probe",
    "LemmaConstants",
    "sample_lemma_constants",
    "RescaledRun",
    "integrate_rescaled",
    "RhoProbeResult",
    "rho_lower_bound_probe",
    "format_trajectory",
    "export_trajectory",
]


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and chart controls for extremal integration."""

    eps_switch: float = 1e-6
    eps_fd: float = 1e-6
    rtol: float = 1e-8
    atol: float = 1e-10
    max_step: float = math.inf
    chart_radius: float = 10.0
    max_steps: int = 2_000_000

    def __post_init__(self):
        for name in ("eps_switch", "eps_fd", "rtol", "atol", "max_step",
                     "chart_radius"):
            if not getattr(self, name) > 0:
                raise ValueError(f"IntegratorConfig.{name} must be positive")
        if self.max_steps <= 0:
            raise ValueError("IntegratorConfig.max_steps must be positive")


class LiftedRate(NamedTuple):
    x: np.ndarray
    rho: float
    u: np.ndarray
    h_tail: np.ndarray


class _Dynamics:
    """Packed-state evaluation of the bang and rescaled vector fields.

    Packing is y = [x, rho, u, h_tail]. All bracket pairings are produced
    from a single batched Jacobian evaluation per call.
    """

    def __init__(self, system, fd_step):
        self.system = system
        self.n = system.n
        self.k = system.k
        self.fd_step = fd_step

    def split(self, y):
        n, k = self.n, self.k
        return y[:n], y[n], y[n + 1:n + 1 + k], y[n + 1 + k:]

    def pack(self, x, rho, u, h_tail):
        return np.concatenate([np.atleast_1d(x), [rho], np.atleast_1d(u),
                               np.atleast_1d(h_tail)])

    def pieces(self, y):
        x, rho, u, ht = self.split(y)
        values, jac = self.system.values_and_jacobians(x, self.fd_step)
        frame_t = values[1:]
        h = np.concatenate([rho * u, ht])
        xi = np.linalg.solve(frame_t, h)
        w = np.einsum("aij,i->aj", jac, xi)
        p = values @ w.T
        table = p - p.T
        k = self.k
        dx = values[0] + u @ values[1:k + 1]
        H0I = table[0, 1:k + 1]
        HIJ = table[1:k + 1, 1:k + 1]
        drho = float(H0I @ u)
        g = H0I - drho * u - HIJ @ u
        dht = table[0, k + 1:] + u @ table[1:k + 1, k + 1:]
        return x, rho, u, ht, dx, drho, g, dht

    def bang(self, y):
        # a wild stage value (rho driven through 0, state blown up) must make
        # the step reject, not abort the run
        if not np.isfinite(y).all() or y[self.n] <= 0.0:
            return np.full(y.size, np.inf)
        try:
            with np.errstate(all="ignore"):
                _, rho, _, _, dx, drho, g, dht = self.pieces(y)
                return np.concatenate([dx, [drho], g / rho, dht])
        except (EvaluationError, np.linalg.LinAlgError):
            return np.full(y.size, np.inf)

    def rescaled(self, y):
        if not np.isfinite(y).all():
            return np.full(y.size, np.inf)
        try:
            with np.errstate(all="ignore"):
                _, rho, _, _, dx, drho, g, dht = self.pieces(y)
                return np.concatenate([rho * dx, [rho * drho], g, rho * dht])
        except (EvaluationError, np.linalg.LinAlgError):
            return np.full(y.size, np.inf)

    def project(self, y):
        n, k = self.n, self.k
        block = y[n + 1:n + 1 + k]
        norm = np.linalg.norm(block)
        if not np.isfinite(norm) or norm == 0.0:
            return y
        out = y.copy()
        out[n + 1:n + 1 + k] = block / norm
        return out


def bang_rhs(system, lp, step=None):
    """Time derivative of a lifted point under the maximized Hamiltonian.

    Valid only off the blow-up sphere (rho > 0), where the sphere coordinate
    moves as u' = g(u)/rho.
    """
    if lp.rho <= 0:
        raise IntegrationError("bang dynamics undefined at rho = 0; use rescaled_rhs")
    dyn = _Dynamics(system, step if step is not None else system.fd_step)
    y = dyn.pack(lp.x, lp.rho, lp.u, lp.h_tail)
    d = dyn.bang(y)
    x, rho, u, ht = dyn.split(d)
    return LiftedRate(x, float(rho), u, ht)


def rescaled_rhs(system, lp, step=None):
    """Derivative in rescaled time s with dt/ds = rho; smooth at rho = 0.

    On the invariant set {rho = 0} only the sphere coordinate moves, with the
    sphere flow as its equation of motion.
    """
    dyn = _Dynamics(system, step if step is not None else system.fd_step)
    y = dyn.pack(lp.x, lp.rho, lp.u, lp.h_tail)
    d = dyn.rescaled(y)
    x, rho, u, ht = dyn.split(d)
    return LiftedRate(x, float(rho), u, ht)


@dataclass(frozen=True)
class SwitchRecord:
    """One recorded switching, in forward-time orientation.

    ``u_plus``/``u_minus`` are the jump controls predicted from the bracket
    data at the crossing point; the trajectory control jumps between them.
    """

    t: float
    u_before: np.ndarray
    u_after: np.ndarray
    location: LiftedPoint
    d: float
    u_plus: np.ndarray
    u_minus: np.ndarray


class ExtremalTrajectory:
    """Time-ordered samples of an integrated extremal plus switch events."""

    def __init__(self, system, config, ts, states, switches, left_chart):
        self.system = system
        self.config = config
        self.ts = np.asarray(ts, dtype=float)
        self.states = np.asarray(states, dtype=float)
        self.switches = tuple(switches)
        self.left_chart = bool(left_chart)

    def __len__(self):
        return self.ts.size

    @property
    def n_switches(self):
        return len(self.switches)

    def lifted(self, i):
        n, k = self.system.n, self.system.k
        y = self.states[i]
        return LiftedPoint(y[n], y[n + 1:n + 1 + k], y[n + 1 + k:], y[:n])

    def cotangent(self, i):
        return from_blowup(self.system, self.lifted(i))

    def cotangent_vector(self, i):
        lam = self.cotangent(i)
        return np.concatenate([lam.xi, lam.x])

    def rho(self):
        return self.states[:, self.system.n]

    def controls(self):
        n, k = self.system.n, self.system.k
        return self.states[:, n + 1:n + 1 + k]

    def index_at(self, t):
        hits = np.flatnonzero(self.ts == t)
        if hits.size == 0:
            raise KeyError(f"no sample recorded at t = {t!r}")
        return int(hits[0])

    def hamiltonian(self, i):
        return hamiltonian_value(self.system, self.lifted(i))


def hamiltonian_value(system, lp):
    """Maximized Hamiltonian h_0 + rho at a lifted point."""
    lam = from_blowup(system, lp)
    return float(lam.xi @ system.drift(lam.x)) + lp.rho


def _chart_distance(dyn, y, y0):
    n, k = dyn.n, dyn.k
    dx = np.abs(y[:n] - y0[:n]).max()
    h = np.concatenate([y[n] * y[n + 1:n + 1 + k], y[n + 1 + k:]])
    h0 = np.concatenate([y0[n] * y0[n + 1:n + 1 + k], y0[n + 1 + k:]])
    return max(dx, np.abs(h - h0).max())


def integrate_extremal(system, z, t_hat, config=None, *, t_samples=()):
    """Integrate the extremal through z over a duration of |t_hat|.

    Positive t_hat integrates forward from z (samples on [0, t_hat]); negative
    t_hat integrates backward (samples on [t_hat, 0] with z at time 0), which
    realizes anchoring a trajectory to pass through z at a prescribed time.

    When rho crosses the activation threshold downward and the local scenario
    admits a switching, the control jumps to the exit value computed from the
    bracket data at the crossing point and integration resumes; a second
    switching inside the chart raises MultipleSwitchError (chart too large).
    Leaving the chart truncates the trajectory and flags it.
    """
    if config is None:
        config = IntegratorConfig()
    dyn = _Dynamics(system, config.eps_fd)
    y0 = dyn.project(dyn.pack(z.x, z.rho, z.u, z.h_tail))
    if z.rho <= config.eps_switch:
        raise IntegrationError(
            f"initial rho = {z.rho} must exceed eps_switch = {config.eps_switch}"
        )
    t_hat = float(t_hat)
    direction = 1.0 if t_hat >= 0 else -1.0
    eps = config.eps_switch

    ts, states, switches = [], [], []
    left_chart = [False]

    def record(t, y):
        if ts and t == ts[-1]:
            return True
        ts.append(t)
        states.append(y.copy())
        if _chart_distance(dyn, y, y0) > config.chart_radius:
            left_chart[0] = True
            return False
        return True

    def rho_event(_, y):
        return y[dyn.n] - eps

    def h_limit(_, y):
        rho = y[dyn.n]
        if rho >= 4.0 * eps:
            return math.inf
        drho = dyn.bang(y)[dyn.n]
        return eps / (abs(drho) + 1e-30)

    def bang_f(_, y):
        return dyn.bang(y)

    t_cur, y_cur = 0.0, y0
    while True:
        stops = [s for s in t_samples if direction * (s - t_cur) > 1e-15
                 and direction * (t_hat - s) > 0]
        res = adaptive_rk(
            bang_f, t_cur, y_cur, t_hat, rtol=config.rtol, atol=config.atol,
            max_step=config.max_step, project=dyn.project, on_step=record,
            events=(Event(rho_event, direction=-1, tol=1e-12),),
            t_stops=stops, h_limit=h_limit, max_steps=config.max_steps,
        )
        if res.status in ("finished", "stopped"):
            break
        # switching threshold crossed while descending
        x, rho, u, ht = dyn.split(res.y)
        location = LiftedPoint(rho, u, ht, x)
        data = bracket_data(system, from_blowup(system, location), config.eps_fd)
        scenario = classify(data.H0I, data.HIJ)
        if scenario is Scenario.COND_EQQ_FAILS:
            raise ScenarioError(
                "boundary scenario at the switching point; cannot jump"
            )
        if scenario is Scenario.C_DOUBLE_PRIME:
            raise IntegrationError(
                "rho reached the switching threshold in the C'' scenario: "
                "tolerance inconsistency (rho should stay bounded below)"
            )
        sol = jump_controls(data.H0I, data.HIJ, solve_d(data.H0I, data.HIJ))
        new_u = sol.u_plus if direction > 0 else sol.u_minus
        if direction > 0:
            rec = SwitchRecord(res.t, u.copy(), sol.u_plus, location, sol.d,
                               sol.u_plus, sol.u_minus)
        else:
            rec = SwitchRecord(res.t, sol.u_minus, u.copy(), location, sol.d,
                               sol.u_plus, sol.u_minus)
        switches.append(rec)
        if len(switches) > 1:
            raise MultipleSwitchError(
                f"second switching at t = {res.t}: chart too large, shrink "
                "chart_radius and retry"
            )
        y_cur = res.y.copy()
        y_cur[dyn.n + 1:dyn.n + 1 + dyn.k] = new_u
        t_cur = res.t

    order = np.argsort(ts, kind="stable") if direction < 0 else slice(None)
    ts_arr = np.asarray(ts)[order]
    states_arr = np.asarray(states)[order]
    switches = sorted(switches, key=lambda s: s.t)
    return ExtremalTrajectory(system, config, ts_arr, states_arr, switches,
                              left_chart[0])


def passage_time_bound(rho0, c1):
    """Upper bound rho0 / (-c1) for the time to reach the singular set.

    Valid from the moment the trajectory enters a region where
    <H0I(lambda), u> stays below the negative constant c1.
    """
    if not c1 < 0:
        raise ValueError(f"c1 must be negative, got {c1}")
    if not rho0 > 0:
        raise ValueError(f"rho0 must be positive, got {rho0}")
    return rho0 / (-c1)


def flow_continuity_probe(system, z, t_hat, perturbations, config=None, *,
                          n_grid=101):
    """Max deviation of perturbed extremals from the reference, per start.

    Integrates the reference extremal from z and one extremal per perturbed
    start, samples all of them on a shared uniform time grid, and reports for
    each perturbation the pair (initial distance, max deviation over the
    grid), both measured in cotangent coordinates (xi, x). No Lipschitz ratio
    is asserted; the flow is continuous but in general not locally Lipschitz
    at switching.
    """
    if config is None:
        config = IntegratorConfig()
    grid = np.linspace(0.0, t_hat, n_grid)[1:-1]
    ref = integrate_extremal(system, z, t_hat, config, t_samples=grid)
    full_grid = np.concatenate([[0.0], grid, [t_hat]])
    ref_vecs = {t: ref.cotangent_vector(ref.index_at(t)) for t in full_grid}
    report = []
    for pert in perturbations:
        traj = integrate_extremal(system, pert, t_hat, config, t_samples=grid)
        size = float(np.linalg.norm(
            traj.cotangent_vector(traj.index_at(0.0)) - ref_vecs[0.0]))
        dev = 0.0
        for t in full_grid:
            dev = max(dev, float(np.linalg.norm(
                traj.cotangent_vector(traj.index_at(t)) - ref_vecs[t])))
        report.append((size, dev))
    return report


@dataclass(frozen=True)
class LemmaConstants:
    """Sampled constants for the lower envelope rho(t) >= c e^{-alpha t} rho(0)."""

    c1: float
    c2: float
    C: float
    c: float
    alpha: float
    n_samples: int


def _bracket_field_jacobian(fb, fc, x, outer_step, inner_step):
    n = fb.dim
    h = outer_step * np.maximum(1.0, np.abs(x))
    cols = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h[j]
        plus = lie_bracket(fb, fc, x + e, inner_step)
        minus = lie_bracket(fb, fc, x - e, inner_step)
        cols[:, j] = (plus - minus) / (2.0 * h[j])
    return cols


def sample_lemma_constants(system, anchor, chart_radius, *, n_x=30, n_fiber=16,
                           seed=0, outer_step=1e-4, inner_step=None,
                           vanish_ratio=0.01):
    """Sample the envelope constants over the chart closure times the sphere.

    c2 <= ||g|| <= c1 bounds the sphere field over the sampled chart, and C
    bounds from below the quantity <g, A>/||g|| whose time integral controls
    the decay of rho ||g|| along extremals; A collects the drift of the
    bracket pairings and needs one extra level of Lie brackets, evaluated by
    finite differences with a coarser outer step to tame difference noise.
    Raises when the sampled c2 is zero or suspiciously small against c1
    (below vanish_ratio * c1): the chart then reaches points where the
    sphere field vanishes and no positive lower bound exists.
    """
    rng = np.random.default_rng(seed)
    n, k = system.n, system.k
    if inner_step is None:
        inner_step = system.fd_step
    pairs = [(0, i) for i in range(1, k + 1)]
    pairs += [(i, j) for i in range(1, k + 1) for j in range(i + 1, k + 1)]
    c1 = 0.0
    c2 = math.inf
    c_low = math.inf
    count = 0
    for _ in range(n_x):
        x = anchor.x + chart_radius * rng.uniform(-1.0, 1.0, size=n)
        values = system.all_values(x)
        frame_t = values[1:]
        bracket_vec = {}
        nested = {}
        for (b, c) in pairs:
            fb, fc = system.field(b), system.field(c)
            bracket_vec[(b, c)] = lie_bracket(fb, fc, x, inner_step)
            jac_b = _bracket_field_jacobian(fb, fc, x, outer_step, inner_step)
            for a in range(k + 1):
                fa = system.field(a)
                nested[(a, b, c)] = jac_b @ values[a] - jacobian(fa, x, inner_step) @ bracket_vec[(b, c)]
        for _ in range(n_fiber):
            u = rng.normal(size=k)
            u /= np.linalg.norm(u)
            rho = rng.uniform(0.0, chart_radius)
            ht = anchor.h_tail + chart_radius * rng.uniform(-1.0, 1.0, size=n - k)
            xi = np.linalg.solve(frame_t, np.concatenate([rho * u, ht]))
            H0I = np.array([xi @ bracket_vec[(0, i)] for i in range(1, k + 1)])
            HIJ = np.zeros((k, k))
            for i in range(1, k + 1):
                for j in range(i + 1, k + 1):
                    HIJ[i - 1, j - 1] = xi @ bracket_vec[(i, j)]
                    HIJ[j - 1, i - 1] = -HIJ[i - 1, j - 1]
            g = sphere_rhs(u, H0I, HIJ)
            ng = float(np.linalg.norm(g))
            c1 = max(c1, ng)
            c2 = min(c2, ng)
            d0 = np.array([
                xi @ nested[(0, 0, i)]
                + sum(u[j - 1] * (xi @ nested[(j, 0, i)]) for j in range(1, k + 1))
                for i in range(1, k + 1)
            ])
            dij = np.zeros((k, k))
            for i in range(1, k + 1):
                for j in range(i + 1, k + 1):
                    val = xi @ nested[(0, i, j)] + sum(
                        u[m - 1] * (xi @ nested[(m, i, j)]) for m in range(1, k + 1))
                    dij[i - 1, j - 1] = val
                    dij[j - 1, i - 1] = -val
            a_vec = d0 - (d0 @ u) * u - dij @ u
            if ng > 0:
                c_low = min(c_low, float(g @ a_vec) / ng)
            count += 1
    if not c2 > vanish_ratio * c1:
        raise IntegrationError(
            "chart too large: the sphere field (nearly) vanishes inside the "
            f"sampled chart (c2 = {c2:.3e}, c1 = {c1:.3e})"
        )
    big_c = min(0.0, c_low)
    return LemmaConstants(c1, c2, big_c, c2 / c1, -big_c / c2, count)


@dataclass(frozen=True)
class RescaledRun:
    """Samples of the time-rescaled flow: rescaled times, physical times, states."""

    ss: np.ndarray
    ts: np.ndarray
    states: np.ndarray
    reached_horizon: bool

    def rho(self, n):
        return self.states[:, n]


def integrate_rescaled(system, z, s_hat, config=None, *, t_horizon=None):
    """Integrate the time-rescaled vector field from z over [0, s_hat].

    The physical time t(s) = integral of rho is carried along; when
    ``t_horizon`` is given, integration stops exactly there (the run is
    flagged accordingly). Kept for analysis near the blow-up sphere and for
    the consistency check against the unrescaled bang flow; switching
    trajectories go through integrate_extremal instead.
    """
    if config is None:
        config = IntegratorConfig()
    dyn = _Dynamics(system, config.eps_fd)
    size = 2 * system.n + 1

    def rhs(_, y):
        out = np.empty(size + 1)
        out[:size] = dyn.rescaled(y[:size])
        out[size] = y[dyn.n]
        return out

    def project(y):
        out = y.copy()
        out[:size] = dyn.project(y[:size])
        return out

    ss, rows = [], []

    def record(s, y):
        ss.append(s)
        rows.append(y.copy())
        return True

    events = ()
    if t_horizon is not None:
        events = (Event(lambda _, y: y[size] - t_horizon, direction=1,
                        tol=1e-12),)
    y0 = np.concatenate([dyn.pack(z.x, z.rho, z.u, z.h_tail), [0.0]])
    res = adaptive_rk(rhs, 0.0, y0, float(s_hat), rtol=config.rtol,
                      atol=config.atol, project=project, on_step=record,
                      events=events, max_steps=config.max_steps)
    rows = np.asarray(rows)
    return RescaledRun(np.asarray(ss), rows[:, size], rows[:, :size],
                       res.status == "event")


@dataclass(frozen=True)
class RhoProbeResult:
    c: float
    alpha: float
    ok: bool
    reached_horizon: bool
    ts: np.ndarray
    rhos: np.ndarray
    envelope: np.ndarray
    constants: LemmaConstants


def rho_lower_bound_probe(system, z, horizon, config=None, *, constants=None,
                          chart_radius=None, seed=0, s_limit_factor=100.0):
    """Check rho(t) >= c e^{-alpha t} rho(0) over [0, horizon] from z.

    The anchor scenario must exclude switching (nondegenerate bracket matrix
    with the drift pairing strictly inside the ball image); the trajectory is
    integrated in rescaled time with the physical time carried as an extra
    state so the envelope is checked pointwise against (t, rho) samples.
    """
    if config is None:
        config = IntegratorConfig()
    if chart_radius is None:
        chart_radius = config.chart_radius
    anchor = LiftedPoint(0.0, z.u, z.h_tail, z.x)
    lam0 = from_blowup(system, anchor)
    data = bracket_data(system, lam0, config.eps_fd)
    scenario = classify(data.H0I, data.HIJ)
    if scenario is not Scenario.C_DOUBLE_PRIME:
        raise ScenarioError(
            f"rho lower-bound probe requires the C'' scenario, got {scenario.value}"
        )
    if constants is None:
        constants = sample_lemma_constants(system, anchor, chart_radius, seed=seed)
    s_limit = s_limit_factor * horizon / z.rho
    run = integrate_rescaled(system, z, s_limit, config, t_horizon=horizon)
    ts_arr = run.ts
    rhos_arr = run.rho(system.n)
    envelope = constants.c * np.exp(-constants.alpha * ts_arr) * z.rho
    ok = bool(run.reached_horizon and np.all(rhos_arr > 0.0)
              and np.all(rhos_arr >= envelope))
    return RhoProbeResult(constants.c, constants.alpha, ok,
                          run.reached_horizon, ts_arr, rhos_arr, envelope,
                          constants)


def format_trajectory(traj):
    """Delimited text export: one row per sample, then a switch-events block.

    Columns are t, x(1..n), rho, u(1..k), h(k+1..n). The formatting uses
    %.17g so identical runs produce identical bytes.
    """
    n, k = traj.system.n, traj.system.k
    cols = (["t"] + [f"x{i + 1}" for i in range(n)] + ["rho"]
            + [f"u{i + 1}" for i in range(k)]
            + [f"h{i + 1}" for i in range(k, n)])
    lines = [",".join(cols)]
    for t, row in zip(traj.ts, traj.states):
        vals = [t] + list(row)
        lines.append(",".join("%.17g" % v for v in vals))
    lines.append("# switches: %d" % traj.n_switches)
    for sw in traj.switches:
        vals = ([sw.t] + list(sw.u_before) + list(sw.u_after)
                + [sw.location.rho] + list(sw.location.x) + [sw.d])
        lines.append("# switch," + ",".join("%.17g" % v for v in vals))
    return "\n".join(lines) + "\n"


def export_trajectory(traj, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_trajectory(traj))
    return path
