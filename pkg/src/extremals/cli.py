"""Command-line front end.

Verbs: classify | integrate | sphere | validate | oracle. Every run loads a
JSON configuration describing the system, the analysis point, and tolerances,
then writes human-readable text plus machine-readable JSON into the output
directory; the integrate and sphere verbs additionally render figures next to
the delimited data. Exit codes: 0 success, 1 validation/integration failure,
2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import report
from .errors import ConfigError, ExtremalsError
from .fields import AffineSystem, complete_frame, parse_field
from .integrate import (
    IntegratorConfig,
    export_trajectory,
    integrate_extremal,
    rho_lower_bound_probe,
)
from .lift import (
    CotangentPoint,
    LiftedPoint,
    annihilator_covector,
    bracket_data,
    to_blowup,
)
from .oracle import (
    GridSpec,
    LinearInstance,
    bangbang_grid_solver,
    sphere_membership_oracle,
    zero_search_g,
)
from .sphereflow import (
    LorentzState,
    cone_directions,
    integrate_lorentz,
    integrate_sphere,
    lorentz_form,
    sphere_rhs,
)
from .switch import (
    Scenario,
    classify,
    codim1_condition,
    equilibrium_jacobian,
    jump_controls,
    membership,
    singular_arc_check,
    solve_d,
    tangent_eigenvalues,
)

__all__ = ["main", "load_config", "RunConfig"]

_CONDNOTIN = (Scenario.A, Scenario.B, Scenario.C_PRIME)


def _fail(path, msg):
    raise ConfigError(f"{path}: {msg}")


def _require(cfg, key, path):
    if key not in cfg:
        _fail(f"{path}.{key}" if path else key, "missing required entry")
    return cfg[key]


def _as_vector(value, path, size=None):
    if not isinstance(value, (list, tuple)) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        _fail(path, "expected an array of numbers")
    vec = np.asarray(value, dtype=float)
    if size is not None and vec.size != size:
        _fail(path, f"expected {size} entries, got {vec.size}")
    return vec


def _as_positive(value, path):
    if not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
        _fail(path, f"expected a positive number, got {value!r}")
    return float(value)


class RunConfig:
    """Validated run configuration: system, analysis point, and options."""

    def __init__(self, raw, base_dir):
        if not isinstance(raw, dict):
            raise ConfigError("top level: expected a JSON object")
        self.raw = raw
        self.base_dir = base_dir
        sysraw = _require(raw, "system", "")
        n = sysraw.get("n")
        k = sysraw.get("k")
        if not isinstance(n, int) or not isinstance(k, int) or not 0 < k < n:
            _fail("system", f"need integers 0 < k < n, got n={n!r}, k={k!r}")
        try:
            drift = parse_field(str(_require(sysraw, "drift", "system")), n)
            ctrl_raw = _require(sysraw, "controlled", "system")
            if not isinstance(ctrl_raw, list) or len(ctrl_raw) != k:
                _fail("system.controlled", f"expected {k} field strings")
            controlled = [parse_field(str(s), n) for s in ctrl_raw]
            tail_raw = sysraw.get("frame_tail")
            anchor = _as_vector(_require(raw, "anchor", ""), "anchor", n)
            if tail_raw is None:
                self.system = complete_frame(drift, controlled, anchor)
            else:
                tail = [parse_field(str(s), n) for s in tail_raw]
                self.system = AffineSystem(drift, controlled, tail)
        except ExtremalsError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"system: {exc}") from exc
        self.anchor = anchor

        cov = raw.get("covector", {"mode": "annihilator"})
        mode = cov.get("mode")
        if mode == "annihilator":
            if k != n - 1:
                _fail("covector", "annihilator mode requires k = n - 1")
            self.xi_anchor = annihilator_covector(self.system, anchor)
        elif mode == "explicit":
            self.xi_anchor = _as_vector(_require(cov, "xi", "covector"),
                                        "covector.xi", n)
        else:
            _fail("covector.mode", f"expected 'annihilator' or 'explicit', got {mode!r}")

        integ = raw.get("integrator", {})
        if not isinstance(integ, dict):
            _fail("integrator", "expected an object")
        kwargs = {}
        for key in ("eps_switch", "eps_fd", "rtol", "atol", "max_step",
                    "chart_radius"):
            if integ.get(key) is not None:
                kwargs[key] = _as_positive(integ[key], f"integrator.{key}")
        self.integrator = IntegratorConfig(**kwargs)

        self.t_hat = raw.get("t_hat")
        self.start_raw = raw.get("start")
        self.sphere_raw = raw.get("sphere", {})
        self.oracle_samples = int(raw.get("oracle", {}).get("samples", 4000))
        self.linear_raw = raw.get("linear")
        self.seed = int(raw.get("seed", 0))

    def with_overrides(self, seed=None, chart_radius=None, eps_switch=None):
        if seed is not None:
            self.seed = int(seed)
        updates = {}
        if chart_radius is not None:
            updates["chart_radius"] = _as_positive(chart_radius, "--chart-radius")
        if eps_switch is not None:
            updates["eps_switch"] = _as_positive(eps_switch, "--eps-switch")
        if updates:
            fields = {k: getattr(self.integrator, k) for k in
                      ("eps_switch", "eps_fd", "rtol", "atol", "max_step",
                       "chart_radius", "max_steps")}
            fields.update(updates)
            self.integrator = IntegratorConfig(**fields)
        return self

    def anchor_point(self):
        """Cotangent point at the configured anchor and covector."""
        return CotangentPoint(self.xi_anchor, self.anchor)

    def anchor_data(self):
        return bracket_data(self.system, self.anchor_point(),
                            self.integrator.eps_fd)

    def start_point(self):
        """Lifted launch state for the integrate verb."""
        raw = self.start_raw
        if raw is None:
            _fail("start", "missing; the integrate verb needs a launch state")
        n, k = self.system.n, self.system.k
        x = (_as_vector(raw["x"], "start.x", n) if raw.get("x") is not None
             else self.anchor)
        if raw.get("xi") is not None:
            lam = CotangentPoint(_as_vector(raw["xi"], "start.xi", n), x)
            return to_blowup(self.system, lam)
        rho = _as_positive(_require(raw, "rho", "start"), "start.rho")
        u_raw = _require(raw, "u", "start")
        if isinstance(u_raw, str):
            if u_raw not in ("u_plus", "u_minus"):
                _fail("start.u", "expected an array, 'u_plus', or 'u_minus'")
            data = self.anchor_data()
            sol = jump_controls(data.H0I, data.HIJ, solve_d(data.H0I, data.HIJ))
            u = sol.u_plus if u_raw == "u_plus" else sol.u_minus
        else:
            u = _as_vector(u_raw, "start.u", k)
            u = u / np.linalg.norm(u)
        if raw.get("h_tail") is not None:
            h_tail = _as_vector(raw["h_tail"], "start.h_tail", n - k)
        else:
            frame = self.system.frame_matrix(x)
            h_tail = frame[:, k:].T @ self.xi_anchor
        return LiftedPoint(rho, u, h_tail, x)

    def linear_instance(self):
        raw = self.linear_raw
        if raw is None:
            return None
        inst = LinearInstance(
            np.asarray(_require(raw, "A", "linear"), dtype=float),
            np.asarray(_require(raw, "B", "linear"), dtype=float),
            _as_vector(_require(raw, "x0", "linear"), "linear.x0"),
            _as_vector(_require(raw, "x1", "linear"), "linear.x1"),
        )
        grid = GridSpec(
            _as_positive(_require(raw, "t_max", "linear"), "linear.t_max"),
            int(_require(raw, "n_time", "linear")),
            int(raw.get("n_dir", 16)),
        )
        return inst, grid, int(raw.get("max_switches", 1)), float(
            raw.get("hit_tol", 1e-3))


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return RunConfig(raw, path.parent)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {key: _jsonable(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Scenario):
        return obj.value
    return obj


def _write_json(out_dir, name, payload):
    path = out_dir / name
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def _write_text(out_dir, name, lines):
    path = out_dir / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _analysis_payload(cfg):
    """Classification data at the configured anchor point; shared by verbs."""
    data = cfg.anchor_data()
    verdict = membership(data.H0I, data.HIJ)
    scenario = classify(data.H0I, data.HIJ)
    payload = {
        "H0I": data.H0I,
        "HIJ": data.HIJ,
        "scenario": scenario,
        "membership": {
            "in_sphere_image": verdict.in_sphere_image,
            "in_open_ball_image": verdict.in_open_ball_image,
            "in_closed_ball_image": verdict.in_closed_ball_image,
            "min_norm_solution": verdict.min_norm_solution,
            "rank": verdict.rank,
        },
    }
    if scenario in _CONDNOTIN:
        d = solve_d(data.H0I, data.HIJ)
        sol = jump_controls(data.H0I, data.HIJ, d)
        payload.update({"d": d, "u_plus": sol.u_plus, "u_minus": sol.u_minus})
    if scenario is not Scenario.COND_EQQ_FAILS:
        payload["singular_arc"] = singular_arc_check(data.H0I, data.HIJ).value
    if cfg.system.k == cfg.system.n - 1:
        res = codim1_condition(cfg.system, cfg.anchor)
        payload["codim1"] = {"a": res.a, "A": res.A, "holds": res.holds}
    return data, scenario, payload


def cmd_classify(cfg, out_dir):
    _, scenario, payload = _analysis_payload(cfg)
    _write_json(out_dir, "classify.json", payload)
    lines = [
        f"scenario: {scenario.value}",
        f"H0I: {np.array2string(np.asarray(payload['H0I']), precision=8)}",
        f"HIJ: {np.array2string(np.asarray(payload['HIJ']), precision=8)}",
    ]
    if "d" in payload:
        lines.append(f"d: {payload['d']:.12g}")
        lines.append(f"u_plus:  {np.array2string(np.asarray(payload['u_plus']), precision=10)}")
        lines.append(f"u_minus: {np.array2string(np.asarray(payload['u_minus']), precision=10)}")
    if "singular_arc" in payload:
        lines.append(f"singular arc: {payload['singular_arc']}")
    if "codim1" in payload:
        lines.append(f"codim-1 condition holds: {payload['codim1']['holds']}")
    _write_text(out_dir, "classify.txt", lines)
    for line in lines:
        print(line)
    return 0


def cmd_integrate(cfg, out_dir):
    if cfg.t_hat is None:
        _fail("t_hat", "missing; the integrate verb needs a duration")
    start = cfg.start_point()
    traj = integrate_extremal(cfg.system, start, float(cfg.t_hat), cfg.integrator)
    export_trajectory(traj, out_dir / "trajectory.csv")
    report.render_trajectory(traj, out_dir / "trajectory.png")
    switches = []
    for sw in traj.switches:
        switches.append({
            "t": sw.t,
            "u_before": sw.u_before,
            "u_after": sw.u_after,
            "predicted_u_plus": sw.u_plus,
            "predicted_u_minus": sw.u_minus,
            "d": sw.d,
            "rho": sw.location.rho,
            "x": sw.location.x,
            "discrepancy_before": float(np.linalg.norm(sw.u_before - sw.u_minus)),
            "discrepancy_after": float(np.linalg.norm(sw.u_after - sw.u_plus)),
        })
    rho = traj.rho()
    payload = {
        "t_hat": cfg.t_hat,
        "n_samples": len(traj),
        "n_switches": traj.n_switches,
        "left_chart": traj.left_chart,
        "min_rho": float(rho.min()),
        "final_x": traj.states[-1, :cfg.system.n],
        "switches": switches,
    }
    probe_raw = cfg.raw.get("probe")
    if probe_raw is not None:
        # no-switch regime: render the exponential lower envelope of rho
        radius = _as_positive(_require(probe_raw, "chart_radius", "probe"),
                              "probe.chart_radius")
        horizon = float(probe_raw.get("horizon", cfg.t_hat))
        probe = rho_lower_bound_probe(cfg.system, start, horizon,
                                      cfg.integrator, chart_radius=radius,
                                      seed=cfg.seed)
        report.render_envelope(probe, start.rho, out_dir / "envelope.png")
        payload["envelope"] = {"c": probe.c, "alpha": probe.alpha,
                               "ok": probe.ok,
                               "min_rho": float(probe.rhos.min())}
    _write_json(out_dir, "switches.json", payload)
    lines = [
        f"samples: {len(traj)}",
        f"switches: {traj.n_switches}",
        f"left chart: {traj.left_chart}",
        f"min rho: {rho.min():.6g}",
        f"final x: {np.array2string(traj.states[-1, :cfg.system.n], precision=8)}",
    ]
    for sw in switches:
        lines.append(
            f"switch at t={sw['t']:.9g}: |u_before - u_minus| = "
            f"{sw['discrepancy_before']:.3e}, |u_after - u_plus| = "
            f"{sw['discrepancy_after']:.3e}"
        )
    _write_text(out_dir, "integrate.txt", lines)
    for line in lines:
        print(line)
    return 0


def cmd_sphere(cfg, out_dir):
    data, scenario, payload = _analysis_payload(cfg)
    k = cfg.system.k
    u_plus = np.asarray(payload["u_plus"]) if "u_plus" in payload else None
    u_minus = np.asarray(payload["u_minus"]) if "u_minus" in payload else None
    u0_raw = cfg.sphere_raw.get("u0")
    if u0_raw is not None:
        u0 = _as_vector(u0_raw, "sphere.u0", k)
        u0 = u0 / np.linalg.norm(u0)
    elif u_plus is not None and k >= 2:
        tangent = np.zeros(k)
        tangent[int(np.argmin(np.abs(u_plus)))] = 1.0
        u0 = u_plus + 0.7 * (tangent - (tangent @ u_plus) * u_plus)
        u0 = u0 / np.linalg.norm(u0)
    else:
        u0 = np.zeros(k)
        u0[0] = 1.0
    trivial = k == 1  # the 0-sphere carries no dynamics; limits are moot
    d = payload.get("d", float(np.linalg.norm(data.H0I)) or 1.0)
    s_max = cfg.sphere_raw.get("s_max")
    s_max = float(s_max) if s_max is not None else 40.0 / d
    states, drift = integrate_sphere(u0, data.H0I, data.HIJ, (-s_max, s_max),
                                     return_drift=True)
    grid = np.linspace(-s_max, s_max, 801)
    cone = cone_directions(u0, data.H0I, data.HIJ, grid)
    rk_on_grid = integrate_sphere(u0, data.H0I, data.HIJ, (-s_max, s_max),
                                  s_eval=grid)
    rk_map = {st.s: st.u for st in rk_on_grid}
    route_dev = max(
        float(np.linalg.norm(rk_map[s] - cone[i]))
        for i, s in enumerate(grid) if s in rk_map
    )
    rows = ["s," + ",".join(f"u{i + 1}" for i in range(k))]
    for st in states:
        rows.append(",".join("%.17g" % v for v in [st.s] + list(st.u)))
    (out_dir / "sphere.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    report.render_sphere(states, u_plus, u_minus, out_dir / "sphere.png")
    sphere_payload = {
        "scenario": scenario,
        "u0": u0,
        "s_max": s_max,
        "max_sphere_drift": drift,
        "lift_route_deviation": route_dev,
    }
    if u_plus is not None and not trivial:
        sphere_payload["forward_error"] = float(np.linalg.norm(states[-1].u - u_plus))
        sphere_payload["backward_error"] = float(np.linalg.norm(states[0].u - u_minus))
    _write_json(out_dir, "sphere.json", sphere_payload)
    for key in ("scenario", "max_sphere_drift", "lift_route_deviation",
                "forward_error", "backward_error"):
        if key in sphere_payload:
            print(f"{key}: {_jsonable(sphere_payload[key])}")
    return 0


def _validate_checks(cfg):
    rng_seed = cfg.seed
    data, scenario, payload = _analysis_payload(cfg)
    H0I, HIJ = np.asarray(data.H0I), np.asarray(data.HIJ)
    checks = []

    def add(name, passed, detail):
        checks.append({"name": name, "passed": bool(passed), "detail": detail})

    skew = float(np.abs(HIJ + HIJ.T).max())
    add("hij_skew", skew < 1e-9, f"max |HIJ + HIJ^T| = {skew:.3e}")

    oracle_min = sphere_membership_oracle(H0I, HIJ, cfg.oracle_samples,
                                          seed=rng_seed)
    verdict = membership(H0I, HIJ)
    add("membership_vs_oracle",
        (oracle_min > 1e-6) == (not verdict.in_sphere_image),
        f"oracle min = {oracle_min:.6g}, in_sphere = {verdict.in_sphere_image}")

    zeros = zero_search_g(H0I, HIJ, 2000, seed=rng_seed)
    if scenario in _CONDNOTIN:
        d = payload["d"]
        u_plus, u_minus = np.asarray(payload["u_plus"]), np.asarray(payload["u_minus"])
        matched = zeros.shape[0] == 2 and all(
            min(np.linalg.norm(z - u_plus), np.linalg.norm(z - u_minus)) < 1e-6
            for z in zeros)
        add("zero_search_matches_jump_controls", matched,
            f"{zeros.shape[0]} zero cluster(s) found")
        eig_ok = True
        worst = 0.0
        for sign, u in ((1.0, u_plus), (-1.0, u_minus)):
            eig = tangent_eigenvalues(equilibrium_jacobian(H0I, HIJ, u), u)
            if eig.size:
                err = float(np.abs(eig.real + sign * d).max())
                worst = max(worst, err)
                eig_ok = eig_ok and err < 1e-7
        add("equilibrium_spectrum", eig_ok,
            f"max |Re(eig) + <H0I,u>| = {worst:.3e}")
        if H0I.size == 1:
            # the 0-sphere carries no dynamics: both points are equilibria
            g_res = max(np.linalg.norm(sphere_rhs(np.array([s]), H0I, HIJ))
                        for s in (1.0, -1.0))
            add("sphere_convergence", g_res < 1e-10,
                f"trivial 0-sphere, max |g(+-1)| = {g_res:.3e}")
        else:
            rng = np.random.default_rng(rng_seed)
            s_max = 40.0 / d
            n_starts = int(cfg.sphere_raw.get("n_starts", 20))
            conv_ok, worst_conv = True, 0.0
            for _ in range(n_starts):
                u0 = rng.normal(size=H0I.size)
                u0 /= np.linalg.norm(u0)
                states = integrate_sphere(u0, H0I, HIJ, (-s_max, s_max))
                err = max(float(np.linalg.norm(states[-1].u - u_plus)),
                          float(np.linalg.norm(states[0].u - u_minus)))
                worst_conv = max(worst_conv, err)
                conv_ok = conv_ok and err < 1e-6
            add("sphere_convergence", conv_ok,
                f"{n_starts} starts, worst limit error = {worst_conv:.3e}")
    elif scenario is Scenario.C_DOUBLE_PRIME:
        add("zero_search_empty", zeros.shape[0] == 0,
            f"{zeros.shape[0]} zero cluster(s) found")
        rng = np.random.default_rng(rng_seed)
        us = rng.normal(size=(512, H0I.size))
        us /= np.linalg.norm(us, axis=1)[:, None]
        min_g = float(min(np.linalg.norm(sphere_rhs(u, H0I, HIJ)) for u in us))
        add("sphere_field_nonvanishing", min_g > 0.0,
            f"sampled min |g| = {min_g:.6g}")

    rng = np.random.default_rng(rng_seed + 1)
    z0 = LorentzState(rng.normal(), rng.normal(size=H0I.size))
    span = 5.0 / payload["d"] if "d" in payload else 5.0
    lorentz = integrate_lorentz(z0, H0I, HIJ, (-span, span))
    q0 = lorentz_form(z0)
    drift = max(abs(lorentz_form(st) - q0) for st in lorentz)
    bound = 1e-9 * (1.0 + abs(q0)) * max(span, 1.0)
    add("lorentz_conservation", drift < bound,
        f"|Q drift| = {drift:.3e} (bound {bound:.3e})")

    linear = cfg.linear_instance()
    if linear is not None and cfg.start_raw is not None and cfg.t_hat:
        inst, grid, max_sw, hit_tol = linear
        sched = bangbang_grid_solver(inst, max_sw, grid, hit_tol=hit_tol)
        traj = integrate_extremal(cfg.system, cfg.start_point(), float(cfg.t_hat),
                                  cfg.integrator)
        dist = np.linalg.norm(traj.states[:, :cfg.system.n] - inst.x1, axis=1)
        idx = int(np.argmin(dist))
        t_ext = float(traj.ts[idx])
        rel = abs(sched.arrival_time - t_ext) / max(t_ext, 1e-12)
        add("linear_grid_agreement",
            rel < 0.05 and sched.n_switches == traj.n_switches,
            f"grid T = {sched.arrival_time:.6g}, extremal T = {t_ext:.6g}, "
            f"switches {sched.n_switches}/{traj.n_switches}")
    return scenario, checks


def cmd_validate(cfg, out_dir):
    scenario, checks = _validate_checks(cfg)
    ok = all(c["passed"] for c in checks)
    _write_json(out_dir, "validate.json",
                {"scenario": scenario, "passed": ok, "checks": checks})
    lines = [f"scenario: {scenario.value}"]
    for c in checks:
        lines.append(f"[{'PASS' if c['passed'] else 'FAIL'}] {c['name']}: {c['detail']}")
    lines.append(f"overall: {'PASS' if ok else 'FAIL'}")
    _write_text(out_dir, "validate.txt", lines)
    for line in lines:
        print(line)
    return 0 if ok else 1


def cmd_oracle(cfg, out_dir):
    data, scenario, _ = _analysis_payload(cfg)
    oracle_min = sphere_membership_oracle(data.H0I, data.HIJ,
                                          cfg.oracle_samples, seed=cfg.seed)
    zeros = zero_search_g(data.H0I, data.HIJ, max(2000, cfg.oracle_samples // 2),
                          seed=cfg.seed)
    payload = {
        "scenario": scenario,
        "membership_min_distance": oracle_min,
        "zero_clusters": zeros,
        "n_zero_clusters": int(zeros.shape[0]),
    }
    _write_json(out_dir, "oracle.json", payload)
    lines = [
        f"scenario: {scenario.value}",
        f"min over sphere of |HIJ u - H0I|: {oracle_min:.9g}",
        f"zero clusters of the sphere field: {zeros.shape[0]}",
    ]
    _write_text(out_dir, "oracle.txt", lines)
    for line in lines:
        print(line)
    return 0


_COMMANDS = {
    "classify": cmd_classify,
    "integrate": cmd_integrate,
    "sphere": cmd_sphere,
    "validate": cmd_validate,
    "oracle": cmd_oracle,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="extremals",
        description="Analyze and integrate time-optimal extremals of "
                    "control-affine systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a JSON run config")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--chart-radius", type=float, default=None)
        p.add_argument("--eps-switch", type=float, default=None)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config).with_overrides(
            seed=args.seed, chart_radius=args.chart_radius,
            eps_switch=args.eps_switch)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, out_dir)
    except ConfigError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ExtremalsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
