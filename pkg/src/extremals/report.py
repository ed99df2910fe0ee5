"""Matplotlib figure rendering for the CLI report path.

The computational modules stay plotting-free; every figure here is built
from already-exported data and written straight to a file.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_trajectory", "render_sphere", "render_envelope"]

_DPI = 150


def render_trajectory(traj, path):
    """Three stacked panels: state x(t), radius rho(t), control u(t)."""
    n, k = traj.system.n, traj.system.k
    fig, axes = plt.subplots(3, 1, figsize=(7.0, 7.5), sharex=True)
    ts = traj.ts
    for i in range(n):
        axes[0].plot(ts, traj.states[:, i], label=f"x{i + 1}")
    axes[0].set_ylabel("state")
    axes[0].legend(loc="best", fontsize=8)
    axes[1].plot(ts, traj.rho(), color="tab:red")
    axes[1].axhline(traj.config.eps_switch, color="gray", lw=0.8, ls="--",
                    label="switch threshold")
    axes[1].set_ylabel("rho")
    axes[1].set_yscale("log")
    axes[1].legend(loc="best", fontsize=8)
    controls = traj.controls()
    for i in range(k):
        axes[2].plot(ts, controls[:, i], label=f"u{i + 1}")
    for sw in traj.switches:
        for ax in axes:
            ax.axvline(sw.t, color="black", lw=0.8, ls=":")
    axes[2].set_ylabel("control")
    axes[2].set_xlabel("t")
    axes[2].legend(loc="best", fontsize=8)
    fig.suptitle(f"extremal trajectory ({traj.n_switches} switch(es))")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def render_sphere(states, u_plus, u_minus, path):
    """Sphere-flow path with the two equilibria marked.

    For k = 2 the path is drawn on the unit circle; otherwise the components
    of u are plotted against rescaled time.
    """
    us = np.array([st.u for st in states])
    ss = np.array([st.s for st in states])
    k = us.shape[1]
    fig, ax = plt.subplots(figsize=(6.0, 6.0 if k == 2 else 4.0))
    if k == 2:
        theta = np.linspace(0.0, 2.0 * np.pi, 256)
        ax.plot(np.cos(theta), np.sin(theta), color="lightgray", lw=0.8)
        ax.plot(us[:, 0], us[:, 1], color="tab:blue", lw=1.2, label="u(s)")
        ax.plot(*us[0], marker="o", color="tab:blue")
        if u_plus is not None:
            ax.plot(*u_plus, marker="*", ms=12, color="tab:green", ls="none",
                    label="u+")
        if u_minus is not None:
            ax.plot(*u_minus, marker="*", ms=12, color="tab:red", ls="none",
                    label="u-")
        ax.set_aspect("equal")
        ax.set_xlabel("u1")
        ax.set_ylabel("u2")
    else:
        for i in range(k):
            ax.plot(ss, us[:, i], label=f"u{i + 1}")
        for i in range(k):
            if u_plus is not None:
                ax.axhline(u_plus[i], color="tab:green", lw=0.6, ls="--")
            if u_minus is not None:
                ax.axhline(u_minus[i], color="tab:red", lw=0.6, ls="--")
        ax.set_xlabel("s")
        ax.set_ylabel("u components")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("sphere flow on the blow-up fiber")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def render_envelope(probe, rho0, path):
    """rho(t) against its exponential lower envelope, log scale."""
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    ax.plot(probe.ts, probe.rhos, color="tab:blue", lw=1.0, label="rho(t)")
    ax.plot(probe.ts, probe.envelope, color="tab:red", lw=1.0, ls="--",
            label="c exp(-alpha t) rho(0)")
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("rho")
    ax.set_title(f"lower envelope (c={probe.c:.3g}, alpha={probe.alpha:.3g}, "
                 f"rho0={rho0:.3g})")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
