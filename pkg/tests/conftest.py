"""Shared instance builders for the test suite."""

import numpy as np
import pytest

from extremals import LiftedPoint, complete_frame, parse_field

# Rotation-block family on R^3 with k = 2: at the anchor covector e3* the
# bracket pairings are H0I = (c, 0) and HIJ = [[0, b], [-b, 0]]. With
# gamma != 0 the drift pairing varies along x1, which makes the envelope
# constants of the no-switch regime nontrivial.


def cbc_system(c, b, gamma=0.0):
    drift_src = f"0; 0; 1 - {float(c)}*x1"
    if gamma:
        drift_src += f" - {float(gamma) / 2.0}*x1**2"
    f0 = parse_field(drift_src, 3)
    f1 = parse_field("1; 0; 0", 3)
    f2 = parse_field(f"0; 1; {float(b)}*x1", 3)
    return complete_frame(f0, [f1, f2], np.zeros(3))


def cbc_start(rho, u, h3=1.0):
    return LiftedPoint(rho, np.asarray(u, dtype=float), [h3], np.zeros(3))


def double_integrator_system():
    f0 = parse_field("x2; 0", 2)
    f1 = parse_field("0; 1", 2)
    return complete_frame(f0, [f1], np.zeros(2))


def oscillator_system():
    f0 = parse_field("x2; -x1", 2)
    f1 = parse_field("0; 1", 2)
    return complete_frame(f0, [f1], np.zeros(2))


def random_rotation_skew(rng, k, rank):
    """Random skew matrix of the given (even) rank via conjugated 2x2 blocks."""
    assert rank % 2 == 0 and rank <= k
    s = np.zeros((k, k))
    for i in range(rank // 2):
        a = rng.uniform(0.5, 3.0)
        s[2 * i, 2 * i + 1] = a
        s[2 * i + 1, 2 * i] = -a
    q, _ = np.linalg.qr(rng.normal(size=(k, k)))
    return q @ s @ q.T


def scenario_instance(rng, k, scenario):
    """Random (H0I, HIJ) pair landing in the requested scenario with margin."""
    if scenario == "A":
        assert k % 2 == 1
        hij = random_rotation_skew(rng, k, k - 1)
    elif scenario == "B":
        assert k % 2 == 0
        hij = random_rotation_skew(rng, k, k - 2)
    elif scenario in ("Cprime", "Cdoubleprime"):
        assert k % 2 == 0
        hij = random_rotation_skew(rng, k, k)
    else:
        raise ValueError(scenario)
    h0i = rng.normal(size=k)
    if scenario in ("A", "B"):
        u_mat, sv, _ = np.linalg.svd(hij)
        rank = int(np.sum(sv > 1e-10 * max(sv[0], 1.0))) if k > 0 else 0
        ker = u_mat[:, rank:]
        coeff = ker.T @ h0i
        if np.linalg.norm(coeff) < 0.5:
            h0i = h0i + ker @ rng.uniform(0.7, 1.5, size=k - rank)
    else:
        v = np.linalg.solve(hij, h0i)
        target = rng.uniform(1.3, 2.5) if scenario == "Cprime" else rng.uniform(0.25, 0.75)
        h0i = h0i * (target / np.linalg.norm(v))
    return h0i, hij


def condnotin_instance(rng, k):
    """Random pair satisfying the strict outside-the-ball condition."""
    if k % 2 == 1:
        return scenario_instance(rng, k, "A")
    return scenario_instance(rng, k, "B" if rng.random() < 0.5 else "Cprime")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
