"""Least-squares PVT against a forward-model oracle."""

import math

import numpy as np
import pytest

from gpssdr.constants import EARTH_ROTATION_RATE, SPEED_OF_LIGHT
from gpssdr.nav.pvt import (GeometryError, InsufficientSatellitesError,
                            PvtAverager, PvtSolution, solve_pvt)

RU = np.array([-740290.0, -5457071.0, 3207245.0])  # somewhere on Earth
R_ORBIT = 26560e3


def sat_constellation(n, seed=1):
    rng = np.random.default_rng(seed)
    sats = []
    while len(sats) < n:
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        pos = v * R_ORBIT
        # keep satellites on the receiver's side of the sky
        if np.dot(pos - RU, RU) / np.linalg.norm(pos - RU) / np.linalg.norm(RU) > 0.15:
            sats.append(pos)
    return np.array(sats)


def forward_ranges(sats, ru, bias_m):
    """Pseudoranges consistent with the solver's Sagnac model."""
    rho = []
    for s in sats:
        tt = np.linalg.norm(s - ru) / SPEED_OF_LIGHT
        for _ in range(3):
            theta = EARTH_ROTATION_RATE * tt
            rot = np.array([math.cos(theta) * s[0] + math.sin(theta) * s[1],
                            -math.sin(theta) * s[0] + math.cos(theta) * s[1],
                            s[2]])
            tt = np.linalg.norm(rot - ru) / SPEED_OF_LIGHT
        rho.append(np.linalg.norm(rot - ru) + bias_m)
    return np.array(rho)


def test_zero_noise_recovers_truth():
    sats = sat_constellation(4)
    bias = 43521.7
    rho = forward_ranges(sats, RU, bias)
    sol = solve_pvt(rho, sats)
    assert np.linalg.norm(sol.ecef - RU) < 1e-3
    assert sol.clock_bias * SPEED_OF_LIGHT == pytest.approx(bias, abs=1e-3)
    assert sol.gdop > 0
    assert sol.n_sats_used == 4


def test_eight_sats_tighter():
    sats = sat_constellation(8, seed=7)
    rho = forward_ranges(sats, RU, -1200.0)
    sol = solve_pvt(rho, sats)
    assert np.linalg.norm(sol.ecef - RU) < 1e-3


def test_three_sats_insufficient():
    sats = sat_constellation(3)
    with pytest.raises(InsufficientSatellitesError):
        solve_pvt(np.ones(3) * 2e7, sats)


def test_degenerate_geometry_raises():
    # all satellites along one line of sight
    u = np.array([0.3, -0.8, 0.52])
    u /= np.linalg.norm(u)
    sats = np.array([RU + u * d for d in (2.0e7, 2.1e7, 2.2e7, 2.3e7)])
    rho = forward_ranges(sats, RU, 0.0)
    with pytest.raises(GeometryError):
        solve_pvt(rho, sats)


def test_common_bias_moves_only_clock():
    sats = sat_constellation(6, seed=3)
    rho = forward_ranges(sats, RU, 0.0)
    sol0 = solve_pvt(rho, sats)
    sol1 = solve_pvt(rho + 1500.0, sats)
    assert np.linalg.norm(sol1.ecef - sol0.ecef) < 1e-6
    delta_bias = (sol1.clock_bias - sol0.clock_bias) * SPEED_OF_LIGHT
    assert delta_bias == pytest.approx(1500.0, abs=1e-6)


def test_residuals_orthogonal_to_geometry():
    sats = sat_constellation(7, seed=11)
    rng = np.random.default_rng(2)
    rho = forward_ranges(sats, RU, 300.0) + rng.normal(0, 3.0, size=7)
    sol = solve_pvt(rho, sats)
    pos = sol.ecef
    rotated = []
    for s in sats:
        tt = np.linalg.norm(s - pos) / SPEED_OF_LIGHT
        th = EARTH_ROTATION_RATE * tt
        rotated.append([math.cos(th) * s[0] + math.sin(th) * s[1],
                        -math.sin(th) * s[0] + math.cos(th) * s[1], s[2]])
    rotated = np.array(rotated)
    ranges = np.linalg.norm(rotated - pos, axis=1)
    g = np.hstack([(pos - rotated) / ranges[:, None], np.ones((7, 1))])
    r = rho - ranges - sol.clock_bias * SPEED_OF_LIGHT
    assert np.linalg.norm(g.T @ r) < 1e-6 * max(np.linalg.norm(r), 1.0)


def test_gdop_weakly_decreases_with_added_satellite():
    for seed in range(6):
        sats = sat_constellation(5, seed=seed + 20)
        extra = sat_constellation(6, seed=seed + 40)
        rho5 = forward_ranges(sats, RU, 0.0)
        sol5 = solve_pvt(rho5, sats)
        sats6 = np.vstack([sats, extra[-1:]])
        rho6 = forward_ranges(sats6, RU, 0.0)
        sol6 = solve_pvt(rho6, sats6)
        assert sol6.gdop <= sol5.gdop + 1e-9


def _sol(x=0.0, y=0.0, z=0.0):
    return PvtSolution(x=x, y=y, z=z, clock_bias=0.0, gdop=1.0,
                       n_sats_used=4, timestamp=0.0)


def test_averager_identity_at_depth_zero():
    avg = PvtAverager(0)
    s = _sol(1.0, 2.0, 3.0)
    out = avg.update(s)
    assert out is s and out.rms_error == 0.0


def test_averager_constant_input():
    avg = PvtAverager(10)
    for _ in range(25):
        out = avg.update(_sol(5.0, -1.0, 2.0))
    assert (out.x, out.y, out.z) == (5.0, -1.0, 2.0)
    assert out.rms_error == 0.0


def test_averager_alternating_x():
    avg = PvtAverager(10)
    for k in range(40):
        out = avg.update(_sol(x=1.0 if k % 2 == 0 else -1.0))
    assert out.x == pytest.approx(0.0)
    assert out.rms_error == pytest.approx(1.0)


def test_averager_rejects_bad_depth():
    with pytest.raises(ValueError):
        PvtAverager(7)
