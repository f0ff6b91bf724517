"""Pseudorange formation and least-squares PVT with averaging and GDOP."""

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..constants import EARTH_ROTATION_RATE, SPEED_OF_LIGHT
from .orbit import sat_position

# Nominal signal flight time used to seed the common reception time.
NOMINAL_FLIGHT_TIME_S = 0.068802


class InsufficientSatellitesError(ValueError):
    pass


class GeometryError(ValueError):
    """Linearized geometry is rank deficient."""


class PvtDivergedError(ValueError):
    pass


@dataclass
class PvtSolution:
    x: float
    y: float
    z: float
    clock_bias: float          # seconds
    gdop: float
    n_sats_used: int
    timestamp: float           # GPS seconds of week (receiver time)
    rms_error: float = 0.0     # dispersion over the averaging window, m

    @property
    def ecef(self):
        return np.array([self.x, self.y, self.z])


@dataclass
class PseudorangeObs:
    prn: int
    pseudorange: float
    sat_pos: np.ndarray
    t_tx: float


def form_pseudoranges(measurements, common_rx_time: float):
    """Common-reception-time pseudoranges from per-channel transmit times.

    `measurements` is an iterable of (prn, t_tx_seconds_of_week, ephemeris);
    channels without a decoded ephemeris must already be excluded by the
    caller (a None ephemeris is skipped here as a guard).
    """
    out = []
    for prn, t_tx, eph in measurements:
        if eph is None:
            continue
        pos, clk = sat_position(eph, t_tx)
        rho = SPEED_OF_LIGHT * (common_rx_time - t_tx) + SPEED_OF_LIGHT * clk
        out.append(PseudorangeObs(prn=prn, pseudorange=rho, sat_pos=pos, t_tx=t_tx))
    return out


def _sagnac_rotate(pos, travel_time):
    theta = EARTH_ROTATION_RATE * travel_time
    c, s = math.cos(theta), math.sin(theta)
    return np.array([c * pos[0] + s * pos[1], -s * pos[0] + c * pos[1], pos[2]])


def solve_pvt(pseudoranges, sat_positions, timestamp: float = 0.0,
              x0=None, max_iters: int = 10, tol: float = 1e-8):
    """Gauss-Newton solution of (x, y, z, clock-bias) from >= 4 pseudoranges.

    Satellite positions are rotated by the Earth rotation over the signal
    travel time (Sagnac) each iteration. GDOP = sqrt(trace((G^T G)^-1)).
    """
    rho = np.asarray(pseudoranges, dtype=np.float64)
    sats = np.asarray(sat_positions, dtype=np.float64)
    n = len(rho)
    if n < 4:
        raise InsufficientSatellitesError(f"need >= 4 satellites, got {n}")
    state = np.zeros(4) if x0 is None else np.asarray(x0, dtype=np.float64).copy()

    for _ in range(max_iters):
        pos = state[:3]
        bias_m = state[3]
        rotated = np.empty_like(sats)
        ranges = np.empty(n)
        for k in range(n):
            tt = np.linalg.norm(sats[k] - pos) / SPEED_OF_LIGHT
            rotated[k] = _sagnac_rotate(sats[k], tt)
            ranges[k] = np.linalg.norm(rotated[k] - pos)
        g = np.empty((n, 4))
        g[:, :3] = (pos[None, :] - rotated) / ranges[:, None]
        g[:, 3] = 1.0
        resid = rho - ranges - bias_m
        gtg = g.T @ g
        try:
            cov = np.linalg.inv(gtg)
        except np.linalg.LinAlgError:
            raise GeometryError("singular geometry matrix") from None
        if np.linalg.cond(gtg) > 1e10:
            raise GeometryError("rank-deficient satellite geometry")
        delta = cov @ (g.T @ resid)
        state += delta
        if np.linalg.norm(delta) < tol:
            gdop = math.sqrt(np.trace(cov))
            return PvtSolution(x=state[0], y=state[1], z=state[2],
                               clock_bias=state[3] / SPEED_OF_LIGHT,
                               gdop=gdop, n_sats_used=n, timestamp=timestamp)
    raise PvtDivergedError(f"no convergence after {max_iters} iterations")


def solve_pvt_from_obs(obs, timestamp: float = 0.0, x0=None):
    if len(obs) < 4:
        raise InsufficientSatellitesError(f"need >= 4 satellites, got {len(obs)}")
    return solve_pvt([o.pseudorange for o in obs], [o.sat_pos for o in obs],
                     timestamp=timestamp, x0=x0)


class PvtAverager:
    """Sliding-window mean over PVT output samples with dispersion RMS.

    depth 0 passes solutions through (rms 0 over the single sample).
    """

    DEPTHS = (0, 10, 20, 50, 100)

    def __init__(self, depth: int):
        if depth not in self.DEPTHS:
            raise ValueError(f"depth must be one of {self.DEPTHS}")
        self.depth = depth
        self._window = deque(maxlen=max(depth, 1))

    def update(self, sol: PvtSolution) -> PvtSolution:
        self._window.append(np.array([sol.x, sol.y, sol.z]))
        if self.depth == 0:
            return sol
        arr = np.array(self._window)
        mean = arr.mean(axis=0)
        rms = math.sqrt(np.mean(np.sum((arr - mean[None, :]) ** 2, axis=1)))
        return PvtSolution(x=mean[0], y=mean[1], z=mean[2],
                           clock_bias=sol.clock_bias, gdop=sol.gdop,
                           n_sats_used=sol.n_sats_used,
                           timestamp=sol.timestamp, rms_error=rms)
