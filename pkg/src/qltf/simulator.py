"""Fixed-step RK4 integration of the quadratic/cubic stiffness oscillator.

    y'' + 2 zeta wn y' + wn^2 (y + eps2 y^2 + eps3 y^3) = u(t)

Forcing is evaluated from the tone formula at every RK stage time.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .gfrf import DuffingParams
from .spectral_core import MultitoneSignal

BLOWUP_LIMIT = 1e6


class BlowUpError(ArithmeticError):
    """Displacement left the stable region; ``last_time`` is the last stable sample time."""

    def __init__(self, message: str, last_time: float):
        super().__init__(message)
        self.last_time = last_time


@dataclass(frozen=True)
class SimConfig:
    t_start: float = 0.0
    t_end: float = 10.0
    step: float = 0.005
    y0: float = 0.0
    v0: float = 0.0

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        if not self.step > 0:
            raise ValueError("step must be positive")
        steps = (self.t_end - self.t_start) / self.step
        if round(steps) < 1 or abs(steps - round(steps)) > 1e-6 * max(1.0, steps):
            raise ValueError("(t_end - t_start) / step must be a positive integer")

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t_start) / self.step))


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    v: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)


def _no_forcing(t):
    return 0.0


def simulate_duffing(dp: DuffingParams, forcing: MultitoneSignal | None, cfg: SimConfig) -> Trajectory:
    """Classical fourth-order Runge-Kutta with step ``cfg.step``.

    Raises :class:`BlowUpError` if ``|y|`` exceeds 1e6 or goes non-finite.
    """
    u = forcing if forcing is not None else _no_forcing
    c1 = 2.0 * dp.zeta * dp.wn
    k = dp.wn**2

    def accel(t, y, v):
        return u(t) - c1 * v - k * (y + dp.eps2 * y * y + dp.eps3 * y * y * y)

    n, h = cfg.n_steps, cfg.step
    t = cfg.t_start + h * np.arange(n + 1)
    ys = np.empty(n + 1)
    vs = np.empty(n + 1)
    y, v = float(cfg.y0), float(cfg.v0)
    ys[0], vs[0] = y, v
    for i in range(n):
        ti = t[i]
        k1y, k1v = v, accel(ti, y, v)
        k2y, k2v = v + 0.5 * h * k1v, accel(ti + 0.5 * h, y + 0.5 * h * k1y, v + 0.5 * h * k1v)
        k3y, k3v = v + 0.5 * h * k2v, accel(ti + 0.5 * h, y + 0.5 * h * k2y, v + 0.5 * h * k2v)
        k4y, k4v = v + h * k3v, accel(ti + h, y + h * k3y, v + h * k3v)
        y = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        v = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if not (math.isfinite(y) and math.isfinite(v)) or abs(y) > BLOWUP_LIMIT:
            raise BlowUpError(f"|y| exceeded {BLOWUP_LIMIT:g} after t={ti:g}", float(ti))
        ys[i + 1], vs[i + 1] = y, v
    meta = {**asdict(dp), **asdict(cfg)}
    if forcing is not None:
        meta["tones"] = [(tn.magnitude, tn.frequency, math.degrees(tn.phase)) for tn in forcing.tones]
    return Trajectory(t, ys, vs, meta)


def export_phase_portrait(tr: Trajectory, skip_fraction: float = 0.0) -> np.ndarray:
    """``(y, v)`` column pairs, optionally dropping the leading ``skip_fraction`` of rows."""
    if len(tr) == 0:
        raise ValueError("empty trajectory")
    if not 0.0 <= skip_fraction < 1.0:
        raise ValueError("skip_fraction must be in [0, 1)")
    start = int(math.floor(skip_fraction * len(tr)))
    return np.column_stack([tr.y[start:], tr.v[start:]])


def _meta_line(meta: dict) -> str:
    parts = []
    for key, val in meta.items():
        if key == "tones":
            val = ";".join(f"{m:.17g}@{f:.17g}:{p:.17g}" for m, f, p in val)
        parts.append(f"{key}={val}")
    return "# " + " ".join(parts)


def trajectory_to_csv(tr: Trajectory, precision: int = 17) -> str:
    buf = io.StringIO()
    buf.write(_meta_line(tr.metadata) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "y", "v"])
    fmt = f"{{:.{precision}g}}"
    for row in zip(tr.t, tr.y, tr.v):
        w.writerow([fmt.format(x) for x in row])
    return buf.getvalue()


def phase_portrait_to_csv(pp: np.ndarray, precision: int = 17) -> str:
    fmt = f"{{:.{precision}g}}"
    lines = ["y,v"] + [f"{fmt.format(a)},{fmt.format(b)}" for a, b in pp]
    return "\n".join(lines) + "\n"


def read_trajectory_csv(path) -> Trajectory:
    text = Path(path).read_text()
    meta = {}
    rows = []
    for line in text.splitlines():
        if line.startswith("#"):
            for item in line[1:].split():
                if "=" in item:
                    key, val = item.split("=", 1)
                    meta[key] = val
        elif line.strip():
            rows.append(line)
    reader = csv.DictReader(rows)
    data = [(float(r["t"]), float(r["y"]), float(r["v"])) for r in reader]
    arr = np.array(data).reshape(-1, 3)
    return Trajectory(arr[:, 0], arr[:, 1], arr[:, 2], meta)
