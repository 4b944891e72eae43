"""Grid sweeps over the reduced (a, r) plane with deterministic text output.

A grid row (fixed ``a``) is the unit of work. Every row is evaluated by the
same code whatever the worker count, and rows are written back in index
order, so the output bytes do not depend on parallelism.
"""

from __future__ import annotations

import json
import math
import os
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__
from .coherence import (
    BasisAngles,
    average_coherence_quad,
    coherence_arbitrary,
    coherence_axial_xy,
    coherence_axial_z,
)
from .correlations import concurrence, concurrence_margin, entanglement_boundary, geometric_discord
from .model import RangeError, ReducedParams, ground_state_label, level_crossing_segments, populations

QUANTITIES = (
    "discord",
    "concurrence",
    "coherence_z",
    "coherence_x",
    "coherence_y",
    "coherence_avg",
    "coherence_at",
    "populations",
    "ground_state",
)
POPULATION_COLUMNS = ("p_psi_minus", "p_psi_plus", "p_phi_plus", "p_phi_minus")
MAX_STEPS = 4001


@dataclass(frozen=True)
class SweepConfig:
    quantity: str = "discord"
    a_min: float = -10.0
    a_max: float = 10.0
    r_min: float = -10.0
    r_max: float = 10.0
    steps_a: int = 201
    steps_r: int = 201
    temperature: float = 1.0
    quad_tol: float = 1e-6
    threads: int = 1
    output: str | None = None
    format: str = "csv"
    theta: float | None = None
    phi: float | None = None

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")
        bounds = (self.a_min, self.a_max, self.r_min, self.r_max, self.temperature, self.quad_tol)
        if not all(math.isfinite(x) for x in bounds):
            raise ValueError("grid bounds, temperature and quad_tol must be finite")
        if not (self.a_min < self.a_max and self.r_min < self.r_max):
            raise ValueError("need a_min < a_max and r_min < r_max")
        for n in (self.steps_a, self.steps_r):
            if not (isinstance(n, int) and 2 <= n <= MAX_STEPS):
                raise ValueError(f"steps must be integers in [2, {MAX_STEPS}]")
        if self.temperature <= 0 or self.quad_tol <= 0:
            raise ValueError("temperature and quad_tol must be positive")
        if not (isinstance(self.threads, int) and self.threads >= 1):
            raise ValueError("threads must be a positive integer")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.quantity == "coherence_at" and (self.theta is None or self.phi is None):
            raise ValueError("coherence_at needs theta and phi")

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        """Reduced grid axes; the configured bounds are divided by the temperature."""
        a = np.linspace(self.a_min, self.a_max, self.steps_a) / self.temperature
        r = np.linspace(self.r_min, self.r_max, self.steps_r) / self.temperature
        return a, r


@dataclass
class RowResult:
    index: int
    values: list  # floats, or label strings for ground_state, or 4-tuples for populations
    range_failures: int = 0
    unconverged: int = 0


def _closed_form(quantity: str, p: ReducedParams, angles: BasisAngles | None):
    if quantity == "discord":
        return geometric_discord(p)
    if quantity == "concurrence":
        return concurrence(p)
    if quantity == "concurrence_margin":
        return concurrence_margin(p)
    if quantity == "coherence_z":
        return coherence_axial_z(p)
    if quantity == "coherence_x":
        return coherence_axial_xy(p, "X")
    if quantity == "coherence_y":
        return coherence_axial_xy(p, "Y")
    if quantity == "coherence_at":
        return coherence_arbitrary(p, angles)
    if quantity == "populations":
        return populations(p).as_array()
    raise ValueError(quantity)


def _nan_cell(quantity: str):
    if quantity == "populations":
        return (math.nan,) * 4
    if quantity == "ground_state":
        return "nan"
    return math.nan


def _cell(quantity: str, a: float, r: float, angles, quad_tol: float):
    """One cell as (value, unconverged flag); raises RangeError."""
    p = ReducedParams(a, r)
    if quantity == "ground_state":
        return ground_state_label(p), False
    if quantity == "coherence_avg":
        res = average_coherence_quad(p, quad_tol)
        return res.value, not res.converged
    out = _closed_form(quantity, p, angles)
    if quantity == "populations":
        return tuple(float(x) for x in out), False
    return float(out), False


def evaluate_row(quantity: str, index: int, a: float, r_axis, angles=None, quad_tol: float = 1e-6) -> RowResult:
    row = RowResult(index, [])
    if quantity not in ("ground_state", "coherence_avg"):
        try:
            out = _closed_form(quantity, ReducedParams(float(a), np.asarray(r_axis, dtype=float)), angles)
        except RangeError:
            pass  # some cell is out of range: redo the row cell by cell
        else:
            if quantity == "populations":
                row.values = [tuple(float(x) for x in cell) for cell in out]
            else:
                row.values = [float(x) for x in out]
            return row
    for r in r_axis:
        try:
            value, bad = _cell(quantity, float(a), float(r), angles, quad_tol)
        except RangeError:
            value, bad = _nan_cell(quantity), False
            row.range_failures += 1
        row.values.append(value)
        row.unconverged += bad
    return row


def _row_task(args):
    return evaluate_row(*args)


def evaluate_grid(config: SweepConfig, quantity: str | None = None) -> tuple[np.ndarray, np.ndarray, list[RowResult]]:
    """Rows of the sweep in index order, computed on ``config.threads`` workers."""
    quantity = quantity or config.quantity
    a_axis, r_axis = config.axes()
    angles = None
    if config.theta is not None and config.phi is not None:
        angles = BasisAngles(config.theta, config.phi)
    tasks = [(quantity, i, float(a), r_axis, angles, config.quad_tol) for i, a in enumerate(a_axis)]
    if config.threads == 1:
        rows = [_row_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            # map preserves submission order: the ordered write-back buffer
            rows = list(pool.map(_row_task, tasks, chunksize=max(1, len(tasks) // (4 * config.threads))))
    return a_axis, r_axis, rows


def fmt(x) -> str:
    """17 significant digits; lossless for doubles."""
    if isinstance(x, str):
        return x
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _json_number(x):
    if isinstance(x, str):
        return x
    return None if math.isnan(x) else float(x)


def git_describe() -> str:
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=here, capture_output=True, text=True, timeout=5, check=True,
        )
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def meta(config: SweepConfig, extra: dict | None = None) -> dict:
    doc = {"config": asdict(config), "version": __version__, "git_describe": git_describe()}
    if extra:
        doc.update(extra)
    return doc


def render_sweep(config: SweepConfig, a_axis, r_axis, rows: list[RowResult]) -> str:
    pops = config.quantity == "populations"
    if config.format == "csv":
        header = "a,r," + (",".join(POPULATION_COLUMNS) if pops else "value")
        lines = [header]
        for row in rows:
            a = fmt(float(a_axis[row.index]))
            for r, v in zip(r_axis, row.values):
                cells = v if pops else (v,)
                lines.append(",".join([a, fmt(float(r))] + [fmt(c) for c in cells]))
        return "\n".join(lines) + "\n"
    data = []
    for row in rows:
        a = float(a_axis[row.index])
        for r, v in zip(r_axis, row.values):
            cells = v if pops else (v,)
            data.append([a, float(r)] + [_json_number(c) for c in cells])
    columns = ["a", "r"] + (list(POPULATION_COLUMNS) if pops else ["value"])
    return json.dumps({"meta": meta(config, {"columns": columns}), "data": data}) + "\n"


@dataclass
class Boundary:
    contour: list[np.ndarray]
    crossings: list[tuple]
    range_failures: int


def compute_boundary(config: SweepConfig) -> Boundary:
    """Zero contour of the concurrence plus the analytic level-crossing segments.

    The contour is traced on ``2 max(A, B)``, which changes sign where the
    concurrence leaves zero; the clamped value would be flat on one side.
    """
    a_axis, r_axis, rows = evaluate_grid(config, "concurrence_margin")
    grid = np.array([row.values for row in rows], dtype=float)
    t = config.temperature
    crossings = level_crossing_segments(config.a_min / t, config.a_max / t, config.r_min / t, config.r_max / t)
    return Boundary(entanglement_boundary(a_axis, r_axis, grid), crossings, sum(r.range_failures for r in rows))


def boundary_rows(b: Boundary) -> list[tuple]:
    out = []
    for seg, line in enumerate(b.contour):
        for k, (a, r) in enumerate(line):
            out.append(("concurrence", seg, k, float(a), float(r)))
    for seg, pts in enumerate(b.crossings):
        for k, (a, r) in enumerate(pts):
            out.append(("crossing", seg, k, float(a), float(r)))
    return out


def render_boundary(config: SweepConfig, b: Boundary) -> str:
    rows = boundary_rows(b)
    if config.format == "csv":
        lines = ["curve,segment,index,a,r"]
        lines += [f"{c},{s},{k},{fmt(a)},{fmt(r)}" for c, s, k, a, r in rows]
        return "\n".join(lines) + "\n"
    extra = {"columns": ["curve", "segment", "index", "a", "r"]}
    return json.dumps({"meta": meta(config, extra), "data": [list(r) for r in rows]}) + "\n"
