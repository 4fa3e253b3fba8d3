"""Grid evaluation of the full pipeline with stability masking.

Each grid point runs mean field -> drift/diffusion -> stability ->
(if stable) Lyapunov -> logarithmic negativity.  Mean-field
non-convergence and Hurwitz instability both mark the point unstable;
entanglement values are reported only on stable points.
"""

from __future__ import annotations

import dataclasses
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

import numpy as np

from . import meanfield
from .dynamics import build_diffusion, build_drift, stability
from .entanglement import ModePair, extract_pair, log_negativity
from .errors import Diverged, NonConvergence, NonPhysicalState, ParameterError, SingularSolve
from .lyapunov import solve_lyapunov
from .params import (
    INT_FIELDS,
    SystemParams,
    apply_overrides,
    derived_couplings,
    to_canonical_json,
    validate,
)

ENTANGLEMENT_PAIRS = {
    "E_cB1": ("cavity_c", "vib_1"),
    "E_cB2": ("cavity_c", "vib_2"),
    "E_B1B2": ("vib_1", "vib_2"),
}
OBSERVABLES = ("stability", "max_real_part") + tuple(ENTANGLEMENT_PAIRS)

SWEEPABLE_FIELDS = frozenset(
    f.name for f in dataclasses.fields(SystemParams) if f.name != "omega_m"
) | {"drive"}


@dataclass(frozen=True)
class SweepAxis:
    """One swept parameter: field name, range, point count, spacing."""

    field: str
    min: float
    max: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.field not in SWEEPABLE_FIELDS:
            raise ParameterError(self.field, f"{self.field!r} is not a sweepable parameter")
        if self.count < 2:
            raise ParameterError(self.field, "axis count must be at least 2")
        if self.scale not in ("linear", "log"):
            raise ParameterError(self.field, f"unknown axis scale {self.scale!r}")
        if self.scale == "log" and self.min <= 0:
            raise ParameterError(self.field, "log axis requires min > 0")

    def values(self) -> tuple:
        if self.scale == "log":
            grid = np.geomspace(self.min, self.max, self.count)
        else:
            grid = np.linspace(self.min, self.max, self.count)
        if self.field in INT_FIELDS:
            # integer parameters are swept on integers; duplicates collapse
            ints = sorted({int(round(x)) for x in grid})
            return tuple(ints)
        return tuple(float(x) for x in grid)


@dataclass(frozen=True)
class SweepSpec:
    base: SystemParams
    axis_1: SweepAxis
    axis_2: Optional[SweepAxis] = None
    observables: tuple = ("stability", "max_real_part")
    mode: str = "paper"

    def __post_init__(self):
        for name in self.observables:
            if name not in OBSERVABLES:
                raise ParameterError(name, f"unknown observable {name!r}")
        if self.axis_2 is not None and self.axis_2.field == self.axis_1.field:
            raise ParameterError(self.axis_1.field, "the two axes must sweep different fields")

    def axes(self) -> tuple[SweepAxis, ...]:
        return (self.axis_1,) if self.axis_2 is None else (self.axis_1, self.axis_2)

    def entanglement_columns(self) -> tuple:
        return tuple(name for name in self.observables if name in ENTANGLEMENT_PAIRS)


@dataclass(frozen=True)
class SweepRow:
    axis_values: tuple
    stable: bool
    max_real_part: Optional[float]
    entanglement: tuple


@dataclass
class SweepTable:
    axis_fields: tuple
    entanglement_columns: tuple
    rows: list
    params_json: str


def evaluate_point(
    base: SystemParams,
    assignments: dict,
    ent_columns: Sequence[str],
    mode: str = "paper",
) -> SweepRow:
    """Run the full pipeline at one grid point.

    Numerical failures never propagate: non-convergence and instability
    yield an unstable row with empty entanglement cells.
    """
    axis_values = tuple(assignments.values())
    params = validate(apply_overrides(base, assignments))
    try:
        ss = meanfield.solve_mean_field(params, mode=mode)
    except NonConvergence:
        return SweepRow(axis_values, False, None, (None,) * len(ent_columns))
    drift = build_drift(ss, params)
    report = stability(drift)
    if not report.stable:
        return SweepRow(axis_values, False, report.max_real_part, (None,) * len(ent_columns))
    if not ent_columns:
        return SweepRow(axis_values, True, report.max_real_part, ())
    n_th = derived_couplings(params).n_th
    diffusion = build_diffusion(params, n_th)
    try:
        v = solve_lyapunov(drift, diffusion)
    except (SingularSolve, Diverged):
        return SweepRow(axis_values, False, report.max_real_part, (None,) * len(ent_columns))
    values = []
    for name in ent_columns:
        first, second = ENTANGLEMENT_PAIRS[name]
        try:
            values.append(log_negativity(extract_pair(v, ModePair(first, second))))
        except NonPhysicalState:
            values.append(None)
    return SweepRow(axis_values, True, report.max_real_part, tuple(values))


def _point_args(spec: SweepSpec):
    axes = spec.axes()
    grids = [axis.values() for axis in axes]
    fields = [axis.field for axis in axes]
    for combo in product(*grids):  # last axis varies fastest
        yield dict(zip(fields, combo))


def _evaluate_star(args):
    return evaluate_point(*args)


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> SweepTable:
    """Evaluate the grid; rows are assembled in deterministic axis order.

    Points are independent, so any worker count yields the identical
    table; workers defaults to serial evaluation.
    """
    validate(spec.base)
    ent_columns = spec.entanglement_columns()
    tasks = [(spec.base, assignments, ent_columns, spec.mode) for assignments in _point_args(spec)]
    if workers is None or workers <= 1:
        rows = [_evaluate_star(task) for task in tasks]
    else:
        chunk = max(1, len(tasks) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate_star, tasks, chunksize=chunk))
    return SweepTable(
        axis_fields=tuple(axis.field for axis in spec.axes()),
        entanglement_columns=ent_columns,
        rows=rows,
        params_json=to_canonical_json(spec.base),
    )


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return format(value, ".17g")


def emit_csv(table: SweepTable, destination) -> None:
    """Write the table as CSV; a leading comment line records the base parameters.

    Unstable points leave their entanglement cells empty.  Floats carry
    17 significant digits so a re-parse is exact.
    """
    own = isinstance(destination, (str, os.PathLike))
    fh = open(destination, "w", encoding="utf-8", newline="") if own else destination
    try:
        fh.write(f"# params: {table.params_json}\n")
        header = list(table.axis_fields) + ["stable", "max_real_part"] + list(table.entanglement_columns)
        fh.write(",".join(header) + "\n")
        for row in table.rows:
            cells = [_format_value(v) for v in row.axis_values]
            cells.append(_format_value(row.stable))
            cells.append(_format_value(row.max_real_part))
            cells.extend(_format_value(v) for v in row.entanglement)
            fh.write(",".join(cells) + "\n")
    finally:
        if own:
            fh.close()


def csv_text(table: SweepTable) -> str:
    buf = io.StringIO()
    emit_csv(table, buf)
    return buf.getvalue()


def point_is_stable(base: SystemParams, assignments: dict, mode: str = "paper") -> bool:
    """Stability predicate used by boundary extraction: a point counts as
    stable only when the mean field converges and the drift is Hurwitz."""
    return evaluate_point(base, assignments, (), mode=mode).stable


def find_stability_threshold(
    base: SystemParams,
    field: str,
    lo: float,
    hi: float,
    tol: float = 1e-3,
    mode: str = "paper",
) -> float:
    """Bisect the stability boundary along one parameter.

    Requires a stable value at ``lo`` and an unstable one at ``hi``.
    """
    if not point_is_stable(base, {field: lo}, mode):
        raise ValueError(f"{field}={lo} is not stable; bisection needs a stable lower bracket")
    if point_is_stable(base, {field: hi}, mode):
        raise ValueError(f"{field}={hi} is stable; bisection needs an unstable upper bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if point_is_stable(base, {field: mid}, mode):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
