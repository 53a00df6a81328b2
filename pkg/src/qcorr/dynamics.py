"""Decoherence sweeps and detection of qualitative events along them.

Events reported per measure:

* sudden death: the curve hits zero and stays there to the end of the grid
* dark point: a zero stretch with positive values on both sides
* revival: a zero followed later by a value above ``REVIVED``
* kink (MIN measures only): a jump in the discrete second difference that
  coincides with a switch of the extremal |c_i| in the closed form
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Literal, Mapping, Sequence

import numpy as np

from . import measures
from .channels import CHANNEL_KINDS, apply_product, coefficient_map, make_channel
from .errors import MapUnavailable
from .measures import MEASURES
from .states import CorrelationVector, TwoQubitState, bd_from_c, bloch_of_marginal, c_from_state, correlation_matrix, require_physical

DEAD = 1e-9
REVIVED = 1e-6
KINK_FACTOR = 10.0
BISECT_TOL = 1e-12
_BD_TOL = 1e-12
EDGE_TOL = 1e-9

SWEEPABLE = {"bit-phase-flip": ("p",), "depolarizing": ("gamma",), "gad": ("gamma", "p")}


def grid_points(start: float, stop: float, step: float) -> np.ndarray:
    if not (step > 0):
        raise ValueError(f"grid step must be positive, got {step!r}")
    if not (0.0 <= start < stop <= 1.0):
        raise ValueError(f"grid must satisfy 0 <= start < stop <= 1, got {start!r}:{stop!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    if n < 2:
        raise ValueError("grid must contain at least 2 points")
    pts = np.round(start + step * np.arange(n), 12)
    return np.minimum(pts, stop)


@dataclass(frozen=True)
class SweepSpec:
    initial_c: CorrelationVector
    channel: str
    grid: tuple[float, float, float] = (0.0, 1.0, 0.01)
    sweep_parameter: str | None = None
    fixed_params: Mapping[str, float] = field(default_factory=dict)
    measures: tuple[str, ...] = MEASURES
    evolution_path: Literal["closed-form", "kraus"] = "closed-form"

    def __post_init__(self):
        object.__setattr__(self, "initial_c", require_physical(self.initial_c))
        if self.channel not in CHANNEL_KINDS:
            raise ValueError(f"unknown channel {self.channel!r}; expected one of {CHANNEL_KINDS}")
        param = self.sweep_parameter or SWEEPABLE[self.channel][0]
        if param not in SWEEPABLE[self.channel]:
            raise ValueError(f"{self.channel} cannot be swept over {param!r}")
        object.__setattr__(self, "sweep_parameter", param)
        fixed = dict(self.fixed_params)
        if self.channel == "gad":
            other = "p" if param == "gamma" else "gamma"
            fixed.setdefault(other, 0.5)
            fixed = {other: float(fixed[other])}
        else:
            fixed = {}
        object.__setattr__(self, "fixed_params", fixed)
        unknown = [m for m in self.measures if m not in MEASURES]
        if unknown or not self.measures:
            raise ValueError(f"measures must be a non-empty subset of {MEASURES}, got {self.measures!r}")
        object.__setattr__(self, "measures", tuple(m for m in MEASURES if m in self.measures))
        if self.evolution_path not in ("closed-form", "kraus"):
            raise ValueError(f"evolution_path must be 'closed-form' or 'kraus', got {self.evolution_path!r}")
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        grid_points(*self.grid)

    def params_at(self, value: float) -> dict[str, float]:
        return {**self.fixed_params, self.sweep_parameter: float(value)}

    def points(self) -> np.ndarray:
        return grid_points(*self.grid)


@dataclass(frozen=True)
class SweepRecord:
    param: float
    c_t: CorrelationVector
    values: Mapping[str, float]


@dataclass(frozen=True)
class EventReport:
    measure: str
    esd_threshold: float | None = None
    dark_points: tuple[float, ...] = ()
    revivals: tuple[tuple[float, float], ...] = ()
    kinks: tuple[float, ...] = ()

    def as_dict(self) -> dict:
        return {
            "measure": self.measure,
            "esd_threshold": self.esd_threshold,
            "dark_points": list(self.dark_points),
            "revivals": [list(r) for r in self.revivals],
            "kinks": list(self.kinks),
        }


def _is_bell_diagonal(state: TwoQubitState) -> bool:
    t = correlation_matrix(state)
    off = t - np.diag(np.diag(t))
    xa = bloch_of_marginal(state, "a")
    xb = bloch_of_marginal(state, "b")
    return max(np.abs(off).max(), np.abs(xa).max(), np.abs(xb).max()) <= _BD_TOL


def _kraus_values(state: TwoQubitState, c_t: CorrelationVector, wanted: Sequence[str]) -> dict[str, float]:
    bell_diagonal = _is_bell_diagonal(state)
    out = {}
    for m in wanted:
        if m == "concurrence":
            out[m] = measures.concurrence(state)
        elif m == "trace_min":
            out[m] = measures.trace_min(state).value
        elif bell_diagonal:
            out[m] = measures.closed_form(c_t, m)
        else:
            out[m] = measures.oracle_min(state, measures.ORACLE_DISTANCE[m]).value
    return out


def evaluate_point(spec: SweepSpec, value: float) -> SweepRecord:
    params = spec.params_at(value)
    if spec.evolution_path == "closed-form":
        c_t = coefficient_map(spec.channel, params, spec.initial_c)
        values = {m: measures.closed_form(c_t, m) for m in spec.measures}
    else:
        state = apply_product(make_channel(spec.channel, **params), bd_from_c(spec.initial_c))
        c_t = c_from_state(state)
        values = _kraus_values(state, c_t, spec.measures)
    return SweepRecord(param=float(value), c_t=c_t, values=values)


def has_closed_form(spec: SweepSpec) -> bool:
    if spec.channel != "gad":
        return True
    return spec.sweep_parameter == "gamma" and spec.fixed_params["p"] == 0.5


def run_sweep(spec: SweepSpec) -> list[SweepRecord]:
    """One record per grid point, in ascending parameter order.

    Raises MapUnavailable for a closed-form sweep of GAD with p != 1/2.
    """
    if spec.evolution_path == "closed-form" and not has_closed_form(spec):
        raise MapUnavailable("closed-form GAD sweeps need p fixed at 1/2; use the kraus path")
    return [evaluate_point(spec, x) for x in spec.points()]


def extremal_index(c_t: CorrelationVector, measure: str) -> int:
    """Index of the |c_i| that selects the active branch of a MIN closed form."""
    c = c_t.as_tuple()
    if measure == "trace_min":
        return measures._abs_argmax(c)
    if measure in ("hs_min", "re_min"):
        return measures._abs_argmin(c)
    raise ValueError(f"unknown measure {measure!r}")


def bisect_boundary(pred: Callable[[float], bool], lo: float, hi: float) -> float:
    """Boundary between ``lo`` (pred False) and ``hi`` (pred True)."""
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _zero_runs(zero: np.ndarray) -> list[tuple[int, int]]:
    runs, i, n = [], 0, len(zero)
    while i < n:
        if zero[i]:
            j = i
            while j + 1 < n and zero[j + 1]:
                j += 1
            runs.append((i, j))
            i = j + 1
        else:
            i += 1
    return runs


def detect_events(
    records: Sequence[SweepRecord],
    measure: str,
    evaluate: Callable[[float], SweepRecord] | None = None,
) -> EventReport:
    """Scan a sweep for sudden death, dark points, revivals and kinks of ``measure``.

    When ``evaluate`` (parameter -> record) is given, the sudden-death threshold
    and kink locations are refined by bisection between grid points.
    """
    if len(records) < 2:
        raise ValueError("need at least 2 records to detect events")
    x = np.array([r.param for r in records])
    v = np.array([r.values[measure] for r in records])
    zero = v <= DEAD
    n = len(v)

    esd = None
    runs = _zero_runs(zero)
    # a zero only at the last grid point is asymptotic decay, not sudden death
    if runs and runs[-1][1] == n - 1 and 0 < runs[-1][0] < n - 1:
        i = runs[-1][0]
        esd = float(x[i])
        if evaluate is not None:
            esd = bisect_boundary(lambda t: evaluate(t).values[measure] <= DEAD, float(x[i - 1]), float(x[i]))

    dark, revivals = [], []
    for i, j in runs:
        deepest = i + int(np.argmin(v[i : j + 1]))
        if i > 0 and j < n - 1:
            dark.append(float(x[deepest]))
        later = np.flatnonzero(v[j + 1 :] > REVIVED)
        if later.size:
            revivals.append((float(x[deepest]), float(x[j + 1 + later[0]])))

    kinks = []
    if n >= 3 and measure != "concurrence":
        idx = [extremal_index(r.c_t, measure) for r in records]
        d2 = np.abs(v[:-2] - 2.0 * v[1:-1] + v[2:])
        threshold = max(KINK_FACTOR * float(np.median(d2)), 1e-12)
        flagged = [k + 1 for k in range(n - 2) if d2[k] > threshold and idx[k] != idx[k + 2]]
        groups: list[list[int]] = []
        for k in flagged:
            if groups and k - groups[-1][-1] <= 1:
                groups[-1].append(k)
            else:
                groups.append([k])
        for g in groups:
            lo, hi = g[0] - 1, g[-1] + 1
            loc = float(x[max(g, key=lambda k: d2[k - 1])])
            if evaluate is not None:
                # find the parameter where the active branch leaves its value at the left edge
                left = idx[lo]
                loc = bisect_boundary(lambda t: extremal_index(evaluate(t).c_t, measure) != left, float(x[lo]), float(x[hi]))
            if x[0] + EDGE_TOL < loc < x[-1] - EDGE_TOL:
                kinks.append(loc)

    return EventReport(
        measure=measure,
        esd_threshold=esd,
        dark_points=tuple(dark),
        revivals=tuple(revivals),
        kinks=tuple(kinks),
    )


def sweep_events(spec: SweepSpec, records: Sequence[SweepRecord] | None = None) -> dict[str, EventReport]:
    """Event reports for every measure in ``spec``, refined on the closed form when one exists."""
    records = run_sweep(spec) if records is None else records
    refine_spec = replace(spec, evolution_path="closed-form") if has_closed_form(spec) else spec
    return {m: detect_events(records, m, lambda t: evaluate_point(refine_spec, t)) for m in spec.measures}
