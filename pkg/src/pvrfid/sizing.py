"""Design-space search: persistence sweeps and minimal PV/capacitor sizing."""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import simulator
from .ic import ICProfile, MeasurementSchedule, SECONDS_PER_DAY
from .pv import DiodeModel
from .simulator import LightProfile, Scenario
from .storage import CapacitorModel


class InfeasibleSizingError(Exception):
    """No grid point reaches the target availability."""


def persistence_sweep(cap_grid, leak_grid_ua, template: Scenario) -> list[list[float]]:
    """Availability for every (capacitance, constant leak) pair.

    Rows follow cap_grid (F), columns leak_grid_ua (uA).  Each cell starts
    fully charged to the capacitor clamp, everything else comes from the
    template scenario.
    """
    rows = []
    for cap_f in cap_grid:
        row = []
        for leak_ua in leak_grid_ua:
            cap = CapacitorModel(capacitance=cap_f, v_max=template.cap.v_max,
                                 leak_current_a=leak_ua / 1e6)
            s = replace(template, cap=cap, initial_v=cap.v_max)
            row.append(simulator.availability(s))
        rows.append(row)
    return rows


@dataclass(frozen=True)
class SizingRequest:
    """Inputs for the minimal-hardware search.

    base_cell is a per-unit-area model: its isc is the photocurrent of one
    cm^2, so a candidate area scales the photocurrent linearly while voc
    stays put.  Candidate capacitors share the IC voltage ceiling and an
    optional constant leak.
    """

    base_cell: DiodeModel
    ic: ICProfile
    schedule: MeasurementSchedule
    light: LightProfile
    target_availability: float
    area_grid: tuple[float, ...]   # cm^2, ascending
    cap_grid: tuple[float, ...]    # F, ascending
    leak_current_a: float = 0.0
    area_cost: float = 0.0         # per cm^2; both zero = lexicographic
    cap_cost: float = 0.0          # per F

    def __post_init__(self):
        if not 0.0 < self.target_availability <= 1.0:
            raise ValueError(
                f"target availability must be in (0, 1], got "
                f"{self.target_availability}")
        if self.area_cost < 0 or self.cap_cost < 0:
            raise ValueError("cost weights must be >= 0")
        for name, grid in (("area_grid", self.area_grid), ("cap_grid", self.cap_grid)):
            vals = tuple(float(x) for x in grid)
            if not vals or any(x <= 0 for x in vals):
                raise ValueError(f"{name} must be nonempty and positive")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ValueError(f"{name} must be strictly ascending")
            object.__setattr__(self, name, vals)
        if self.leak_current_a < 0:
            raise ValueError(f"leak must be >= 0, got {self.leak_current_a}")


def _availability_at(req: SizingRequest, area: float, cap_f: float) -> float:
    pv = replace(req.base_cell, isc=req.base_cell.isc * area)
    cap = CapacitorModel(capacitance=cap_f, v_max=req.ic.v_max,
                         leak_current_a=req.leak_current_a)
    s = Scenario(pv=pv, cap=cap, ic=req.ic, schedule=req.schedule,
                 light=req.light, duration=SECONDS_PER_DAY,
                 initial_v=req.ic.v_max)
    return simulator.availability(s)


def size_system(req: SizingRequest) -> tuple[float, float, float]:
    """Smallest (area, capacitance) meeting the availability target.

    Lexicographic by area then capacitance, or minimal weighted cost when
    either cost weight is nonzero.  Availability is nondecreasing in area
    (more photocurrent, same demand), so each capacitance column keeps only
    its cheapest feasible area, found by bisecting the area grid;
    capacitances are scanned in full.

    Returns (area cm^2, capacitance F, availability).  Raises
    InfeasibleSizingError when even the largest grid point falls short.
    """
    weighted = req.area_cost > 0 or req.cap_cost > 0
    best: tuple[float, float, float] | None = None
    best_key = None
    areas = req.area_grid
    for cap_f in req.cap_grid:
        if _availability_at(req, areas[-1], cap_f) < req.target_availability:
            continue
        lo, hi = 0, len(areas) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if _availability_at(req, areas[mid], cap_f) >= req.target_availability:
                hi = mid
            else:
                lo = mid + 1
        area = areas[lo]
        if weighted:
            key = (req.area_cost * area + req.cap_cost * cap_f, area, cap_f)
        else:
            key = (area, cap_f)
        if best is None or key < best_key:
            best = (area, cap_f, _availability_at(req, area, cap_f))
            best_key = key
    if best is None:
        raise InfeasibleSizingError(
            f"no (area <= {areas[-1]} cm^2, C <= {req.cap_grid[-1]} F) grid "
            f"point reaches availability {req.target_availability}")
    return best
