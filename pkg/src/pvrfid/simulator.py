"""Time-stepped node simulation: PV directly coupled to a capacitor and IC.

Direct coupling means the PV operating point is the capacitor voltage at
every step; there is no converter or MPP tracker in the loop.  A series
blocking diode is assumed, so the PV branch never discharges the capacitor
(its current is clamped at zero in the dark).

Each trace record carries the powers applied over the step that starts at
its timestamp, evaluated at the midpoint voltage, which makes

    sum((p_in - p_load - p_leak) * dt) == C (v_end^2 - v_0^2) / 2

hold to rounding error even across clamp events.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ic as ic_mod
from . import pv as pv_mod
from . import storage
from .ic import ICProfile, MeasurementSchedule, SECONDS_PER_DAY
from .pv import DiodeModel
from .storage import CapacitorModel


class ScenarioError(ValueError):
    """Scenario fields are inconsistent."""


@dataclass(frozen=True)
class LightProfile:
    """Piecewise-constant illumination: (start s, end s, suns) segments.

    Segments must be ordered and non-overlapping; gaps are dark.
    """

    segments: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        segs = tuple((float(a), float(b), float(g)) for a, b, g in self.segments)
        prev_end = 0.0
        for a, b, g in segs:
            if a < prev_end or b <= a:
                raise ValueError(f"segments must be ordered and disjoint: {segs}")
            if g < 0:
                raise ValueError(f"intensity must be >= 0 suns, got {g}")
            prev_end = b
        object.__setattr__(self, "segments", segs)

    @classmethod
    def dark(cls) -> "LightProfile":
        return cls(())

    @classmethod
    def window(cls, end: float, suns: float, start: float = 0.0) -> "LightProfile":
        return cls(((start, end, suns),))

    def intensity_at(self, t: float) -> float:
        for a, b, g in self.segments:
            if a <= t < b:
                return g
        return 0.0


@dataclass(frozen=True)
class TraceRecord:
    t: float                 # s
    v: float                 # V, capacitor voltage at t
    mode: str                # off | sleep | ready | measure
    p_in: float              # W over the step starting at t
    p_load: float            # W
    p_leak: float            # W
    measurement_count: int   # cumulative completed measurements at t


@dataclass(frozen=True)
class Scenario:
    pv: DiodeModel
    cap: CapacitorModel
    ic: ICProfile
    schedule: MeasurementSchedule
    light: LightProfile
    duration: float                  # s
    dt: float = 1.0                  # s
    initial_v: float = 0.0           # V
    photocurrent_scale: float = 1.0  # calibration on the PV branch current

    def __post_init__(self):
        if self.duration <= 0:
            raise ScenarioError(f"duration must be > 0, got {self.duration}")
        if self.dt <= 0 or self.dt > self.duration:
            raise ScenarioError(
                f"dt must be in (0, duration], got dt={self.dt}, "
                f"duration={self.duration}")
        if not 0.0 <= self.initial_v <= self.cap.v_max:
            raise ScenarioError(
                f"initial_v {self.initial_v} V outside [0, {self.cap.v_max}] V")
        if self.photocurrent_scale <= 0:
            raise ScenarioError(
                f"photocurrent_scale must be > 0, got {self.photocurrent_scale}")
        if self.ic.v_threshold > self.cap.v_max:
            raise ScenarioError(
                f"IC threshold {self.ic.v_threshold} V above capacitor "
                f"clamp {self.cap.v_max} V: device could never start")


def simulate(s: Scenario) -> list[TraceRecord]:
    """Run the scenario and return one record per step start plus a final state.

    Measurements are scheduled one interval after the window opens and occur
    only while the device is on; events that land while it is off are skipped,
    not deferred.
    """
    n_steps = int(round(s.duration / s.dt))
    if n_steps < 1:
        n_steps = 1
    window = s.schedule.active_window or (0.0, s.duration)
    w_start, w_end = window
    interval = (ic_mod.SECONDS_PER_HOUR / s.schedule.rate_per_hour
                if s.schedule.rate_per_hour > 0 else None)
    next_event = w_start + interval if interval is not None else None

    cap = s.cap
    profile = s.ic
    records: list[TraceRecord] = []
    v = s.initial_v
    count = 0

    for k in range(n_steps):
        t0 = k * s.dt
        t1 = t0 + s.dt
        suns = s.light.intensity_at(t0)
        on = v >= profile.v_threshold
        in_window = w_start <= t0 < w_end

        events = 0
        if interval is not None:
            while next_event < t1 and next_event <= w_end:
                if on:
                    events += 1
                next_event += interval

        if not on:
            mode = "off"
            i_load = 0.0
        elif not in_window:
            mode = "sleep"
            i_load = profile.i_sleep
        else:
            busy = min(events * profile.t_measure / s.dt, 1.0)
            mode = "measure" if events else "ready"
            i_load = (1.0 - busy) * profile.i_ready + busy * profile.i_measure

        i_pv = max(0.0, s.photocurrent_scale * pv_mod.iv_current(s.pv, v, intensity=suns))
        i_leak = storage.leak_current(cap, v)

        i_net = i_pv - i_load - i_leak
        v_next = min(max(v + i_net * s.dt / cap.capacitance, 0.0), cap.v_max)
        i_net_eff = (v_next - v) * cap.capacitance / s.dt

        # Attribute clamp corrections so the recorded powers integrate to the
        # stored-energy change exactly: excess charge current is shed before
        # the capacitor (top clamp); discharge currents scale down when the
        # capacitor empties mid-step (bottom clamp).
        i_pv_eff, i_load_eff, i_leak_eff = i_pv, i_load, i_leak
        if i_net_eff != i_net:
            if i_net > 0:
                i_pv_eff = i_load + i_leak + i_net_eff
            else:
                drain = i_load + i_leak
                scale = (i_pv - i_net_eff) / drain if drain > 0 else 0.0
                i_load_eff = scale * i_load
                i_leak_eff = scale * i_leak

        v_mid = 0.5 * (v + v_next)
        records.append(TraceRecord(
            t=t0, v=v, mode=mode,
            p_in=v_mid * i_pv_eff,
            p_load=v_mid * i_load_eff,
            p_leak=v_mid * i_leak_eff,
            measurement_count=count,
        ))
        count += events
        v = v_next

    final_mode = "off" if v < profile.v_threshold else (
        "ready" if w_start <= n_steps * s.dt < w_end else "sleep")
    records.append(TraceRecord(
        t=n_steps * s.dt, v=v, mode=final_mode,
        p_in=0.0, p_load=0.0, p_leak=0.0, measurement_count=count,
    ))
    return records


def time_to_voltage(trace: list[TraceRecord], v_target: float) -> float | None:
    """First time the trace crosses v_target, linearly interpolated.

    Crossings in either direction count.  None if the trace never reaches
    the target.
    """
    if not trace:
        return None
    if trace[0].v == v_target:
        return trace[0].t
    for r0, r1 in zip(trace, trace[1:]):
        d0 = r0.v - v_target
        d1 = r1.v - v_target
        if d0 == 0.0:
            return r0.t
        if (d0 < 0 <= d1) or (d0 > 0 >= d1):
            return r0.t + (r1.t - r0.t) * d0 / (r0.v - r1.v)
    return None


def on_time(trace: list[TraceRecord], v_threshold: float) -> float:
    """Total seconds with v >= v_threshold, crossings linearly interpolated."""
    total = 0.0
    for r0, r1 in zip(trace, trace[1:]):
        dt = r1.t - r0.t
        on0 = r0.v >= v_threshold
        on1 = r1.v >= v_threshold
        if on0 and on1:
            total += dt
        elif on0 != on1:
            frac = abs(r0.v - v_threshold) / abs(r0.v - r1.v)
            total += frac * dt if on0 else (1.0 - frac) * dt
    return total


def on_time_experiment(s: Scenario, light_on: float) -> float:
    """Seconds of operation from a single lit window [0, light_on].

    The scenario must carry exactly that illumination profile; the device
    keeps running on stored charge after the light goes out, so the result
    usually exceeds light_on.
    """
    segs = s.light.segments
    if len(segs) != 1 or segs[0][0] != 0.0 or segs[0][1] != light_on:
        raise ScenarioError(
            f"scenario light profile {segs} is not a single [0, {light_on}] window")
    if segs[0][2] <= 0:
        raise ScenarioError("lit window must have nonzero intensity")
    return on_time(simulate(s), s.ic.v_threshold)


def trace_availability(trace: list[TraceRecord]) -> float:
    """Fraction of records with the device on (mode != off)."""
    if not trace:
        return 0.0
    on = sum(1 for r in trace if r.mode != "off")
    return on / len(trace)


def availability(s: Scenario) -> float:
    """Day-scale availability from an energy balance, clamped to [0, 1].

    (harvestable energy + usable stored energy - leak energy) over the
    daily demand.  Harvest integrates the MPP power of the light-scaled
    module over the lit segments: the best the cells could deliver, not the
    direct-coupled operating point.  Leak energy is estimated at the
    midpoint of the discharge span, demand at the IC threshold voltage.
    A full trace gives the occupancy alternative, see trace_availability().
    """
    if s.duration != SECONDS_PER_DAY:
        raise ScenarioError(
            f"availability is defined over one day; scenario lasts {s.duration} s")

    e_required = ic_mod.daily_energy(s.ic, s.schedule, s.ic.v_threshold)

    v_hi = max(s.initial_v, s.ic.v_threshold)
    usable = storage.usable_energy(s.cap, v_hi, s.ic.v_threshold)

    v_mean = 0.5 * (s.initial_v + s.ic.v_threshold)
    e_leak = storage.leak_current(s.cap, v_mean) * v_mean * SECONDS_PER_DAY

    e_harvest = 0.0
    for a, b, suns in s.light.segments:
        span = max(0.0, min(b, s.duration) - max(a, 0.0))
        if span == 0.0 or suns == 0.0:
            continue
        p_mpp = pv_mod.mpp(pv_mod.at_intensity(s.pv, suns))[2]
        e_harvest += s.photocurrent_scale * p_mpp * span

    if e_required <= 0.0:
        return 1.0
    return min(max((e_harvest + usable - e_leak) / e_required, 0.0), 1.0)
