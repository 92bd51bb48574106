"""RFID sensor IC load model: mode currents and duty-cycled demand.

Average demand uses replacement semantics: a measurement burst replaces
ready-state draw for its duration instead of adding to it, so the average
current is (1 - f) * i_ready + f * i_measure with f the busy fraction.
"""

from __future__ import annotations

from dataclasses import dataclass

SECONDS_PER_HOUR = 3600.0
SECONDS_PER_DAY = 86400.0

MODES = ("sleep", "ready", "measure")


class RateError(ValueError):
    """Measurement rate exceeds the back-to-back limit 3600 s / t_measure."""


class UnderVoltageError(ValueError):
    """Supply voltage below the IC operating threshold."""


@dataclass(frozen=True)
class ICProfile:
    """Static electrical profile of the sensor IC.

    Currents in A, times in s, voltages in V, sensitivities in dBm.
    sens_passive is the wake-up sensitivity on RF power alone;
    sens_assisted applies when local storage supplies the logic.
    """

    i_sleep: float
    i_ready: float
    i_measure: float
    t_measure: float
    v_threshold: float
    v_max: float
    sens_passive: float
    sens_assisted: float

    def __post_init__(self):
        if self.i_sleep < 0:
            raise ValueError(f"i_sleep must be >= 0, got {self.i_sleep}")
        if not self.i_sleep <= self.i_ready <= self.i_measure:
            raise ValueError(
                f"need i_sleep <= i_ready <= i_measure, got "
                f"{self.i_sleep}, {self.i_ready}, {self.i_measure}")
        if self.t_measure <= 0:
            raise ValueError(f"t_measure must be > 0, got {self.t_measure}")
        if not 0 < self.v_threshold <= self.v_max:
            raise ValueError(
                f"need 0 < v_threshold <= v_max, got "
                f"{self.v_threshold}, {self.v_max}")
        if self.sens_assisted > self.sens_passive:
            raise ValueError(
                f"assisted sensitivity {self.sens_assisted} dBm must not be "
                f"worse than passive {self.sens_passive} dBm")

    @classmethod
    def unloaded(cls, v_threshold: float = 1.5, v_max: float = 3.0) -> "ICProfile":
        """Zero-draw profile for storage-only simulations."""
        return cls(0.0, 0.0, 0.0, 1e-3, v_threshold, v_max, 0.0, 0.0)


@dataclass(frozen=True)
class MeasurementSchedule:
    """Measurement cadence: rate in events/hour, optional daily active window.

    Outside the window the IC sleeps; inside it idles in ready state between
    measurements.  No window means active for the whole scenario.
    """

    rate_per_hour: float
    active_window: tuple[float, float] | None = None

    def __post_init__(self):
        if self.rate_per_hour < 0:
            raise ValueError(f"rate must be >= 0, got {self.rate_per_hour}")
        if self.active_window is not None:
            start, end = self.active_window
            if start < 0 or end < start:
                raise ValueError(f"bad active window {self.active_window}")
            object.__setattr__(self, "active_window", (float(start), float(end)))


def mode_current(profile: ICProfile, mode: str) -> float:
    if mode == "sleep":
        return profile.i_sleep
    if mode == "ready":
        return profile.i_ready
    if mode == "measure":
        return profile.i_measure
    raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")


def average_current(profile: ICProfile, rate_per_hour: float) -> float:
    """Duty-cycled average current in A for a given measurement rate."""
    if rate_per_hour < 0:
        raise ValueError(f"rate must be >= 0, got {rate_per_hour}")
    busy = rate_per_hour * profile.t_measure / SECONDS_PER_HOUR
    if busy > 1.0:
        raise RateError(
            f"{rate_per_hour}/h exceeds the back-to-back limit "
            f"{SECONDS_PER_HOUR / profile.t_measure:.0f}/h")
    return (1.0 - busy) * profile.i_ready + busy * profile.i_measure


def average_power(profile: ICProfile, rate_per_hour: float, v: float) -> float:
    """Average demand in W at supply voltage v."""
    if v < profile.v_threshold:
        raise UnderVoltageError(
            f"supply {v} V below operating threshold {profile.v_threshold} V")
    return v * average_current(profile, rate_per_hour)


def daily_energy(profile: ICProfile, schedule: MeasurementSchedule, v: float) -> float:
    """Energy demanded over one day in J.

    Duty-cycled draw inside the active window, sleep draw outside it.  The
    increment above the all-day-sleep baseline is proportional to window
    length, so disjoint windows add.
    """
    if v < 0:
        raise ValueError(f"voltage must be >= 0, got {v}")
    window = schedule.active_window or (0.0, SECONDS_PER_DAY)
    start, end = window
    if end > SECONDS_PER_DAY:
        raise ValueError(f"active window {window} extends past one day")
    active = end - start
    i_active = average_current(profile, schedule.rate_per_hour)
    return v * (i_active * active + profile.i_sleep * (SECONDS_PER_DAY - active))
