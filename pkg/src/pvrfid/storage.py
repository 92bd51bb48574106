"""Capacitor energy buffer: stored energy, leakage models, explicit-Euler step.

Leakage is either a constant current (supercapacitor datasheet style) or a
parallel resistance (exponential self-discharge).  A model may carry one or
neither, not both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class LeakFitError(ValueError):
    """Decay points unusable for a resistance fit."""


@dataclass(frozen=True)
class CapacitorModel:
    capacitance: float                      # F
    v_max: float                            # V, charging clamp
    leak_current_a: float | None = None     # A, constant self-discharge
    leak_resistance_ohm: float | None = None  # ohm, parallel leakage path

    def __post_init__(self):
        if self.capacitance <= 0:
            raise ValueError(f"capacitance must be > 0, got {self.capacitance}")
        if self.v_max <= 0:
            raise ValueError(f"v_max must be > 0, got {self.v_max}")
        if self.leak_current_a is not None and self.leak_resistance_ohm is not None:
            raise ValueError("set leak_current_a or leak_resistance_ohm, not both")
        # constant leak of exactly zero is allowed: it is the no-leak corner
        # of a leakage sweep, where the resistance form would divide by zero
        if self.leak_current_a is not None and self.leak_current_a < 0:
            raise ValueError(f"leak current must be >= 0, got {self.leak_current_a}")
        if self.leak_resistance_ohm is not None and self.leak_resistance_ohm <= 0:
            raise ValueError(
                f"leak resistance must be > 0, got {self.leak_resistance_ohm}")


@dataclass(frozen=True)
class ChargeState:
    v: float      # V
    t: float = 0.0  # s

    def __post_init__(self):
        if self.v < 0:
            raise ValueError(f"voltage must be >= 0, got {self.v}")


def stored_energy(model: CapacitorModel, v: float) -> float:
    """E = C v^2 / 2 in J."""
    if not 0.0 <= v <= model.v_max:
        raise ValueError(f"voltage {v} V outside [0, {model.v_max}] V")
    return 0.5 * model.capacitance * v * v


def usable_energy(model: CapacitorModel, v_hi: float, v_lo: float) -> float:
    """Energy released discharging from v_hi down to v_lo, in J."""
    if not 0.0 <= v_lo <= v_hi <= model.v_max:
        raise ValueError(
            f"need 0 <= v_lo <= v_hi <= v_max, got {v_lo}, {v_hi}, {model.v_max}")
    return 0.5 * model.capacitance * (v_hi * v_hi - v_lo * v_lo)


def leak_current(model: CapacitorModel, v: float) -> float:
    """Self-discharge current in A at terminal voltage v."""
    if v < 0:
        raise ValueError(f"voltage must be >= 0, got {v}")
    if model.leak_current_a is not None:
        return model.leak_current_a
    if model.leak_resistance_ohm is not None:
        return v / model.leak_resistance_ohm
    return 0.0


def step(state: ChargeState, model: CapacitorModel, i_net: float, dt: float) -> ChargeState:
    """One explicit-Euler step: v' = clamp(v + i_net dt / C, 0, v_max).

    i_net is the signed net current into the capacitor; the caller supplies
    generation minus load minus leak.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    v = state.v + i_net * dt / model.capacitance
    v = min(max(v, 0.0), model.v_max)
    return ChargeState(v=v, t=state.t + dt)


def fit_leak_resistance(capacitance: float, v0: float,
                        points: list[tuple[float, float]]) -> float:
    """Least-squares parallel leak resistance from open-circuit decay points.

    Fits v(t) = v0 exp(-t / (R C)) through the origin in log space: with
    y_i = ln(v_i / v0), the slope is sum(t_i y_i) / sum(t_i^2) and
    R = -1 / (slope C).  A single point reduces to the closed form
    R = t / (C ln(v0 / v)).
    """
    if capacitance <= 0:
        raise ValueError(f"capacitance must be > 0, got {capacitance}")
    if v0 <= 0:
        raise ValueError(f"v0 must be > 0, got {v0}")
    if not points:
        raise LeakFitError("need at least one decay point")
    tt = 0.0
    ty = 0.0
    for t, v in points:
        if t <= 0:
            raise LeakFitError(f"decay time must be > 0, got {t}")
        if not 0.0 < v < v0:
            raise LeakFitError(
                f"decay point ({t} s, {v} V) must satisfy 0 < v < v0 = {v0} V")
        y = math.log(v / v0)
        tt += t * t
        ty += t * y
    slope = ty / tt
    return -1.0 / (slope * capacitance)
