"""Shared reference models and calibration constants for the test suite."""

import pytest

from pvrfid import ic, pv, storage
from pvrfid.simulator import LightProfile, Scenario

# Bench calibration for the charge-trace scenario.  SUNS x SCALE x isc is
# exactly 5 mA: the low-voltage charge current implied by a 1 F capacitor
# reaching 1.5 V around 300 s.  SUNS alone positions the diode knee and was
# tuned so the trace reaches the 3 V clamp near 3000 s.
SUNS = 0.15226606177920554
SCALE = 8.3725798810927579

# parallel leak resistance from the single discharge point (5000 s, 2 V)
LEAK_R = 12331.517311882157

# One line per acceptance criterion, echoed after the run so they survive
# output capture regardless of -s / -q flags.
ACCEPTANCE_LINES = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def reference_module() -> pv.DiodeModel:
    return pv.fit_single_diode(jsc=3.7, voc=4.3, ff=0.60, area=1.06, n_series=4)


def reference_ic() -> ic.ICProfile:
    return ic.ICProfile(i_sleep=1.6e-6, i_ready=6e-6, i_measure=30e-6,
                        t_measure=8e-3, v_threshold=1.5, v_max=3.0,
                        sens_passive=-8.3, sens_assisted=-22.0)


def leaky_cap() -> storage.CapacitorModel:
    return storage.CapacitorModel(capacitance=1.0, v_max=3.0,
                                  leak_resistance_ohm=LEAK_R)


def charge_scenario(duration: float = 3600.0, dt: float = 1.0,
                    light_on: float | None = None,
                    rate_per_hour: float = 0.0) -> Scenario:
    """The calibrated charge experiment: lit PV into an empty 1 F capacitor."""
    light_on = duration if light_on is None else light_on
    return Scenario(pv=reference_module(),
                    cap=leaky_cap(),
                    ic=reference_ic(),
                    schedule=ic.MeasurementSchedule(rate_per_hour=rate_per_hour),
                    light=LightProfile.window(light_on, SUNS),
                    duration=duration,
                    dt=dt,
                    initial_v=0.0,
                    photocurrent_scale=SCALE)


def discharge_scenario(duration: float = 9000.0, dt: float = 1.0) -> Scenario:
    """Dark self-discharge from full: no load, only the fitted leak."""
    return Scenario(pv=reference_module(),
                    cap=leaky_cap(),
                    ic=ic.ICProfile.unloaded(),
                    schedule=ic.MeasurementSchedule(rate_per_hour=0.0),
                    light=LightProfile.dark(),
                    duration=duration,
                    dt=dt,
                    initial_v=3.0)


@pytest.fixture
def module():
    return reference_module()


@pytest.fixture
def profile():
    return reference_ic()
