"""Time-stepped node simulation: charge, discharge, events, availability."""

import math

import pytest

from pvrfid import ic, pv, simulator, storage
from pvrfid.simulator import LightProfile, Scenario, TraceRecord
from conftest import (LEAK_R, SCALE, SUNS, charge_scenario,
                      discharge_scenario, reference_ic, reference_module)


def pinned_scenario(duration=600.0, rate_per_hour=3600.0, window=None,
                    capacitance=100.0):
    """Pre-charged huge capacitor: voltage stays at the clamp, device on."""
    return Scenario(pv=reference_module(),
                    cap=storage.CapacitorModel(capacitance, 3.0),
                    ic=reference_ic(),
                    schedule=ic.MeasurementSchedule(rate_per_hour,
                                                    active_window=window),
                    light=LightProfile.dark(),
                    duration=duration,
                    initial_v=3.0)


def stored_delta(scn, trace):
    c = scn.cap.capacitance
    return 0.5 * c * (trace[-1].v ** 2 - trace[0].v ** 2)


def energy_residual(scn, trace):
    net = sum((r.p_in - r.p_load - r.p_leak) * scn.dt for r in trace[:-1])
    return net - stored_delta(scn, trace)


class TestDischarge:
    def test_matches_closed_form(self):
        scn = discharge_scenario(duration=9000.0)
        trace = simulator.simulate(scn)
        tau = LEAK_R * scn.cap.capacitance
        for idx in (1000, 2500, 5000, 8000):
            r = trace[idx]
            assert r.t == idx
            assert r.v == pytest.approx(3.0 * math.exp(-r.t / tau), rel=1e-4)

    def test_reference_voltages(self):
        trace = simulator.simulate(discharge_scenario(duration=9000.0))
        by_t = {r.t: r.v for r in trace}
        # leak resistance was fitted to put the decay through 2.0 V at 5000 s
        assert by_t[5000.0] == pytest.approx(2.0, rel=1e-4)
        assert by_t[8000.0] == pytest.approx(1.568, abs=2e-3)

    def test_energy_balance(self):
        scn = discharge_scenario(duration=9000.0)
        trace = simulator.simulate(scn)
        assert abs(energy_residual(scn, trace)) <= 1e-9


class TestCharge:
    def test_record_count_and_timestamps(self):
        scn = charge_scenario(duration=3600.0)
        trace = simulator.simulate(scn)
        assert len(trace) == 3601
        assert trace[0].t == 0.0
        assert trace[-1].t == 3600.0

    def test_threshold_crossing_time(self):
        trace = simulator.simulate(charge_scenario(duration=3600.0))
        t15 = simulator.time_to_voltage(trace, 1.5)
        assert t15 == pytest.approx(313.72, abs=0.05)

    def test_full_charge_time(self):
        trace = simulator.simulate(charge_scenario(duration=3600.0))
        t30 = simulator.time_to_voltage(trace, 3.0)
        assert t30 == pytest.approx(3000.0, abs=1.0)

    def test_dt_halving_stability(self):
        t = {}
        for dt in (1.0, 0.5):
            trace = simulator.simulate(charge_scenario(duration=3600.0, dt=dt))
            t[dt] = (simulator.time_to_voltage(trace, 1.5),
                     simulator.time_to_voltage(trace, 3.0))
        for a, b in zip(t[1.0], t[0.5]):
            assert abs(a - b) / b < 0.01

    def test_energy_balance(self):
        scn = charge_scenario(duration=3600.0)
        trace = simulator.simulate(scn)
        assert abs(energy_residual(scn, trace)) <= 1e-9

    def test_voltage_monotone_until_clamp(self):
        trace = simulator.simulate(charge_scenario(duration=3600.0))
        clamp_idx = next(i for i, r in enumerate(trace) if r.v == 3.0)
        volts = [r.v for r in trace[:clamp_idx + 1]]
        assert all(a < b for a, b in zip(volts, volts[1:]))
        assert all(r.v == 3.0 for r in trace[clamp_idx:])


class TestTraceInvariants:
    @pytest.mark.parametrize("make", [
        lambda: charge_scenario(duration=3600.0),
        lambda: discharge_scenario(duration=9000.0),
        lambda: pinned_scenario(duration=600.0),
    ])
    def test_bounds_modes_counts(self, make):
        scn = make()
        trace = simulator.simulate(scn)
        for r in trace:
            assert 0.0 <= r.v <= scn.cap.v_max
            assert (r.mode == "off") == (r.v < scn.ic.v_threshold)
        counts = [r.measurement_count for r in trace]
        assert all(a <= b for a, b in zip(counts, counts[1:]))

    def test_determinism(self):
        a = simulator.simulate(charge_scenario(duration=1800.0))
        b = simulator.simulate(charge_scenario(duration=1800.0))
        assert a == b

    def test_dark_uncharged_stays_off(self):
        scn = Scenario(pv=reference_module(),
                       cap=storage.CapacitorModel(1.0, 3.0),
                       ic=reference_ic(),
                       schedule=ic.MeasurementSchedule(3600.0),
                       light=LightProfile.dark(),
                       duration=300.0)
        trace = simulator.simulate(scn)
        assert all(r.mode == "off" and r.v == 0.0 for r in trace)
        assert trace[-1].measurement_count == 0


class TestEvents:
    def test_one_per_second_rate(self):
        # 3600/hr means one event per second, first one interval after start;
        # the event landing exactly at the trace end is outside the last step
        trace = simulator.simulate(pinned_scenario(duration=600.0))
        assert trace[-1].measurement_count == 599

    def test_measure_step_load(self, profile):
        trace = simulator.simulate(pinned_scenario(duration=600.0))
        r = trace[10]
        assert r.mode == "measure"
        busy = profile.t_measure / 1.0
        i_expected = (1.0 - busy) * profile.i_ready + busy * profile.i_measure
        assert r.p_load == pytest.approx(3.0 * i_expected, rel=1e-3)

    def test_window_gates_events_and_modes(self):
        trace = simulator.simulate(
            pinned_scenario(duration=300.0, window=(100.0, 200.0)))
        assert trace[-1].measurement_count == 100
        by_t = {r.t: r for r in trace}
        assert by_t[50.0].mode == "sleep"
        assert by_t[100.0].mode == "ready"
        assert by_t[150.0].mode == "measure"
        assert by_t[250.0].mode == "sleep"
        measured = [r.t for r in trace if r.mode == "measure"]
        assert min(measured) >= 101.0 and max(measured) <= 199.0

    def test_events_skipped_while_off(self):
        # device starts empty and dark: scheduled events must not accumulate
        scn = Scenario(pv=reference_module(),
                       cap=storage.CapacitorModel(1.0, 3.0),
                       ic=reference_ic(),
                       schedule=ic.MeasurementSchedule(3600.0),
                       light=LightProfile.dark(),
                       duration=120.0)
        trace = simulator.simulate(scn)
        assert trace[-1].measurement_count == 0


class TestTimeToVoltage:
    def synthetic(self):
        return [TraceRecord(0.0, 0.0, "off", 0, 0, 0, 0),
                TraceRecord(3000.0, 3.0, "ready", 0, 0, 0, 0)]

    def test_interpolated_crossing(self):
        assert simulator.time_to_voltage(self.synthetic(), 1.5) == 1500.0

    def test_unreachable_target(self):
        assert simulator.time_to_voltage(self.synthetic(), 5.0) is None

    def test_starts_at_target(self):
        trace = self.synthetic()
        assert simulator.time_to_voltage(trace, 0.0) == 0.0

    def test_empty_trace(self):
        assert simulator.time_to_voltage([], 1.0) is None

    def test_downward_crossing(self):
        trace = [TraceRecord(0.0, 3.0, "ready", 0, 0, 0, 0),
                 TraceRecord(100.0, 1.0, "off", 0, 0, 0, 0)]
        assert simulator.time_to_voltage(trace, 2.0) == 50.0


class TestOnTime:
    def test_triangle_pulse(self):
        trace = [TraceRecord(0.0, 0.0, "off", 0, 0, 0, 0),
                 TraceRecord(100.0, 2.0, "ready", 0, 0, 0, 0),
                 TraceRecord(200.0, 0.0, "off", 0, 0, 0, 0)]
        assert simulator.on_time(trace, 1.0) == pytest.approx(100.0, rel=1e-12)

    def test_never_on(self):
        trace = [TraceRecord(0.0, 0.0, "off", 0, 0, 0, 0),
                 TraceRecord(100.0, 1.0, "off", 0, 0, 0, 0)]
        assert simulator.on_time(trace, 2.0) == 0.0

    def test_experiment_window_mismatch_rejected(self):
        scn = charge_scenario(duration=3600.0, light_on=2700.0)
        with pytest.raises(simulator.ScenarioError):
            simulator.on_time_experiment(scn, 1800.0)

    def test_experiment_reference_case(self):
        # 45 min of light inside a 4 h observation window: stored charge
        # keeps the node alive well past the lit interval
        scn = charge_scenario(duration=14400.0, light_on=2700.0)
        minutes = simulator.on_time_experiment(scn, 2700.0) / 60.0
        assert minutes == pytest.approx(177.3, abs=0.5)
        assert minutes > 45.0

    def test_experiment_identity_without_losses(self):
        # no leak and no load: once on, the node never turns off, so
        # on time == duration - first crossing of the threshold
        scn = Scenario(pv=reference_module(),
                       cap=storage.CapacitorModel(1.0, 3.0),
                       ic=ic.ICProfile.unloaded(),
                       schedule=ic.MeasurementSchedule(0.0),
                       light=LightProfile.window(1800.0, SUNS),
                       duration=7200.0,
                       photocurrent_scale=SCALE)
        trace = simulator.simulate(scn)
        t_on = simulator.time_to_voltage(trace, scn.ic.v_threshold)
        measured = simulator.on_time_experiment(scn, 1800.0)
        assert measured == pytest.approx(7200.0 - t_on, rel=1e-9)


class TestAvailability:
    def day_scenario(self, cap, rate=0.0):
        return Scenario(pv=reference_module(),
                        cap=cap,
                        ic=reference_ic(),
                        schedule=ic.MeasurementSchedule(rate),
                        light=LightProfile.dark(),
                        duration=ic.SECONDS_PER_DAY,
                        initial_v=3.0)

    def test_big_cap_rides_through_a_dark_day(self):
        cap = storage.CapacitorModel(1.0, 3.0)
        assert simulator.availability(self.day_scenario(cap)) == 1.0

    def test_tiny_cap_fails(self):
        cap = storage.CapacitorModel(1e-6, 3.0)
        assert simulator.availability(self.day_scenario(cap)) < 0.01

    def test_heavy_leak_zeroes_availability(self):
        cap = storage.CapacitorModel(1.0, 3.0, leak_current_a=40e-6)
        assert simulator.availability(self.day_scenario(cap)) == 0.0

    def test_requires_full_day(self):
        cap = storage.CapacitorModel(1.0, 3.0)
        scn = self.day_scenario(cap)
        short = Scenario(pv=scn.pv, cap=scn.cap, ic=scn.ic,
                         schedule=scn.schedule, light=scn.light,
                         duration=3600.0, initial_v=3.0)
        with pytest.raises(simulator.ScenarioError):
            simulator.availability(short)

    def test_harvest_term_lifts_availability(self):
        cap = storage.CapacitorModel(0.047, 3.0)
        dark = self.day_scenario(cap)
        lit = Scenario(pv=dark.pv, cap=dark.cap, ic=dark.ic,
                       schedule=dark.schedule,
                       light=LightProfile.window(8 * 3600.0, 0.05),
                       duration=ic.SECONDS_PER_DAY, initial_v=3.0)
        assert simulator.availability(lit) > simulator.availability(dark)

    def test_trace_availability_counts_off_records(self):
        trace = [TraceRecord(0.0, 2.0, "ready", 0, 0, 0, 0),
                 TraceRecord(1.0, 2.0, "ready", 0, 0, 0, 0),
                 TraceRecord(2.0, 1.0, "off", 0, 0, 0, 0),
                 TraceRecord(3.0, 1.0, "off", 0, 0, 0, 0)]
        assert simulator.trace_availability(trace) == 0.5
        assert simulator.trace_availability([]) == 0.0


class TestValidation:
    def test_scenario_errors(self):
        good = dict(pv=reference_module(),
                    cap=storage.CapacitorModel(1.0, 3.0),
                    ic=reference_ic(),
                    schedule=ic.MeasurementSchedule(0.0),
                    light=LightProfile.dark(),
                    duration=100.0)
        Scenario(**good)
        with pytest.raises(simulator.ScenarioError):
            Scenario(**{**good, "duration": 0.0})
        with pytest.raises(simulator.ScenarioError):
            Scenario(**{**good, "dt": 200.0})
        with pytest.raises(simulator.ScenarioError):
            Scenario(**{**good, "initial_v": 4.0})
        with pytest.raises(simulator.ScenarioError):
            Scenario(**{**good, "photocurrent_scale": 0.0})
        with pytest.raises(simulator.ScenarioError):
            # threshold above the capacitor clamp can never start
            Scenario(**{**good, "cap": storage.CapacitorModel(1.0, 1.0)})

    def test_light_profile_errors(self):
        with pytest.raises(ValueError):
            LightProfile(((0.0, 10.0, 1.0), (5.0, 15.0, 1.0)))
        with pytest.raises(ValueError):
            LightProfile(((10.0, 5.0, 1.0),))
        with pytest.raises(ValueError):
            LightProfile(((0.0, 10.0, -0.5),))

    def test_light_profile_lookup(self):
        lp = LightProfile(((0.0, 10.0, 0.5), (20.0, 30.0, 1.0)))
        assert lp.intensity_at(5.0) == 0.5
        assert lp.intensity_at(15.0) == 0.0
        assert lp.intensity_at(25.0) == 1.0
        assert lp.intensity_at(10.0) == 0.0   # half-open segments
