"""Design toolkit for photovoltaic-assisted UHF RFID sensor nodes."""

from .ic import ICProfile, MeasurementSchedule, average_current, average_power, daily_energy
from .link import LinkConfig, ThresholdSweep, forward_limited_range, friis_received_power, range_ratio, read_range, reverse_limited_range, sweep_to_range
from .pv import DiodeModel, SpectralResponse, Spectrum, fit_single_diode, harvest_power, iv_current, jsc_from_eqe, mpp, series_module
from .simulator import LightProfile, Scenario, TraceRecord, availability, on_time_experiment, simulate, time_to_voltage, trace_availability
from .sizing import InfeasibleSizingError, SizingRequest, persistence_sweep, size_system
from .storage import CapacitorModel, ChargeState, fit_leak_resistance, leak_current, step, stored_energy, usable_energy

__version__ = "0.1.0"
