"""Figure rendering for CLI reports.  Import is deferred to keep the
simulation core usable without a display stack."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 150


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_iv_curve(v, i_ma, p_mw, mpp_point, path):
    """IV and power curves with the maximum power point marked."""
    v_mpp, i_mpp, p_mpp = mpp_point
    fig, ax1 = plt.subplots(figsize=(6, 4))
    ax1.plot(v, i_ma, "b-", label="current")
    ax1.set_xlabel("voltage (V)")
    ax1.set_ylabel("current (mA)", color="b")
    ax1.grid(True, alpha=0.3)
    ax2 = ax1.twinx()
    ax2.plot(v, p_mw, "r--", label="power")
    ax2.set_ylabel("power (mW)", color="r")
    ax2.plot([v_mpp], [p_mpp * 1e3], "r*", markersize=10)
    ax1.set_title("module IV curve")
    _finish(fig, path)


def save_harvest_curve(suns, p_mw, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(suns, p_mw, "o-")
    ax.set_xlabel("intensity (suns)")
    ax.set_ylabel("available power at MPP (mW)")
    ax.grid(True, alpha=0.3)
    ax.set_title("harvestable power vs illumination")
    _finish(fig, path)


def save_demand_curve(rates, p_uw, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(rates, p_uw, "o-")
    ax.set_xlabel("measurements per hour")
    ax.set_ylabel("average power (uW)")
    ax.grid(True, alpha=0.3)
    ax.set_title("IC power demand vs duty cycle")
    _finish(fig, path)


def save_trace(times, volts, v_threshold, path):
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(np.asarray(times) / 60.0, volts, "-")
    ax.axhline(v_threshold, color="gray", linestyle=":", label="IC threshold")
    ax.set_xlabel("time (min)")
    ax.set_ylabel("capacitor voltage (V)")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    ax.set_title("charge / discharge trace")
    _finish(fig, path)


def save_persistence_heatmap(cap_grid, leak_grid_ua, matrix, path):
    data = np.asarray(matrix, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    im = ax.imshow(data, origin="lower", aspect="auto", vmin=0.0, vmax=1.0,
                   cmap="viridis")
    ax.set_xticks(range(len(leak_grid_ua)))
    ax.set_xticklabels([format(x, "g") for x in leak_grid_ua])
    ax.set_yticks(range(len(cap_grid)))
    ax.set_yticklabels([format(c, "g") for c in cap_grid])
    ax.set_xlabel("leak current (uA)")
    ax.set_ylabel("capacitance (F)")
    fig.colorbar(im, ax=ax, label="availability")
    ax.set_title("persistence over storage design space")
    _finish(fig, path)


def save_range_bars(labels, ranges_m, path):
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar(labels, ranges_m, color=["tab:gray", "tab:green"][:len(labels)])
    ax.set_ylabel("read range (m)")
    ax.grid(True, axis="y", alpha=0.3)
    ax.set_title("passive vs PV-assisted read range")
    _finish(fig, path)


def save_threshold_ranges(freq_hz, range_m, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(np.asarray(freq_hz) / 1e6, range_m, "o-")
    ax.set_xlabel("frequency (MHz)")
    ax.set_ylabel("inferred range (m)")
    ax.grid(True, alpha=0.3)
    ax.set_title("range from threshold-power sweep")
    _finish(fig, path)
