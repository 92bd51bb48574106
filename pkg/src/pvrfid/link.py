"""UHF RFID link budget: Friis path, forward/reverse limited read range.

All powers and gains are in dB-space (dBm / dBi / dB); ranges in meters.
The forward link limits when the tag IC cannot wake, the reverse link when
the reader cannot hear the backscatter; read range is the smaller of the two.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from scipy.constants import c as C_LIGHT


class ZeroTauError(ValueError):
    """Power transmission coefficient of zero delivers nothing to the IC."""


@dataclass(frozen=True)
class LinkConfig:
    """Link parameters shared by both directions.

    tau is the antenna-to-IC power transmission coefficient in [0, 1];
    polarization_loss covers the circular-reader/linear-tag mismatch on the
    forward path; modulation_loss lumps backscatter conversion loss on the
    reverse path.
    """

    eirp: float                  # dBm
    tag_gain: float              # dBi
    reader_antenna_gain: float   # dBi
    tau: float
    polarization_loss: float     # dB
    modulation_loss: float       # dB
    reader_sensitivity: float    # dBm
    frequency: float             # Hz

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must be in [0, 1], got {self.tau}")
        if self.polarization_loss < 0 or self.modulation_loss < 0:
            raise ValueError("losses must be >= 0 dB")
        if self.frequency <= 0:
            raise ValueError(f"frequency must be > 0, got {self.frequency}")

    @property
    def wavelength(self) -> float:
        return C_LIGHT / self.frequency


def _range_scale(frequency: float) -> float:
    """lambda / 4 pi: the distance at which free-space path loss is 0 dB."""
    return C_LIGHT / frequency / (4.0 * math.pi)


def friis_received_power(eirp: float, g_rx: float, frequency: float,
                         distance: float) -> float:
    """Received power in dBm: eirp + g_rx + 20 log10(lambda / 4 pi d)."""
    if distance <= 0:
        raise ValueError(f"distance must be > 0, got {distance}")
    if frequency <= 0:
        raise ValueError(f"frequency must be > 0, got {frequency}")
    return eirp + g_rx + 20.0 * math.log10(_range_scale(frequency) / distance)


def forward_limited_range(cfg: LinkConfig, ic_sensitivity: float) -> float:
    """Largest distance at which the IC still receives its wake-up power.

    Inverts the forward budget: d = (lambda / 4 pi) * 10^((eirp + tag_gain
    + 10 log10 tau - polarization_loss - sensitivity) / 20).
    """
    if cfg.tau == 0.0:
        raise ZeroTauError("tau = 0: no power reaches the IC at any distance")
    margin = (cfg.eirp + cfg.tag_gain + 10.0 * math.log10(cfg.tau)
              - cfg.polarization_loss - ic_sensitivity)
    return _range_scale(cfg.frequency) * 10.0 ** (margin / 20.0)


def reverse_limited_range(cfg: LinkConfig) -> float:
    """Largest distance at which the reader still hears the backscatter.

    The reverse budget crosses the air gap twice:
    p_rx = eirp + 2 tag_gain + reader_antenna_gain - modulation_loss
    - 2 FSPL(d), so d scales as 10^(margin / 40).
    """
    margin = (cfg.eirp + 2.0 * cfg.tag_gain + cfg.reader_antenna_gain
              - cfg.modulation_loss - cfg.reader_sensitivity)
    return _range_scale(cfg.frequency) * 10.0 ** (margin / 40.0)


def read_range(cfg: LinkConfig, ic_sensitivity: float) -> float:
    """min(forward, reverse) limited range in m."""
    return min(forward_limited_range(cfg, ic_sensitivity),
               reverse_limited_range(cfg))


def range_ratio(sens_passive: float, sens_assisted: float) -> float:
    """Forward-range gain from a sensitivity improvement: 10^(dB diff / 20)."""
    if sens_assisted > sens_passive:
        raise ValueError(
            f"assisted sensitivity {sens_assisted} dBm must not be worse "
            f"than passive {sens_passive} dBm")
    return 10.0 ** ((sens_passive - sens_assisted) / 20.0)


@dataclass(frozen=True)
class ThresholdSweep:
    """Measured wake-up threshold vs frequency, plus the measurement distance.

    points are (frequency Hz, threshold EIRP dBm): the lowest transmit EIRP
    that woke the tag at reference_distance.
    """

    points: tuple[tuple[float, float], ...]
    reference_distance: float  # m

    def __post_init__(self):
        if self.reference_distance <= 0:
            raise ValueError(
                f"reference distance must be > 0, got {self.reference_distance}")
        pts = tuple((float(f), float(p)) for f, p in self.points)
        if not pts:
            raise ValueError("sweep needs at least one point")
        for (f0, _), (f1, _) in zip(pts, pts[1:]):
            if f1 <= f0:
                raise ValueError("sweep frequencies must be strictly ascending")
        if pts[0][0] <= 0:
            raise ValueError("frequencies must be > 0")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_csv(cls, path, reference_distance: float) -> "ThresholdSweep":
        pts = []
        with open(path, newline="", encoding="utf-8") as fh:
            for line_no, row in enumerate(csv.reader(fh), start=1):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                if row[0].strip() == "frequency_hz":
                    continue
                try:
                    pts.append((float(row[0]), float(row[1])))
                except (ValueError, IndexError) as exc:
                    raise ValueError(f"{path}:{line_no}: bad sweep row {row!r}") from exc
        return cls(tuple(pts), reference_distance)


def sweep_to_range(sweep: ThresholdSweep, eirp_max: float) -> list[tuple[float, float]]:
    """Convert threshold-EIRP points to read range at the regulatory EIRP.

    Each margin dB of headroom over the measured threshold buys
    10^(margin/20) times the reference distance.
    """
    return [(f, sweep.reference_distance * 10.0 ** ((eirp_max - thr) / 20.0))
            for f, thr in sweep.points]
