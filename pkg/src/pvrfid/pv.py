"""Single-diode photovoltaic model and spectral response integration.

The diode law used throughout is the resistance-free form

    I(V) = isc - i0 * (exp(q V / (n_series * n * k T)) - 1)

with the dark saturation current i0 pinned by I(voc) = 0.  Fill factor is
matched by searching the ideality factor n alone, so fitted n values are
shape parameters, not junction physics.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np
from scipy.constants import Boltzmann as K_B, c as C_LIGHT, elementary_charge as Q_E, h as H_PLANCK
from scipy.optimize import brentq, minimize_scalar

T_DEFAULT = 298.15  # K, all fits are done at a fixed junction temperature

# Search bracket for the ideality factor.  Values near the top end are not
# physical diode behaviour; they absorb every loss mechanism the
# resistance-free law leaves out.
IDEALITY_LO = 0.5
IDEALITY_HI = 10.0

_EXP_ARG_MAX = 700.0  # exp() overflows just above this for float64


class FillFactorError(ValueError):
    """No ideality factor in the bracket reproduces the requested fill factor."""


class SpectralOverlapError(ValueError):
    """EQE and spectrum share no wavelength support."""


@dataclass(frozen=True)
class DiodeModel:
    """Resistance-free single-diode cell, or a string of identical cells.

    isc is the short-circuit current of the whole string at full
    illumination (series cells carry the same current), voc the open-circuit
    voltage of the whole string.
    """

    isc: float               # A
    voc: float               # V
    n_ideality: float
    temperature: float = T_DEFAULT  # K
    n_series: int = 1

    def __post_init__(self):
        if self.isc < 0:
            raise ValueError(f"isc must be >= 0, got {self.isc}")
        if self.voc <= 0:
            raise ValueError(f"voc must be > 0, got {self.voc}")
        if self.n_ideality <= 0:
            raise ValueError(f"n_ideality must be > 0, got {self.n_ideality}")
        if self.temperature <= 0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")
        if self.n_series < 1:
            raise ValueError(f"n_series must be >= 1, got {self.n_series}")

    @property
    def thermal_slope(self) -> float:
        """n_series * n * kT/q in volts: the exponential slope of the string."""
        return self.n_series * self.n_ideality * K_B * self.temperature / Q_E

    @property
    def i0(self) -> float:
        """Dark saturation current fixed by I(voc) = 0."""
        if self.isc == 0.0:
            return 0.0
        return self.isc / math.expm1(self.voc / self.thermal_slope)


def iv_current(model: DiodeModel, v: float, intensity: float = 1.0) -> float:
    """Terminal current at voltage v.

    intensity scales the photocurrent term only (linear-in-irradiance
    photogeneration); the diode term is illumination independent, so the
    effective open-circuit voltage drops logarithmically with intensity.
    """
    if v < 0:
        raise ValueError(f"voltage must be >= 0, got {v}")
    if intensity < 0:
        raise ValueError(f"intensity must be >= 0, got {intensity}")
    arg = min(v / model.thermal_slope, _EXP_ARG_MAX)
    return intensity * model.isc - model.i0 * math.expm1(arg)


def at_intensity(model: DiodeModel, intensity: float) -> DiodeModel:
    """Model with photocurrent scaled by intensity and i0 preserved.

    voc moves to thermal_slope * log1p(intensity * expm1(voc/slope)), which
    keeps the dark saturation current identical to the full-sun model.
    """
    if intensity <= 0:
        raise ValueError(f"intensity must be > 0, got {intensity}")
    slope = model.thermal_slope
    voc = slope * math.log1p(intensity * math.expm1(model.voc / slope))
    return replace(model, isc=intensity * model.isc, voc=voc)


def mpp(model: DiodeModel) -> tuple[float, float, float]:
    """Maximum power point as (v_mpp, i_mpp, p_mpp).

    Bounded golden-section search on [0, voc]; the power curve of the
    resistance-free law is unimodal there.
    """
    if model.isc == 0.0:
        return 0.0, 0.0, 0.0
    res = minimize_scalar(
        lambda v: -v * iv_current(model, v),
        bounds=(0.0, model.voc),
        method="bounded",
        options={"xatol": 1e-9},
    )
    v_m = float(res.x)
    i_m = iv_current(model, v_m)
    return v_m, i_m, v_m * i_m


def fill_factor(model: DiodeModel) -> float:
    """p_mpp / (voc * isc)."""
    if model.isc == 0.0:
        raise ValueError("fill factor undefined for isc = 0")
    return mpp(model)[2] / (model.voc * model.isc)


def fit_single_diode(
    jsc: float,
    voc: float,
    ff: float,
    area: float,
    n_series: int,
    temperature: float = T_DEFAULT,
) -> DiodeModel:
    """Fit an ideality factor so the modelled fill factor matches ff.

    Args:
        jsc: short-circuit current density, mA/cm^2, normalized to the total
            active area (so isc = jsc * area regardless of how the area is
            split into series cells).
        voc: open-circuit voltage of the whole string, V.
        ff: fill factor, 0 < ff < 1.
        area: total active area, cm^2.
        n_series: number of identical series cells.

    Returns:
        DiodeModel with isc in A.  Fill factor is monotone decreasing in the
        ideality factor, so a sign-bracketed root find is enough.
    """
    if jsc <= 0:
        raise ValueError(f"jsc must be > 0, got {jsc}")
    if voc <= 0:
        raise ValueError(f"voc must be > 0, got {voc}")
    if not 0.0 < ff < 1.0:
        raise ValueError(f"ff must be in (0, 1), got {ff}")
    if area <= 0:
        raise ValueError(f"area must be > 0, got {area}")

    isc = jsc * 1e-3 * area  # mA -> A

    def ff_error(n: float) -> float:
        m = DiodeModel(isc=isc, voc=voc, n_ideality=n,
                       temperature=temperature, n_series=n_series)
        return fill_factor(m) - ff

    err_lo = ff_error(IDEALITY_LO)   # sharpest knee: highest attainable ff
    err_hi = ff_error(IDEALITY_HI)   # softest knee: lowest attainable ff
    if err_lo < 0 or err_hi > 0:
        raise FillFactorError(
            f"fill factor {ff} outside attainable range "
            f"[{err_hi + ff:.4f}, {err_lo + ff:.4f}] for voc={voc} V, "
            f"n_series={n_series}"
        )

    n = brentq(ff_error, IDEALITY_LO, IDEALITY_HI, xtol=1e-12)
    model = DiodeModel(isc=isc, voc=voc, n_ideality=float(n),
                       temperature=temperature, n_series=n_series)
    if abs(fill_factor(model) - ff) > 0.005:
        raise FillFactorError(f"fill-factor fit did not converge for ff={ff}")
    return model


def series_module(cell: DiodeModel, n: int) -> DiodeModel:
    """String n copies of cell in series: voc scales, isc does not.

    The module curve satisfies I_module(n * v) = I_cell(v) exactly.
    """
    if n < 1:
        raise ValueError(f"series count must be >= 1, got {n}")
    return replace(cell, voc=cell.voc * n, n_series=cell.n_series * n)


def module_efficiency(model: DiodeModel, area: float,
                      irradiance: float = 100.0) -> float:
    """p_mpp over incident power, for area in cm^2 and irradiance in mW/cm^2.

    Note this equals jsc * voc * ff / irradiance only when jsc is normalized
    to the same area; datasheets sometimes normalize current density to the
    single-cell aperture instead, which inflates the headline number.
    """
    if area <= 0 or irradiance <= 0:
        raise ValueError("area and irradiance must be > 0")
    return mpp(model)[2] / (area * irradiance * 1e-3)


def harvest_power(efficiency: float, area: float, irradiance: float) -> float:
    """Flat-efficiency harvest estimate in W.

    area in cm^2, irradiance in mW/cm^2.  Good for sizing arithmetic like
    "a 23.7 %-efficient 0.02 cm^2 cell makes 30 uW near 6.3 mW/cm^2"; use
    the diode model when the operating point matters.
    """
    if not 0.0 <= efficiency <= 1.0:
        raise ValueError(f"efficiency must be in [0, 1], got {efficiency}")
    if area <= 0:
        raise ValueError(f"area must be > 0, got {area}")
    if irradiance < 0:
        raise ValueError(f"irradiance must be >= 0, got {irradiance}")
    return efficiency * area * irradiance * 1e-3


# --- spectral response ------------------------------------------------------


def _validate_samples(samples) -> tuple[tuple[float, float], ...]:
    pts = tuple((float(w), float(v)) for w, v in samples)
    if len(pts) < 2:
        raise ValueError("need at least two spectral samples")
    for (w0, _), (w1, _) in zip(pts, pts[1:]):
        if w1 <= w0:
            raise ValueError("wavelengths must be strictly ascending")
    if pts[0][0] <= 0:
        raise ValueError("wavelengths must be > 0")
    return pts


@dataclass(frozen=True)
class Spectrum:
    """Spectral irradiance, samples of (wavelength nm, W m^-2 nm^-1)."""

    samples: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = _validate_samples(self.samples)
        for _, val in pts:
            if val < 0:
                raise ValueError("irradiance must be >= 0")
        object.__setattr__(self, "samples", pts)

    @property
    def wavelengths(self) -> np.ndarray:
        return np.array([w for w, _ in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.samples])

    @classmethod
    def from_csv(cls, path) -> "Spectrum":
        return cls(_read_spectral_csv(path))


@dataclass(frozen=True)
class SpectralResponse:
    """External quantum efficiency, samples of (wavelength nm, EQE in [0, 1]).

    bandgap_cutoff is the wavelength above which the response must be zero;
    omit it to infer the last wavelength with nonzero response.
    """

    samples: tuple[tuple[float, float], ...]
    bandgap_cutoff: float | None = None

    def __post_init__(self):
        pts = _validate_samples(self.samples)
        for _, val in pts:
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"EQE must be in [0, 1], got {val}")
        cutoff = self.bandgap_cutoff
        if cutoff is None:
            nonzero = [w for w, v in pts if v > 0]
            cutoff = nonzero[-1] if nonzero else pts[-1][0]
        for w, v in pts:
            if w > cutoff and v != 0.0:
                raise ValueError(
                    f"nonzero EQE at {w} nm beyond bandgap cutoff {cutoff} nm")
        object.__setattr__(self, "samples", pts)
        object.__setattr__(self, "bandgap_cutoff", float(cutoff))

    @property
    def wavelengths(self) -> np.ndarray:
        return np.array([w for w, _ in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.samples])

    @classmethod
    def from_csv(cls, path, bandgap_cutoff: float | None = None) -> "SpectralResponse":
        return cls(_read_spectral_csv(path), bandgap_cutoff)


def _read_spectral_csv(path) -> tuple[tuple[float, float], ...]:
    """Read a wavelength_nm,value CSV; '#' lines and the header row are skipped."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if row[0].strip() == "wavelength_nm":
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{line_no}: bad spectral row {row!r}") from exc
    return tuple(rows)


def jsc_from_eqe(eqe: SpectralResponse, spectrum: Spectrum) -> float:
    """Short-circuit current density from EQE under a spectrum, in mA/cm^2.

    J = q * integral of EQE(l) * phi(l) dl with the photon flux
    phi = E(l) * l / (h c).  Trapezoidal rule on the union wavelength grid
    over the overlapping support, both curves linearly interpolated.
    """
    lo = max(eqe.samples[0][0], spectrum.samples[0][0])
    hi = min(eqe.samples[-1][0], spectrum.samples[-1][0])
    if lo >= hi:
        raise SpectralOverlapError(
            f"no wavelength overlap: EQE spans "
            f"{eqe.samples[0][0]}-{eqe.samples[-1][0]} nm, spectrum "
            f"{spectrum.samples[0][0]}-{spectrum.samples[-1][0]} nm")

    merged = np.union1d(eqe.wavelengths, spectrum.wavelengths)
    grid = merged[(merged >= lo) & (merged <= hi)]
    e = np.interp(grid, eqe.wavelengths, eqe.values)
    s = np.interp(grid, spectrum.wavelengths, spectrum.values)
    flux = s * (grid * 1e-9) / (H_PLANCK * C_LIGHT)  # photons m^-2 s^-1 nm^-1
    j_a_m2 = Q_E * np.trapezoid(e * flux, grid)
    return float(j_a_m2 * 0.1)  # A/m^2 -> mA/cm^2


def reference_spectrum() -> Spectrum:
    """Bundled AM1.5G-like reference spectrum (see data/am15g.csv header)."""
    ref = resources.files("pvrfid.data").joinpath("am15g.csv")
    with resources.as_file(ref) as path:
        return Spectrum.from_csv(path)
