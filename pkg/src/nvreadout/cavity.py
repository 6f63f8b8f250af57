"""Cavity-mode analytics: Q-factor, beta-factor, Purcell factors and mode tuning."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, InvalidProbability

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def _positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise InvalidInput(f"{name} must be finite and > 0, got {value}")
    return value


def fwhm_nm_to_ghz(fwhm_nm, wavelength_nm):
    """Convert a small wavelength linewidth to frequency, ``c * dl / l**2``."""
    return SPEED_OF_LIGHT * fwhm_nm / wavelength_nm**2


def fwhm_ghz_to_nm(fwhm_ghz, wavelength_nm):
    return fwhm_ghz * wavelength_nm**2 / SPEED_OF_LIGHT


@dataclass(frozen=True)
class ModeFit:
    """Fitted cavity mode: center and fwhm in nm, mode and total spectral areas."""

    center: float
    fwhm: float
    area_mode: float
    area_total: float

    def __post_init__(self):
        for name in ("center", "fwhm", "area_mode", "area_total"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))
        if self.area_mode > self.area_total:
            raise InvalidInput(
                f"mode area {self.area_mode} exceeds total area {self.area_total}"
            )


@dataclass(frozen=True)
class CavityParams:
    """Inputs of the effective-Q Purcell estimate.

    mode_volume is in units of (lambda/n)^3, wavelength in nm, emitter_fwhm in
    GHz and zpl_fraction is the off-resonant Debye-Waller factor.
    """

    q_factor: float
    mode_volume: float
    wavelength: float
    emitter_fwhm: float
    zpl_fraction: float
    refractive_index: float = 2.4

    def __post_init__(self):
        for name in ("q_factor", "mode_volume", "wavelength", "emitter_fwhm",
                     "refractive_index", "zpl_fraction"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))
        if not self.zpl_fraction < 1:
            raise InvalidInput(f"zpl_fraction must lie in (0, 1), got {self.zpl_fraction}")


def q_factor(center, fwhm):
    """Quality factor ``center / fwhm`` of a mode (both in the same unit)."""
    center = _positive("center", center)
    fwhm = _positive("fwhm", fwhm)
    if fwhm >= center:
        raise InvalidInput("fwhm must be smaller than the center wavelength")
    return center / fwhm


def mode_fit_from_spectrum(spectrum, lorentz_fit=None):
    """ModeFit from a spectrum: Lorentzian mode area over the whole spectral area.

    The mode area is the fitted Lorentzian (without offset) integrated over
    the data range; the total area is the trapezoid integral of the
    background-inclusive data.
    """
    from .fitkit import fit_lorentzian

    if lorentz_fit is None:
        lorentz_fit = fit_lorentzian(spectrum)
    c = lorentz_fit.params["center"]
    w = lorentz_fit.params["fwhm"]
    a = lorentz_fit.params["area"]
    x = spectrum.abscissa
    # closed-form integral of the area-normalized Lorentzian over [x0, x1]
    frac = (math.atan(2 * (x[-1] - c) / w) - math.atan(2 * (x[0] - c) / w)) / math.pi
    area_mode = a * frac
    area_total = float(np.trapezoid(spectrum.intensity, x))
    return ModeFit(center=c, fwhm=w, area_mode=area_mode, area_total=area_total)


def beta_from_spectrum(fit):
    """Spontaneous-emission coupling factor ``area_mode / area_total``."""
    if not isinstance(fit, ModeFit):
        raise InvalidInput("beta_from_spectrum expects a ModeFit")
    return fit.area_mode / fit.area_total


def purcell_from_beta(beta):
    """Purcell factor ``F = beta / (1 - beta)``; the lifetime factor is ``1 + F``."""
    beta = float(beta)
    if not (0.0 <= beta < 1.0):
        raise InvalidProbability(f"beta must lie in [0, 1), got {beta}")
    return beta / (1.0 - beta)


def beta_from_purcell(purcell):
    purcell = float(purcell)
    if not (math.isfinite(purcell) and purcell >= 0):
        raise InvalidInput(f"Purcell factor must be >= 0, got {purcell}")
    return purcell / (1.0 + purcell)


def effective_q(p):
    """``1/Q_eff = 1/Q_cav + 1/Q_em`` with the emitter quality ``nu / fwhm``."""
    nu_ghz = SPEED_OF_LIGHT / (p.wavelength * 1e-9) / 1e9
    q_em = nu_ghz / p.emitter_fwhm
    return 1.0 / (1.0 / p.q_factor + 1.0 / q_em)


def predict_purcell(p):
    """Purcell estimate for a spectrally broad emitter.

    Returns ``(f_zpl, total_factor)`` where ``f_zpl = 3/(4 pi^2) Q_eff / V``
    acts on the zero-phonon line only and the lifetime-shortening factor is
    ``1 + zpl_fraction * (f_zpl - 1)``.
    """
    if not isinstance(p, CavityParams):
        raise InvalidInput("predict_purcell expects CavityParams")
    f_zpl = 3.0 / (4.0 * math.pi**2) * effective_q(p) / p.mode_volume
    total = 1.0 + p.zpl_fraction * (f_zpl - 1.0)
    return f_zpl, total


def lifetime_ratio(tau_off, tau_on):
    """``tau_off / tau_on``, the gain in emitted photons in saturation."""
    return _positive("tau_off", tau_off) / _positive("tau_on", tau_on)


@dataclass(frozen=True)
class TuningPlan:
    """Linear tuning recipe. direction is "red", "blue" or "none"."""

    direction: str
    exposure_hours: float = 0.0
    removal_nm: float = 0.0


def tuning_plan(current, target, red_rate, blue_sensitivity):
    """How to move a mode from ``current`` to ``target`` (nm).

    Red shifts use gas adsorption at ``red_rate`` nm/h; blue shifts use
    oxidation, shifting the mode by ``blue_sensitivity`` nm per nm of
    removed diamond.
    """
    current = _positive("current", current)
    target = _positive("target", target)
    red_rate = _positive("red_rate", red_rate)
    blue_sensitivity = _positive("blue_sensitivity", blue_sensitivity)
    if target > current:
        return TuningPlan("red", exposure_hours=(target - current) / red_rate)
    if target < current:
        return TuningPlan("blue", removal_nm=(current - target) / blue_sensitivity)
    return TuningPlan("none")


def apply_tuning(current, plan, red_rate, blue_sensitivity):
    """Mode position after executing ``plan`` under the linear tuning model."""
    return current + plan.exposure_hours * red_rate - plan.removal_nm * blue_sensitivity
