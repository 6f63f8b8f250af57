"""Fits of individual measurement types (spectra, Rabi, lifetime, saturation)."""

import math

import numpy as np

from ..errors import IllConditioned, InvalidInput, NoPeakFound, NotConverged
from ..series import Spectrum, TimeTrace
from .engine import FitResult, fit_residuals
from .models import Gaussian, Lorentzian, get_model

SIGNIFICANCE = 3.0  # amplitude must exceed this many residual RMS
TAU_DEGENERACY = 0.05


def _xy(data):
    if isinstance(data, Spectrum):
        return data.abscissa, data.intensity
    if isinstance(data, TimeTrace):
        return data.times, data.values
    x, y = data
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidInput("x and y must be 1-D arrays of equal length")
    return x, y


def fit_least_squares(model, data, initial_guess=None, jacobian="analytic"):
    """Fit a curve family to a Spectrum, TimeTrace or ``(x, y)`` pair.

    ``initial_guess`` maps every parameter name to a value; the model's own
    deterministic seed is used when omitted. ``jacobian`` is ``"analytic"``
    or ``"numeric"`` (central differences).
    """
    m = get_model(model)
    x, y = _xy(data)
    if initial_guess is None:
        p0 = m.guess(x, y)
    else:
        missing = set(m.params) - set(initial_guess)
        extra = set(initial_guess) - set(m.params)
        if missing or extra:
            raise InvalidInput(
                f"initial guess for {m.name} needs exactly {m.params}; "
                f"missing {sorted(missing)}, unexpected {sorted(extra)}"
            )
        p0 = np.array([float(initial_guess[k]) for k in m.params])
    if jacobian == "analytic":
        jac = m.jac
    elif jacobian == "numeric":
        jac = None
    else:
        raise InvalidInput(f"jacobian must be 'analytic' or 'numeric', got {jacobian!r}")
    return fit_residuals(m.f, x, y, p0, m.params, jac, model_name=m.name)


def _require_signal(y):
    if np.ptp(y) == 0:
        raise NoPeakFound("data are constant")


def _flip_width_sign(result, pairs):
    # the peak shapes are invariant under (area, fwhm) -> (-area, -fwhm)
    for w, a in pairs:
        if result.params[w] < 0:
            result.params[w] = -result.params[w]
            result.params[a] = -result.params[a]


def _check_peak(result, height, x):
    rms = result.residual_rms
    if not height > SIGNIFICANCE * rms:
        raise NoPeakFound(
            f"peak height {height:.4g} below {SIGNIFICANCE:g}x residual RMS {rms:.4g}"
        )
    c = result.params.get("center")
    if c is not None and not (x[0] <= c <= x[-1]):
        raise NoPeakFound(f"fitted center {c:.6g} outside the data range")


def _single_peak(model, s):
    # the span-wide seed misses lines much narrower than the window, so a
    # second start from the half-maximum width is tried and the better kept
    x, y = _xy(s)
    best, error = None, None
    for p0 in (model.guess(x, y), model.narrow_guess(x, y)):
        try:
            result = fit_least_squares(model, s, dict(zip(model.params, p0)))
        except (IllConditioned, NotConverged) as exc:
            error = error or exc
            continue
        if best is None or (result.converged, -result.residual_norm) > (
            best.converged, -best.residual_norm
        ):
            best = result
    if best is None:
        raise error
    return best


def fit_lorentzian(s):
    """Lorentzian line with area parameterization on a constant offset."""
    x, y = _xy(s)
    _require_signal(y)
    result = _single_peak(Lorentzian(), s)
    _flip_width_sign(result, [("fwhm", "area")])
    p = [result.params[k] for k in Lorentzian.params]
    _check_peak(result, Lorentzian.height(p), x)
    result.derived["height"] = Lorentzian.height(p)
    return result


def fit_gaussian(s, components=1):
    """Gaussian line(s) on a constant offset; ``components`` is 1 or 2.

    With two components the parameters are suffixed ``1``/``2`` and ordered
    by ascending center.
    """
    x, y = _xy(s)
    _require_signal(y)
    if components == 1:
        result = _single_peak(Gaussian(), s)
        _flip_width_sign(result, [("fwhm", "area")])
        p = [result.params[k] for k in Gaussian.params]
        _check_peak(result, Gaussian.height(p), x)
        result.derived["height"] = Gaussian.height(p)
        return result
    if components != 2:
        raise InvalidInput("components must be 1 or 2")
    result = fit_least_squares("gaussian2", s)
    _flip_width_sign(result, [("fwhm1", "area1"), ("fwhm2", "area2")])
    P = result.params
    if P["center2"] < P["center1"]:
        for k in ("center", "fwhm", "area"):
            P[k + "1"], P[k + "2"] = P[k + "2"], P[k + "1"]
            if result.stderr is not None:
                result.stderr[k + "1"], result.stderr[k + "2"] = (
                    result.stderr[k + "2"],
                    result.stderr[k + "1"],
                )
        result.covariance = None
    for i in ("1", "2"):
        h = Gaussian.height([P["center" + i], P["fwhm" + i], P["area" + i], 0.0])
        if not h > SIGNIFICANCE * result.residual_rms:
            raise NoPeakFound(f"component {i} is not significant")
        result.derived["height" + i] = h
    return result


def fit_odmr(s):
    """Two inverted Lorentzian dips on a constant baseline (abscissa in GHz)."""
    x, y = _xy(s)
    _require_signal(y)
    result = fit_least_squares("odmr", s)
    P = result.params
    for k in ("fwhm1", "fwhm2"):
        P[k] = abs(P[k])
    if P["center2"] < P["center1"]:
        for k in ("center", "depth", "fwhm"):
            P[k + "1"], P[k + "2"] = P[k + "2"], P[k + "1"]
            if result.stderr is not None:
                result.stderr[k + "1"], result.stderr[k + "2"] = (
                    result.stderr[k + "2"],
                    result.stderr[k + "1"],
                )
        result.covariance = None
    rms = result.residual_rms
    # a "dip" narrower than the sampling grid is a single noisy sample
    spacing = float(np.median(np.diff(x)))
    significant = 0
    for i in ("1", "2"):
        dip = P["depth" + i] * P["baseline"]
        inside = x[0] <= P["center" + i] <= x[-1]
        wide = P["fwhm" + i] >= spacing
        if P["depth" + i] > 0 and dip > SIGNIFICANCE * rms and inside and wide:
            significant += 1
    resolved = (P["center2"] - P["center1"]) > 0.5 * max(P["fwhm1"], P["fwhm2"])
    if significant < 2 or not resolved:
        raise NoPeakFound("fewer than two significant, resolved dips")
    return result


def fit_rabi(t):
    """Exponentially damped sinusoid; reports ``pi_time = period / 2``."""
    x, y = _xy(t)
    _require_signal(y)
    model = get_model("rabi")
    p0 = model.guess(x, y)
    if x[-1] - x[0] < 2 * p0[1]:
        raise InvalidInput(
            f"trace spans {x[-1] - x[0]:.4g}, less than two periods of {p0[1]:.4g}"
        )
    result = fit_least_squares(model, t, dict(zip(model.params, p0)))
    P = result.params
    if P["period"] < 0:
        P["period"] = -P["period"]
        P["phase"] = -P["phase"]
    if P["amplitude"] < 0:
        P["amplitude"] = -P["amplitude"]
        P["phase"] += math.pi
    P["phase"] = (P["phase"] + math.pi) % (2 * math.pi) - math.pi
    if not P["amplitude"] > SIGNIFICANCE * result.residual_rms:
        raise NoPeakFound("oscillation amplitude below the noise floor")
    result.derived["pi_time"] = P["period"] / 2
    return result


def fit_double_exponential(t):
    """Bi-exponential decay with ``tau1 >= tau2``.

    Raises IllConditioned when the two time constants agree within 5%.
    """
    x, y = _xy(t)
    if np.any(y < 0):
        raise InvalidInput("decay trace values must be >= 0")
    result = fit_least_squares("double_exponential", t)
    P = result.params
    if P["tau2"] > P["tau1"]:
        P["a1"], P["a2"] = P["a2"], P["a1"]
        P["tau1"], P["tau2"] = P["tau2"], P["tau1"]
        if result.stderr is not None:
            S = result.stderr
            S["a1"], S["a2"] = S["a2"], S["a1"]
            S["tau1"], S["tau2"] = S["tau2"], S["tau1"]
        result.covariance = None
    if abs(P["tau1"] - P["tau2"]) <= TAU_DEGENERACY * max(abs(P["tau1"]), abs(P["tau2"])):
        exc = IllConditioned(
            f"time constants {P['tau1']:.4g} and {P['tau2']:.4g} are not separable"
        )
        exc.result = result
        raise exc
    return result


def fit_saturation(powers, counts):
    """``I(P) = i_inf P / (P + p_sat) + background_slope P``."""
    P = np.asarray(powers, dtype=float)
    y = np.asarray(counts, dtype=float)
    if P.shape != y.shape or P.ndim != 1 or P.size < 4:
        raise InvalidInput("need at least 4 (power, counts) pairs of equal length")
    if np.any(P <= 0):
        raise InvalidInput("powers must be > 0")
    return fit_least_squares("saturation", (P, y))


__all__ = [
    "FitResult",
    "fit_least_squares",
    "fit_lorentzian",
    "fit_gaussian",
    "fit_odmr",
    "fit_rabi",
    "fit_double_exponential",
    "fit_saturation",
]
