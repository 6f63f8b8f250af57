"""Curve families with analytic Jacobians and deterministic initial guesses.

Every model is evaluated as ``f(x, p)`` with ``p`` ordered like ``params``;
``jac(x, p)`` returns the ``(len(x), len(params))`` derivative matrix.
"""

import math

import numpy as np

from ..errors import InvalidInput

LN2 = math.log(2.0)
_GAUSS_NORM = 2.0 * math.sqrt(LN2 / math.pi)
_GAUSS_EXP = 4.0 * LN2


class CurveModel:
    name = ""
    params = ()

    def f(self, x, p):
        raise NotImplementedError

    def jac(self, x, p):
        raise NotImplementedError

    def guess(self, x, y):
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r}>"


def _lorentz_area(x, c, w, a):
    u = x - c
    D = 4 * u * u + w * w
    return (2 * a / math.pi) * w / D


def _lorentz_area_jac(x, c, w, a):
    u = x - c
    D = 4 * u * u + w * w
    k = 2 * a / math.pi
    dc = k * w * 8 * u / D**2
    dw = k * (4 * u * u - w * w) / D**2
    da = (2 / math.pi) * w / D
    return dc, dw, da


def _gauss_area(x, c, w, a):
    u = x - c
    return a * _GAUSS_NORM / w * np.exp(-_GAUSS_EXP * u * u / (w * w))


def _gauss_area_jac(x, c, w, a):
    u = x - c
    g = np.exp(-_GAUSS_EXP * u * u / (w * w))
    dc = a * _GAUSS_NORM / w * g * 2 * _GAUSS_EXP * u / (w * w)
    dw = a * _GAUSS_NORM / (w * w) * g * (2 * _GAUSS_EXP * u * u / (w * w) - 1)
    da = _GAUSS_NORM / w * g
    return dc, dw, da


def _peak_seed(x, y):
    """Center at the extremum, fwhm at half the span, offset at the median."""
    offset = float(np.median(y))
    i = int(np.argmax(np.abs(y - offset)))
    return float(x[i]), 0.5 * float(x[-1] - x[0]), offset, float(y[i] - offset)


class Lorentzian(CurveModel):
    """``offset + (2 area / pi) * fwhm / (4 (x - center)^2 + fwhm^2)``."""

    name = "lorentzian"
    params = ("center", "fwhm", "area", "offset")

    def f(self, x, p):
        c, w, a, o = p
        return o + _lorentz_area(x, c, w, a)

    def jac(self, x, p):
        c, w, a, o = p
        dc, dw, da = _lorentz_area_jac(x, c, w, a)
        return np.column_stack([dc, dw, da, np.ones_like(x)])

    def guess(self, x, y):
        c, w, o, h = _peak_seed(x, y)
        return np.array([c, w, h * math.pi * w / 2, o])

    def narrow_guess(self, x, y):
        """Seed with the measured half-maximum width instead of half the span."""
        c, _, o, h = _peak_seed(x, y)
        w = _half_max_width(x, y - o, int(np.argmin(np.abs(x - c))))
        return np.array([c, w, h * math.pi * w / 2, o])

    @staticmethod
    def height(p):
        c, w, a, o = p
        return 2 * a / (math.pi * w)


class Gaussian(CurveModel):
    """Area-normalized Gaussian on a constant offset."""

    name = "gaussian"
    params = ("center", "fwhm", "area", "offset")

    def f(self, x, p):
        c, w, a, o = p
        return o + _gauss_area(x, c, w, a)

    def jac(self, x, p):
        c, w, a, o = p
        dc, dw, da = _gauss_area_jac(x, c, w, a)
        return np.column_stack([dc, dw, da, np.ones_like(x)])

    def guess(self, x, y):
        c, w, o, h = _peak_seed(x, y)
        return np.array([c, w, h * w / _GAUSS_NORM, o])

    def narrow_guess(self, x, y):
        """Seed with the measured half-maximum width instead of half the span."""
        c, _, o, h = _peak_seed(x, y)
        w = _half_max_width(x, y - o, int(np.argmin(np.abs(x - c))))
        return np.array([c, w, h * w / _GAUSS_NORM, o])

    @staticmethod
    def height(p):
        c, w, a, o = p
        return a * _GAUSS_NORM / w


class DoubleGaussian(CurveModel):
    name = "gaussian2"
    params = ("center1", "fwhm1", "area1", "center2", "fwhm2", "area2", "offset")

    def f(self, x, p):
        c1, w1, a1, c2, w2, a2, o = p
        return o + _gauss_area(x, c1, w1, a1) + _gauss_area(x, c2, w2, a2)

    def jac(self, x, p):
        c1, w1, a1, c2, w2, a2, o = p
        return np.column_stack(
            [*_gauss_area_jac(x, c1, w1, a1), *_gauss_area_jac(x, c2, w2, a2), np.ones_like(x)]
        )

    def guess(self, x, y):
        # second component seeded at the largest residual of a single-peak seed
        c, w, o, h = _peak_seed(x, y)
        w = _half_max_width(x, y - o, int(np.argmin(np.abs(x - c))))
        single = Gaussian().f(x, [c, w, h * w / _GAUSS_NORM, o])
        j = int(np.argmax(np.abs(y - single)))
        c2 = float(x[j])
        h2 = float(y[j] - o)
        w2 = w
        return np.array(
            [c, w, h * w / _GAUSS_NORM, c2, w2, h2 * w2 / _GAUSS_NORM, o]
        )


def _half_max_width(x, y, i):
    """Full width at half height of the feature around index ``i`` (sign aware)."""
    h = y[i]
    if h == 0:
        return 0.5 * float(x[-1] - x[0])
    inside = (y / h) >= 0.5
    lo = i
    while lo > 0 and inside[lo - 1]:
        lo -= 1
    hi = i
    while hi < x.size - 1 and inside[hi + 1]:
        hi += 1
    width = float(x[hi] - x[lo])
    if width <= 0:
        dx = np.diff(x)
        width = float(dx[min(i, dx.size - 1)])
    return width


def _lorentz_unit(x, c, w):
    u = x - c
    return w * w / (4 * u * u + w * w)


def _lorentz_unit_jac(x, c, w):
    u = x - c
    D = 4 * u * u + w * w
    return w * w * 8 * u / D**2, 8 * w * u * u / D**2


class OdmrDoubleDip(CurveModel):
    """``baseline * (1 - depth1 L1 - depth2 L2)`` with unit-height Lorentzians."""

    name = "odmr"
    params = ("center1", "center2", "depth1", "depth2", "fwhm1", "fwhm2", "baseline")

    def f(self, x, p):
        c1, c2, d1, d2, w1, w2, b = p
        return b * (1 - d1 * _lorentz_unit(x, c1, w1) - d2 * _lorentz_unit(x, c2, w2))

    def jac(self, x, p):
        c1, c2, d1, d2, w1, w2, b = p
        L1, L2 = _lorentz_unit(x, c1, w1), _lorentz_unit(x, c2, w2)
        dL1c, dL1w = _lorentz_unit_jac(x, c1, w1)
        dL2c, dL2w = _lorentz_unit_jac(x, c2, w2)
        return np.column_stack(
            [
                -b * d1 * dL1c,
                -b * d2 * dL2c,
                -b * L1,
                -b * L2,
                -b * d1 * dL1w,
                -b * d2 * dL2w,
                1 - d1 * L1 - d2 * L2,
            ]
        )

    def guess(self, x, y):
        b = float(np.median(y))
        rel = 1 - y / b if b != 0 else -y
        i = int(np.argmax(rel))
        w1 = _half_max_width(x, rel, i)
        # second dip: deepest sample outside the first dip's neighborhood
        far = np.abs(x - x[i]) > max(2 * w1, 0.02 * (x[-1] - x[0]))
        if np.any(far):
            j = int(np.flatnonzero(far)[np.argmax(rel[far])])
        else:
            j = i
        w2 = _half_max_width(x, rel, j)
        (i, w1), (j, w2) = sorted([(i, w1), (j, w2)], key=lambda t: x[t[0]])
        return np.array([x[i], x[j], rel[i], rel[j], w1, w2, b], dtype=float)


class DampedSine(CurveModel):
    """``offset + amplitude exp(-t / decay_time) cos(2 pi t / period + phase)``."""

    name = "rabi"
    params = ("amplitude", "period", "phase", "decay_time", "offset")

    def f(self, t, p):
        A, T, phi, tau, o = p
        return o + A * np.exp(-t / tau) * np.cos(2 * math.pi * t / T + phi)

    def jac(self, t, p):
        A, T, phi, tau, o = p
        E = np.exp(-t / tau)
        theta = 2 * math.pi * t / T + phi
        C, Sn = np.cos(theta), np.sin(theta)
        return np.column_stack(
            [
                E * C,
                A * E * Sn * 2 * math.pi * t / (T * T),
                -A * E * Sn,
                A * E * C * t / (tau * tau),
                np.ones_like(t),
            ]
        )

    def guess(self, t, y):
        # period from the dominant bin of the discrete spectrum on a uniform grid
        n = t.size
        grid = np.linspace(t[0], t[-1], n)
        yu = np.interp(grid, t, y)
        offset = float(np.mean(yu))
        fourier = np.fft.rfft(yu - offset)
        k = int(np.argmax(np.abs(fourier[1:]))) + 1 if fourier.size > 1 else 1
        dt = grid[1] - grid[0]
        period = n * dt / k
        # phase referenced to t = 0 rather than grid[0]
        phase = float(np.angle(fourier[k])) - 2 * math.pi * grid[0] / period
        phase = (phase + math.pi) % (2 * math.pi) - math.pi
        amplitude = 0.5 * float(np.max(yu) - np.min(yu))
        return np.array([amplitude, period, phase, float(t[-1] - t[0]), offset])


class DoubleExponential(CurveModel):
    """``offset + a1 exp(-t / tau1) + a2 exp(-t / tau2)``."""

    name = "double_exponential"
    params = ("a1", "tau1", "a2", "tau2", "offset")

    def f(self, t, p):
        a1, t1, a2, t2, o = p
        return o + a1 * np.exp(-t / t1) + a2 * np.exp(-t / t2)

    def jac(self, t, p):
        a1, t1, a2, t2, o = p
        e1, e2 = np.exp(-t / t1), np.exp(-t / t2)
        return np.column_stack(
            [e1, a1 * e1 * t / (t1 * t1), e2, a2 * e2 * t / (t2 * t2), np.ones_like(t)]
        )

    def guess(self, t, y):
        n = t.size
        tail = y[-max(n // 10, 1):]
        offset = float(np.mean(tail))
        z = y - offset
        y0 = float(z[0])
        span = float(t[-1] - t[0])
        # slow component from a log-linear fit to the later, still-resolved part
        mask = (t >= t[0] + 0.2 * span) & (z > 0.05 * abs(y0))
        if np.count_nonzero(mask) >= 3:
            slope, intercept = np.polyfit(t[mask], np.log(z[mask]), 1)
        else:
            slope, intercept = -5.0 / span, math.log(max(abs(y0), 1e-300))
        tau1 = -1.0 / slope if slope < 0 else span / 5
        a1 = float(np.exp(intercept + t[0] / tau1))
        a1 = min(a1, y0) if y0 > 0 else a1
        a2 = y0 - a1
        if a2 <= 0.01 * abs(y0):
            a2 = 0.1 * abs(y0)
        return np.array([a1, tau1, a2, tau1 / 10, offset])


class Saturation(CurveModel):
    """``i_inf P / (P + p_sat) + background_slope P``."""

    name = "saturation"
    params = ("i_inf", "p_sat", "background_slope")

    def f(self, P, p):
        i, ps, s = p
        return i * P / (P + ps) + s * P

    def jac(self, P, p):
        i, ps, s = p
        return np.column_stack([P / (P + ps), -i * P / (P + ps) ** 2, P])

    def guess(self, P, y):
        return np.array([float(np.max(y)), float(np.median(P)), 0.0])


MODELS = {
    m.name: m
    for m in (
        Lorentzian(),
        Gaussian(),
        DoubleGaussian(),
        OdmrDoubleDip(),
        DampedSine(),
        DoubleExponential(),
        Saturation(),
    )
}


def get_model(model):
    if isinstance(model, CurveModel):
        return model
    try:
        return MODELS[model]
    except KeyError:
        raise InvalidInput(
            f"unknown model {model!r}; choose from {', '.join(sorted(MODELS))}"
        ) from None
