"""Sampled one-dimensional data containers (time traces and spectra)."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvariantViolation

SPECTRUM_UNITS = ("nm", "GHz")


def _frozen_array(values, name):
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim != 1:
        raise InvariantViolation(f"{name} must be one-dimensional", field=name)
    arr.setflags(write=False)
    return arr


def _check_increasing(x, name):
    steps = np.diff(x)
    bad = np.flatnonzero(~(steps > 0))
    if bad.size:
        row = int(bad[0]) + 1
        raise InvariantViolation(
            f"{name} not strictly increasing at row {row} "
            f"({x[row - 1]!r} -> {x[row]!r})",
            field=name,
            row=row,
        )


def _check_finite(v, name):
    bad = np.flatnonzero(~np.isfinite(v))
    if bad.size:
        row = int(bad[0])
        raise InvariantViolation(f"{name} not finite at row {row}", field=name, row=row)


@dataclass(frozen=True)
class TimeTrace:
    """Time series sampled on a strictly increasing grid.

    ``times`` are in ns; ``values`` are a photon emission rate (MHz) or counts.
    ``comments`` carries header comment lines so files round-trip unchanged.
    """

    times: np.ndarray
    values: np.ndarray
    comments: tuple = field(default=(), compare=False)

    def __post_init__(self):
        t = _frozen_array(self.times, "times")
        v = _frozen_array(self.values, "values")
        if t.shape != v.shape:
            raise DimensionMismatch(
                f"times ({t.size}) and values ({v.size}) differ in length"
            )
        _check_finite(t, "times")
        _check_increasing(t, "times")
        _check_finite(v, "values")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "comments", tuple(self.comments))

    def __len__(self):
        return self.times.size

    def scaled_time(self, factor):
        return TimeTrace(self.times * factor, self.values, self.comments)


@dataclass(frozen=True)
class Spectrum:
    """Intensity sampled over wavelength (``unit='nm'``) or frequency (``'GHz'``)."""

    abscissa: np.ndarray
    intensity: np.ndarray
    unit: str = "nm"
    comments: tuple = field(default=(), compare=False)

    def __post_init__(self):
        x = _frozen_array(self.abscissa, "abscissa")
        y = _frozen_array(self.intensity, "intensity")
        if self.unit not in SPECTRUM_UNITS:
            raise InvariantViolation(f"unknown spectrum unit {self.unit!r}", field="unit")
        if x.shape != y.shape:
            raise DimensionMismatch(
                f"abscissa ({x.size}) and intensity ({y.size}) differ in length"
            )
        if x.size < 4:
            raise InvariantViolation("a spectrum needs at least 4 samples", field="abscissa")
        _check_finite(x, "abscissa")
        _check_increasing(x, "abscissa")
        _check_finite(y, "intensity")
        object.__setattr__(self, "abscissa", x)
        object.__setattr__(self, "intensity", y)
        object.__setattr__(self, "comments", tuple(self.comments))

    def __len__(self):
        return self.abscissa.size
