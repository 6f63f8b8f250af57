"""Dipole-orientation weighting of per-axis collection efficiencies."""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidInput, InvariantViolation, OutOfRange

AXES = ("x", "y", "z")


@dataclass(frozen=True)
class DipoleWeights:
    """Projection weights of the averaged emission dipole onto x, y, z."""

    k_x: float
    k_y: float
    k_z: float

    def __post_init__(self):
        vals = []
        for name in ("k_x", "k_y", "k_z"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v >= 0):
                raise InvalidInput(f"{name} must be >= 0, got {v}")
            object.__setattr__(self, name, v)
            vals.append(v)
        if abs(math.fsum(vals) - 1.0) > 1e-9:
            raise InvalidInput(f"dipole weights sum to {math.fsum(vals)}, expected 1")

    def as_array(self):
        return np.array([self.k_x, self.k_y, self.k_z])


#: Projection of the averaged NV dipoles in a (001) membrane, taken as given.
REFERENCE_WEIGHTS = DipoleWeights(0.24, 0.24, 0.52)


def inplane_dipole_weights(axis):
    """Mean squared projections of a dipole uniformly distributed in the plane
    perpendicular to ``axis``: ``(1 - n_i^2) / 2``.

    For any <111> axis this gives 1/3 per Cartesian axis.
    """
    n = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(n)
    if n.shape != (3,) or norm == 0:
        raise InvalidInput("axis must be a non-zero 3-vector")
    n = n / norm
    return DipoleWeights(*((1.0 - n**2) / 2.0))


@dataclass(frozen=True)
class EfficiencyTable:
    """Simulated collection efficiency per dipole orientation versus wavelength (nm)."""

    wavelength: np.ndarray
    eps_x: np.ndarray
    eps_y: np.ndarray
    eps_z: np.ndarray
    comments: tuple = field(default=(), compare=False)

    def __post_init__(self):
        cols = {}
        for name in ("wavelength", "eps_x", "eps_y", "eps_z"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.ndim != 1:
                raise InvariantViolation(f"{name} must be one-dimensional", field=name)
            bad = np.flatnonzero(~np.isfinite(arr))
            if bad.size:
                raise InvariantViolation(
                    f"{name} not finite at row {bad[0]}", field=name, row=int(bad[0])
                )
            arr.setflags(write=False)
            cols[name] = arr
        n = cols["wavelength"].size
        if any(c.size != n for c in cols.values()):
            raise DimensionMismatch("efficiency table columns differ in length")
        if n < 2:
            raise InvariantViolation("efficiency table needs at least 2 rows", field="wavelength")
        steps = np.diff(cols["wavelength"])
        bad = np.flatnonzero(~(steps > 0))
        if bad.size:
            raise InvariantViolation(
                f"wavelength not strictly increasing at row {bad[0] + 1}",
                field="wavelength",
                row=int(bad[0]) + 1,
            )
        for name in ("eps_x", "eps_y", "eps_z"):
            bad = np.flatnonzero((cols[name] < 0) | (cols[name] > 1))
            if bad.size:
                raise InvariantViolation(
                    f"{name} outside [0, 1] at row {bad[0]}", field=name, row=int(bad[0])
                )
        for name, arr in cols.items():
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "comments", tuple(self.comments))

    def at(self, wavelength):
        """Per-axis efficiencies linearly interpolated at ``wavelength``."""
        wl = float(wavelength)
        lo, hi = self.wavelength[0], self.wavelength[-1]
        if not (lo <= wl <= hi):
            raise OutOfRange(f"wavelength {wl} nm outside table range [{lo}, {hi}] nm")
        return np.array([np.interp(wl, self.wavelength, e) for e in (self.eps_x, self.eps_y, self.eps_z)])


def _per_axis(values, name):
    arr = np.asarray(values, dtype=float)
    if arr.shape != (3,):
        raise InvalidInput(f"{name} needs one value per axis (x, y, z)")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} must be finite")
    return arr


def effective_rates(gamma, weights, purcell):
    """Per-axis emission rates ``gamma * F_i * k_i`` (MHz).

    Purcell factors below 1 (inhibited emission) are accepted.
    """
    gamma = float(gamma)
    if not (math.isfinite(gamma) and gamma > 0):
        raise InvalidInput(f"gamma must be > 0, got {gamma}")
    F = _per_axis(purcell, "purcell")
    if np.any(F < 0):
        raise InvalidInput("Purcell factors must be >= 0")
    return gamma * F * weights.as_array()


def emission_fractions(rates):
    """Normalize per-axis rates to fractions summing to one."""
    r = _per_axis(rates, "rates")
    if np.any(r < 0):
        raise InvalidInput("rates must be >= 0")
    total = r.sum()
    if total <= 0:
        raise InvalidInput("at least one rate must be > 0")
    w = r / total
    # push the rounding residue into the largest entry
    w[np.argmax(w)] += 1.0 - math.fsum(w)
    return w


def combined_efficiency(table, fractions, wavelength):
    """Emission-weighted sum of the interpolated per-axis efficiencies."""
    w = _per_axis(fractions, "fractions")
    if np.any(w < 0) or abs(math.fsum(w) - 1.0) > 1e-9:
        raise InvalidInput("fractions must be >= 0 and sum to 1")
    return float(w @ table.at(wavelength))


class ReadoutMode(enum.Enum):
    ZPL_ONLY = "zpl_only"
    BROADBAND = "broadband"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"zpl_only": cls.ZPL_ONLY, "zplonly": cls.ZPL_ONLY, "zpl": cls.ZPL_ONLY,
                   "broadband": cls.BROADBAND}
        try:
            return aliases[key]
        except KeyError:
            raise InvalidInput(f"unknown read-out mode {value!r}") from None


DEFAULT_COLLECTION_FACTORS = {ReadoutMode.ZPL_ONLY: 0.87, ReadoutMode.BROADBAND: 0.97}


def scenario_collection_factor(mode, override=None):
    """On/off-resonance collection-efficiency ratio for a read-out mode.

    ``override`` (e.g. a ratio of two ``combined_efficiency`` values)
    replaces the default when given.
    """
    mode = ReadoutMode.parse(mode)
    if override is not None:
        override = float(override)
        if not (math.isfinite(override) and override > 0):
            raise InvalidInput(f"collection factor must be > 0, got {override}")
        return override
    return DEFAULT_COLLECTION_FACTORS[mode]


@dataclass(frozen=True)
class ReadoutScenario:
    """Factors turning off-resonant into on-resonant read-out conditions."""

    lifetime_factor: float
    collection_factor: float
    contrast_ratio: float
    mode: ReadoutMode = ReadoutMode.ZPL_ONLY
    zpl_fraction_off: float | None = None
    zpl_fraction_on: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", ReadoutMode.parse(self.mode))
        for name in ("lifetime_factor", "collection_factor", "contrast_ratio"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise InvalidInput(f"{name} must be > 0, got {v}")
            object.__setattr__(self, name, v)
        if self.mode is ReadoutMode.ZPL_ONLY:
            for name in ("zpl_fraction_off", "zpl_fraction_on"):
                v = getattr(self, name)
                if v is None:
                    raise InvalidInput(f"{name} is required for ZPL-only read-out")
                v = float(v)
                if not (0 < v < 1):
                    raise InvalidInput(f"{name} must lie in (0, 1), got {v}")
                object.__setattr__(self, name, v)


#: Lifetime 1.13x, collection 0.87x, ZPL fraction 2.1% -> 18.3%, contrast 0.959x.
REFERENCE_ZPL_SCENARIO = ReadoutScenario(1.13, 0.87, 0.959, ReadoutMode.ZPL_ONLY, 0.021, 0.183)
REFERENCE_BROADBAND_SCENARIO = ReadoutScenario(1.13, 0.97, 0.959, ReadoutMode.BROADBAND)


def zpl_enhancement(s):
    return s.zpl_fraction_on / s.zpl_fraction_off


def photon_ratio(s):
    """Collected-photon gain ``N0* / N0`` on resonance."""
    if not isinstance(s, ReadoutScenario):
        raise InvalidInput("photon_ratio expects a ReadoutScenario")
    ratio = s.lifetime_factor * s.collection_factor
    if s.mode is ReadoutMode.ZPL_ONLY:
        ratio *= zpl_enhancement(s)
    return ratio
