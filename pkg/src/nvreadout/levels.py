"""Five-level rate-equation model of the NV center under optical pumping.

Level order used for every population vector and generator matrix::

    0: G0  ground state, m_s = 0
    1: G1  ground state, m_s = +-1
    2: E0  excited state, m_s = 0
    3: E1  excited state, m_s = +-1
    4: S   metastable singlet

Rates are given in MHz (inverse microseconds, no factor 2*pi) and times in ns.
"""

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DimensionMismatch,
    IllConditioned,
    InvalidCombination,
    InvalidInput,
    InvalidProbability,
    NegativeRate,
    NonFiniteInput,
    NotConverged,
)
from .series import TimeTrace

G0, G1, E0, E1, S = range(5)
LEVEL_NAMES = ("b_g0", "b_g1", "b_e0", "b_e1", "b_s")

# MHz * ns -> dimensionless
_PER_NS = 1e-3

EIG_RESIDUAL_TOL = 1e-10
POPULATION_TOL = 1e-9


class MixingVariant(enum.Enum):
    """Placement of the spin-mixing channels with rate ``k_m``."""

    RADIATIVE = "radiative"
    NONRADIATIVE = "nonradiative"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        aliases = {
            "radiative": cls.RADIATIVE,
            "radiativemixing": cls.RADIATIVE,
            "nonradiative": cls.NONRADIATIVE,
            "nonradiativeexcitedmixing": cls.NONRADIATIVE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise InvalidInput(f"unknown mixing variant {value!r}") from None


@dataclass(frozen=True)
class RateSet:
    """Transition rates of the five-level model, all in MHz.

    k_e : excitation rate G -> E (spin conserving)
    k_f : radiative decay E -> G (spin conserving)
    k_s : intersystem crossing E1 -> S
    k_0 : singlet decay S -> G0
    k_m : spin-mixing rate
    """

    k_e: float
    k_f: float
    k_s: float
    k_0: float
    k_m: float
    mixing_variant: MixingVariant = MixingVariant.RADIATIVE

    def __post_init__(self):
        for name in ("k_e", "k_f", "k_s", "k_0", "k_m"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise NonFiniteInput(f"{name} is not a number: {value!r}") from None
            if not math.isfinite(value):
                raise NonFiniteInput(f"{name} must be finite, got {value}")
            if value < 0:
                raise NegativeRate(f"{name} must be >= 0, got {value}")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "mixing_variant", MixingVariant.parse(self.mixing_variant))

    def scaled(self, factor):
        """All rates multiplied by ``factor`` (time rescaling of the dynamics)."""
        return replace(
            self,
            k_e=self.k_e * factor,
            k_f=self.k_f * factor,
            k_s=self.k_s * factor,
            k_0=self.k_0 * factor,
            k_m=self.k_m * factor,
        )

    def purcell_enhanced(self, factor):
        """Rates with every radiative channel multiplied by ``factor``.

        ``k_f`` and ``k_e`` scale together (saturated pumping keeps
        ``k_e = k_f``). For radiative mixing ``k_m`` is an optical spin-flip
        transition and scales too; non-radiative mixing is left unchanged.
        """
        k_m = self.k_m * factor if self.mixing_variant is MixingVariant.RADIATIVE else self.k_m
        return replace(self, k_e=self.k_f * factor, k_f=self.k_f * factor, k_m=k_m)


#: Rates fitted to the off-resonant fluorescence data (K_e = K_f from a 9.0 ns lifetime).
REFERENCE_RATES = RateSet(k_e=111.0, k_f=111.0, k_s=1.79, k_0=5.80, k_m=1.35)


@dataclass(frozen=True)
class LevelPopulations:
    """Occupation probabilities of the five levels (a point on the simplex)."""

    b_g0: float
    b_g1: float
    b_e0: float
    b_e1: float
    b_s: float

    def __post_init__(self):
        values = []
        for name in LEVEL_NAMES:
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise NonFiniteInput(f"{name} must be finite, got {v}")
            if v < 0.0 or v > 1.0:
                raise InvalidProbability(f"{name}={v} outside [0, 1]")
            object.__setattr__(self, name, v)
            values.append(v)
        total = math.fsum(values)
        if abs(total - 1.0) > POPULATION_TOL:
            raise InvalidProbability(f"populations sum to {total!r}, expected 1")

    @classmethod
    def from_array(cls, arr, tol=POPULATION_TOL):
        """Build from a length-5 vector, clipping round-off excursions up to ``tol``."""
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (5,):
            raise DimensionMismatch(f"expected 5 populations, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteInput("populations must be finite")
        if np.any(arr < -tol) or np.any(arr > 1 + tol):
            raise InvalidProbability(f"populations {arr} outside [0, 1]")
        return cls(*np.clip(arr, 0.0, 1.0))

    def as_array(self):
        return np.array([self.b_g0, self.b_g1, self.b_e0, self.b_e1, self.b_s])


# --- initialization modes -------------------------------------------------


@dataclass(frozen=True)
class Ideal:
    """All population in G0."""


@dataclass(frozen=True)
class Polarized:
    """Probability ``p`` in G0, the remainder in G1."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not (0.0 <= p <= 1.0):
            raise InvalidProbability(f"polarization p={p} outside [0, 1]")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class Pumped:
    """Optical pumping for ``pump_duration`` followed by ``dark_wait`` without laser (both in us)."""

    pump_duration: float
    dark_wait: float

    def __post_init__(self):
        for name in ("pump_duration", "dark_wait"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0:
                raise InvalidInput(f"{name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)


# --- generator and propagators ---------------------------------------------


def generator_matrix(rates, laser_on=True):
    """Rate matrix ``M`` (MHz) with ``dB/dt = M @ B``.

    For the radiative variant the mixing channels are G0->E1 and E0->G1 at
    ``2*k_m`` and G1->E0 and E1->G0 at ``k_m``. The non-radiative variant
    instead couples the excited states, E0->E1 at ``2*k_m`` and E1->E0 at
    ``k_m``. With ``laser_on=False`` every optically driven G->E channel
    (``k_e`` and, for the radiative variant, the G->E mixing channels) is
    removed.
    """
    if not isinstance(rates, RateSet):
        raise InvalidInput("rates must be a RateSet")
    k_e = rates.k_e if laser_on else 0.0
    k_f, k_s, k_0, k_m = rates.k_f, rates.k_s, rates.k_0, rates.k_m

    M = np.zeros((5, 5))

    def channel(src, dst, rate):
        M[dst, src] += rate
        M[src, src] -= rate

    channel(G0, E0, k_e)
    channel(G1, E1, k_e)
    channel(E0, G0, k_f)
    channel(E1, G1, k_f)
    channel(E1, S, k_s)
    channel(S, G0, k_0)
    if rates.mixing_variant is MixingVariant.RADIATIVE:
        if laser_on:
            channel(G0, E1, 2 * k_m)
            channel(G1, E0, k_m)
        channel(E0, G1, 2 * k_m)
        channel(E1, G0, k_m)
    else:
        channel(E0, E1, 2 * k_m)
        channel(E1, E0, k_m)
    return M


class Eigensystem:
    """Diagonalization of a generator, checked against the residual tolerance.

    Raises NotConverged when either the eigen-pair residual or the
    reconstruction ``V diag(w) V^-1 - M`` exceeds ``tol`` relative to ``|M|``.
    """

    def __init__(self, M, tol=EIG_RESIDUAL_TOL):
        M = np.asarray(M, dtype=float)
        scale = float(np.max(np.abs(M)))
        self.size = M.shape[0]
        if scale == 0.0:
            self.w = np.zeros(self.size, dtype=complex)
            self.V = np.eye(self.size, dtype=complex)
            self.Vinv = np.eye(self.size, dtype=complex)
            return
        w, V = np.linalg.eig(M)
        try:
            Vinv = np.linalg.inv(V)
        except np.linalg.LinAlgError:
            raise NotConverged("eigenvector matrix is singular") from None
        residual = np.max(np.abs(M @ V - V * w)) / scale
        recon = np.max(np.abs((V * w) @ Vinv - M)) / scale
        if not (np.isfinite(residual) and np.isfinite(recon)):
            raise NotConverged("eigen-decomposition produced non-finite values")
        if residual > tol or recon > tol:
            raise NotConverged(
                f"eigen-decomposition residual {max(residual, recon):.3g} exceeds {tol:g}"
            )
        self.w, self.V, self.Vinv = w, V, Vinv

    def propagate(self, pop, times):
        """Populations at each of ``times`` (in units matching the eigenvalues).

        Returns an array of shape ``(5,)`` for scalar ``times``, otherwise
        ``(len(times), 5)``.
        """
        coeff = self.Vinv @ np.asarray(pop, dtype=complex)
        t = np.asarray(times, dtype=float)
        phase = np.exp(np.multiply.outer(t, self.w))
        out = (phase * coeff) @ self.V.T
        return out.real


def propagate_eig(M, pop, t):
    """``exp(M t) @ pop`` by eigen-decomposition; ``M`` in 1/ns, ``t`` in ns."""
    return Eigensystem(M).propagate(pop, t)


def rk4_step_size(M):
    """Fixed step ``min(1 ns, 0.1 / max_rate)`` with ``M`` in 1/ns.

    ``max_rate`` is the column-sum norm of ``M``, an upper bound on the
    magnitude of every eigenvalue.
    """
    max_rate = float(np.max(np.sum(np.abs(M), axis=0)))
    return 1.0 if max_rate == 0.0 else min(1.0, 0.1 / max_rate)


def rk4_step_matrix(M, h):
    """One classical Runge-Kutta step of ``dB/dt = M B`` as a matrix.

    The four stages are applied to the identity, so ``R @ y`` equals an RK4
    step taken from ``y``.
    """
    eye = np.eye(M.shape[0])
    k1 = M @ eye
    k2 = M @ (eye + 0.5 * h * k1)
    k3 = M @ (eye + 0.5 * h * k2)
    k4 = M @ (eye + h * k3)
    return eye + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def propagate_rk4(M, pop, t):
    """Fixed-step RK4 integration of ``dB/dt = M B`` over ``t`` ns.

    The step is shortened so that an integer number of steps ends exactly at
    ``t``.
    """
    y = np.array(pop, dtype=float)
    if t <= 0.0:
        return y
    n = max(1, math.ceil(t / rk4_step_size(M) - 1e-12))
    R = rk4_step_matrix(M, t / n)
    return np.linalg.matrix_power(R, n) @ y


def _as_pop_array(pop):
    if isinstance(pop, LevelPopulations):
        return pop.as_array()
    return LevelPopulations.from_array(pop).as_array()


def evolve(pop0, rates, t, method="eig", laser_on=True):
    """Populations after ``t`` ns of evolution under ``rates``.

    ``method`` selects the matrix exponential via eigen-decomposition
    (``"eig"``, default) or the fixed-step Runge-Kutta integrator (``"rk4"``).
    """
    t = float(t)
    if not math.isfinite(t):
        raise NonFiniteInput(f"t must be finite, got {t}")
    if t < 0:
        raise InvalidInput(f"t must be >= 0, got {t}")
    p = _as_pop_array(pop0)
    M = generator_matrix(rates, laser_on=laser_on) * _PER_NS
    if method == "eig":
        out = propagate_eig(M, p, t)
    elif method == "rk4":
        out = propagate_rk4(M, p, t)
    else:
        raise InvalidInput(f"unknown method {method!r}")
    return LevelPopulations.from_array(out)


def steady_state(rates, tol=1e-10):
    """Normalized null vector of the laser-on generator.

    Raises IllConditioned if the null space is more than one-dimensional.
    """
    if rates.k_e <= 0 or rates.k_f <= 0:
        raise InvalidInput("steady state requires k_e > 0 and k_f > 0")
    M = generator_matrix(rates)
    _, s, vh = np.linalg.svd(M)
    null_dim = int(np.sum(s <= tol * s[0]))
    if null_dim != 1:
        raise IllConditioned(f"generator null space has dimension {null_dim}")
    v = vh[-1]
    v = v / v.sum()
    return LevelPopulations.from_array(v)


def initialize(mode, rates):
    """Population vector prepared according to an initialization mode.

    ``Pumped`` starts from a thermal ground state (1/3 in m_s=0, 2/3 in
    m_s=+-1), pumps with the laser for ``pump_duration`` and then lets the
    system relax in the dark for ``dark_wait``, draining the singlet into G0.
    """
    if isinstance(mode, Ideal):
        return LevelPopulations(1.0, 0.0, 0.0, 0.0, 0.0)
    if isinstance(mode, Polarized):
        return LevelPopulations(mode.p, 1.0 - mode.p, 0.0, 0.0, 0.0)
    if isinstance(mode, Pumped):
        p = np.array([1 / 3, 2 / 3, 0.0, 0.0, 0.0])
        M_on = generator_matrix(rates, laser_on=True) * _PER_NS
        M_off = generator_matrix(rates, laser_on=False) * _PER_NS
        p = propagate_eig(M_on, p, 1e3 * mode.pump_duration)
        p = propagate_eig(M_off, p, 1e3 * mode.dark_wait)
        p = np.clip(p, 0.0, None)
        return LevelPopulations.from_array(p / p.sum())
    raise InvalidInput(f"unknown initialization mode {mode!r}")


def apply_pi_pulse(pop):
    """Instantaneous, perfect pi-pulse: swap the two ground-state populations."""
    return replace(pop, b_g0=pop.b_g1, b_g1=pop.b_g0)


def _check_photon_flag(rates, include_mixing_photons):
    if include_mixing_photons and rates.mixing_variant is not MixingVariant.RADIATIVE:
        raise InvalidCombination(
            "mixing photons exist only for the radiative mixing variant"
        )


def _fluorescence(P, rates, include_mixing_photons):
    # P has shape (..., 5)
    P = np.asarray(P)
    signal = rates.k_f * (P[..., E0] + P[..., E1])
    if include_mixing_photons:
        signal = signal + 2 * rates.k_m * P[..., E0] + rates.k_m * P[..., E1]
    return signal


def fluorescence_rate(pop, rates, include_mixing_photons=False):
    """Photon emission rate (MHz) of a population vector.

    By default only the spin-conserving emission ``k_f (b_e0 + b_e1)``
    counts; with ``include_mixing_photons`` the radiative spin-flip photons
    are added.
    """
    _check_photon_flag(rates, include_mixing_photons)
    return float(_fluorescence(_as_pop_array(pop), rates, include_mixing_photons))


def time_grid(duration, step):
    """Sampling times ``0, step, 2*step, ...`` ending exactly at ``duration``."""
    duration, step = float(duration), float(step)
    if not (math.isfinite(duration) and duration > 0):
        raise InvalidInput(f"duration must be > 0, got {duration}")
    if not (math.isfinite(step) and 0 < step <= duration):
        raise InvalidInput(f"step must satisfy 0 < step <= duration, got {step}")
    n = math.floor(duration / step + 1e-9)
    t = step * np.arange(n + 1)
    if duration - t[-1] > 1e-9 * duration:
        t = np.append(t, duration)
    else:
        t[-1] = duration
    return t


def prepared_state(rates, prep, init=Ideal()):
    """Initial populations for read-out of ``prep`` in {"ms0", "ms1"}."""
    pop = initialize(init, rates)
    if prep == "ms1":
        return apply_pi_pulse(pop)
    if prep != "ms0":
        raise InvalidInput(f"prep must be 'ms0' or 'ms1', got {prep!r}")
    return pop


def fluorescence_at(rates, pop0, times, include_mixing_photons=False, method="eig"):
    """Fluorescence (MHz) at ``times`` (ns) during read-out starting from ``pop0``."""
    _check_photon_flag(rates, include_mixing_photons)
    p = _as_pop_array(pop0)
    M = generator_matrix(rates) * _PER_NS
    times = np.asarray(times, dtype=float)
    if method == "eig":
        P = Eigensystem(M).propagate(p, times)
    elif method == "rk4":
        P = _rk4_samples(M, p, times)
    else:
        raise InvalidInput(f"unknown method {method!r}")
    return _fluorescence(P, rates, include_mixing_photons)


def _rk4_samples(M, p, times):
    out = np.empty((times.size, p.size))
    t_prev, y = 0.0, p
    for i, t in enumerate(times):
        y = propagate_rk4(M, y, t - t_prev)
        out[i] = y
        t_prev = t
    return out


def readout_trace(
    rates, prep, init=Ideal(), duration=3000.0, step=1.0, include_mixing_photons=False
):
    """Time-resolved fluorescence during a laser read-out pulse.

    The state is prepared with ``initialize`` (followed by a pi-pulse for
    ``prep="ms1"``) and then evolved with the laser on.
    """
    times = time_grid(duration, step)
    pop0 = prepared_state(rates, prep, init)
    values = fluorescence_at(rates, pop0, times, include_mixing_photons)
    return TimeTrace(times, values)


def steady_state_fluorescence(rates, include_mixing_photons=False):
    return fluorescence_rate(steady_state(rates), rates, include_mixing_photons)


def contrast_trace(trace0, trace1, normalization):
    """``(S0 - S1) / normalization`` on a shared time grid."""
    if trace0.times.shape != trace1.times.shape or not np.array_equal(
        trace0.times, trace1.times
    ):
        raise DimensionMismatch("traces must share an identical time grid")
    normalization = float(normalization)
    if not (math.isfinite(normalization) and normalization > 0):
        raise InvalidProbability(f"normalization must be > 0, got {normalization}")
    return TimeTrace(trace0.times, (trace0.values - trace1.values) / normalization)


def gated_counts(rates, pop0, gate_start, gate_width, include_mixing_photons=False):
    """Trapezoid integral of the fluorescence over the gate (MHz * ns)."""
    gate_start, gate_width = float(gate_start), float(gate_width)
    if not (math.isfinite(gate_start) and gate_start >= 0):
        raise InvalidInput(f"gate_start must be >= 0, got {gate_start}")
    if not (math.isfinite(gate_width) and gate_width > 0):
        raise InvalidInput(f"gate_width must be > 0, got {gate_width}")
    n = max(1, math.ceil(gate_width - 1e-9))
    times = np.linspace(gate_start, gate_start + gate_width, n + 1)
    signal = fluorescence_at(rates, pop0, times, include_mixing_photons)
    return float(np.trapezoid(signal, times))


def gated_contrast(
    rates, init=Ideal(), gate_start=0.0, gate_width=250.0, include_mixing_photons=False
):
    """Contrast ``(N0 - N1) / N0`` of the counts collected in a detection gate."""
    n0 = gated_counts(
        rates, prepared_state(rates, "ms0", init), gate_start, gate_width,
        include_mixing_photons,
    )
    n1 = gated_counts(
        rates, prepared_state(rates, "ms1", init), gate_start, gate_width,
        include_mixing_photons,
    )
    if n0 <= 0:
        raise InvalidInput("no photons in the gate for m_s=0")
    return (n0 - n1) / n0


def contrast_reduction(
    rates, enhancement, init=Ideal(), gate_start=0.0, gate_width=250.0,
    include_mixing_photons=False,
):
    """Relative loss of gated contrast when the emitter is Purcell enhanced.

    The resonant rates come from ``rates.purcell_enhanced(enhancement)``.
    Returns ``1 - C_on / C_off``.
    """
    on = rates.purcell_enhanced(enhancement)
    c_off = gated_contrast(rates, init, gate_start, gate_width, include_mixing_photons)
    c_on = gated_contrast(on, init, gate_start, gate_width, include_mixing_photons)
    return 1.0 - c_on / c_off
