"""Spin read-out signal-to-noise ratio and its Monte Carlo check.

Photon numbers ``N0`` and ``N1`` detected after preparing m_s = 0 and
m_s = +-1 are Poisson distributed; their difference is Skellam distributed
with variance ``N0 + N1``.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

NORMAL_APPROX_THRESHOLD = 30.0
DEFAULT_SHARD_SIZE = 1 << 17


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise InvalidInput(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class CountPair:
    """Expected photon counts for m_s = 0 (``n0``) and m_s = +-1 (``n1``)."""

    n0: float
    n1: float

    def __post_init__(self):
        for name in ("n0", "n1"):
            v = _finite(name, getattr(self, name))
            if v < 0:
                raise InvalidInput(f"{name} must be >= 0, got {v}")
            object.__setattr__(self, name, v)


def snr_counts(p):
    """``(N0 - N1) / sqrt(N0 + N1)``."""
    total = p.n0 + p.n1
    if total <= 0:
        raise InvalidInput("n0 + n1 must be > 0")
    return (p.n0 - p.n1) / math.sqrt(total)


def contrast(p):
    """Spin-dependent fluorescence contrast ``(N0 - N1) / N0``; negative if N1 > N0."""
    if p.n0 <= 0:
        raise InvalidInput("n0 must be > 0")
    return (p.n0 - p.n1) / p.n0


def snr_contrast(n0, c):
    """SNR written through the contrast, ``sqrt(N0) C / sqrt(2 - C)``."""
    n0 = _finite("n0", n0)
    c = _finite("c", c)
    if n0 <= 0:
        raise InvalidInput("n0 must be > 0")
    if not (-1.0 < c <= 1.0):
        raise InvalidInput(f"contrast must lie in (-1, 1], got {c}")
    return math.sqrt(n0) * c / math.sqrt(2.0 - c)


def enhancement(photon_ratio, contrast_ratio):
    """Small-contrast SNR gain ``zeta = sqrt(N0*/N0) * C*/C``."""
    photon_ratio = _finite("photon_ratio", photon_ratio)
    contrast_ratio = _finite("contrast_ratio", contrast_ratio)
    if photon_ratio <= 0 or contrast_ratio <= 0:
        raise InvalidInput("photon and contrast ratios must be > 0")
    return math.sqrt(photon_ratio) * contrast_ratio


def enhancement_exact(photon_ratio, contrast_ratio, c_off):
    """SNR ratio from the full expression at off-resonant contrast ``c_off``.

    Equals ``enhancement(...) * sqrt((2 - C) / (2 - C*))`` and does not rely
    on small contrasts.
    """
    zeta = enhancement(photon_ratio, contrast_ratio)
    c_off = _finite("c_off", c_off)
    c_on = c_off * contrast_ratio
    if not (-1 < c_off <= 1 and -1 < c_on <= 1):
        raise InvalidInput("contrasts must lie in (-1, 1]")
    return zeta * math.sqrt((2.0 - c_off) / (2.0 - c_on))


# --- Monte Carlo ------------------------------------------------------------


def poisson_sample(lam, rng, size):
    """Poisson variates: CDF inversion below 30, rounded normal above.

    The normal branch uses ``floor(lam + sqrt(lam) z + 1/2)`` clipped at 0.
    """
    lam = float(lam)
    if lam == 0:
        return np.zeros(size, dtype=np.int64)
    if lam >= NORMAL_APPROX_THRESHOLD:
        z = rng.standard_normal(size)
        return np.maximum(np.floor(lam + math.sqrt(lam) * z + 0.5), 0).astype(np.int64)
    u = rng.random(size)
    k = np.zeros(size, dtype=np.int64)
    pmf = math.exp(-lam)
    cdf = pmf
    pending = u > cdf
    n = 0
    while np.any(pending) and pmf > 0:
        n += 1
        pmf *= lam / n
        cdf += pmf
        k[pending] = n
        pending &= u > cdf
    return k


@dataclass(frozen=True)
class McReport:
    trials: int
    mean_diff: float
    var_diff: float
    empirical_snr: float
    seed: int


def _shard(p, seed_seq, size):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    a = poisson_sample(p.n0, rng, size)
    b = poisson_sample(p.n1, rng, size)
    return a - b


def monte_carlo(p, trials, seed, shard_size=DEFAULT_SHARD_SIZE, workers=1):
    """Simulate ``trials`` independent read-outs and summarize ``N0 - N1``.

    Trials are split into shards with seeds spawned from ``seed``; results
    do not depend on ``workers``.
    """
    trials = int(trials)
    if trials < 1000:
        raise InvalidInput("monte_carlo needs at least 1000 trials")
    if p.n0 + p.n1 <= 0:
        raise InvalidInput("n0 + n1 must be > 0")
    seed = int(seed)
    n_shards = math.ceil(trials / shard_size)
    sizes = [shard_size] * (n_shards - 1) + [trials - shard_size * (n_shards - 1)]
    seeds = np.random.SeedSequence(seed).spawn(n_shards)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _shard(p, *a), zip(seeds, sizes)))
    else:
        parts = [_shard(p, s, n) for s, n in zip(seeds, sizes)]
    diff = np.concatenate(parts).astype(float)
    mean = float(diff.mean())
    var = float(diff.var(ddof=1))
    if var > 0:
        snr = mean / math.sqrt(var)
    else:
        snr = math.copysign(math.inf, mean) if mean else 0.0
    return McReport(trials=trials, mean_diff=mean, var_diff=var, empirical_snr=snr, seed=seed)
