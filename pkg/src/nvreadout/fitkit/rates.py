"""Joint fit of the five-level model to spin-dependent fluorescence traces."""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, IllConditioned, InvalidInput, NotConverged
from ..levels import (
    Ideal,
    MixingVariant,
    RateSet,
    fluorescence_at,
    prepared_state,
)
from .engine import fit_residuals

RATE_NAMES = ("k_0", "k_s", "k_m")
# log-spaced seed grid (MHz) searched before the descent
SEED_GRID = np.geomspace(0.3, 30.0, 7)


def _check_traces(trace0, trace1):
    if not np.array_equal(trace0.times, trace1.times):
        raise DimensionMismatch("trace0 and trace1 must share a time grid")
    v0, v1 = trace0.values, trace1.values
    if np.max(np.abs(v0 - v1)) <= 1e-9 * max(float(np.max(np.abs(v0))), 1e-300):
        raise IllConditioned("traces are identical; no spin contrast to fit")


def _simulate(times, k_f, rates3, variant, init, method="eig"):
    k_0, k_s, k_m = rates3
    rates = RateSet(k_f, k_f, k_s, k_0, k_m, variant)
    s0 = fluorescence_at(rates, prepared_state(rates, "ms0", init), times, method=method)
    s1 = fluorescence_at(rates, prepared_state(rates, "ms1", init), times, method=method)
    return s0, s1


def _model(times, k_f, variant, init, fit_scale):
    def f(_, q):
        rates3 = np.exp(q[:3])
        try:
            s0, s1 = _simulate(times, k_f, rates3, variant, init)
        except NotConverged:
            s0, s1 = _simulate(times, k_f, rates3, variant, init, method="rk4")
        out = np.concatenate([s0, s1])
        return out * math.exp(q[3]) if fit_scale else out

    return f


def _seed(f, y, fit_scale):
    best, best_cost = None, math.inf
    for combo in itertools.product(SEED_GRID, repeat=3):
        q = np.log(np.array(combo))
        model = f(None, np.append(q, 0.0))
        if fit_scale:
            scale = float(model @ y) / float(model @ model)
            if scale <= 0:
                continue
            q = np.append(q, math.log(scale))
            model = model * scale
        cost = float(np.sum((model - y) ** 2))
        if cost < best_cost:
            best, best_cost = q, cost
    return best


def fit_rates(
    trace0,
    trace1,
    k_f_fixed,
    variant=MixingVariant.RADIATIVE,
    init=Ideal(),
    initial_guess=None,
    fit_scale=False,
):
    """Fit ``k_0``, ``k_s`` and ``k_m`` jointly to both prepared-state traces.

    ``k_e = k_f = k_f_fixed`` is held fixed. Rates are fitted in log space so
    they stay positive; the reported stderr follows from the delta method.
    Without ``initial_guess`` the descent starts from the best point of a
    log-spaced grid over 0.3-30 MHz. With ``fit_scale`` a common detection
    factor ``scale`` multiplying both model traces is fitted as well.
    """
    _check_traces(trace0, trace1)
    k_f = float(k_f_fixed)
    if not (math.isfinite(k_f) and k_f > 0):
        raise InvalidInput(f"k_f_fixed must be > 0, got {k_f_fixed}")
    variant = MixingVariant.parse(variant)
    times = trace0.times
    y = np.concatenate([trace0.values, trace1.values])
    f = _model(times, k_f, variant, init, fit_scale)
    names = RATE_NAMES + (("scale",) if fit_scale else ())

    if initial_guess is None:
        q0 = _seed(f, y, fit_scale)
    else:
        try:
            q0 = [math.log(float(initial_guess[k])) for k in RATE_NAMES]
            if fit_scale:
                q0.append(math.log(float(initial_guess.get("scale", 1.0))))
        except (KeyError, ValueError) as exc:
            raise InvalidInput(f"bad initial guess for rates: {exc}") from None
        q0 = np.array(q0)
    if not fit_scale:
        q0 = np.asarray(q0)[:3]

    try:
        log_result = fit_residuals(
            f, times, y, q0, names, None, model_name=f"rates/{variant.value}"
        )
    except IllConditioned as exc:
        if getattr(exc, "result", None) is not None:
            exc.result = _from_log(exc.result)
        raise
    result = _from_log(log_result)
    result.derived["k_f"] = k_f
    result.derived["k_e"] = k_f
    result.derived["mixing_variant"] = variant.value
    return result


def _from_log(result):
    logs = dict(result.params)
    result.params = {k: math.exp(v) for k, v in logs.items()}
    if result.stderr is not None:
        result.stderr = {k: result.params[k] * s for k, s in result.stderr.items()}
    result.covariance = None
    return result


@dataclass
class VariantComparison:
    radiative: object
    nonradiative: object

    @property
    def preferred(self):
        if self.radiative.residual_norm <= self.nonradiative.residual_norm:
            return MixingVariant.RADIATIVE
        return MixingVariant.NONRADIATIVE


def compare_mixing_variants(trace0, trace1, k_f_fixed, init=Ideal(), fit_scale=False):
    """Fit both spin-mixing placements and report their residual norms."""
    results = {}
    for variant in MixingVariant:
        results[variant.value] = fit_rates(
            trace0, trace1, k_f_fixed, variant=variant, init=init, fit_scale=fit_scale
        )
    return VariantComparison(results["radiative"], results["nonradiative"])
