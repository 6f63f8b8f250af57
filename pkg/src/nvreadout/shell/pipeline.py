"""Subcommand pipelines turning a validated RunConfig into a Report."""

from pathlib import Path

import numpy as np

from .. import cavity, collection, levels, snr
from ..errors import NotConverged
from ..fitkit import (
    compare_mixing_variants,
    fit_double_exponential,
    fit_gaussian,
    fit_lorentzian,
    fit_odmr,
    fit_rabi,
    fit_rates,
    fit_saturation,
)
from . import csvio
from .config import SCHEMA, ConfigError, require_sections
from .report import DIMENSIONLESS, Report

COMMANDS = ("simulate", "fit", "rates", "spectrum", "purcell", "collect", "snr", "mc", "tune")

REQUIRED_SECTIONS = {
    "simulate": ("rates",),
    "fit": ("fit",),
    "rates": ("rates_fit",),
    "spectrum": ("spectrum",),
    "purcell": ("cavity",),
    "collect": ("collection",),
    "snr": ("scenario",),
    "mc": ("mc",),
    "tune": ("tune",),
}
OPTIONAL_SECTIONS = {
    "simulate": ("init", "simulate"),
    "rates": ("init",),
}


def run_pipeline(cfg, command, seed=None):
    """Execute ``command`` on ``cfg``; ``seed`` overrides ``[run] seed``.

    Raises ConfigError for missing sections and lets module errors through
    so the caller can map them to exit codes.
    """
    if command not in COMMANDS:
        raise ConfigError([f"unknown command {command!r}"])
    if not cfg.values:
        raise ConfigError(
            ["config is empty"]
            + [f"[{s}]: section required by '{command}' is missing"
               for s in REQUIRED_SECTIONS[command]]
        )
    require_sections(cfg, command, REQUIRED_SECTIONS[command])
    report = Report(command)
    used = REQUIRED_SECTIONS[command] + OPTIONAL_SECTIONS.get(command, ())
    for section in used:
        if cfg.has(section):
            _add_inputs(report, cfg, section)
    if command == "mc":
        if seed is not None:
            report.add("run.seed", int(seed), "-", "cli")
        elif cfg.has("run"):
            _add_inputs(report, cfg, "run")
            seed = cfg.get("run", "seed")
        else:
            seed = 0
            report.add("run.seed", 0, "-", "default")
    _HANDLERS[command](cfg, report, seed)
    return report


def _add_inputs(report, cfg, section):
    for key, value in cfg.section(section).items():
        unit = cfg.unit(section, key)
        if isinstance(value, Path):
            value = _display_path(value, cfg.base_dir)
        report.add(f"{section}.{key}", value, unit, cfg.source(section, key))


def _display_path(path, base):
    try:
        return path.relative_to(base).as_posix()
    except ValueError:
        return path.as_posix()


def _rates(cfg):
    if not cfg.has("rates"):
        return levels.REFERENCE_RATES
    r = cfg.section("rates")
    return levels.RateSet(
        k_e=r["k_e"], k_f=r["k_f"], k_s=r["k_s"], k_0=r["k_0"], k_m=r["k_m"],
        mixing_variant=levels.MixingVariant.parse(r["mixing_variant"]),
    )


def _init(cfg):
    if not cfg.has("init"):
        return levels.Ideal()
    s = cfg.section("init")
    if s["mode"] == "polarized":
        return levels.Polarized(s["p"])
    if s["mode"] == "pumped":
        return levels.Pumped(s["pump_duration_us"], s["dark_wait_us"])
    return levels.Ideal()


def _simulate_settings(cfg):
    if cfg.has("simulate"):
        return cfg.section("simulate")
    return {k: entry.default for k, entry in SCHEMA["simulate"].items()}


def _simulate(cfg, report, seed):
    rates = _rates(cfg)
    init = _init(cfg)
    s = _simulate_settings(cfg)
    mix = s["include_mixing_photons"]
    t0 = levels.readout_trace(rates, "ms0", init, s["duration_ns"], s["step_ns"], mix)
    t1 = levels.readout_trace(rates, "ms1", init, s["duration_ns"], s["step_ns"], mix)
    norm = levels.steady_state_fluorescence(rates, mix)
    ct = levels.contrast_trace(t0, t1, norm)
    report.artifacts["trace_ms0.csv"] = csvio.trace_to_csv(
        t0, ["# simulated read-out fluorescence (MHz) after preparing m_s=0"])
    report.artifacts["trace_ms1.csv"] = csvio.trace_to_csv(
        t1, ["# simulated read-out fluorescence (MHz) after preparing m_s=+-1"])
    report.artifacts["contrast.csv"] = csvio.trace_to_csv(
        ct, ["# (S0 - S1) / steady-state fluorescence"])

    i_peak = int(np.argmax(ct.values))
    end0, end1 = float(t0.values[-1]), float(t1.values[-1])
    report.add("steady_state_fluorescence", norm, "MHz")
    report.add("final_signal_ms0", end0, "MHz")
    report.add("final_signal_ms1", end1, "MHz")
    report.add("final_relative_difference", abs(end0 - end1) / max(abs(end0), abs(end1)))
    report.add("peak_contrast", float(ct.values[i_peak]))
    report.add("peak_contrast_time", float(ct.times[i_peak]), "ns")
    gate = (s["gate_start_ns"], s["gate_width_ns"])
    report.add("gated_contrast", levels.gated_contrast(rates, init, *gate, mix))
    enh = cavity.lifetime_ratio(s["lifetime_off_ns"], s["lifetime_on_ns"])
    report.add("lifetime_ratio", enh)
    report.add("gated_contrast_reduction",
               levels.contrast_reduction(rates, enh, init, *gate, mix))


_TRACE_MODELS = {"rabi", "double_exponential"}


def _fit_units(model, x_unit):
    if model == "saturation":
        return {"i_inf": "kHz", "p_sat": "mW", "background_slope": "kHz/mW"}
    if model in _TRACE_MODELS:
        return {"period": "ns", "decay_time": "ns", "tau1": "ns", "tau2": "ns",
                "pi_time": "ns", "phase": "rad", "amplitude": "signal",
                "offset": "signal", "a1": "signal", "a2": "signal"}
    return {"center": x_unit, "center1": x_unit, "center2": x_unit, "fwhm": x_unit,
            "fwhm1": x_unit, "fwhm2": x_unit, "area": f"intensity*{x_unit}",
            "area1": f"intensity*{x_unit}", "area2": f"intensity*{x_unit}",
            "offset": "intensity", "baseline": "intensity", "height": "intensity",
            "height1": "intensity", "height2": "intensity",
            "depth1": DIMENSIONLESS, "depth2": DIMENSIONLESS}


def _fit(cfg, report, seed):
    model = cfg.get("fit", "model")
    path = cfg.get("fit", "data")
    x_unit = "-"
    if model == "saturation":
        power, counts, _ = csvio.load_saturation(path)
        result = fit_saturation(power, counts)
    elif model in _TRACE_MODELS:
        trace = csvio.load_trace(path)
        result = fit_rabi(trace) if model == "rabi" else fit_double_exponential(trace)
    else:
        spectrum = csvio.load_spectrum(path)
        x_unit = spectrum.unit
        if model == "lorentzian":
            result = fit_lorentzian(spectrum)
        elif model == "gaussian":
            result = fit_gaussian(spectrum, components=1)
        elif model == "gaussian2":
            result = fit_gaussian(spectrum, components=2)
        else:
            result = fit_odmr(spectrum)
    _report_fit(report, result, _fit_units(model, x_unit), prefix="fit")


def _report_fit(report, result, units, prefix):
    if not result.converged:
        raise NotConverged(
            f"{result.model} fit did not converge after {result.iterations} iterations"
        )
    for name, value in result.params.items():
        unit = units.get(name, DIMENSIONLESS)
        report.add(f"{prefix}.{name}", value, unit)
        report.add(f"{prefix}.{name}_stderr", result.stderr[name], unit)
    for name, value in result.derived.items():
        report.add(f"{prefix}.{name}", value, units.get(name, DIMENSIONLESS) if not
                   isinstance(value, str) else "-")
    report.add(f"{prefix}.residual_norm", result.residual_norm, "data units")
    report.add(f"{prefix}.iterations", result.iterations, "-")
    for i, flag in enumerate(result.flags):
        report.add(f"{prefix}.flag{i}", flag, "-")


def _rates_fit(cfg, report, seed):
    s = cfg.section("rates_fit")
    t0 = csvio.load_trace(s["trace0"])
    t1 = csvio.load_trace(s["trace1"])
    init = _init(cfg)
    units = {"k_0": "MHz", "k_s": "MHz", "k_m": "MHz", "k_e": "MHz", "k_f": "MHz",
             "scale": DIMENSIONLESS}
    if s["compare_variants"]:
        cmp = compare_mixing_variants(t0, t1, s["k_f_fixed"], init, s["fit_scale"])
        _report_fit(report, cmp.radiative, units, "radiative")
        _report_fit(report, cmp.nonradiative, units, "nonradiative")
        report.add("preferred_variant", cmp.preferred.value, "-")
    else:
        result = fit_rates(t0, t1, s["k_f_fixed"], init=init, fit_scale=s["fit_scale"])
        _report_fit(report, result, units, "radiative")


def _spectrum(cfg, report, seed):
    spectrum = csvio.load_spectrum(cfg.get("spectrum", "data"))
    u = spectrum.unit
    fit = fit_lorentzian(spectrum)
    if not fit.converged:
        raise NotConverged("Lorentzian fit of the mode did not converge")
    mode = cavity.mode_fit_from_spectrum(spectrum, fit)
    beta = cavity.beta_from_spectrum(mode)
    f = cavity.purcell_from_beta(beta)
    report.add("mode_center", mode.center, u)
    report.add("mode_fwhm", mode.fwhm, u)
    report.add("q_factor", cavity.q_factor(mode.center, mode.fwhm))
    report.add("area_mode", mode.area_mode, f"intensity*{u}")
    report.add("area_total", mode.area_total, f"intensity*{u}")
    report.add("beta", beta)
    report.add("purcell_factor", f)
    report.add("total_purcell_factor", 1.0 + f)


def _purcell(cfg, report, seed):
    c = cfg.section("cavity")
    p = cavity.CavityParams(
        q_factor=c["q_factor"], mode_volume=c["mode_volume"], wavelength=c["wavelength_nm"],
        emitter_fwhm=c["emitter_fwhm_ghz"], zpl_fraction=c["zpl_fraction"],
        refractive_index=c["refractive_index"],
    )
    f_zpl, total = cavity.predict_purcell(p)
    report.add("effective_q", cavity.effective_q(p))
    report.add("zpl_purcell_factor", f_zpl)
    report.add("total_purcell_factor", total)


def _collect(cfg, report, seed):
    c = cfg.section("collection")
    table = csvio.load_efficiency_table(c["table"])
    weights = collection.DipoleWeights(c["k_x"], c["k_y"], c["k_z"])
    eff = {}
    for side in ("off", "on"):
        purcell = [c[f"purcell_{side}_{a}"] for a in collection.AXES]
        rates = collection.effective_rates(c["gamma_mhz"], weights, purcell)
        fractions = collection.emission_fractions(rates)
        wl = c[f"wavelength_{side}_nm"]
        eff[side] = collection.combined_efficiency(table, fractions, wl)
        for a, r, w, e in zip(collection.AXES, rates, fractions, table.at(wl)):
            report.add(f"{side}.rate_{a}", float(r), "MHz")
            report.add(f"{side}.fraction_{a}", float(w))
            report.add(f"{side}.eps_{a}", float(e))
        report.add(f"{side}.efficiency", eff[side])
    report.add("collection_factor", eff["on"] / eff["off"])


def _snr(cfg, report, seed):
    s = cfg.section("scenario")
    modes = (
        (collection.ReadoutMode.ZPL_ONLY, s["collection_factor_zpl"], "zpl_only"),
        (collection.ReadoutMode.BROADBAND, s["collection_factor_broadband"], "broadband"),
    )
    for mode, factor, tag in modes:
        scen = collection.ReadoutScenario(
            s["lifetime_factor"], factor, s["contrast_ratio"], mode,
            s["zpl_fraction_off"], s["zpl_fraction_on"],
        )
        ratio = collection.photon_ratio(scen)
        report.add(f"{tag}.photon_ratio", ratio)
        report.add(f"{tag}.zeta", snr.enhancement(ratio, s["contrast_ratio"]))
        report.add(f"{tag}.zeta_exact",
                   snr.enhancement_exact(ratio, s["contrast_ratio"], s["contrast_off"]))


def _mc(cfg, report, seed):
    m = cfg.section("mc")
    pair = snr.CountPair(m["n0"], m["n1"])
    result = snr.monte_carlo(pair, m["trials"], seed)
    report.add("analytic_mean_difference", pair.n0 - pair.n1, "counts")
    report.add("analytic_variance", pair.n0 + pair.n1, "counts^2")
    report.add("analytic_snr", snr.snr_counts(pair))
    report.add("mean_difference", result.mean_diff, "counts")
    report.add("variance_difference", result.var_diff, "counts^2")
    report.add("empirical_snr", result.empirical_snr)


def _tune(cfg, report, seed):
    t = cfg.section("tune")
    args = (t["red_rate_nm_per_h"], t["blue_sensitivity"])
    plan = cavity.tuning_plan(t["current_nm"], t["target_nm"], *args)
    report.add("direction", plan.direction, "-")
    report.add("exposure_time", plan.exposure_hours, "h")
    report.add("diamond_removal", plan.removal_nm, "nm")
    report.add("final_mode", cavity.apply_tuning(t["current_nm"], plan, *args), "nm")


_HANDLERS = {
    "simulate": _simulate,
    "fit": _fit,
    "rates": _rates_fit,
    "spectrum": _spectrum,
    "purcell": _purcell,
    "collect": _collect,
    "snr": _snr,
    "mc": _mc,
    "tune": _tune,
}
