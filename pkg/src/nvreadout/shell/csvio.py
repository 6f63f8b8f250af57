"""CSV readers and writers for traces, spectra, efficiency tables and saturation data.

All files are UTF-8 with LF line endings, optional leading ``#`` comment
lines, a mandatory header row and ``.`` as decimal separator. Numbers are
written with up to 9 significant digits, so ``save(load(f))`` reproduces a
file written by this module byte for byte.
"""

import math
from pathlib import Path

import numpy as np

from ..collection import EfficiencyTable
from ..errors import InvariantViolation, ParseError
from ..series import Spectrum, TimeTrace

TRACE_HEADER = ("time_ns", "signal")
SPECTRUM_HEADERS = {
    ("wavelength_nm", "intensity"): "nm",
    ("frequency_ghz", "intensity"): "GHz",
}
SPECTRUM_HEADER_BY_UNIT = {unit: header for header, unit in SPECTRUM_HEADERS.items()}
EFFICIENCY_HEADER = ("wavelength_nm", "eps_x", "eps_y", "eps_z")
SATURATION_HEADER = ("power_mw", "counts_khz")


def format_number(value):
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"cannot write non-finite value {value}")
    text = format(value, ".9g")
    return "0" if text == "-0" else text


def _read_text(source):
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return fh.read()
    return source.read()


def parse_table(text, expected_headers):
    """Split CSV ``text`` into comments, header and a float matrix.

    ``expected_headers`` is a collection of allowed header tuples. Returns
    ``(comments, header, data, first_data_line)``.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    comments = []
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        comments.append(lines[i])
        i += 1
    if i >= len(lines):
        raise ParseError("missing header row", line=i + 1)
    header = tuple(h.strip() for h in lines[i].rstrip("\r").split(","))
    if header not in expected_headers:
        allowed = " or ".join(",".join(h) for h in expected_headers)
        raise ParseError(f"header {','.join(header)!r} does not match {allowed}", line=i + 1)
    header_line = i + 1
    rows = []
    for j, raw in enumerate(lines[i + 1:], start=header_line + 1):
        raw = raw.rstrip("\r")
        fields = raw.split(",")
        if len(fields) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(fields)}", line=j)
        try:
            rows.append([_parse_float(f) for f in fields])
        except ValueError as exc:
            raise ParseError(str(exc), line=j) from None
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return tuple(comments), header, data, header_line + 1


def _parse_float(field):
    text = field.strip()
    if not text or "_" in text:
        raise ValueError(f"not a number: {field!r}")
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"non-finite number: {field!r}")
    return value


def _rethrow_with_line(exc, first_data_line):
    if exc.row is not None:
        line = first_data_line + exc.row
        raise InvariantViolation(
            f"line {line}: {exc}", field=exc.field, row=exc.row
        ) from None
    raise exc


def load_trace(source):
    comments, _, data, first = parse_table(_read_text(source), [TRACE_HEADER])
    try:
        return TimeTrace(data[:, 0], data[:, 1], comments)
    except InvariantViolation as exc:
        _rethrow_with_line(exc, first)


def load_spectrum(source):
    comments, header, data, first = parse_table(_read_text(source), list(SPECTRUM_HEADERS))
    try:
        return Spectrum(data[:, 0], data[:, 1], SPECTRUM_HEADERS[header], comments)
    except InvariantViolation as exc:
        _rethrow_with_line(exc, first)


def load_efficiency_table(source):
    comments, _, data, first = parse_table(_read_text(source), [EFFICIENCY_HEADER])
    try:
        return EfficiencyTable(data[:, 0], data[:, 1], data[:, 2], data[:, 3], comments)
    except InvariantViolation as exc:
        _rethrow_with_line(exc, first)


def load_saturation(source):
    """Power (mW) and detected rate (kHz) columns as two arrays plus comments."""
    comments, _, data, first = parse_table(_read_text(source), [SATURATION_HEADER])
    power, counts = data[:, 0], data[:, 1]
    bad = np.flatnonzero(power <= 0)
    if bad.size:
        raise InvariantViolation(
            f"line {first + bad[0]}: power must be > 0", field="power_mw", row=int(bad[0])
        )
    return power, counts, comments


def format_table(header, columns, comments=()):
    out = [c if c.startswith("#") else f"# {c}" for c in comments]
    out.append(",".join(header))
    for row in zip(*columns):
        out.append(",".join(format_number(v) for v in row))
    return "\n".join(out) + "\n"


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def trace_to_csv(trace, comments=None):
    comments = trace.comments if comments is None else comments
    return format_table(TRACE_HEADER, [trace.times, trace.values], comments)


def spectrum_to_csv(spectrum, comments=None):
    comments = spectrum.comments if comments is None else comments
    header = SPECTRUM_HEADER_BY_UNIT[spectrum.unit]
    return format_table(header, [spectrum.abscissa, spectrum.intensity], comments)


def efficiency_table_to_csv(table, comments=None):
    comments = table.comments if comments is None else comments
    return format_table(
        EFFICIENCY_HEADER, [table.wavelength, table.eps_x, table.eps_y, table.eps_z], comments
    )


def saturation_to_csv(power, counts, comments=()):
    return format_table(SATURATION_HEADER, [power, counts], comments)


def save_trace(trace, path, comments=None):
    _write(path, trace_to_csv(trace, comments))


def save_spectrum(spectrum, path, comments=None):
    _write(path, spectrum_to_csv(spectrum, comments))


def save_efficiency_table(table, path, comments=None):
    _write(path, efficiency_table_to_csv(table, comments))


def save_saturation(power, counts, path, comments=()):
    _write(path, saturation_to_csv(power, counts, comments))
