"""Deterministic reports: every entry is a quantity, value, unit and source."""

import math
from dataclasses import dataclass, field
from pathlib import Path

from .csvio import format_number

DIMENSIONLESS = "dimensionless"
SOURCES = ("config", "default", "cli", "derived")


@dataclass(frozen=True)
class Entry:
    quantity: str
    value: object
    unit: str
    source: str

    def __post_init__(self):
        if not self.unit:
            raise ValueError(f"{self.quantity}: every entry needs a unit or '{DIMENSIONLESS}'")
        if self.source not in SOURCES:
            raise ValueError(f"{self.quantity}: unknown source {self.source!r}")

    def value_text(self):
        v = self.value
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, int):
            return str(v)
        if isinstance(v, float):
            if math.isnan(v):
                return "nan"
            if math.isinf(v):
                return "inf" if v > 0 else "-inf"
            return format_number(v)
        return str(v)


@dataclass
class Report:
    """Ordered report entries plus any CSV artifacts keyed by file name."""

    command: str
    entries: list = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)

    def add(self, quantity, value, unit=DIMENSIONLESS, source="derived"):
        self.entries.append(Entry(quantity, value, unit, source))

    def value(self, quantity):
        for e in self.entries:
            if e.quantity == quantity:
                return e.value
        raise KeyError(quantity)

    def to_csv(self):
        lines = ["quantity,value,unit,source"]
        for e in self.entries:
            lines.append(",".join(_csv_field(f) for f in
                                  (e.quantity, e.value_text(), e.unit, e.source)))
        return "\n".join(lines) + "\n"

    def to_text(self):
        rows = [(e.quantity, e.value_text(), e.unit, e.source) for e in self.entries]
        wq = max([len("quantity")] + [len(r[0]) for r in rows])
        wv = max([len("value")] + [len(r[1]) for r in rows])
        wu = max([len("unit")] + [len(r[2]) for r in rows])
        out = [f"# {self.command}",
               f"{'quantity':<{wq}}  {'value':>{wv}}  {'unit':<{wu}}  source"]
        for q, v, u, s in rows:
            out.append(f"{q:<{wq}}  {v:>{wv}}  {u:<{wu}}  {s}")
        return "\n".join(out) + "\n"

    def render(self, fmt="text"):
        if fmt == "csv":
            return self.to_csv()
        if fmt == "text":
            return self.to_text()
        raise ValueError(f"unknown report format {fmt!r}")

    def write(self, directory, fmt="text"):
        """Write ``report.{txt,csv}`` and all artifacts; returns the written paths."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        name = "report.csv" if fmt == "csv" else "report.txt"
        written = []
        for fname, text in [(name, self.render(fmt))] + sorted(self.artifacts.items()):
            path = directory / fname
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            written.append(path)
        return written


def _csv_field(text):
    if any(c in text for c in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text
