"""Result tables and CSV emission with provenance metadata.

Every experiment produces a ResultTable: a metadata header (config echo,
generator name, seed, code version, config hash) followed by rows of
named real columns.  The CSV payload is byte-reproducible for a fixed
(config, seed); only the timestamp line varies between runs.
"""

from __future__ import annotations

import csv
import io
import os
import time
from dataclasses import dataclass, field

TIMESTAMP_KEY = "timestamp"


def format_value(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (int,)):
        return str(x)
    if isinstance(x, float):
        if x == int(x) and abs(x) < 1e15:
            return str(int(x))
        return format(x, ".12g")
    return str(x)


@dataclass
class ResultTable:
    metadata: dict[str, str]
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)

    def add_row(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(
                f"row has {len(values)} values for {len(self.columns)} columns"
            )
        self.rows.append(tuple(values))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_csv_text(self, timestamp: bool = True) -> str:
        buf = io.StringIO()
        for key, value in self.metadata.items():
            buf.write(f"# {key}: {value}\n")
        if timestamp:
            stamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
            buf.write(f"# {TIMESTAMP_KEY}: {stamp}\n")
        writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(v) for v in row])
        return buf.getvalue()

    def write_csv(self, path: str) -> None:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv_text())


def csv_payload(text: str) -> str:
    """CSV text minus the timestamp line, the byte-reproducible part."""
    lines = [
        ln for ln in text.splitlines(keepends=True)
        if not ln.startswith(f"# {TIMESTAMP_KEY}:")
    ]
    return "".join(lines)


def read_metadata(path: str) -> dict[str, str]:
    meta = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("# "):
                break
            key, _, value = line[2:].partition(": ")
            meta[key.strip()] = value.strip()
    return meta
