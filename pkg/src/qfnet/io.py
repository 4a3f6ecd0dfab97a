"""Tuning-curve CSV ingestion.

Expected header: ``neuron_id,x,y,z,r0,...,r{s-1}`` with s >= 2; every row
must carry the same number of responses.  Errors name the offending line.
"""

from __future__ import annotations

from .curveprep import TuningCurve
from .errors import DataFormatError


def parse_curves_csv(text: str) -> list[TuningCurve]:
    lines = text.splitlines()
    rows = [
        (lineno, line)
        for lineno, line in enumerate(lines, start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not rows:
        raise DataFormatError("empty curve CSV")
    header_no, header = rows[0]
    cols = [c.strip() for c in header.split(",")]
    if cols[:4] != ["neuron_id", "x", "y", "z"]:
        raise DataFormatError(
            f"line {header_no}: header must start with neuron_id,x,y,z"
        )
    expected = [f"r{i}" for i in range(len(cols) - 4)]
    if len(expected) < 2 or cols[4:] != expected:
        raise DataFormatError(
            f"line {header_no}: response columns must be r0,...,r{{s-1}} with s >= 2"
        )
    s = len(expected)

    curves = []
    for lineno, line in rows[1:]:
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 4 + s:
            raise DataFormatError(
                f"line {lineno}: expected {4 + s} fields, got {len(cells)}"
            )
        neuron_id = cells[0]
        if not neuron_id:
            raise DataFormatError(f"line {lineno}: empty neuron_id")
        try:
            position = tuple(float(c) for c in cells[1:4])
            responses = [float(c) for c in cells[4:]]
        except ValueError as exc:
            raise DataFormatError(f"line {lineno}: {exc}") from exc
        try:
            curves.append(TuningCurve(neuron_id, position, responses))
        except ValueError as exc:
            raise DataFormatError(f"line {lineno}: {exc}") from exc
    if not curves:
        raise DataFormatError("curve CSV has a header but no data rows")
    return curves


def ingest_csv(path) -> list[TuningCurve]:
    """Read and parse a curve CSV file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_curves_csv(fh.read())
