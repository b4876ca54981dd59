"""
CSV serialization of sweep tables.

Layout: a block of `# key = value` metadata lines (tool, table kind,
axes, fixed detuning, every SystemParams field with its unit suffix),
then a header row and the data rows. Floats are written with repr(),
the shortest decimal that round-trips exactly.
"""

import csv
import io
from typing import Dict, List, Tuple, Union

import numpy as np
from pydantic import ValidationError

from processors.errors import CsvSchemaError
from processors.scatter_core import PARAMETER_UNITS, QUANTITIES, SystemParams
from processors.sweep_engine import FIELDS, AxisSpec, GridTable, Provenance, SpectrumTable

GRID_HEADER = ["axis1", "axis2", "value"]

Table = Union[SpectrumTable, GridTable]


def _num(value) -> str:
    return repr(float(value))


def _param_key(name: str) -> str:
    return f"{name}_{PARAMETER_UNITS[name]}"


def _axis_meta(axis: AxisSpec) -> str:
    return f"{axis.name},{_num(axis.start)},{_num(axis.stop)},{axis.count}"


def _metadata(table: Table) -> List[Tuple[str, str]]:
    provenance = table.provenance
    meta = [("tool", f"{provenance.tool} {provenance.version}")]
    if isinstance(table, SpectrumTable):
        meta += [("kind", "spectrum"), ("axis", _axis_meta(table.axis))]
    else:
        meta += [
            ("kind", "grid"),
            ("axis1", _axis_meta(table.axis1)),
            ("axis2", _axis_meta(table.axis2)),
            ("quantity", table.quantity),
        ]
    meta.append(("fixed_delta_GHz", _num(table.delta)))
    for name in FIELDS:
        meta.append((_param_key(name), _num(getattr(table.base, name))))
    if provenance.timestamp:
        meta.append(("generated", provenance.timestamp))
    return meta


def spectrum_header(axis: AxisSpec) -> List[str]:
    return [axis.label, *QUANTITIES]


def write_csv(table: Table) -> bytes:
    """Serialize a SpectrumTable or GridTable to CSV bytes (LF line endings)"""
    buffer = io.StringIO()
    for key, value in _metadata(table):
        buffer.write(f"# {key} = {value}\n")

    writer = csv.writer(buffer, lineterminator="\n")
    if isinstance(table, SpectrumTable):
        writer.writerow(spectrum_header(table.axis))
        columns = [table.columns[name] for name in QUANTITIES]
        for i, x in enumerate(table.values):
            writer.writerow([_num(x), *(_num(column[i]) for column in columns)])
    else:
        writer.writerow(GRID_HEADER)
        v1 = table.axis1.values()
        v2 = table.axis2.values()
        for i, x in enumerate(v1):
            for j, y in enumerate(v2):
                writer.writerow([_num(x), _num(y), _num(table.data[i, j])])
    return buffer.getvalue().encode("utf-8")


def _parse_axis(value: str, key: str) -> AxisSpec:
    parts = [part.strip() for part in value.split(",")]
    if len(parts) != 4:
        raise CsvSchemaError(f"Metadata '{key}' must be name,start,stop,count; got '{value}'")
    name, start, stop, count = parts
    try:
        return AxisSpec(name=name, start=start, stop=stop, count=int(count))
    except (ValidationError, ValueError) as e:
        raise CsvSchemaError(f"Metadata '{key}' is not a valid axis: {e}")


def _split(data: bytes) -> Tuple[Dict[str, str], List[List[str]]]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CsvSchemaError(f"CSV is not UTF-8: {e}")

    meta: Dict[str, str] = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep:
                meta[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    rows = list(csv.reader(body))
    if not rows:
        raise CsvSchemaError("CSV has no header row")
    return meta, rows


def _require(meta: Dict[str, str], key: str) -> str:
    if key not in meta:
        raise CsvSchemaError(f"CSV metadata is missing '{key}'")
    return meta[key]


def _float(text: str, row: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise CsvSchemaError(f"Row {row}: '{text}' is not a number")
    if not np.isfinite(value):
        raise CsvSchemaError(f"Row {row}: non-finite value '{text}'")
    return value


def _read_rows(rows: List[List[str]], width: int) -> np.ndarray:
    values = []
    for index, row in enumerate(rows, start=1):
        if len(row) != width:
            raise CsvSchemaError(f"Row {index}: expected {width} fields, got {len(row)}")
        values.append([_float(cell, index) for cell in row])
    return np.array(values, dtype=float).reshape(len(values), width)


def _provenance(meta: Dict[str, str]) -> Provenance:
    tool, _, version = _require(meta, "tool").partition(" ")
    return Provenance(tool=tool, version=version, timestamp=meta.get("generated"))


def read_csv(data: bytes) -> Table:
    """Parse bytes written by write_csv back into a table"""
    meta, rows = _split(data)
    header, body = rows[0], rows[1:]

    try:
        base = SystemParams(**{name: _require(meta, _param_key(name)) for name in FIELDS})
    except ValidationError as e:
        raise CsvSchemaError(f"CSV metadata holds invalid parameters: {e}")
    delta = _float(meta.get("fixed_delta_GHz", "0.0"), 0)
    kind = _require(meta, "kind")

    if kind == "spectrum":
        axis = _parse_axis(_require(meta, "axis"), "axis")
        expected = spectrum_header(axis)
        if header != expected:
            raise CsvSchemaError(f"Unexpected header {','.join(header)}; expected {','.join(expected)}")
        values = _read_rows(body, len(expected))
        if len(values) != axis.count:
            raise CsvSchemaError(f"Expected {axis.count} data rows, got {len(values)}")
        columns = {name: values[:, i + 1].copy() for i, name in enumerate(QUANTITIES)}
        return SpectrumTable(
            axis=axis, values=values[:, 0].copy(), columns=columns,
            base=base, delta=delta, provenance=_provenance(meta),
        )

    if kind == "grid":
        axis1 = _parse_axis(_require(meta, "axis1"), "axis1")
        axis2 = _parse_axis(_require(meta, "axis2"), "axis2")
        quantity = _require(meta, "quantity")
        if quantity not in QUANTITIES:
            raise CsvSchemaError(f"Unknown quantity '{quantity}'")
        if header != GRID_HEADER:
            raise CsvSchemaError(f"Unexpected header {','.join(header)}; expected {','.join(GRID_HEADER)}")
        values = _read_rows(body, len(GRID_HEADER))
        if len(values) != axis1.count * axis2.count:
            raise CsvSchemaError(
                f"Expected {axis1.count * axis2.count} data rows, got {len(values)}"
            )
        return GridTable(
            axis1=axis1, axis2=axis2, quantity=quantity,
            data=values[:, 2].reshape(axis1.count, axis2.count).copy(),
            base=base, delta=delta, provenance=_provenance(meta),
        )

    raise CsvSchemaError(f"Unknown table kind '{kind}'")


def read_table(path: str) -> Table:
    with open(path, "rb") as f:
        return read_csv(f.read())
