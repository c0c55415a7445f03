# app/utils/serialization.py
"""
JSON and CSV formats for tables, masks and reports.

JSON output is deterministic: sorted keys, 2-space indent, trailing newline,
floats with 17 significant digits (format_float). Complex numbers are [re, im]
pairs.

    table: {"p", "N", "M", "side": "group"|"spectral", "values": [[re, im], ...]}
    mask:  {"p", "N", "lambda": [[re, im], ...]}   (k = alpha_0 + alpha_{-1} p + ...)
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel

from app.models.errors import FormatError, VilenkinError
from app.models.functions import Grid, SpectralFunction, StepFunction
from app.models.group import GroupParams
from app.models.masks import Mask
from app.models.reports import AtlasCatalog

logger = logging.getLogger(__name__)

Table = Union[StepFunction, SpectralFunction]


def format_float(x: float) -> str:
    """17 significant digits in a fixed layout, e.g. 1.0000000000000001e-01."""
    if not math.isfinite(x):
        raise FormatError(f"cannot write non-finite value {x!r}")
    return format(float(x), ".16e")


class FixedFloatEncoder(json.JSONEncoder):
    """JSONEncoder writing every float through format_float."""

    def iterencode(self, o: Any, _one_shot: bool = False):
        markers: Optional[Dict[int, Any]] = {} if self.check_circular else None
        encoder = (
            json.encoder.encode_basestring_ascii if self.ensure_ascii else json.encoder.encode_basestring
        )
        indent = self.indent if self.indent is None or isinstance(self.indent, str) else " " * self.indent
        # the C encoder has no float hook
        return json.encoder._make_iterencode(
            markers,
            self.default,
            encoder,
            indent,
            format_float,
            self.key_separator,
            self.item_separator,
            self.sort_keys,
            self.skipkeys,
            _one_shot,
        )(o, 0)


def dumps(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, cls=FixedFloatEncoder) + "\n"


def write_json(path: Path, payload: Any) -> Path:
    path = Path(path)
    path.write_text(dumps(payload), encoding="utf-8")
    logger.debug("wrote %s", path)
    return path


def read_json(path: Path) -> Dict[str, Any]:
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise FormatError(f"{path} is empty")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise FormatError(f"{path} must hold a JSON object")
    return payload


# ---------------------------------------------------------------------------
# complex arrays
# ---------------------------------------------------------------------------
def complex_pairs(values: np.ndarray) -> List[List[float]]:
    return [[float(v.real), float(v.imag)] for v in np.asarray(values, dtype=np.complex128)]


def parse_pairs(raw: Any, what: str) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise FormatError(f"{what} must be a non-empty list of [re, im] pairs")
    try:
        arr = np.array(raw, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{what} holds non-numeric entries") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise FormatError(f"{what} must be a list of [re, im] pairs, got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def _int_field(payload: Dict[str, Any], key: str) -> int:
    value = payload.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"field {key!r} must be an integer, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# tables and masks
# ---------------------------------------------------------------------------
def table_to_dict(table: Table) -> Dict[str, Any]:
    grid = table.grid
    return {
        "p": grid.p,
        "N": grid.N,
        "M": grid.M,
        "side": table.side,
        "values": complex_pairs(table.values),
    }


def table_from_dict(payload: Dict[str, Any]) -> Table:
    """Structural problems raise FormatError; a table that does not fit its grid raises GridError."""
    side = payload.get("side")
    if side not in ("group", "spectral"):
        raise FormatError(f"field 'side' must be 'group' or 'spectral', got {side!r}")
    values = parse_pairs(payload.get("values"), "values")
    grid = Grid(GroupParams(_int_field(payload, "p")), _int_field(payload, "N"), _int_field(payload, "M"))
    cls = StepFunction if side == "group" else SpectralFunction
    return cls(grid, values)


def mask_to_dict(m: Mask) -> Dict[str, Any]:
    return {"p": m.p, "N": m.N, "lambda": complex_pairs(m.values)}


def mask_from_dict(payload: Dict[str, Any], eps: Optional[float] = None) -> Mask:
    values = parse_pairs(payload.get("lambda"), "lambda")
    return Mask(GroupParams(_int_field(payload, "p")), _int_field(payload, "N"), values, eps)


def model_to_dict(model: BaseModel) -> Dict[str, Any]:
    return model.model_dump(mode="json")


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------
def table_to_csv(table: Table) -> str:
    """One row per coset: digit columns a_<pos> (group) or alpha_<pos> (spectral), then re, im."""
    grid = table.grid
    prefix = "a" if table.side == "group" else "alpha"
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([f"{prefix}_{pos}" for pos in grid.positions] + ["re", "im"])
    for digits, value in zip(grid.digits(), table.values):
        writer.writerow([int(d) for d in digits] + [format_float(value.real), format_float(value.imag)])
    return out.getvalue()


def table_from_csv(text: str, p: int, side: str = "group") -> Table:
    rows = list(csv.reader(io.StringIO(text)))
    if len(rows) < 2:
        raise FormatError("CSV table has no data rows")
    header, body = rows[0], rows[1:]
    if header[-2:] != ["re", "im"]:
        raise FormatError("CSV header must end with re, im")
    prefix = "a_" if side == "group" else "alpha_"
    try:
        positions = [int(name[len(prefix):]) for name in header[:-2] if name.startswith(prefix)]
    except ValueError as exc:
        raise FormatError(f"bad digit column in header {header}") from exc
    if len(positions) != len(header) - 2 or (
        positions and positions != list(range(positions[0], positions[0] + len(positions)))
    ):
        raise FormatError(f"digit columns must be consecutive {prefix}<pos> names, got {header[:-2]}")
    try:
        N = -positions[0] if positions else 0
        grid = Grid(GroupParams(p), N, len(positions) - N)
    except VilenkinError as exc:
        raise FormatError(f"CSV columns do not describe a grid: {exc}") from exc
    values = np.zeros(grid.size, dtype=np.complex128)
    seen = np.zeros(grid.size, dtype=bool)
    try:
        for row in body:
            digits = tuple(int(d) for d in row[:-2])
            if any(not 0 <= d < p for d in digits):
                raise FormatError(f"digit outside 0..{p - 1} in row {row}")
            index = grid.index_of(digits)
            values[index] = complex(float(row[-2]), float(row[-1]))
            seen[index] = True
    except (ValueError, VilenkinError) as exc:
        raise FormatError(f"malformed CSV row: {exc}") from exc
    if not seen.all():
        raise FormatError(f"CSV table covers {int(seen.sum())} of {grid.size} cosets")
    cls = StepFunction if side == "group" else SpectralFunction
    return cls(grid, values)


def catalog_to_csv(catalog: AtlasCatalog) -> str:
    p = catalog.summary.p
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        ["index"]
        + [f"row_{a}" for a in range(p)]
        + ["l", "verdict", "mask_valid", "orthonormal_spectral", "orthonormal_direct", "M", "support_min_shell"]
    )
    for e in catalog.entries:
        writer.writerow(
            [e.index, *e.columns, e.l, e.verdict, e.mask_valid, e.orthonormal_spectral,
             e.orthonormal_direct, "" if e.M is None else e.M,
             "" if e.support_min_shell is None else e.support_min_shell]
        )
    return out.getvalue()
