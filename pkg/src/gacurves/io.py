"""Serialization: CSV tables, JSON reports and SVG figures.

Numbers are written with 17 significant digits so that CSV and JSON
files round-trip exactly; SVG coordinates use 6 digits.  JSON reports
can be checked against the schemas shipped in ``gacurves/schemas``
(validation needs the optional :mod:`jsonschema` package).

Relative output paths are resolved against the directory named by the
``GACURVES_OUTPUT_DIR`` environment variable when it is set.
"""

from __future__ import annotations

import json
import math
import os
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .curves import format_number
from .errors import GACurveError, UsageError

__all__ = [
    "OUTPUT_DIR_ENV",
    "SCHEMAS",
    "to_jsonable",
    "dumps",
    "records_csv",
    "table_csv",
    "emit_svg",
    "project_3d",
    "load_schema",
    "validate",
    "resolve_output",
    "write_text",
    "error_report",
]

OUTPUT_DIR_ENV = "GACURVES_OUTPUT_DIR"

#: schema file per report type
SCHEMAS = {
    "invariants": "invariants.schema.json",
    "reconstruction": "reconstruction.schema.json",
    "residual": "residual.schema.json",
    "classification": "classification.schema.json",
    "catalog": "catalog.schema.json",
    "abel": "abel.schema.json",
    "error": "error.schema.json",
}


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats for JSON.

    ``nan`` becomes ``None``; infinities become the strings ``"inf"`` and
    ``"-inf"``.
    """
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def dumps(obj: Any, indent: int | None = 2) -> str:
    """JSON text with round-trip float formatting (``repr`` gives 17 digits when needed)."""
    return json.dumps(to_jsonable(obj), indent=indent, allow_nan=False) + "\n"


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_number(float(v))
    if isinstance(v, (list, tuple)):
        return ";".join(str(x) for x in v)
    return str(v)


def table_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV text from a header and rows of cells."""
    lines = [",".join(header)]
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def records_csv(records: Sequence[Any], fields: Sequence[str]) -> str:
    """CSV of invariant records (anything with ``as_dict``)."""
    return table_csv(fields, ([r.as_dict().get(f) for f in fields] for r in records))


# ----------------------------------------------------------------------
# SVG
def project_3d(points: np.ndarray, azimuth: float = 30.0, elevation: float = 20.0) -> np.ndarray:
    """Orthographic projection of 3D points onto the view plane (angles in degrees)."""
    az, el = math.radians(azimuth), math.radians(elevation)
    right = np.array([math.cos(az), math.sin(az), 0.0])
    up = np.array([-math.sin(el) * math.sin(az), math.sin(el) * math.cos(az), math.cos(el)])
    P = np.asarray(points, dtype=float)
    return np.column_stack([P @ right, P @ up])


_EVENT_STYLE = {
    "inflection": ("#d62728", 4.0),
    "flat": ("#1f77b4", 4.0),
    "vertex": ("#2ca02c", 4.0),
}


def emit_svg(
    points: np.ndarray,
    events: Sequence[tuple[float, float, str]] = (),
    *,
    width: int = 480,
    height: int = 480,
    margin: int = 20,
    view: tuple[float, float] = (30.0, 20.0),
    dotted: Sequence[tuple[int, int]] = (),
    title: str | None = None,
) -> str:
    """Standalone SVG 1.1 drawing of a polyline with event marks.

    Parameters
    ----------
    points : array, shape (n, 2) or (n, 3)
        Curve samples; 3D samples are projected orthographically with
        ``view = (azimuth, elevation)``.
    events : sequence of (x, y, kind)
        Marked points (already in curve coordinates, projected if 3D).
        ``kind`` selects the color; inflections, flat points and vertices
        have their own styles.
    dotted : sequence of (i0, i1)
        Index ranges of the polyline to draw dotted, for example the part
        of a curve where ``eps`` differs.

    Raises
    ------
    UsageError
        If there are no finite points.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[0] == 0:
        raise UsageError("cannot draw an empty sample set")
    if P.shape[1] == 3:
        P = project_3d(P, *view)
    elif P.shape[1] != 2:
        raise UsageError("points must have 2 or 3 columns")
    ok = np.all(np.isfinite(P), axis=1)
    if not np.any(ok):
        raise UsageError("cannot draw an empty sample set")
    ev = np.array([[e[0], e[1]] for e in events], dtype=float).reshape(-1, 2)
    allpts = np.vstack([P[ok], ev]) if ev.size else P[ok]
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = max(float(np.max(hi - lo)), 1e-12)
    scale = min(width, height) - 2 * margin
    scale /= span

    def xy(p):
        return (margin + (p[0] - lo[0]) * scale, height - margin - (p[1] - lo[1]) * scale)

    def fmt(v):
        return f"{v:.6g}"

    def polyline(idx, extra=""):
        pts = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in (xy(P[i]) for i in idx if ok[i]))
        return f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1.5"{extra}/>'

    mask = np.zeros(len(P), dtype=bool)
    for i0, i1 in dotted:
        mask[max(i0, 0):min(i1 + 1, len(P))] = True
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]
    if title:
        out.append(f"<title>{_escape(title)}</title>")
    # split the polyline into solid and dotted runs (runs share endpoints)
    runs: list[tuple[bool, list[int]]] = []
    for i in range(len(P)):
        if runs and runs[-1][0] == mask[i]:
            runs[-1][1].append(i)
        else:
            if runs:
                runs[-1][1].append(i)
            runs.append((bool(mask[i]), [i]))
    for is_dotted, idx in runs:
        if len(idx) >= 2:
            out.append(polyline(idx, ' stroke-dasharray="2,3"' if is_dotted else ""))
    for x, y, kind in events:
        color, r = _EVENT_STYLE.get(kind, ("#7f7f7f", 3.0))
        cx, cy = xy((x, y))
        out.append(f'<circle cx="{fmt(cx)}" cy="{fmt(cy)}" r="{r}" fill="{color}"><title>{_escape(kind)}</title></circle>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


# ----------------------------------------------------------------------
# schemas
def load_schema(name: str) -> dict:
    """Load a shipped schema by report type (see :data:`SCHEMAS`)."""
    try:
        fname = SCHEMAS[name]
    except KeyError:
        raise UsageError(f"unknown schema {name!r}") from None
    text = resources.files("gacurves").joinpath("schemas", fname).read_text()
    return json.loads(text)


def validate(obj: Any, name: str) -> None:
    """Validate a report against its schema.

    Raises
    ------
    jsonschema.ValidationError
        If the report does not conform.
    UsageError
        If :mod:`jsonschema` is not installed.
    """
    try:
        import jsonschema
    except ImportError as exc:  # pragma: no cover - optional dependency
        raise UsageError("schema validation needs the jsonschema package") from exc
    jsonschema.validate(to_jsonable(obj), load_schema(name))


# ----------------------------------------------------------------------
# files
def resolve_output(path: "str | Path") -> Path:
    """Apply ``GACURVES_OUTPUT_DIR`` to relative paths."""
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def write_text(text: str, path: "str | Path | None") -> Path | None:
    """Write ``text`` to ``path`` (after :func:`resolve_output`), or return ``None``."""
    if path is None or str(path) == "-":
        return None
    p = resolve_output(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)
    return p


def error_report(exc: BaseException, command: str | None = None) -> dict:
    """JSON-ready description of a failure."""
    out: dict[str, Any] = {
        "error": getattr(exc, "kind", type(exc).__name__),
        "type": type(exc).__name__,
        "message": str(exc),
    }
    if command:
        out["command"] = command
    for attr in ("position", "x"):
        v = getattr(exc, attr, None)
        if v is not None:
            out[attr] = v
    return out
