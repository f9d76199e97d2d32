"""File formats: edge lists, vertex lists, outcome/type CSVs and reports.

Edge list: UTF-8, one edge per line, two tokens separated by whitespace or a
comma; blank lines and lines starting with ``#`` are skipped. Vertex list:
one label per line, declaring vertices that may have no edges. Outcome and
type files are CSVs with a header row and columns ``(node_label, value)`` or
``(node_label, type_label)``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import re
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import AlignmentError, ParseError
from .graph import Graph, build_graph, degree_stats
from .permutation import InferenceResult

log = logging.getLogger(__name__)

RESULT_SCHEMA_VERSION = 1
RESULT_CSV_COLUMNS = ("c_hat", "ci_lower", "ci_upper", "p_value", "alpha", "B", "seed")
_SPLIT = re.compile(r"[,\s]+")


def _lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if line and not line.startswith("#"):
                yield lineno, line


def read_edge_list(path) -> list[tuple[str, str]]:
    pairs = []
    for lineno, line in _lines(path):
        tokens = [t for t in _SPLIT.split(line) if t]
        if len(tokens) != 2:
            raise ParseError(f"expected two vertex labels, got {len(tokens)}", path, lineno)
        pairs.append((tokens[0], tokens[1]))
    return pairs


def read_vertex_list(path) -> list[str]:
    return [line for _, line in _lines(path)]


def load_graph(path, vertices_path=None, validate: bool = True) -> Graph:
    pairs = read_edge_list(path)
    vertices = read_vertex_list(vertices_path) if vertices_path else None
    g, dups = build_graph(pairs, vertices, return_duplicates=True, validate=validate)
    if dups:
        log.info("%s: collapsed %d duplicate edge line(s)", path, dups)
    return g


def _read_label_csv(path, what):
    rows = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError("empty file; expected a header row", path, 1)
        for lineno, row in enumerate(reader, 2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 columns (node_label, {what}), got {len(row)}", path, lineno)
            label, value = row[0].strip(), row[1].strip()
            if label in rows:
                raise ParseError(f"duplicate row for vertex {label!r}", path, lineno)
            rows[label] = (lineno, value)
    return rows


def _align(g: Graph, rows: dict, path):
    known = set(g.labels)
    extra = [lab for lab in rows if lab not in known]
    if extra:
        raise AlignmentError(f"{path}: rows for labels not in the graph", extra)
    missing = [lab for lab in g.labels if lab not in rows]
    if missing:
        raise AlignmentError(f"{path}: graph vertices with no row", missing)
    return [rows[lab] for lab in g.labels]


def read_outcomes(path, g: Graph) -> np.ndarray:
    rows = _read_label_csv(path, "value")
    values = []
    for lineno, raw in _align(g, rows, path):
        try:
            v = float(raw)
        except ValueError:
            raise ParseError(f"outcome {raw!r} is not a number", path, lineno) from None
        if not math.isfinite(v):
            raise ParseError(f"outcome {raw!r} is not finite", path, lineno)
        values.append(v)
    return np.array(values)


def read_types(path, g: Graph) -> list[str]:
    rows = _read_label_csv(path, "type_label")
    return [raw for _, raw in _align(g, rows, path)]


@dataclass
class Dataset:
    graph: Graph
    outcomes: np.ndarray | None = None
    types: list | None = None

    @property
    def label_map(self) -> dict:
        return {lab: i for i, lab in enumerate(self.graph.labels)}


def load_dataset(graph_path, outcome_path=None, vertices_path=None, types_path=None) -> Dataset:
    """Read a graph and align outcome and/or type files to its vertices."""
    g = load_graph(graph_path, vertices_path)
    ds = Dataset(g)
    if outcome_path:
        ds.outcomes = read_outcomes(outcome_path, g)
    if types_path:
        ds.types = read_types(types_path, g)
    s = degree_stats(g)
    log.info("loaded graph: n=%d |E|=%d d_av=%.4f d_mx=%d", s.n, s.n_edges, s.d_av, s.d_mx)
    return ds


def write_edge_list(g: Graph, path, vertices_path=None):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# n={g.n} edges={g.n_edges}\n")
        for i, j in g.edges.tolist():
            fh.write(f"{g.labels[i]} {g.labels[j]}\n")
    if vertices_path:
        with open(vertices_path, "w", encoding="utf-8", newline="\n") as fh:
            for lab in g.labels:
                fh.write(f"{lab}\n")


def write_outcomes(g: Graph, y, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node_label", "value"])
        for lab, v in zip(g.labels, y):
            w.writerow([lab, repr(float(v))])


# reports ---------------------------------------------------------------


def _plain(obj):
    """JSON-ready copy with numpy scalars/arrays converted and NaN as null."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def result_to_dict(result) -> dict:
    if isinstance(result, InferenceResult):
        d = asdict(result)
        d["B"] = d.pop("n_permutations")
        d["kind"] = "inference_result"
        d["schema_version"] = RESULT_SCHEMA_VERSION
        return _plain(d)
    if hasattr(result, "to_dict"):
        d = result.to_dict()
    elif isinstance(result, dict):
        d = dict(result)
    else:
        d = asdict(result)
    return _plain(d)


def to_json(result) -> str:
    return json.dumps(result_to_dict(result), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return str(v)


def _flatten(d: dict, prefix="") -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, dict):
            out.update(_flatten(v, f"{prefix}{k}."))
        else:
            out[prefix + k] = v
    return out


def to_csv(results) -> str:
    """CSV text with a header and one row per result."""
    if not isinstance(results, (list, tuple)):
        results = [results]
    rows = []
    for r in results:
        d = result_to_dict(r)
        d.pop("per_replication", None)
        rows.append(_flatten(d))
    columns = [c for c in RESULT_CSV_COLUMNS if c in rows[0]]
    columns += sorted(c for c in rows[0] if c not in columns)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_csv_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def emit_report(result, fmt: str = "json", path=None) -> str:
    """Serialize ``result`` (or a list of results) as JSON or CSV.

    Output is byte-stable for equal inputs. Writes to ``path`` when given and
    returns the text either way.
    """
    if fmt == "json":
        if isinstance(result, (list, tuple)):
            text = json.dumps(
                [result_to_dict(r) for r in result], indent=2, sort_keys=True, allow_nan=False
            ) + "\n"
        else:
            text = to_json(result)
    elif fmt == "csv":
        text = to_csv(result)
    else:
        raise ValueError(f"format must be 'json' or 'csv', got {fmt!r}")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def load_schema(name: str) -> dict:
    ref = resources.files("graph_concordance") / "schemas" / f"{name}.schema.json"
    return json.loads(ref.read_text(encoding="utf-8"))
