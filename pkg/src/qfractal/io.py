"""File formats: atomic writes, graph JSON, CSV tables."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterable, List, Sequence

from .errors import InvalidInput
from .graphs import WeightedGraph

MOMENT_COLUMNS = ["level", "order_or_word", "graph_value", "ifs_value", "abs_error"]
CONVERGENCE_COLUMNS = ["level", "n_vertices", "kappa", "key", "graph_value",
                       "limit_value", "abs_error", "increment"]


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_text(columns: Sequence[str], rows: Iterable[Dict[str, object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c, "")) for c in columns])
    return buf.getvalue()


def read_csv(path) -> List[Dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def save_graph(g: WeightedGraph, path) -> None:
    atomic_write(path, g.to_json() + "\n")


def load_graph(path) -> WeightedGraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read graph file {path}: {exc}") from exc
    return WeightedGraph.from_json(text)


def load_json(path) -> Dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc}") from exc


def dump_json(data, path=None) -> str:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path is not None:
        atomic_write(path, text)
    return text
