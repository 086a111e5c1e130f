from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from typing import Any, Iterable, Iterator

import numpy as np
import pandas as pd

from benchmark.exceptions import InvalidParameterError
from benchmark.graphs import Dag, node_labels
from benchmark.simulation import Dataset, Provenance, Scale

logger = logging.getLogger(__name__)

EDGE_COLUMNS = ["source", "target", "weight"]
TAIL_CHUNK = 4096


def _label_index(label: str) -> int:
    if not label.startswith("X") or not label[1:].isdigit():
        raise InvalidParameterError(f"Bad node label {label!r}.")
    return int(label[1:]) - 1


def write_graph_csv(weights: np.ndarray | Dag, path: Path | str) -> Path:
    """Edge list ``source,target,weight``; weight 1.0 for binary graphs."""
    matrix = (
        weights.adj.astype(float) if isinstance(weights, Dag)
        else np.asarray(weights, dtype=float)
    )
    labels = node_labels(matrix.shape[0])
    rows = [
        (labels[i], labels[j], float(matrix[i, j]))
        for i, j in zip(*np.nonzero(matrix))
    ]
    path = Path(path)
    pd.DataFrame(rows, columns=EDGE_COLUMNS).to_csv(path, index=False)
    return path


def read_graph_csv(path: Path | str, d: int) -> tuple[Dag, np.ndarray]:
    frame = pd.read_csv(path)
    missing = set(EDGE_COLUMNS) - set(frame.columns)
    if missing:
        raise InvalidParameterError(f"{path} lacks columns {sorted(missing)}.")
    weights = np.zeros((d, d))
    for row in frame.itertuples(index=False):
        source, target = _label_index(row.source), _label_index(row.target)
        if source >= d or target >= d:
            raise InvalidParameterError(
                f"Edge {row.source}->{row.target} outside {d} nodes."
            )
        weights[source, target] = row.weight
    return Dag(weights != 0), weights


def write_adjacency_csv(matrix: np.ndarray | Dag, path: Path | str) -> Path:
    matrix = matrix.adj.astype(int) if isinstance(matrix, Dag) else matrix
    labels = node_labels(np.shape(matrix)[0])
    path = Path(path)
    pd.DataFrame(matrix, index=labels, columns=labels).to_csv(path)
    return path


def read_adjacency_csv(path: Path | str) -> np.ndarray:
    return pd.read_csv(path, index_col=0).to_numpy(dtype=float)


def sidecar_path(path: Path | str) -> Path:
    return Path(path).with_suffix(".json")


def write_dataset(
    dataset: Dataset,
    path: Path | str,
    metadata: dict[str, Any] | None = None,
) -> Path:
    """Dataset CSV plus a JSON sidecar with provenance and metadata."""
    path = Path(path)
    dataset.to_frame().to_csv(path, index=False)
    sidecar = {
        "n": dataset.n,
        "d": dataset.d,
        "scale": dataset.scale.value,
        "provenance": vars(dataset.provenance),
        **(metadata or {}),
    }
    sidecar_path(path).write_text(
        json.dumps(sidecar, indent=2, sort_keys=True)
    )
    return path


def read_dataset(path: Path | str) -> Dataset:
    path = Path(path)
    frame = pd.read_csv(path)
    expected = node_labels(frame.shape[1])
    if list(frame.columns) != expected:
        raise InvalidParameterError(
            f"{path} header must be {expected[:3]}..., got "
            f"{list(frame.columns)[:3]}..."
        )
    scale, provenance = Scale.ORIGINAL, Provenance()
    meta_file = sidecar_path(path)
    if meta_file.exists():
        meta = json.loads(meta_file.read_text())
        scale = Scale(meta.get("scale", scale))
        provenance = Provenance(**meta.get("provenance", {}))
    return Dataset(frame.to_numpy(dtype=float), scale, provenance)


def read_metadata(path: Path | str) -> dict[str, Any]:
    meta_file = sidecar_path(path)
    return json.loads(meta_file.read_text()) if meta_file.exists() else {}


class RecordStore:
    """Append-only JSON-lines file of run records.

    Every record is written as one line and flushed to disk before the next
    one. A line cut short by a crash is skipped on reading and removed by
    the next append.
    """

    def __init__(self, path: Path | str) -> None:
        self.path = Path(path)

    def __iter__(self) -> Iterator[dict[str, Any]]:
        if not self.path.exists():
            return
        with self.path.open(encoding="utf-8") as handle:
            for number, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    yield json.loads(line)
                except json.JSONDecodeError:
                    logger.warning(
                        "Ignoring truncated line %d in %s", number, self.path
                    )

    def completed_keys(self) -> set[tuple[int, int, str]]:
        return {
            (row["cell_id"], row["replicate"], row["model"]) for row in self
        }

    def _drop_partial_tail(self) -> None:
        """Cut the unterminated last line of an interrupted write."""
        if not self.path.exists():
            return
        with self.path.open("rb+") as handle:
            end = handle.seek(0, os.SEEK_END)
            if end == 0:
                return
            handle.seek(end - 1)
            if handle.read(1) == b"\n":
                return
            keep = 0
            position = end
            while position > 0:
                start = max(0, position - TAIL_CHUNK)
                handle.seek(start)
                newline = handle.read(position - start).rfind(b"\n")
                if newline >= 0:
                    keep = start + newline + 1
                    break
                position = start
            logger.warning(
                "Dropping %d bytes of an unterminated record from %s",
                end - keep, self.path,
            )
            handle.truncate(keep)

    def append(self, records: Iterable[dict[str, Any]]) -> int:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._drop_partial_tail()
        written = 0
        with self.path.open("a", encoding="utf-8") as handle:
            for record in records:
                handle.write(json.dumps(record, sort_keys=True) + "\n")
                handle.flush()
                os.fsync(handle.fileno())
                written += 1
        return written
