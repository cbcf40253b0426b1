"""Deterministic CSV output: header row, shortest round-trip floats, LF endings."""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from .errors import SampleFileError

logger = logging.getLogger(__name__)

Cell = Union[int, float, str, np.integer, np.floating]


def format_cell(value: Cell) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
            writer.writerow([format_cell(c) for c in row])
            count += 1
    logger.debug("wrote %d rows to %s", count, path)
    return path


def read_csv(path: Union[str, Path]) -> Tuple[List[str], np.ndarray]:
    """Header and float table of a file written by ``write_csv``."""
    path = Path(path)
    if not path.exists():
        raise SampleFileError(path, "file does not exist")
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SampleFileError(path, "empty file", line=1)
        rows = []
        for row in reader:
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise SampleFileError(path, f"non-numeric value ({exc})", line=reader.line_num) from None
    table = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return header, table


def coordinate_header(dimension: int) -> List[str]:
    return [f"x_{i + 1}" for i in range(dimension)]
