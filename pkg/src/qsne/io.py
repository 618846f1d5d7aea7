"""CSV ingestion and serialization.

Values are written with 17 significant digits, enough for doubles to
round-trip exactly.  Parse errors name the offending row and column using
1-based file line numbers.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .exceptions import CsvFormatError


@dataclass
class CsvData:
    """Parsed CSV content: feature matrix, optional labels, optional header."""

    values: np.ndarray
    labels: np.ndarray | None
    columns: list | None


def _parse_cell(text, line, col):
    try:
        return float(text)
    except ValueError:
        raise CsvFormatError(
            f"row {line}, column {col + 1}: could not parse {text!r} as a number") from None


def _parse_label(text, line, col):
    try:
        return int(text)
    except ValueError:
        pass
    value = _parse_cell(text, line, col)
    if value != int(value):
        raise CsvFormatError(
            f"row {line}, column {col + 1}: label {text!r} is not an integer")
    return int(value)


def load_csv(path, has_header=None, label_column=None):
    """Load a numeric CSV file.

    Parameters
    ----------
    path : file to read.
    has_header : bool or None; None auto-detects by trying to parse the
        first row as numbers.
    label_column : optional column index (negative counts from the end)
        holding integer class labels; the column is removed from the
        features.

    Returns
    -------
    CsvData
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [(i + 1, row) for i, row in enumerate(csv.reader(fh)) if row]
    if not rows:
        raise CsvFormatError(f"{path}: file contains no data")

    columns = None
    first = rows[0][1]
    if has_header is None:
        try:
            [float(cell) for cell in first]
        except ValueError:
            has_header = True
        else:
            has_header = False
    if has_header:
        columns = [cell.strip() for cell in first]
        rows = rows[1:]
        if not rows:
            raise CsvFormatError(f"{path}: no data rows after the header")

    width = len(rows[0][1])
    if label_column is not None:
        label_column = int(label_column)
        idx = label_column + width if label_column < 0 else label_column
        if not 0 <= idx < width:
            raise CsvFormatError(
                f"label column {label_column} is out of range for {width} columns")
    else:
        idx = None

    values = np.empty((len(rows), width - (idx is not None)))
    labels = np.empty(len(rows), dtype=np.int64) if idx is not None else None
    for r, (line, row) in enumerate(rows):
        if len(row) != width:
            raise CsvFormatError(
                f"row {line}: expected {width} columns, got {len(row)}")
        c_out = 0
        for c, cell in enumerate(row):
            if c == idx:
                labels[r] = _parse_label(cell, line, c)
            else:
                values[r, c_out] = _parse_cell(cell, line, c)
                c_out += 1
    return CsvData(values=values, labels=labels, columns=columns)


def _format(x):
    return format(x, ".17g")


def save_csv(values, path, labels=None, columns=None):
    """Write a matrix (plus optional integer label column) as CSV."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"values must be 2-D, got shape {values.shape}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if columns is not None:
            writer.writerow(columns)
        for i, row in enumerate(values):
            out = [_format(x) for x in row]
            if labels is not None:
                out.append(str(int(labels[i])))
            writer.writerow(out)


def save_embedding(embedding, labels, path):
    """Write embedding coordinates with a y1..yd[,label] header."""
    embedding = np.asarray(embedding, dtype=np.float64)
    columns = [f"y{i + 1}" for i in range(embedding.shape[1])]
    if labels is not None:
        columns.append("label")
    save_csv(embedding, path, labels=labels, columns=columns)
