"""Artifact persistence: CSV tables, JSON documents and checkpoints.

Floats are written with ``repr`` so every CSV parses back to the exact
in-memory value; JSON documents use sorted keys and a fixed indent so that
equal content means equal bytes.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..agents import PolicyModel
from ..exceptions import ConfigError


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path, rows, columns=None) -> Path:
    path = Path(path)
    rows = list(rows)
    if columns is None:
        columns = list(rows[0]) if rows else []
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[c]) for c in columns])
    return path


def _parse(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [{k: _parse(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def write_json(path, doc) -> Path:
    path = Path(path)
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def save_checkpoint(model: PolicyModel, path) -> Path:
    return write_json(path, model.to_state())


def load_checkpoint(path) -> PolicyModel:
    try:
        state = read_json(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read checkpoint {path}: {exc}") from exc
    return PolicyModel.from_state(state)
