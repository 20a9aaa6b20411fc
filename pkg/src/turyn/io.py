"""CSV/JSON persistence shared by the command-line tools."""

from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path
from typing import Iterable, Sequence

SCHEMA_PREFIX = "turyn"
SCHEMA_VERSION = 1


def schema_tag(kind: str) -> str:
    return f"{SCHEMA_PREFIX}.{kind}/v{SCHEMA_VERSION}"


def json_document(kind: str, payload: dict) -> str:
    """One top-level object carrying a versioned ``schema`` field."""
    doc = {"schema": schema_tag(kind)}
    doc.update(payload)
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=True) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def write_text(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file and rename, so readers never see half a file."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


class RowAppender:
    """Append CSV rows one at a time, flushing each so interrupted runs keep them."""

    def __init__(self, path: str | os.PathLike, header: Sequence[str]):
        self.path = Path(path)
        fresh = not self.path.exists() or self.path.stat().st_size == 0
        self._fh = open(self.path, "a", newline="")
        self._w = csv.writer(self._fh, lineterminator="\n")
        if fresh:
            self._w.writerow(header)
            self._fh.flush()

    def write(self, row: Sequence) -> None:
        self._w.writerow(row)
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_rows(path: str | os.PathLike) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))
