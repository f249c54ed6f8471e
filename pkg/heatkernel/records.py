"""
Record output for the command line: JSON lines or CSV.

JSON lines are written as they arrive; CSV needs a fixed header, so CSV rows
are buffered and written through pandas when the writer closes. A run that
stops on a numerical failure ends with a trailer record
{"record": "trailer", "status": "error", ...}; in CSV the trailer is a final
comment line starting with "#".
"""

import json
import sys
from pathlib import Path
from typing import IO

import numpy as np
import pandas as pd

from heatkernel.constants import SIGNIFICANT_DIGITS

FORMATS = ("jsonl", "csv")


class NumpyEncoder(json.JSONEncoder):
    """numpy scalars and arrays inside records."""
    def default(self, obj):
        if isinstance(obj, np.generic):
            return obj.item()
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        return super().default(obj)


def dumps(record: dict) -> str:
    # repr of a float is its shortest round-trip form; NaN and inf become null
    clean = {k: (None if isinstance(v, float) and not np.isfinite(v) else v) for k, v in record.items()}
    return json.dumps(clean, ensure_ascii=False, cls=NumpyEncoder)


class RecordWriter:
    """Context manager collecting records for one command."""

    def __init__(self, fmt: str = "jsonl", out: str | None = None):
        if fmt not in FORMATS:
            raise ValueError(f"unknown format {fmt!r}")
        self.fmt = fmt
        self.path = Path(out) if out else None
        self.count = 0
        self._rows: list[dict] = []
        self._stream: IO[str] | None = None
        self._trailer: dict | None = None

    def __enter__(self) -> "RecordWriter":
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._stream = open(self.path, "w", encoding="utf-8", newline="")
        else:
            self._stream = sys.stdout
        return self

    def write(self, record: dict):
        self.count += 1
        if self.fmt == "jsonl":
            self._stream.write(dumps(record) + "\n")
            self._stream.flush()
        else:
            self._rows.append(record)

    def write_many(self, records):
        for record in records:
            self.write(record)

    def trailer(self, status: str, error: str, exit_code: int, **extra):
        self._trailer = {"record": "trailer", "status": status, "error": error,
                         "records": self.count, "exit_code": exit_code, **extra}

    def __exit__(self, exc_type, exc, tb):
        try:
            if self.fmt == "csv" and self._rows:
                pd.DataFrame(self._rows).to_csv(self._stream, index=False,
                                                float_format=f"%.{SIGNIFICANT_DIGITS}g")
            if self._trailer is not None:
                line = dumps(self._trailer)
                self._stream.write(("# " + line if self.fmt == "csv" else line) + "\n")
            self._stream.flush()
        finally:
            if self.path is not None and self._stream is not None:
                self._stream.close()
        return False
