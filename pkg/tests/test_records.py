import json
import math

import numpy as np
import pandas as pd

from heatkernel.records import RecordWriter, dumps


def test_numpy_values_serialize():
    rec = json.loads(dumps({"a": np.float64(0.5), "b": np.int64(3), "c": np.bool_(True), "d": np.arange(2)}))
    assert rec == {"a": 0.5, "b": 3, "c": True, "d": [0, 1]}


def test_floats_roundtrip_exactly():
    x = 0.1 + 0.2
    assert json.loads(dumps({"x": x}))["x"] == x


def test_non_finite_become_null():
    rec = json.loads(dumps({"nan": math.nan, "inf": -math.inf}))
    assert rec == {"nan": None, "inf": None}


def test_jsonl_writer_with_trailer(tmp_path):
    out = tmp_path / "records.jsonl"
    with RecordWriter("jsonl", str(out)) as writer:
        writer.write({"t": 1.0, "value": 2.0})
        writer.trailer("error", "did not converge", 3, value=1.5)
    lines = [json.loads(line) for line in out.read_text().splitlines()]
    assert lines[0] == {"t": 1.0, "value": 2.0}
    assert lines[1]["record"] == "trailer"
    assert lines[1]["records"] == 1 and lines[1]["exit_code"] == 3 and lines[1]["value"] == 1.5


def test_csv_writer(tmp_path):
    out = tmp_path / "records.csv"
    with RecordWriter("csv", str(out)) as writer:
        writer.write_many([{"r": 0.5, "d2": 0.25}, {"r": 1.0 / 3.0, "d2": 1.0 / 9.0}])
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["r", "d2"]
    assert frame["r"].iloc[1] == 1.0 / 3.0


def test_csv_trailer_is_a_comment(tmp_path):
    out = tmp_path / "records.csv"
    with RecordWriter("csv", str(out)) as writer:
        writer.write({"r": 0.5})
        writer.trailer("error", "stopped", 3)
    last = out.read_text().splitlines()[-1]
    assert last.startswith("# ")
    assert json.loads(last[2:])["record"] == "trailer"
