import json
import math
import os

import numpy as np
import pytest

from cubicmaps.io import (atomic_write_bytes, csv_text, dumps, fmt_float, pgm_bytes, read_pgm,
                          write_csv, write_json, write_pgm)


def test_pgm_header_and_roundtrip(tmp_path):
    g = np.arange(12, dtype=np.uint8).reshape(3, 4)
    data = pgm_bytes(g)
    assert data.startswith(b"P5\n4 3\n255\n") and len(data) == len(b"P5\n4 3\n255\n") + 12
    p = tmp_path / "a.pgm"
    write_pgm(p, g)
    assert np.array_equal(read_pgm(p), g)


def test_pgm_rejects_bad_input(tmp_path):
    with pytest.raises(ValueError):
        pgm_bytes(np.zeros(3))
    with pytest.raises(ValueError):
        pgm_bytes(np.array([[256]]))
    p = tmp_path / "x.pgm"
    p.write_bytes(b"P2\n1 1\n255\n0")
    with pytest.raises(ValueError):
        read_pgm(p)


def test_atomic_write_leaves_no_temporaries(tmp_path):
    p = tmp_path / "sub" / "f.bin"
    atomic_write_bytes(p, b"one")
    atomic_write_bytes(p, b"two")
    assert p.read_bytes() == b"two"
    assert os.listdir(tmp_path / "sub") == ["f.bin"]


def test_seventeen_digits():
    assert fmt_float(0.1) == "0.10000000000000001"
    x = 1 / 3
    assert float(fmt_float(x)) == x
    text = dumps({"a": 0.1, "b": [1, 2.5], "c": True, "d": None})
    assert "0.10000000000000001" in text
    assert json.loads(text) == {"a": 0.1, "b": [1, 2.5], "c": True, "d": None}


def test_nonfinite_becomes_null():
    assert json.loads(dumps([math.inf, -math.inf, math.nan, np.float64(2.0)])) == [None, None, None, 2.0]


def test_numpy_scalars_and_arrays():
    out = json.loads(dumps({"n": np.int64(3), "flag": np.bool_(False), "v": np.array([0.5, 1.0])}))
    assert out == {"n": 3, "flag": False, "v": [0.5, 1.0]}
    with pytest.raises(TypeError):
        dumps(object())


def test_csv(tmp_path):
    assert csv_text(["x", "k"], [(0.1, 2)]) == "x,k\n0.10000000000000001,2\n"
    p = tmp_path / "t.csv"
    write_csv(p, ["a"], [(1.5,)])
    assert p.read_text() == "a\n1.5\n"


def test_write_json(tmp_path):
    p = tmp_path / "t.json"
    write_json(p, {"x": 1.0})
    assert p.read_text().endswith("\n") and json.loads(p.read_text()) == {"x": 1.0}
