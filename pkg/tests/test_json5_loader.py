from __future__ import annotations

import json
from pathlib import Path

import pytest

from bicgrad.io_utils import _clean_json5, deep_merge, read_json


def test_read_json_supports_line_comments(tmp_path: Path) -> None:
    p = tmp_path / "experiment.json5"
    p.write_text(
        '{\n  // comment\n  "torus": {\n    "b": [1, 4], // trailing\n  },\n}\n',
        encoding="utf-8",
    )
    data = read_json(p)
    assert data["torus"]["b"] == [1, 4]


def test_read_json_supports_block_comments(tmp_path: Path) -> None:
    p = tmp_path / "experiment.json5"
    p.write_text(
        '{\n  /* block */\n  "collar": {"ell": [0.1]}\n}\n',
        encoding="utf-8",
    )
    data = read_json(p)
    assert data["collar"]["ell"] == [0.1]


def test_read_json_rejects_non_objects(tmp_path: Path) -> None:
    p = tmp_path / "list.json5"
    p.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ValueError, match="top level"):
        read_json(p)
    with pytest.raises(FileNotFoundError):
        read_json(tmp_path / "missing.json5")


def test_clean_json5_keeps_comment_markers_inside_strings() -> None:
    text = '{"output": "runs//a.csv", "note": "/* kept */", "q": [1, 1.5,],}'
    data = json.loads(_clean_json5(text))
    assert data == {"output": "runs//a.csv", "note": "/* kept */", "q": [1, 1.5]}


def test_clean_json5_handles_escaped_quotes() -> None:
    text = '{"a": "say \\"hi\\", // not a comment", /* c */ "b": [1,\n ],\n}'
    assert json.loads(_clean_json5(text)) == {"a": 'say "hi", // not a comment', "b": [1]}


def test_deep_merge_only_merges_dicts() -> None:
    base = {"torus": {"b": [1], "grid": 256}, "seed": 0}
    merged = deep_merge(base, {"torus": {"b": [2, 3]}, "seed": 5})
    assert merged == {"torus": {"b": [2, 3], "grid": 256}, "seed": 5}
    assert base["torus"]["b"] == [1]
