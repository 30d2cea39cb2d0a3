from __future__ import annotations

import json
from pathlib import Path
from typing import Any

_QUOTES = ('"', "'")
_BLANK = " \t\r\n"


def _skip_string(text: str, i: int) -> int:
    """Index just past the string literal that opens at text[i]."""
    quote = text[i]
    i += 1
    while i < len(text):
        if text[i] == "\\":
            i += 2
            continue
        if text[i] == quote:
            return i + 1
        i += 1
    return i


def _strip_comments(text: str) -> str:
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        if text[i] in _QUOTES:
            end = _skip_string(text, i)
            out.append(text[i:end])
            i = end
        elif text.startswith("//", i):
            while i < n and text[i] not in "\r\n":
                i += 1
        elif text.startswith("/*", i):
            close = text.find("*/", i + 2)
            i = n if close < 0 else close + 2
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _strip_dangling_commas(text: str) -> str:
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        if text[i] in _QUOTES:
            end = _skip_string(text, i)
            out.append(text[i:end])
            i = end
            continue
        if text[i] == "," and text[i + 1 :].lstrip(_BLANK)[:1] in ("]", "}"):
            i += 1
            continue
        out.append(text[i])
        i += 1
    return "".join(out)


def _clean_json5(text: str) -> str:
    """Best-effort JSON5 to JSON: comments first, then dangling commas."""
    return _strip_dangling_commas(_strip_comments(text))


def read_json(path: Path) -> dict[str, Any]:
    """Read a JSON5 document (comments, trailing commas) into a dict."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    raw = path.read_text(encoding="utf-8")
    try:
        import json5  # type: ignore

        data = json5.loads(raw)
    except ModuleNotFoundError:
        data = json.loads(_clean_json5(raw))
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top level must be an object, got {type(data).__name__}")
    return data


def write_json(path: Path, data: dict[str, Any]) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=False) + "\n", encoding="utf-8")


def deep_merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    """Merge `override` into a copy of `base`; nested dicts merge, everything else replaces."""
    merged = dict(base)
    for key, value in override.items():
        current = merged.get(key)
        if isinstance(current, dict) and isinstance(value, dict):
            merged[key] = deep_merge(current, value)
        else:
            merged[key] = value
    return merged
