"""Plain-text reports with an embedded content hash.

A report is a list of titled sections of ``key = value`` lines.  The hash is
the SHA-256 of every section except ``outputs`` (which records where files
went and so legitimately differs between otherwise identical runs).
"""

from __future__ import annotations

import hashlib
import math
from pathlib import Path
from typing import Any, Iterable

UNHASHED = ("outputs",)


def fmt(value: Any) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.12g}"
    if isinstance(value, (tuple, list)):
        return ", ".join(fmt(v) for v in value) if value else "none"
    return str(value)


class Report:
    def __init__(self, command: str):
        self.command = command
        self.sections: list[tuple[str, list[str]]] = []

    def section(self, title: str, rows: Iterable[tuple[str, Any]] | dict | None = None) -> list[str]:
        lines: list[str] = []
        self.sections.append((title, lines))
        if rows is not None:
            items = rows.items() if isinstance(rows, dict) else rows
            lines.extend(f"{k} = {fmt(v)}" for k, v in items)
        return lines

    def raw(self, title: str, text: str) -> None:
        self.sections.append((title, text.rstrip("\n").splitlines()))

    def _render(self, hashed: bool) -> str:
        parts = [f"# ksblowup {self.command} report"] if hashed else []
        for title, lines in self.sections:
            if (title in UNHASHED) == hashed:
                continue
            parts.append(f"[{title}]")
            parts.extend(lines)
            parts.append("")
        return "\n".join(parts) + "\n"

    @property
    def content_hash(self) -> str:
        return hashlib.sha256(self._render(True).encode("utf-8")).hexdigest()

    def render(self) -> str:
        body = self._render(True)
        digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
        return body + f"content_sha256 = {digest}\n\n" + self._render(False)

    def write(self, path: str | Path) -> str:
        text = self.render()
        Path(path).write_text(text, encoding="utf-8")
        return text


def read_hash(path: str | Path) -> str | None:
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("content_sha256 = "):
            return line.split("=", 1)[1].strip()
    return None
