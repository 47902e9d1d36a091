"""Reader and writer for the ``.hg3`` plain-text hypergraph format.

Line 1 is ``r n m``; each of the next ``m`` lines lists one edge as ``r``
strictly increasing 0-based vertex ids separated by single spaces.  Lines end
with LF.  Parsing is strict: anything the writer would not produce is rejected.
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import HG3FormatError
from .hcore import Hypergraph

_INT = re.compile(r"0|[1-9][0-9]*")


def _ints(line: str, lineno: int) -> list[int]:
    parts = line.split(" ")
    if not all(_INT.fullmatch(p) for p in parts):
        raise HG3FormatError(f"line {lineno}: expected space-separated non-negative integers, got {line!r}")
    return [int(p) for p in parts]


def dumps(H: Hypergraph) -> str:
    lines = [f"{H.r} {H.n} {len(H)}"]
    lines.extend(" ".join(map(str, e)) for e in H.edges)
    return "\n".join(lines) + "\n"


def loads(text: str) -> Hypergraph:
    if "\r" in text:
        raise HG3FormatError("CR characters are not allowed; use LF line endings")
    if not text.endswith("\n"):
        raise HG3FormatError("file must end with a newline")
    lines = text[:-1].split("\n")
    header = _ints(lines[0], 1)
    if len(header) != 3:
        raise HG3FormatError("header must be 'r n m'")
    r, n, m = header
    if r < 1:
        raise HG3FormatError("uniformity must be positive")
    body = lines[1:]
    if len(body) != m:
        raise HG3FormatError(f"header announces {m} edges, found {len(body)} lines")
    seen = set()
    edges = []
    for i, line in enumerate(body, start=2):
        e = tuple(_ints(line, i))
        if len(e) != r:
            raise HG3FormatError(f"line {i}: expected {r} vertices, got {len(e)}")
        if any(a >= b for a, b in zip(e, e[1:])):
            raise HG3FormatError(f"line {i}: vertex ids must be strictly increasing")
        if e[-1] >= n:
            raise HG3FormatError(f"line {i}: vertex {e[-1]} out of range for n={n}")
        if e in seen:
            raise HG3FormatError(f"line {i}: duplicate edge {e}")
        seen.add(e)
        edges.append(e)
    return Hypergraph(r, n, edges)


def read(path: str | Path) -> Hypergraph:
    with open(path, "r", encoding="ascii", newline="") as fh:
        return loads(fh.read())


def write(H: Hypergraph, path: str | Path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(dumps(H))
