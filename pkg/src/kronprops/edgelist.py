"""Plain-text edge-list files.

Layout::

    # kron k=<k> alpha=<a> beta=<b> gamma=<g> seed=<s>
    <u> <v>
    ...

One line per loop (``v v``) and per edge (``u v`` with ``u < v``), decimal
ids, all lines sorted by ``(u, v)``.  UTF-8 with LF endings.  Parameters are
written with ``repr`` so they read back bit for bit.  A non-zero replicate
index is appended to the header as ``replicate=<r>``.
"""

from __future__ import annotations

import os
import re
from typing import Union

import numpy as np

from .errors import EdgeListFormatError
from .model import ModelParams
from .sampler import GraphSample

PathLike = Union[str, "os.PathLike[str]"]

_HEADER = re.compile(
    r"^# kron k=(?P<k>\d+) alpha=(?P<alpha>\S+) beta=(?P<beta>\S+) gamma=(?P<gamma>\S+)"
    r" seed=(?P<seed>\d+)(?: replicate=(?P<replicate>\d+))?$",
    re.ASCII,
)
_ROW = re.compile(r"(\d+) (\d+)", re.ASCII)


def format_header(g: GraphSample) -> str:
    p = g.params
    header = (
        f"# kron k={p.k} alpha={p.alpha!r} beta={p.beta!r} gamma={p.gamma!r} seed={g.seed}"
    )
    if g.replicate:
        header += f" replicate={g.replicate}"
    return header


def format_edgelist(g: GraphSample) -> str:
    loops = np.column_stack([g.loops, g.loops])
    rows = np.concatenate([loops, g.edges]).reshape(-1, 2)
    rows = rows[np.lexsort((rows[:, 1], rows[:, 0]))]
    lines = [format_header(g)]
    lines.extend(f"{u} {v}" for u, v in rows.tolist())
    return "\n".join(lines) + "\n"


def parse_edgelist(text: str) -> GraphSample:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise EdgeListFormatError("empty edge list")
    m = _HEADER.match(lines[0])
    if m is None:
        raise EdgeListFormatError(f"bad header line: {lines[0]!r}")
    try:
        params = ModelParams.of(
            float(m["alpha"]), float(m["beta"]), float(m["gamma"]), int(m["k"])
        )
    except ValueError as exc:
        raise EdgeListFormatError(f"bad header parameters: {exc}") from exc
    edges, loops = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        row = _ROW.fullmatch(line)
        if row is None:
            raise EdgeListFormatError(f"line {lineno}: expected '<u> <v>', got {line!r}")
        u, v = int(row[1]), int(row[2])
        if u == v:
            loops.append(u)
        elif u < v:
            edges.append((u, v))
        else:
            raise EdgeListFormatError(f"line {lineno}: edge must have u < v, got {line!r}")
    try:
        return GraphSample(
            params,
            np.array(edges, dtype=np.int64).reshape(-1, 2),
            np.array(loops, dtype=np.int64),
            int(m["seed"]),
            int(m["replicate"] or 0),
        )
    except ValueError as exc:
        raise EdgeListFormatError(str(exc)) from exc


def write_edgelist(g: GraphSample, path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_edgelist(g))


def read_edgelist(path: PathLike) -> GraphSample:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_edgelist(fh.read())
