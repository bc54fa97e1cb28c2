"""Graph export formats and the on-disk EDGELIST cache.

EDGELIST (also the cache format)::

    ccgraph v1 <canonical-spec> <|R|> <edge_count>
    u v          # one line per edge, u < v, ascending

All writers go through a temporary file and an atomic rename.
"""

from __future__ import annotations

import hashlib
import io
import json
import logging
import os
import re
import tempfile
from pathlib import Path

import numpy as np

from ccgraph import analytics
from ccgraph.closure import CommutationGraph, build_commutation_graph
from ccgraph.rings import RingHandle

log = logging.getLogger(__name__)

FORMATS = ("dot", "json", "csv", "edgelist")
CACHE_ENV = "CCGRAPH_CACHE"
LABEL_WIDTH = 40


def to_edgelist(g: CommutationGraph) -> str:
    u, v = g.edges()
    buf = io.StringIO()
    buf.write(f"ccgraph v1 {g.spec} {g.size} {g.edge_count}\n")
    for a, b in zip(u.tolist(), v.tolist()):
        buf.write(f"{a} {b}\n")
    return buf.getvalue()


def from_edgelist(text: str, expect_spec: str | None = None) -> CommutationGraph:
    """Parse EDGELIST text; raises ValueError on any header or body mismatch."""
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty edgelist")
    head = lines[0].split(" ")
    if len(head) != 5 or head[:2] != ["ccgraph", "v1"]:
        raise ValueError(f"bad edgelist header {lines[0]!r}")
    spec, size, count = head[2], int(head[3]), int(head[4])
    if expect_spec is not None and spec != expect_spec:
        raise ValueError(f"edgelist is for {spec}, expected {expect_spec}")
    body = lines[1:]
    if len(body) != count:
        raise ValueError(f"header promises {count} edges, found {len(body)}")
    arr = np.array([l.split(" ") for l in body], dtype=np.int64).reshape(-1, 2)
    u, v = arr[:, 0], arr[:, 1]
    if np.any(u >= v):
        raise ValueError("edges must be listed with u < v")
    keys = u * size + v
    if len(keys) > 1 and np.any(np.diff(keys) <= 0):
        raise ValueError("edges must be ascending and unique")
    return CommutationGraph.from_edges(spec, size, u, v)


def to_csv(g: CommutationGraph) -> str:
    u, v = g.edges()
    return "u,v\n" + "".join(f"{a},{b}\n" for a, b in zip(u.tolist(), v.tolist()))


def _dot_label(text: str) -> str:
    if len(text) > LABEL_WIDTH:
        text = text[: LABEL_WIDTH - 3] + "..."
    return text.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(g: CommutationGraph, ring: RingHandle) -> str:
    buf = io.StringIO()
    buf.write(f'graph "{g.spec}" {{\n')
    for a in range(g.size):
        buf.write(f'  {a} [label="{_dot_label(ring.render(a))}"];\n')
    u, v = g.edges()
    for a, b in zip(u.tolist(), v.tolist()):
        buf.write(f"  {a} -- {b};\n")
    buf.write("}\n")
    return buf.getvalue()


def to_json(g: CommutationGraph) -> str:
    u, v = g.edges()
    comps = []
    for label, members in enumerate(g.component_members()):
        diam = 0 if len(members) == 1 else int(analytics.component_distances(g, members).max())
        comps.append({
            "label": label,
            "size": len(members),
            "vertices": members.tolist(),
            "diameter": diam,
            "girth": analytics._component_girth(g, members) if len(members) > 2 else None,
        })
    doc = {
        "ring": g.spec,
        "size": g.size,
        "edge_count": g.edge_count,
        "edges": [[a, b] for a, b in zip(u.tolist(), v.tolist())],
        "components": comps,
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def render_graph(g: CommutationGraph, ring: RingHandle, fmt: str) -> str:
    if fmt == "dot":
        return to_dot(g, ring)
    if fmt == "json":
        return to_json(g)
    if fmt == "csv":
        return to_csv(g)
    if fmt == "edgelist":
        return to_edgelist(g)
    raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")


def atomic_write(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def cache_path(cache_dir: str | os.PathLike, spec: str) -> Path:
    safe = re.sub(r"[^A-Za-z0-9]+", "_", spec).strip("_")
    digest = hashlib.sha256(spec.encode()).hexdigest()[:12]
    return Path(cache_dir) / f"{safe}-{digest}.edgelist"


def cache_load(cache_dir: str | os.PathLike, spec: str) -> CommutationGraph | None:
    """Cached graph for ``spec``, or None when missing or unusable (warned, never trusted)."""
    path = cache_path(cache_dir, spec)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        return None
    except OSError as exc:
        log.warning("cannot read cache entry %s: %s", path, exc)
        return None
    try:
        return from_edgelist(text, expect_spec=spec)
    except ValueError as exc:
        log.warning("ignoring corrupt cache entry %s (%s); rebuilding", path, exc)
        return None


def cache_store(cache_dir: str | os.PathLike, g: CommutationGraph) -> Path:
    Path(cache_dir).mkdir(parents=True, exist_ok=True)
    path = cache_path(cache_dir, g.spec)
    atomic_write(path, to_edgelist(g))
    return path


def resolve_cache_dir(flag: str | None) -> str | None:
    return flag if flag else os.environ.get(CACHE_ENV) or None


def load_or_build(ring: RingHandle, cache_dir: str | None = None, threads: int = 1) -> CommutationGraph:
    """Graph of ``ring`` from the cache when valid, else built (and stored if a cache is configured)."""
    if cache_dir:
        g = cache_load(cache_dir, ring.spec)
        if g is not None and g.size == ring.size:
            return g
    g = build_commutation_graph(ring, threads)
    if cache_dir:
        try:
            cache_store(cache_dir, g)
        except OSError as exc:
            log.warning("could not write cache entry for %s: %s", ring.spec, exc)
    return g
