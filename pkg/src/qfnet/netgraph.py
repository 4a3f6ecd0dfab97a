"""Functional-network construction from distance matrices.

Two constructions over the canonical distance form (smallest distance =
strongest connection): Kruskal's minimum spanning tree, and the top-k% of
edges.  Edges keep both the original metric value ("weight") and the
canonical distance; ties break deterministically on (distance, i, j).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import DataFormatError
from .metrics import DistanceMatrix, MetricSpec, to_canonical_distance


@dataclass(frozen=True)
class Edge:
    i: int
    j: int
    weight: float  # original metric value
    distance: float  # canonical distance


@dataclass(frozen=True)
class FunctionalNetwork:
    kind: str  # "mst" | "top_percent"
    nodes: tuple[tuple[str, float, float, float], ...]  # (neuron_id, x, y, z)
    edges: tuple[Edge, ...]
    source_metric: MetricSpec
    percent: float | None = None


def round_half_up(x: float) -> int:
    """0.5 rounds up, unlike banker's rounding (142.5 -> 143)."""
    return int(math.floor(x + 0.5))


def _sorted_edges(m: DistanceMatrix):
    """All i<j edges sorted by (canonical distance, i, j); original values kept."""
    canon = to_canonical_distance(m)
    n = m.size
    off_diag = canon.values[~np.eye(n, dtype=bool)]
    if not np.all(np.isfinite(off_diag)):
        raise ValueError("distance matrix has non-finite off-diagonal entries")
    edges = [
        Edge(i, j, float(m.values[i, j]), float(canon.values[i, j]))
        for i in range(n)
        for j in range(i + 1, n)
    ]
    edges.sort(key=lambda e: (e.distance, e.i, e.j))
    return edges


def _nodes(m: DistanceMatrix, positions):
    if positions is None:
        positions = [(0.0, 0.0, 0.0)] * m.size
    if len(positions) != m.size:
        raise ValueError("need one (x, y, z) position per neuron")
    return tuple(
        (nid, float(p[0]), float(p[1]), float(p[2]))
        for nid, p in zip(m.neuron_ids, positions)
    )


def mst(m: DistanceMatrix, positions=None) -> FunctionalNetwork:
    """Minimum spanning tree by Kruskal over the canonical distances."""
    n = m.size
    if n < 2:
        raise ValueError("need at least two nodes")
    parent = list(range(n))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    chosen = []
    for edge in _sorted_edges(m):
        ri, rj = find(edge.i), find(edge.j)
        if ri != rj:
            parent[ri] = rj
            chosen.append(edge)
            if len(chosen) == n - 1:
                break
    return FunctionalNetwork("mst", _nodes(m, positions), tuple(chosen), m.metric)


def top_percent_network(
    m: DistanceMatrix, percent: float, positions=None
) -> FunctionalNetwork:
    """The round_half_up(percent% of C(n,2)) strongest edges."""
    if not 0.0 < percent <= 100.0:
        raise ValueError(f"percent must be in (0, 100], got {percent}")
    n = m.size
    if n < 2:
        raise ValueError("need at least two nodes")
    count = round_half_up(percent / 100.0 * (n * (n - 1) // 2))
    edges = tuple(_sorted_edges(m)[:count])
    return FunctionalNetwork(
        "top_percent", _nodes(m, positions), edges, m.metric, percent
    )


def to_json(net: FunctionalNetwork) -> str:
    doc = {
        "kind": net.kind,
        "percent": net.percent,
        "metric": net.source_metric.name,
        "nodes": [
            {"id": nid, "x": x, "y": y, "z": z} for nid, x, y, z in net.nodes
        ],
        "edges": [
            {
                "source": net.nodes[e.i][0],
                "target": net.nodes[e.j][0],
                "weight": e.weight,
                "distance": e.distance,
            }
            for e in net.edges
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def from_json(text: str, metric: MetricSpec | None = None) -> FunctionalNetwork:
    doc = json.loads(text)
    try:
        nodes = tuple(
            (nd["id"], float(nd["x"]), float(nd["y"]), float(nd["z"]))
            for nd in doc["nodes"]
        )
        index = {nid: i for i, (nid, _, _, _) in enumerate(nodes)}
        edges = tuple(
            Edge(
                index[e["source"]],
                index[e["target"]],
                float(e["weight"]),
                float(e["distance"]),
            )
            for e in doc["edges"]
        )
        if metric is None:
            metric = MetricSpec(doc["metric"]) if doc.get("metric") else MetricSpec("euclidean")
        return FunctionalNetwork(
            doc["kind"], nodes, edges, metric, doc.get("percent")
        )
    except KeyError as exc:
        raise DataFormatError(f"network JSON missing field {exc}") from exc


def to_graphml(net: FunctionalNetwork) -> str:
    """GraphML 1.0 with x/y/z node attributes and weight/distance edge attributes."""
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <key id="x" for="node" attr.name="x" attr.type="double"/>',
        '  <key id="y" for="node" attr.name="y" attr.type="double"/>',
        '  <key id="z" for="node" attr.name="z" attr.type="double"/>',
        '  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>',
        '  <key id="distance" for="edge" attr.name="distance" attr.type="double"/>',
        '  <graph id="G" edgedefault="undirected">',
    ]
    for nid, x, y, z in net.nodes:
        lines.append(f'    <node id="{escape(nid, {chr(34): "&quot;"})}">')
        lines.append(f'      <data key="x">{x!r}</data>')
        lines.append(f'      <data key="y">{y!r}</data>')
        lines.append(f'      <data key="z">{z!r}</data>')
        lines.append("    </node>")
    for e in net.edges:
        src = escape(net.nodes[e.i][0], {chr(34): "&quot;"})
        dst = escape(net.nodes[e.j][0], {chr(34): "&quot;"})
        lines.append(f'    <edge source="{src}" target="{dst}">')
        lines.append(f'      <data key="weight">{e.weight!r}</data>')
        lines.append(f'      <data key="distance">{e.distance!r}</data>')
        lines.append("    </edge>")
    lines.append("  </graph>")
    lines.append("</graphml>")
    return "\n".join(lines) + "\n"


def export_graph(net: FunctionalNetwork, fmt: str) -> bytes:
    """Byte-stable serialization in 'graphml' or 'json' format."""
    if fmt == "graphml":
        return to_graphml(net).encode("utf-8")
    if fmt == "json":
        return to_json(net).encode("utf-8")
    raise ValueError(f"unknown export format {fmt!r}")
