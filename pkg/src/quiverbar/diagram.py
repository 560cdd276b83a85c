"""Diagrams of complexes and the quiver representations they induce on homology."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

from .complexes import CellularMap, read_filtration, read_vertex_map, simplicial_map
from .errors import ParseError, QuiverBarError, ValidationError
from .homology import homology_basis, induced_map
from .quiver import BWD, FWD, TypeAQuiverRep, default_tasks


@dataclass
class Diagram:
    """Multidigraph: node id -> CellComplex or int dimension; edges are
    ``(src, dst, payload)`` with a CellularMap or SparseMatrix payload."""

    nodes: dict
    edges: list
    bases: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        for src, dst, _ in self.edges:
            if src not in self.nodes or dst not in self.nodes:
                raise ValidationError(f"edge ({src}, {dst}) uses an unknown node")


def diagram_to_quiver(d: Diagram, k: int, tasks: int | None = None) -> Diagram:
    """Replace complexes by dim H_k and maps by induced maps.

    Homology bases for all nodes are computed first (independent tasks), then
    all induced maps (independent tasks reading the finished bases).
    """
    tasks = default_tasks() if tasks is None else max(1, tasks)
    ids = list(d.nodes)
    with ThreadPoolExecutor(max_workers=tasks) as pool:
        bases = dict(zip(ids, pool.map(lambda i: homology_basis(d.nodes[i], max_dim=k), ids)))

        def edge_matrix(edge):
            src, dst, f = edge
            if not isinstance(f, CellularMap):
                raise ValidationError(f"edge ({src}, {dst}) does not carry a cellular map")
            return induced_map(f, k, bases[src], bases[dst])

        mats = list(pool.map(edge_matrix, d.edges))
    return Diagram(
        {i: bases[i].betti[k] for i in ids},
        [(src, dst, M) for (src, dst, _), M in zip(d.edges, mats)],
        bases,
    )


def to_type_a(d: Diagram, field=None) -> TypeAQuiverRep:
    """Read a vector-space diagram on nodes 1..n with one edge per consecutive pair."""
    ids = sorted(d.nodes)
    n = len(ids)
    if ids != list(range(1, n + 1)):
        raise ValidationError("type-A diagrams need nodes 1..n")
    arrows = [None] * (n - 1)
    mats = [None] * (n - 1)
    for src, dst, M in d.edges:
        if dst == src + 1:
            e, a = src - 1, FWD
        elif src == dst + 1:
            e, a = dst - 1, BWD
        else:
            raise ValidationError(f"edge ({src}, {dst}) does not join consecutive nodes")
        if arrows[e] is not None:
            raise ValidationError(f"more than one edge between nodes {e + 1} and {e + 2}")
        arrows[e] = a
        mats[e] = M
    if any(a is None for a in arrows):
        missing = arrows.index(None) + 1
        raise ValidationError(f"no edge between nodes {missing} and {missing + 1}")
    if field is None:
        field = mats[0].field if mats else None
    if field is None:
        raise ValidationError("cannot infer the field of an edgeless diagram")
    return TypeAQuiverRep([d.nodes[i] for i in ids], arrows, mats, field)


def parse_diagram(text: str, base_dir: str = ".", field=None) -> Diagram:
    """``node <id> <complex-file>`` and ``edge <src> <dst> <vertexmap-file>`` lines.

    Complex files use the filtration format (values are ignored); paths are
    relative to ``base_dir``.
    """
    nodes = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "node" and len(parts) == 3:
                nid = int(parts[1])
                if nid in nodes:
                    raise ParseError(f"node {nid} declared twice", lineno)
                fc = read_filtration(os.path.join(base_dir, parts[2]), field)
                if nodes and fc.field != next(iter(nodes.values())).field:
                    raise ValidationError(f"node {nid} is over {fc.field.tag}, unlike earlier nodes")
                nodes[nid] = fc.complex
            elif parts[0] == "edge" and len(parts) == 4:
                src, dst = int(parts[1]), int(parts[2])
                if src not in nodes or dst not in nodes:
                    raise ParseError(f"edge uses undeclared node ({src}, {dst})", lineno)
                vmap = read_vertex_map(os.path.join(base_dir, parts[3]))
                edges.append((src, dst, simplicial_map(nodes[src], nodes[dst], vmap)))
            else:
                raise ParseError(f"unrecognized line {line!r}", lineno)
        except QuiverBarError:
            raise
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    return Diagram(nodes, edges)


def read_diagram(path, field=None) -> Diagram:
    with open(path, encoding="utf-8") as fh:
        return parse_diagram(fh.read(), os.path.dirname(os.path.abspath(path)), field)


def zigzag_barcode(d: Diagram, dims, tasks: int | None = None, parallel: bool = False, leaf_size: int = 4):
    """Barcode of a type-A diagram of complexes in each requested dimension."""
    from .barcode import Barcode
    from .quiver import quiver_barcode

    field = next(iter(d.nodes.values())).field if d.nodes else None
    bars = []
    for k in dims:
        vq = diagram_to_quiver(d, k, tasks)
        q = to_type_a(vq, field)
        bars.extend(quiver_barcode(q, dim=k, parallel=parallel, leaf_size=leaf_size, tasks=tasks))
    return Barcode(bars)


