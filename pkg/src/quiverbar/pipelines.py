"""Three routes from a filtration to its barcode: direct reduction, the
quiver of prefix inclusions, and persistence of the mapping telescope of
those inclusions.  All return bars in 1-based filtration indices."""
from __future__ import annotations

from .barcode import INF, Bar, Barcode
from .complexes import CellComplex, FilteredComplex, inclusion_map, mapping_telescope
from .diagram import Diagram, diagram_to_quiver, to_type_a
from .homology import persistence_barcode
from .quiver import (
    barcode_form_parallel,
    barcode_form_sequential,
    extract_intervals,
    persistence_rank_oracle,
)

VIA = ("reduction", "quiver", "telescope")


def prefix_complexes(fc: FilteredComplex) -> list[CellComplex]:
    """X_1 ⊆ ... ⊆ X_N where X_j holds the first j cells."""
    full = fc.sorted_complex()
    ndim = len(full.cells)
    taken = [0] * ndim
    out = []
    for k, _ in fc.order:
        taken[k] += 1
        cells = [full.cells[d][: taken[d]] for d in range(ndim)]
        boundary = [
            full.boundary[d].submatrix(range(taken[d - 1]) if d else [], range(taken[d]))
            for d in range(ndim)
        ]
        out.append(CellComplex(full.field, cells, boundary, simplicial=full.simplicial))
    return out


def prefix_diagram(fc: FilteredComplex) -> Diagram:
    spaces = prefix_complexes(fc)
    nodes = {j + 1: X for j, X in enumerate(spaces)}
    edges = [(j + 1, j + 2, inclusion_map(a, b)) for j, (a, b) in enumerate(zip(spaces, spaces[1:]))]
    return Diagram(nodes, edges)


def _closed_to_halfopen(k, birth, last, n):
    return Bar(k, birth, INF if last == n else last + 1)


def persistence_via_quiver(fc: FilteredComplex, max_dim: int | None = None, parallel: bool = False,
                           leaf_size: int = 4, tasks: int | None = None) -> Barcode:
    if max_dim is None:
        max_dim = max(fc.complex.dim, 0)
    n = len(fc)
    if n == 0:
        return Barcode()
    d = prefix_diagram(fc)
    bars = []
    for k in range(max_dim + 1):
        q = to_type_a(diagram_to_quiver(d, k, tasks), fc.field)
        if parallel:
            bf = barcode_form_parallel(q, leaf_size=leaf_size, tasks=tasks)
        else:
            bf = barcode_form_sequential(q, backward=False)
        bars.extend(_closed_to_halfopen(k, iv.birth, iv.death, n) for iv in extract_intervals(bf.quiver))
    return Barcode(bars)


def persistence_via_rank_oracle(fc: FilteredComplex, max_dim: int | None = None) -> Barcode:
    """Inclusion-exclusion over ranks of the composite inclusion maps."""
    if max_dim is None:
        max_dim = max(fc.complex.dim, 0)
    n = len(fc)
    if n == 0:
        return Barcode()
    d = prefix_diagram(fc)
    bars = []
    for k in range(max_dim + 1):
        q = to_type_a(diagram_to_quiver(d, k, 1), fc.field)
        bars.extend(_closed_to_halfopen(k, b.birth, b.death, n) for b in persistence_rank_oracle(q))
    return Barcode(bars)


def persistence_via_telescope(fc: FilteredComplex, max_dim: int | None = None) -> Barcode:
    """Telescope of the prefix inclusions; X_j enters at parameter j-1.

    Bars of zero length in parameter space are artifacts of the cylinder
    cells and are dropped.
    """
    if max_dim is None:
        max_dim = max(fc.complex.dim, 0)
    spaces = prefix_complexes(fc)
    if not spaces:
        return Barcode()
    if len(spaces) == 1:
        X = spaces[0]
        tel = FilteredComplex(X, [[0] * len(c) for c in X.cells])
    else:
        tel = mapping_telescope([inclusion_map(a, b) for a, b in zip(spaces, spaces[1:])])
    bars = []
    for b in persistence_barcode(tel, max_dim):
        bv = tel.value_of_index(b.birth)
        dv = INF if b.death == INF else tel.value_of_index(b.death)
        if bv != dv:
            bars.append(Bar(b.dim, bv + 1, INF if dv == INF else dv + 1))
    return Barcode(bars)


def filtration_barcode(fc: FilteredComplex, via: str = "reduction", max_dim: int | None = None, **kw) -> Barcode:
    if via == "reduction":
        return persistence_barcode(fc, max_dim)
    if via == "quiver":
        return persistence_via_quiver(fc, max_dim, **kw)
    if via == "telescope":
        return persistence_via_telescope(fc, max_dim)
    raise ValueError(f"unknown route {via!r}; choose from {', '.join(VIA)}")


def to_values(fc: FilteredComplex, bc: Barcode) -> Barcode:
    """Replace filtration indices by the cells' filtration values."""
    return bc.remap(fc.value_of_index)
