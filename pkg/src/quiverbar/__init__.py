"""Persistent and zigzag homology barcodes by triangular factorization of
type-A quiver representations, over F_2, F_p and Q."""

from .barcode import INF, Bar, Barcode
from .complexes import (
    CellComplex,
    CellularMap,
    FilteredComplex,
    build_simplicial,
    chain_map,
    filtration_from_simplices,
    inclusion_map,
    mapping_cylinder,
    mapping_telescope,
    simplicial_map,
)
from .diagram import Diagram, diagram_to_quiver, to_type_a, zigzag_barcode
from .factor import (
    LquFactorization,
    TriangularFactorization,
    commute_perm_blocktri,
    commute_shape,
    leup,
    lqu,
    pivot_to_echelon,
    variant_factorization,
)
from .fields import FieldScalar, arith, get_field
from .homology import (
    HomologyBasis,
    ReducedBoundary,
    betti_numbers,
    homology_basis,
    induced_map,
    persistence_barcode,
    reduce,
)
from .pipelines import filtration_barcode
from .quiver import (
    BWD,
    FWD,
    BarcodeForm,
    TypeAQuiverRep,
    barcode_form_parallel,
    barcode_form_sequential,
    extract_barcode,
    pass_through_node,
    persistence_rank_oracle,
)
from .sparse import (
    J,
    ShapeKind,
    SparseMatrix,
    apply_permutation,
    classify_shape,
    j_conjugate,
    solve_triangular,
)

__all__ = [name for name in dir() if not name.startswith("_")]
