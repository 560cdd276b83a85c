"""Acceptance criteria, one test each.

Run ``pytest tests/test_acceptance.py`` and read the "acceptance criteria"
section at the end of the report for one PASS/FAIL line per criterion.
"""
import time

import pytest

import known_quivers
import oracles
from quiverbar.barcode import INF
from quiverbar.complexes import CellularMap, build_simplicial, filtration_from_simplices, mapping_cylinder, mapping_telescope, simplicial_map
from quiverbar.factor import RELATIONS, commute_shape, lqu, variant_factorization
from quiverbar.fields import get_field
from quiverbar.homology import betti_numbers, homology_basis, induced_map, reduce
from quiverbar.pipelines import VIA, filtration_barcode, to_values
from quiverbar.quiver import BWD, FWD, TypeAQuiverRep, barcode_form_parallel, barcode_form_sequential, default_tasks, extract_barcode, pass_through_node
from quiverbar.sparse import SparseMatrix, has_shape, is_perm, is_pivot, is_unit_triangular, j_flip

FIELDS = ("F2", "F5", "Q")
SHAPES = {
    "LEUP": {"L": "unit lower", "E": "EL", "U": "unit upper", "P": "perm"},
    "PLEU": {"P": "perm", "L": "unit lower", "E": "EU", "U": "unit upper"},
    "UELP": {"U": "unit upper", "E": "EUhat", "L": "unit lower", "P": "perm"},
    "PUEL": {"P": "perm", "U": "unit upper", "E": "ELhat", "L": "unit lower"},
}


def shape_ok(M, shape):
    if shape == "perm":
        return is_perm(M)
    if shape.startswith("unit "):
        return is_unit_triangular(M, shape.split()[1])
    return has_shape(M, shape)


def bars(bc):
    return [(b.birth, b.death) for b in bc]


def random_map(rng, field):
    src = oracles.random_simplices(rng, rng.randint(1, 6), 2)
    vmap, tgt = oracles.random_vertex_map(rng, src, rng.randint(1, 6))
    X, Y = build_simplicial(src, field), build_simplicial(tgt, field)
    return simplicial_map(X, Y, vmap)


@pytest.mark.criterion("edge swap induces [1] on H0")
@pytest.mark.parametrize("tag", FIELDS)
def test_edge_swap(tag):
    X = build_simplicial([(0, 1)], tag)
    H = homology_basis(X)
    F = induced_map(simplicial_map(X, X, {0: 1, 1: 0}), 0, H, H)
    assert oracles.dense(F) == [[1]]


@pytest.mark.criterion("four-node path and zigzag barcodes survive basis changes")
def test_displayed_quivers_conjugated(rng):
    F5 = get_field("F5")
    makers = (known_quivers.z4, known_quivers.p4, known_quivers.p4_as_displayed)
    for make in makers:
        assert bars(extract_barcode(make())) == known_quivers.BARS
    for trial in range(100):
        q = makers[trial % 3]()
        for v in range(q.n):
            q = pass_through_node(q, v, oracles.random_invertible(rng, q.dims[v], F5))
        for initial in ("right", "left"):
            assert bars(extract_barcode(barcode_form_sequential(q, initial))) == known_quivers.BARS


@pytest.mark.criterion("500 factorizations reconstruct exactly with correct shapes and rank")
def test_factorization_suite(rng):
    for trial in range(500):
        tag = FIELDS[trial % 3]
        m, n = rng.randint(1, 40), rng.randint(1, 40)
        if rng.random() < 0.5:
            A = oracles.random_low_rank(rng, m, n, tag, rng.randint(1, min(m, n)), 0.3)
        else:
            A = oracles.random_matrix(rng, m, n, tag, rng.choice((0.05, 0.2, 0.5)))
        r = oracles.rank(A)
        for kind, shapes in SHAPES.items():
            fac = variant_factorization(A, kind)
            assert fac.product() == A, kind
            for name, shape in shapes.items():
                assert shape_ok(fac._get(name), shape), (kind, name)
            assert fac.rank == r
        fac = lqu(A)
        assert fac.product() == A and is_pivot(fac.Q) and fac.rank == r
        assert is_unit_triangular(fac.L, "lower") and is_unit_triangular(fac.U, "upper")


@pytest.mark.criterion("commuting triangular factors past echelon forms")
@pytest.mark.parametrize("relation", RELATIONS)
def test_commutation_suite(rng, relation):
    for trial in range(200):
        field = get_field(FIELDS[trial % 3])
        m, n = rng.randint(1, 10), rng.randint(1, 10)
        lower = relation in ("EL_L", "L_ELhat")
        E = {
            "EL_L": lambda: oracles.random_EL(rng, m, n, field),
            "U_EU": lambda: oracles.random_EL(rng, m, n, field).T,
            "EUhat_U": lambda: j_flip(oracles.random_EL(rng, m, n, field)),
            "L_ELhat": lambda: j_flip(oracles.random_EL(rng, m, n, field).T),
        }[relation]()
        size = E.ncols if relation in ("EL_L", "EUhat_U") else E.nrows
        T = oracles.random_triangular(rng, size, field, lower=lower)
        pattern = {(r, c) for r, c, _ in E.entries()}
        Tt, E2 = commute_shape(E, T, relation)
        if relation in ("EL_L", "EUhat_U"):
            assert E @ T == Tt @ E2
        else:
            assert T @ E == E2 @ Tt
        assert {(r, c) for r, c, _ in E2.entries()} == pattern
        assert has_shape(Tt, "Lower" if lower else "Upper")


@pytest.mark.criterion("boundary reduction and betti numbers")
def test_reduction_suite(rng):
    for trial in range(500):
        tag = FIELDS[trial % 3]
        if trial % 2:
            cx = build_simplicial(oracles.random_simplices(rng, rng.randint(2, 7), 3), tag)
            D = cx.d(rng.randint(1, cx.dim)) if cx.dim else cx.d(0)
        else:
            D = oracles.random_matrix(rng, rng.randint(0, 15), rng.randint(0, 15), tag, 0.3)
        red = reduce(D)
        assert D @ red.U == red.R
        assert is_unit_triangular(red.U, "upper")
        pivots = [red.R.pivot(j) for j in range(red.R.ncols) if red.R.col(j)]
        assert len(pivots) == len(set(pivots))
    for trial in range(50):
        tag = FIELDS[trial % 3]
        simplices = oracles.random_simplices(rng, rng.randint(1, 8), 3)
        assert betti_numbers(build_simplicial(simplices, tag)) == oracles.betti_oracle(simplices, tag)


@pytest.mark.criterion("rightward, leftward and parallel barcodes agree")
def test_algorithm_agreement(rng):
    for trial in range(200):
        q = oracles.random_quiver(rng, rng.randint(1, 12), 6, FIELDS[trial % 3],
                                  oracles.ARROW_PATTERNS[trial % 4])
        ref = extract_barcode(barcode_form_sequential(q, "right"))
        assert extract_barcode(barcode_form_sequential(q, "left")) == ref
        for leaf in (1, 2, 4):
            assert extract_barcode(barcode_form_parallel(q, leaf, tasks=2)) == ref


@pytest.mark.criterion("triangle filtration through every route")
def test_triangle_cross_check():
    items = [(1, (0,)), (2, (1,)), (3, (2,)), (4, (0, 1)), (5, (0, 2)), (6, (1, 2)), (7, (0, 1, 2))]
    fc = filtration_from_simplices(items, "F2")
    want = oracles.filtration_rank_oracle([s for _, s in items], "F2", 1)
    assert want == [(0, 1, INF), (0, 2, 4), (0, 3, 5), (1, 6, 7)]
    for via in VIA:
        bc = filtration_barcode(fc, via, 1)
        assert bc.intervals(0) == [(1, INF), (2, 4), (3, 5)]
        assert bc.intervals(1) == [(6, 7)]
        assert oracles.triples(bc) == want


@pytest.mark.criterion("mapping cylinders are complexes whose spanning bars count the induced rank")
def test_mapping_cylinder(rng):
    for trial in range(50):
        tag = FIELDS[trial % 3]
        f = random_map(rng, tag)
        cyl = mapping_cylinder(f)
        assert cyl.complex.check_boundary_squared()
        tel = mapping_telescope([f, CellularMap.identity(f.target)])
        assert tel.complex.check_boundary_squared()
        HX, HY = homology_basis(f.source, 2), homology_basis(f.target, 2)
        spanning = to_values(cyl, filtration_barcode(cyl, "reduction", 2)).without_empty()
        for k in range(3):
            count = sum(1 for b in spanning.in_dim(k) if b.birth == 0 and b.death == INF)
            assert count == oracles.rank(induced_map(f, k, HX, HY)), (trial, k)


@pytest.mark.criterion("homology is functorial")
def test_functoriality(rng):
    for trial in range(50):
        tag = FIELDS[trial % 3]
        src = oracles.random_simplices(rng, rng.randint(1, 6), 2)
        vmap1, mid = oracles.random_vertex_map(rng, src, rng.randint(1, 6))
        vmap2, tgt = oracles.random_vertex_map(rng, mid, rng.randint(1, 6))
        X, Y, Z = (build_simplicial(s, tag) for s in (src, mid, tgt))
        f, g = simplicial_map(X, Y, vmap1), simplicial_map(Y, Z, vmap2)
        HX, HY, HZ = (homology_basis(c, 2) for c in (X, Y, Z))
        for k in range(3):
            assert induced_map(g.compose(f), k, HX, HZ) == induced_map(g, k, HY, HZ) @ induced_map(f, k, HX, HY)
            assert induced_map(CellularMap.identity(X), k, HX, HX) == SparseMatrix.identity(HX.betti[k], X.field)


@pytest.mark.criterion("parallel run is deterministic and no slower than serial")
def test_parallel_sanity(rng):
    arrows = tuple(rng.choice((FWD, BWD)) for _ in range(63))
    q = TypeAQuiverRep((50,) * 64, arrows, [oracles.random_matrix(rng, 50, 50, "F5", 0.1) for _ in arrows], "F5")
    many = max(2, default_tasks())

    def timed(tasks):
        best, text = INF, None
        for _ in range(3):
            start = time.perf_counter()
            out = extract_barcode(barcode_form_parallel(q, 4, tasks=tasks)).to_text()
            best = min(best, time.perf_counter() - start)
            assert text in (None, out)
            text = out
        return best, text

    t1, out1 = timed(1)
    tn, outn = timed(many)
    print(f"serial {t1:.3f}s, {many} tasks {tn:.3f}s")
    assert out1 == outn
    assert tn <= 1.2 * t1
