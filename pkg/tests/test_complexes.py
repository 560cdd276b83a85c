import pytest

import oracles
from quiverbar.errors import (
    ChainMapViolation,
    DuplicateSimplex,
    ImageSimplexMissing,
    NotComposable,
    ParseError,
    ValidationError,
)
from quiverbar.complexes import (
    CellularMap,
    FilteredComplex,
    build_simplicial,
    chain_map,
    filtration_from_simplices,
    inclusion_map,
    mapping_cylinder,
    mapping_telescope,
    parse_filtration,
    parse_vertex_map,
    read_filtration,
    simplicial_map,
)
from quiverbar.fields import get_field
from quiverbar.sparse import SparseMatrix

Q, F2, F5 = get_field("Q"), get_field("F2"), get_field("F5")


def dense(A):
    return oracles.dense(A)


# building complexes ---------------------------------------------------------------
def test_edge_boundary():
    X = build_simplicial([(0,), (1,), (0, 1)], Q)
    assert dense(X.d(1)) == [[-1], [1]]


def test_faces_are_completed():
    X = build_simplicial([(0, 1, 2)])
    assert [X.n(k) for k in range(3)] == [3, 3, 1]
    assert (X.d(1) @ X.d(2)).is_zero()
    assert X.cells[1] == [(0, 1), (0, 2), (1, 2)]


def test_empty_complex():
    X = build_simplicial([])
    assert X.dim == -1 and X.size() == 0
    assert X.d(0).shape == (0, 0) and X.d(1).shape == (0, 0)


def test_duplicate_simplex():
    with pytest.raises(DuplicateSimplex):
        build_simplicial([(0, 1), (1, 0)])


def test_bad_simplices():
    with pytest.raises(ValidationError):
        build_simplicial([(0, 0)])
    with pytest.raises(ValidationError):
        build_simplicial([(-1, 2)])


@pytest.mark.parametrize("tag", ["F2", "F5", "Q"])
def test_boundary_squares_to_zero(rng, tag):
    for _ in range(40):
        X = build_simplicial(oracles.random_simplices(rng, rng.randint(1, 7), 3), tag)
        assert X.check_boundary_squared()
        p = oracles.char_of(tag)
        for k in range(1, X.dim + 1):
            assert dense(X.d(k)) == oracles.boundary_rows(X.cells[k - 1], X.cells[k], p)


# chain maps ---------------------------------------------------------------------
def test_identity_vertex_map():
    X = build_simplicial([(0, 1, 2)])
    f = simplicial_map(X, X, {0: 0, 1: 1, 2: 2})
    for k in range(3):
        assert chain_map(f, k) == SparseMatrix.identity(X.n(k), Q)


def test_edge_swap_chain_map():
    X = build_simplicial([(0, 1)])
    f = simplicial_map(X, X, {0: 1, 1: 0})
    assert dense(chain_map(f, 0)) == [[0, 1], [1, 0]]
    assert dense(chain_map(f, 1)) == [[-1]]


def test_collapse_is_degenerate():
    X = build_simplicial([(0, 1)])
    P = build_simplicial([(0,)])
    f = simplicial_map(X, P, {0: 0, 1: 0})
    assert chain_map(f, 1).is_zero()
    assert dense(chain_map(f, 0)) == [[1, 1]]


def test_missing_image():
    X = build_simplicial([(0, 1)])
    Y = build_simplicial([(0,), (1,)])
    with pytest.raises(ImageSimplexMissing):
        simplicial_map(X, Y, {0: 0, 1: 1})


def test_chain_square_is_checked():
    X = build_simplicial([(0, 1)], F5)
    bad = [SparseMatrix.identity(2, F5), SparseMatrix.zeros(1, 1, F5)]
    with pytest.raises(ChainMapViolation):
        CellularMap(X, X, bad)


def random_map_pair(rng, field):
    src = oracles.random_simplices(rng, rng.randint(1, 5), 2)
    vmap1, mid = oracles.random_vertex_map(rng, src, rng.randint(1, 5))
    vmap2, tgt = oracles.random_vertex_map(rng, mid, rng.randint(1, 5))
    X, Y, Z = (build_simplicial(s, field) for s in (src, mid, tgt))
    return simplicial_map(X, Y, vmap1), simplicial_map(Y, Z, vmap2)


def test_chain_level_functoriality(rng):
    for _ in range(50):
        f, g = random_map_pair(rng, rng.choice(("F2", "F5", "Q")))
        gf = g.compose(f)
        for k in range(f.source.dim + 1):
            assert chain_map(gf, k) == chain_map(g, k) @ chain_map(f, k)
        direct = simplicial_map(f.source, g.target, gf.vertex_map)
        assert all(direct.chain(k) == gf.chain(k) for k in range(f.source.dim + 1))


def test_compose_needs_matching_spaces():
    X = build_simplicial([(0, 1)])
    Y = build_simplicial([(0, 1, 2)])
    f = simplicial_map(X, X, {0: 0, 1: 1})
    g = simplicial_map(Y, Y, {0: 0, 1: 1, 2: 2})
    with pytest.raises(NotComposable):
        g.compose(f)


def test_inclusion_map():
    X = build_simplicial([(0, 1)])
    Y = build_simplicial([(0, 1), (1, 2)])
    i = inclusion_map(X, Y)
    assert dense(i.chain(0)) == [[1, 0], [0, 1], [0, 0]]


# filtrations ----------------------------------------------------------------------
def test_triangle_filtration_file(samples):
    fc = read_filtration(f"{samples}/triangle.flt")
    assert len(fc) == 7
    assert [fc.cell_of_index(i)[1] for i in range(1, 8)] == [
        (0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)
    ]


def test_coface_before_face_is_rejected():
    with pytest.raises(ValidationError, match=r"\(0, 1\)"):
        parse_filtration("field F2\nsimplex 1 0\nsimplex 0 0 1\n")


def test_unlisted_faces_take_smallest_coface_value():
    fc = filtration_from_simplices([(3, (0, 1)), (2, (1, 2))], Q)
    values = {c: fc.values[k][i] for k, cs in enumerate(fc.complex.cells) for i, c in enumerate(cs)}
    assert values[(1,)] == 2 and values[(0,)] == 3


def test_filtration_order_extends_face_poset(rng):
    for _ in range(40):
        simplices = oracles.random_simplices(rng, rng.randint(1, 6), 3)
        items = [(rng.randint(0, 5), s) for s in simplices]
        try:
            fc = filtration_from_simplices(items, F2)
        except ValidationError:
            continue
        seen = set()
        for p in range(1, len(fc) + 1):
            k, s = fc.cell_of_index(p)
            if k:
                assert all(s[:i] + s[i + 1:] in seen for i in range(len(s)))
            seen.add(s)


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as exc:
        parse_filtration("field F2\nsimplex x 0\n")
    assert exc.value.line == 2
    with pytest.raises(ParseError):
        parse_filtration("simplex 0 0\n")
    with pytest.raises(ParseError):
        parse_vertex_map("0 1\n0 2\n")


# cylinders and telescopes ----------------------------------------------------------
def test_cylinder_of_a_point_is_an_interval():
    P = build_simplicial([(0,)])
    cyl = mapping_cylinder(CellularMap.identity(P))
    cx = cyl.complex
    assert [cx.n(k) for k in range(cx.dim + 1)] == [2, 1]
    assert oracles.rank_of(dense(cx.d(1)), 0) == 1


def test_cylinder_of_edge_swap():
    X = build_simplicial([(0, 1)])
    cyl = mapping_cylinder(simplicial_map(X, X, {0: 1, 1: 0}))
    assert cyl.complex.check_boundary_squared()


def test_cylinder_of_collapse():
    X = build_simplicial([(0, 1)], F5)
    P = build_simplicial([(0,)], F5)
    cyl = mapping_cylinder(simplicial_map(X, P, {0: 0, 1: 0}))
    assert cyl.complex.check_boundary_squared()


def test_single_map_telescope_is_the_cylinder():
    X = build_simplicial([(0, 1), (1, 2)])
    f = simplicial_map(X, X, {0: 1, 1: 2, 2: 2})
    a, b = mapping_telescope([f]), mapping_cylinder(f)
    assert a.complex == b.complex and a.values == b.values


def test_random_telescopes_square_to_zero(rng):
    for _ in range(30):
        f, g = random_map_pair(rng, rng.choice(("F2", "F5", "Q")))
        tel = mapping_telescope([f, g])
        assert tel.complex.check_boundary_squared()
        assert isinstance(tel, FilteredComplex)


def test_telescope_needs_composable_maps():
    X = build_simplicial([(0, 1)])
    Y = build_simplicial([(0, 1, 2)])
    with pytest.raises(NotComposable):
        mapping_telescope([CellularMap.identity(X), CellularMap.identity(Y)])
