import json
import random
from pathlib import Path

import pytest

from uslsq.algebra import bose_mols
from uslsq.block_design import eta
from uslsq.isomorph import design_certificate, sls_are_isomorphic
from uslsq.sls_core import (SemiLatinSquare, ValidationError, bar_s, dual,
                            from_latin, inflate, superpose, transpose,
                            underlying_design, uniformity, validate)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name: str) -> SemiLatinSquare:
    return SemiLatinSquare.from_json((FIXTURES / name).read_text())


@pytest.fixture(scope="module")
def eq1():
    return load_fixture("eq1_3x3_4.json")


@pytest.fixture(scope="module")
def fig1():
    return load_fixture("fig1_M_6x6_10.json")


def test_display_one_is_valid(eq1):
    assert (eq1.n, eq1.k, eq1.v) == (3, 4, 12)


def test_latin_square_is_a_valid_semi_latin_square():
    s = from_latin(bose_mols(3)[0])
    validate(s.n, s.k, s.cells)


def test_validate_reports_row_violation(eq1):
    cells = [list(list(c) for c in row) for row in eq1.cells]
    # swapping in treatments already used elsewhere in row 1 must fail loudly
    cells[0][0] = [1, 4, 7, 11]
    with pytest.raises(ValidationError):
        validate(3, 4, cells)


def test_validate_rejects_wrong_cell_size(eq1):
    cells = [list(list(c) for c in row) for row in eq1.cells]
    cells[0][0] = cells[0][0][:3]
    with pytest.raises(ValidationError) as err:
        validate(3, 4, cells)
    assert "(1,1)" in str(err.value)


def test_validate_rejects_out_of_range_treatment(eq1):
    cells = [list(list(c) for c in row) for row in eq1.cells]
    cells[0][0] = [1, 2, 5, 13]
    with pytest.raises(ValidationError):
        validate(3, 4, cells)


def test_uniformity_of_display_one(eq1):
    report = uniformity(eq1)
    assert report.uniform and report.mu == 2
    assert eq1.k == report.mu * (eq1.n - 1)


def test_uniformity_of_figure_one(fig1):
    report = uniformity(fig1)
    assert report.uniform and report.mu == 2


def test_latin_square_is_not_uniform():
    report = uniformity(from_latin(bose_mols(3)[0]))
    assert not report.uniform
    assert report.witness is not None
    (c1, c2, size) = report.witness
    assert size in (0, 1)


def test_uniformity_needs_n_above_two():
    tiny = validate(2, 1, [[[1], [2]], [[2], [1]]])
    with pytest.raises(ValueError):
        uniformity(tiny)


def test_inflate_by_one_preserves_shape(eq1):
    s = inflate(eq1, 1)
    assert (s.n, s.k) == (eq1.n, eq1.k)
    assert uniformity(s).mu == 2


def test_inflate_scales_mu():
    base = superpose(list(map(from_latin, bose_mols(3))))
    assert uniformity(base).mu == 1
    blown = inflate(base, 2)
    assert (blown.n, blown.k) == (3, 4)
    assert uniformity(blown).mu == 2


def test_inflated_latin_square_is_not_uniform():
    s = inflate(from_latin(bose_mols(3)[0]), 2)
    report = uniformity(s)
    assert not report.uniform


def test_inflation_of_superposed_mols_matches_display_one(eq1):
    built = inflate(superpose(list(map(from_latin, bose_mols(3)))), 2)
    assert sls_are_isomorphic(built, eq1)


def test_superpose_mols_of_order_five():
    s = superpose(list(map(from_latin, bose_mols(5))))
    assert (s.n, s.k) == (5, 4)
    assert uniformity(s).mu == 1


def test_superpose_same_square_twice_is_not_uniform():
    latin = from_latin(bose_mols(3)[0])
    s = superpose([latin, latin])
    assert not uniformity(s).uniform


def test_superpose_rejects_side_mismatch():
    with pytest.raises(ValueError):
        superpose([from_latin(bose_mols(3)[0]), from_latin(bose_mols(4)[0])])


def test_superpose_associativity_up_to_relabeling():
    a, b = map(from_latin, bose_mols(3))
    c = from_latin(bose_mols(3)[0])
    flat = superpose([a, b, c])
    nested = superpose([superpose([a, b]), c])
    cert_flat = design_certificate(underlying_design(flat))
    cert_nested = design_certificate(underlying_design(nested))
    assert cert_flat.data == cert_nested.data


def test_transpose_is_an_involution(eq1, fig1):
    for s in (eq1, fig1):
        assert transpose(transpose(s)) == s


def test_transpose_preserves_uniformity(eq1):
    t = transpose(eq1)
    assert uniformity(t).mu == 2


def test_transpose_is_isomorphic(eq1):
    assert sls_are_isomorphic(eq1, transpose(eq1))


def test_underlying_design_parameters(eq1, fig1):
    d = underlying_design(eq1)
    assert (d.v, d.b, d.r, d.k) == (12, 9, 3, 4)
    m = underlying_design(fig1)
    assert (m.v, m.b, m.r, m.k) == (60, 36, 6, 10)
    latin = underlying_design(from_latin(bose_mols(3)[0]))
    assert (latin.v, latin.b, latin.r, latin.k) == (3, 9, 3, 1)


def test_dual_design_parameters(eq1, fig1):
    d = dual(eq1)
    assert (d.v, d.b, d.r, d.k) == (9, 12, 4, 3)
    m = dual(fig1)
    assert (m.v, m.b, m.r, m.k) == (36, 60, 10, 6)


def test_dual_of_latin_square_blocks_are_symbol_positions():
    latin = bose_mols(3)[0]
    d = dual(from_latin(latin))
    assert (d.v, d.b, d.k) == (9, 3, 3)
    for block in d.blocks:
        cells = [divmod(c - 1, 3) for c in block]
        symbols = {latin.grid[i][j] for i, j in cells}
        assert len(symbols) == 1


def test_dual_commutes_with_transpose(eq1):
    a = design_certificate(dual(eq1))
    b = design_certificate(dual(transpose(eq1)))
    assert a.data == b.data


@pytest.mark.parametrize("n", [3, 4, 5])
def test_bar_s_is_uniform(n):
    s = bar_s(bose_mols(n))
    assert (s.n, s.k) == (n + 1, (n - 2) * n)
    report = uniformity(s)
    assert report.uniform and report.mu == n - 2


def test_bar_s_of_five_eta_census():
    s = bar_s(bose_mols(5))
    assert eta(underlying_design(s)) == (1275, 1890, 675, 150, 0, 0, 15)


def test_bar_s_rejects_wrong_count():
    with pytest.raises(ValueError):
        bar_s(bose_mols(5)[:3])


def test_bar_s_rejects_non_orthogonal_input():
    squares = bose_mols(5)
    with pytest.raises(ValueError):
        bar_s(squares[:4] + [squares[0]])


def test_bar_s_of_four_lands_in_a_known_class():
    # (5x5)/8 uniform squares form 10 classes; the construction must hit one
    from uslsq.classify import classify_uniform
    built = bar_s(bose_mols(4))
    assert uniformity(built).mu == 2
    classes = classify_uniform(5, 2).classes
    assert any(sls_are_isomorphic(built, rec.square) for rec in classes)


def test_json_round_trip(eq1, fig1):
    for s in (eq1, fig1):
        again = SemiLatinSquare.from_json(s.to_json())
        assert again == s


def test_json_shape(eq1):
    obj = json.loads(eq1.to_json())
    assert set(obj) == {"n", "k", "cells"}
    assert obj["cells"][0][0] == sorted(obj["cells"][0][0])


def test_random_row_column_permutations_stay_valid(eq1):
    rng = random.Random(11)
    cells = [list(row) for row in eq1.cells]
    for _ in range(10):
        rng.shuffle(cells)
        cols = list(range(3))
        rng.shuffle(cols)
        shuffled = [[row[j] for j in cols] for row in cells]
        validate(3, 4, shuffled)
