import math

import numpy as np
import pytest

from paleyrip import (
    ConstructionError,
    PrimeField,
    build_paley_graph,
    build_paley_matrix,
    build_paley_tournament,
    coherence,
    flat_rip_constant_exact,
    gram_inner_product,
    rip_constant_exact,
)
from paleyrip.paley import matrix_csv_lines, matrix_header


def _numeric_gram(matrix):
    return matrix.entries.T @ np.conj(matrix.entries)


def test_matrix_p3_entries():
    f = PrimeField(3)
    m = build_paley_matrix(f).entries
    assert m.shape == (2, 4)
    root = 1 / math.sqrt(3)
    assert np.allclose(m[0, :3], root)
    assert m[0, 3] == 1j  # r = 1
    scale = math.sqrt(2 / 3)
    assert abs(m[1, 0] - scale) < 1e-15
    assert abs(m[1, 1] - scale * f.psi(1)) < 1e-15
    assert abs(m[1, 2] - scale * f.psi(2)) < 1e-15
    assert m[1, 3] == 0


def test_spike_entry_parity():
    assert build_paley_matrix(PrimeField(5)).entries[0, 5] == 1  # i**0
    assert build_paley_matrix(PrimeField(7)).entries[0, 7] == 1j  # i**1


@pytest.mark.parametrize("p", [3, 5, 7, 13, 31])
def test_unit_columns(p):
    m = build_paley_matrix(PrimeField(p))
    norms = np.linalg.norm(m.entries, axis=0)
    assert np.abs(norms - 1.0).max() < 1e-12


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_gram_matches_closed_form_everywhere(p):
    f = PrimeField(p)
    m = build_paley_matrix(f)
    gram = _numeric_gram(m)
    for i in range(p + 1):
        for j in range(p + 1):
            assert abs(gram[i, j] - gram_inner_product(f, i, j)) < 1e-10
    off = gram[~np.eye(p + 1, dtype=bool)]
    assert np.abs(np.abs(off) - 1 / math.sqrt(p)).max() < 1e-12  # equiangular


def test_gram_closed_form_examples():
    f7 = PrimeField(7)
    assert abs(gram_inner_product(f7, 0, 1) - (-1j / math.sqrt(7))) < 1e-15
    f5 = PrimeField(5)
    assert abs(gram_inner_product(f5, 1, 0) - 1 / math.sqrt(5)) < 1e-15
    assert gram_inner_product(f5, 2, 2) == 1


def test_graph_g5_is_the_pentagon():
    g = build_paley_graph(PrimeField(5))
    assert sorted(g.edges()) == [(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]


def test_graph_g13_regularity_and_edge_count():
    g = build_paley_graph(PrimeField(13))
    assert all(g.degree(x) == 6 for x in range(13))
    assert len(g.edges()) == 13 * 12 // 4


def test_tournament_t3_cycle():
    t = build_paley_tournament(PrimeField(3))
    assert sorted(t.arcs()) == [(0, 2), (1, 0), (2, 1)]


def test_tournament_t7_out_degrees_and_arc_count():
    t = build_paley_tournament(PrimeField(7))
    assert all(t.out_degree(x) == 3 for x in range(7))
    assert len(t.arcs()) == 7 * 6 // 2
    for x in range(7):
        for y in range(7):
            if x != y:
                assert t.has_arc(x, y) != t.has_arc(y, x)


def test_wrong_congruence_class_is_rejected():
    with pytest.raises(ConstructionError):
        build_paley_graph(PrimeField(7))
    with pytest.raises(ConstructionError):
        build_paley_tournament(PrimeField(5))


def test_column_relabelling_leaves_rip_quantities_invariant():
    p = 13
    m = build_paley_matrix(PrimeField(p))
    rng = np.random.default_rng(3)
    order = np.arange(p + 1)
    order[1:p] = rng.permutation(order[1:p])  # a_1 = 0 and the spike stay put
    shuffled = m.entries[:, order]
    assert abs(coherence(m) - coherence(shuffled)) < 1e-12
    for k in (2, 3):
        a = rip_constant_exact(m, k).delta
        b = rip_constant_exact(shuffled, k).delta
        assert abs(a - b) < 1e-12
    ta = flat_rip_constant_exact(m, 2).theta
    tb = flat_rip_constant_exact(shuffled, 2).theta
    assert abs(ta - tb) < 1e-12


def test_matrix_export_payloads():
    m = build_paley_matrix(PrimeField(5))
    header = matrix_header(m)
    assert header["p"] == 5 and header["r"] == 0
    assert header["rows"] == 3 and header["cols"] == 6
    assert header["labeling"]["column_labels"] == [0, 1, 2, 3, 4, None]
    assert header["labeling"]["residue_row_labels"] == [1, 4]
    lines = matrix_csv_lines(m)
    assert len(lines) == 3
    first = [float(x) for x in lines[0].split(",")]
    assert len(first) == 12  # re,im per entry
    assert abs(first[0] - 1 / math.sqrt(5)) < 1e-15
