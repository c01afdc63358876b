"""Paley measurement matrices, Paley graphs and Paley tournaments.

The measurement matrix for an odd prime p is (p+1)/2 x (p+1): one constant
row, one additive-character row per quadratic residue, and a final "spike"
column supported on the first row.  Off-diagonal Gram entries collapse to
(i)**r * chi(a_i - a_j) / sqrt(p), which makes the columns an equiangular
tight frame meeting the Welch bound.

Inner product convention (used consistently across the package):
<x, y> = sum_k x_k * conj(y_k), linear in the first argument.  This is the
unique convention under which the Gram entry expands to
1/p + (2/p) * sum_k psi((a_i - a_j) * b_k).

Column labelling is canonical: column j < p carries the field element
a_j = j (ascending), the residue rows use Q_p ascending, and column p is
the spike.  Relabelling only permutes columns, so coherence and every
restricted-isometry quantity are unaffected.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConstructionError, InputError
from .field import PrimeField


class PaleyMatrix:
    """Dense complex Paley matrix with its column labelling.

    Immutable; ``entries`` is a read-only (p+1)/2 x (p+1) complex array and
    ``column_labels`` lists the field element of each column (None for the
    spike column).
    """

    def __init__(self, field: PrimeField, entries: np.ndarray):
        self.field = field
        entries.setflags(write=False)
        self.entries = entries
        self.column_labels: tuple = tuple(range(field.p)) + (None,)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def __repr__(self):
        return f"PaleyMatrix(p={self.field.p}, shape={self.entries.shape})"


class PaleyGraph:
    """Paley graph for p % 4 == 1: x ~ y iff chi(x - y) = 1.

    Adjacency is stored as one int bitmask per vertex (bit y of adj[x] set
    iff x ~ y), which is what the clique search consumes.
    """

    def __init__(self, field: PrimeField, adj: tuple[int, ...]):
        self.field = field
        self.p = field.p
        self.adj = adj

    def has_edge(self, x: int, y: int) -> bool:
        return x != y and bool(self.adj[x] >> y & 1)

    def degree(self, x: int) -> int:
        return self.adj[x].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [
            (x, y)
            for x in range(self.p)
            for y in _bits(self.adj[x])
            if y > x
        ]


class PaleyTournament:
    """Paley tournament for p % 4 == 3: arc x -> y iff chi(x - y) = 1.

    chi(y - x) = -chi(x - y) in this congruence class, so exactly one of
    (x, y), (y, x) is an arc.  ``out_masks[x]`` has bit y set iff x -> y.
    """

    def __init__(self, field: PrimeField, out_masks: tuple[int, ...]):
        self.field = field
        self.p = field.p
        self.out_masks = out_masks

    def has_arc(self, x: int, y: int) -> bool:
        return bool(self.out_masks[x] >> y & 1)

    def out_degree(self, x: int) -> int:
        return self.out_masks[x].bit_count()

    def arcs(self) -> list[tuple[int, int]]:
        return [(x, y) for x in range(self.p) for y in _bits(self.out_masks[x])]


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _difference_character(field: PrimeField) -> np.ndarray:
    """Matrix C with C[x, y] = chi(x - y)."""
    p = field.p
    idx = np.arange(p)
    return field.qr_table[(idx[:, None] - idx[None, :]) % p]


def _row_masks(rows: np.ndarray) -> tuple[int, ...]:
    packed = np.packbits(rows.astype(np.uint8), axis=1, bitorder="little")
    return tuple(int.from_bytes(row.tobytes(), "little") for row in packed)


def build_paley_matrix(field: PrimeField) -> PaleyMatrix:
    """Construct the (p+1)/2 x (p+1) Paley matrix with canonical labelling."""
    p = field.p
    m = np.empty(((p + 1) // 2, p + 1), dtype=np.complex128)
    m[0, :p] = 1.0 / math.sqrt(p)
    m[0, p] = 1j ** field.r
    b = np.asarray(field.residues, dtype=np.int64)
    a = np.arange(p, dtype=np.int64)
    m[1:, :p] = math.sqrt(2.0 / p) * np.exp(
        (2j * math.pi / p) * (np.outer(b, a) % p)
    )
    m[1:, p] = 0.0
    return PaleyMatrix(field, m)


def gram_inner_product(field: PrimeField, i: int, j: int) -> complex:
    """Closed-form inner product of Paley matrix columns i and j (0-based).

    Columns 0..p-1 carry field elements a_i = i; column p is the spike.
    For distinct field columns the value is (i)**r * chi(a_i - a_j)/sqrt(p);
    pairs involving the spike have magnitude 1/sqrt(p).
    """
    p = field.p
    if not (0 <= i <= p and 0 <= j <= p):
        raise InputError(f"column index out of range [0, {p}]")
    if i == j:
        return complex(1.0)
    root = math.sqrt(p)
    if i == p:  # <spike, phi_j> = i**r / sqrt(p)
        return (1j ** field.r) / root
    if j == p:  # <phi_i, spike> = conj(i**r) / sqrt(p)
        return ((-1j) ** field.r) / root
    return (1j ** field.r) * field.chi_diff(i, j) / root


def build_paley_graph(field: PrimeField) -> PaleyGraph:
    """Paley graph; requires p % 4 == 1 (else the edge relation is not symmetric)."""
    if field.p % 4 != 1:
        raise ConstructionError(
            f"Paley graph needs p % 4 == 1; chi(-1) = -1 for p={field.p}"
        )
    return PaleyGraph(field, _row_masks(_difference_character(field) == 1))


def build_paley_tournament(field: PrimeField) -> PaleyTournament:
    """Paley tournament; requires p % 4 == 3 (else the arc relation is symmetric)."""
    if field.p % 4 != 3:
        raise ConstructionError(
            f"Paley tournament needs p % 4 == 3; chi(-1) = 1 for p={field.p}"
        )
    return PaleyTournament(field, _row_masks(_difference_character(field) == 1))


# -- export payloads (consumed by the CLI `construct` command) ---------------


def matrix_header(matrix: PaleyMatrix) -> dict:
    """JSON header describing a matrix CSV export."""
    return {
        "p": matrix.field.p,
        "r": matrix.field.r,
        "rows": matrix.rows,
        "cols": matrix.cols,
        "labeling": {
            "column_labels": list(matrix.column_labels),
            "residue_row_labels": list(matrix.field.residues),
        },
    }


def matrix_csv_lines(matrix: PaleyMatrix) -> list[str]:
    """One CSV line per matrix row; each entry contributes a re,im pair."""
    lines = []
    for row in matrix.entries:
        cells = []
        for z in row:
            cells.append(repr(float(z.real)))
            cells.append(repr(float(z.imag)))
        lines.append(",".join(cells))
    return lines


def graph_payload(graph: PaleyGraph) -> dict:
    return {"p": graph.p, "kind": "graph", "edges": [list(e) for e in graph.edges()]}


def tournament_payload(tournament: PaleyTournament) -> dict:
    return {
        "p": tournament.p,
        "kind": "tournament",
        "arcs": [list(a) for a in tournament.arcs()],
    }
