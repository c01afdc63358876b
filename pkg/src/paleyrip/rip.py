"""Coherence, Welch bound, and exact RIP / flat-RIP constants.

The restricted-isometry constant of order K is computed support-wise: for a
column subset S the deviation is max(lambda_max(G_S) - 1, 1 - lambda_min(G_S))
where G_S is the K x K Gram of the selected columns, and delta_K is the
maximum deviation over supports of size exactly K (smaller supports are
dominated by eigenvalue interlacing).  The flat variant bounds
|<sum_{i in I} c_i, sum_{j in J} c_j>| / sqrt(|I||J|) over disjoint pairs.

Exhaustive modes enumerate supports in colexicographic order and are refused
beyond the budget (checking RIP is NP-hard in general); sampled modes draw
supports uniformly and report a certified lower bound -- ``mode`` in the
report is the flag distinguishing the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, InputError, NumericalError
from .paley import PaleyMatrix

DEFAULT_ENUM_BUDGET = 1 << 26
DEFAULT_SAMPLE_BUDGET = 1000

# Full Gram precompute is worth it up to roughly this many matrix columns.
_FULL_GRAM_LIMIT = 2048


def _column_matrix(matrix) -> tuple[np.ndarray, int | None]:
    if isinstance(matrix, PaleyMatrix):
        return matrix.entries, matrix.field.p
    entries = np.asarray(matrix, dtype=np.complex128)
    if entries.ndim != 2:
        raise InputError("expected a 2-d matrix")
    return entries, None


def welch_bound(m: int, n: int) -> float:
    """sqrt((N - M) / (M * (N - 1))), the coherence floor for M x N frames."""
    if m < 1 or n < m:
        raise InputError(f"need 1 <= M <= N, got M={m}, N={n}")
    if n == 1:
        return 0.0
    return math.sqrt((n - m) / (m * (n - 1)))


def _check_unit_columns(entries: np.ndarray, tol: float = 1e-9):
    norms = np.linalg.norm(entries, axis=0)
    bad = np.nonzero(np.abs(norms - 1.0) > tol)[0]
    if bad.size:
        j = int(bad[0])
        raise InputError(f"column {j} has norm {norms[j]!r}, expected 1")


def coherence(matrix) -> float:
    """Largest |<c_j, c_k>| over distinct unit-norm columns."""
    entries, _ = _column_matrix(matrix)
    _check_unit_columns(entries)
    gram = entries.T @ np.conj(entries)
    np.fill_diagonal(gram, 0.0)
    return float(np.abs(gram).max())


# -- support enumeration ------------------------------------------------------


def colex_subsets(n: int, k: int):
    """All k-subsets of range(n) in colexicographic order."""
    if k == 0:
        yield ()
        return
    for top in range(k - 1, n):
        for rest in colex_subsets(top, k - 1):
            yield rest + (top,)


@dataclass(frozen=True)
class RipReport:
    p: int | None
    K: int
    delta: float
    witness_support: tuple[int, ...]
    mode: str
    enumerated_count: int
    rng_seed: int

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "K": self.K,
            "delta": self.delta,
            "witness_support": list(self.witness_support),
            "mode": self.mode,
            "enumerated_count": self.enumerated_count,
            "rng_seed": self.rng_seed,
        }


@dataclass(frozen=True)
class FlatRipReport:
    p: int | None
    K: int
    theta: float
    witness: tuple[tuple[int, ...], tuple[int, ...]]
    mode: str
    rng_seed: int

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "K": self.K,
            "theta": self.theta,
            "witness": {"I": list(self.witness[0]), "J": list(self.witness[1])},
            "mode": self.mode,
            "rng_seed": self.rng_seed,
        }


def support_deviation(gram_block: np.ndarray, support=None) -> float:
    """max(lambda_max - 1, 1 - lambda_min) of a Hermitian Gram block."""
    try:
        eigenvalues = np.linalg.eigvalsh(gram_block)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed on support {support}") from exc
    return float(max(eigenvalues[-1] - 1.0, 1.0 - eigenvalues[0]))


def rip_constant_exact(
    matrix,
    k: int,
    mode: str = "exhaustive",
    budget: int | None = None,
    seed: int = 0,
) -> RipReport:
    """delta_K over supports of size exactly K.

    K may exceed the row count: the Gram block is then rank-deficient and the
    deviation is at least 1, which is still the correct value of the maximal
    spectral deviation for that support size.
    """
    entries, p = _column_matrix(matrix)
    n = entries.shape[1]
    if not 1 <= k <= n:
        raise InputError(f"need 1 <= K <= {n}, got K={k}")
    if mode not in ("exhaustive", "sampled"):
        raise InputError(f"unknown mode {mode!r}")

    full_gram = None
    if n <= _FULL_GRAM_LIMIT:
        full_gram = entries.T @ np.conj(entries)

    def block_for(support):
        if full_gram is not None:
            return full_gram[np.ix_(support, support)]
        cols = entries[:, list(support)]
        return cols.T @ np.conj(cols)

    best, witness = -1.0, None
    if mode == "exhaustive":
        budget = DEFAULT_ENUM_BUDGET if budget is None else budget
        total = math.comb(n, k)
        if total > budget:
            raise BudgetExceededError(
                f"C({n},{k}) = {total} supports exceed budget {budget}; "
                "use sampled mode"
            )
        count = 0
        for support in colex_subsets(n, k):
            deviation = support_deviation(block_for(support), support)
            count += 1
            if deviation > best:
                best, witness = deviation, support
    else:
        budget = DEFAULT_SAMPLE_BUDGET if budget is None else budget
        rng = np.random.default_rng(seed)
        count = 0
        for _ in range(budget):
            support = tuple(
                int(v) for v in np.sort(rng.choice(n, size=k, replace=False))
            )
            deviation = support_deviation(block_for(support), support)
            count += 1
            if deviation > best:
                best, witness = deviation, support
    return RipReport(
        p=p,
        K=k,
        delta=best,
        witness_support=witness,
        mode=mode,
        enumerated_count=count,
        rng_seed=seed,
    )


def _count_disjoint_pairs(n: int, k: int) -> int:
    ordered = 0
    for a in range(1, k + 1):
        for b in range(1, k + 1):
            if a + b <= n:
                ordered += math.comb(n, a) * math.comb(n - a, b)
    return ordered // 2


def flat_rip_constant_exact(
    matrix,
    k: int,
    mode: str = "exhaustive",
    budget: int | None = None,
    seed: int = 0,
) -> FlatRipReport:
    """Least theta with |<sum_I, sum_J>| <= theta * sqrt(|I||J|) over tested
    disjoint pairs with 1 <= |I|, |J| <= K.

    Unordered pairs are enumerated once via the convention min(I) < min(J);
    swapping I and J only conjugates the inner product.
    """
    entries, p = _column_matrix(matrix)
    n = entries.shape[1]
    if not 1 <= k <= n - 1:
        raise InputError(f"need 1 <= K <= {n - 1}, got K={k}")
    if mode not in ("exhaustive", "sampled"):
        raise InputError(f"unknown mode {mode!r}")

    sums: dict[tuple[int, ...], np.ndarray] = {}

    def subset_sum(subset):
        cached = sums.get(subset)
        if cached is None:
            cached = entries[:, list(subset)].sum(axis=1)
            sums[subset] = cached
        return cached

    def pair_value(i_set, j_set):
        inner = np.vdot(subset_sum(j_set), subset_sum(i_set))  # <sum_I, sum_J>
        return abs(inner) / math.sqrt(len(i_set) * len(j_set))

    best, witness = -1.0, None
    if mode == "exhaustive":
        budget = DEFAULT_ENUM_BUDGET if budget is None else budget
        total = _count_disjoint_pairs(n, k)
        if total > budget:
            raise BudgetExceededError(
                f"{total} disjoint pairs exceed budget {budget}; use sampled mode"
            )
        for a in range(1, k + 1):
            for i_set in colex_subsets(n, a):
                i_members = set(i_set)
                allowed = [
                    c for c in range(min(i_set) + 1, n) if c not in i_members
                ]
                for b in range(1, k + 1):
                    if b > len(allowed):
                        break
                    for pick in colex_subsets(len(allowed), b):
                        j_set = tuple(allowed[q] for q in pick)
                        value = pair_value(i_set, j_set)
                        if value > best:
                            best, witness = value, (i_set, j_set)
    else:
        budget = DEFAULT_SAMPLE_BUDGET if budget is None else budget
        rng = np.random.default_rng(seed)
        for _ in range(budget):
            a = int(rng.integers(1, k + 1))
            i_set = tuple(int(v) for v in np.sort(rng.choice(n, size=a, replace=False)))
            rest = np.setdiff1d(np.arange(n), np.asarray(i_set))
            b = int(rng.integers(1, min(k, len(rest)) + 1))
            j_set = tuple(int(v) for v in np.sort(rng.choice(rest, size=b, replace=False)))
            value = pair_value(i_set, j_set)
            if value > best:
                best, witness = value, (i_set, j_set)
    return FlatRipReport(p=p, K=k, theta=best, witness=witness, mode=mode, rng_seed=seed)


def flat_to_rip_delta(k: int, theta: float) -> float:
    """RIP constant implied by a flat-RIP constant: 150 * theta * ln(K).

    Natural logarithm, fixed for reproducibility; K must be at least 2 for
    the conversion to be meaningful.
    """
    if not isinstance(k, int) or k < 2:
        raise InputError(f"need integer K >= 2, got {k!r}")
    if theta < 0:
        raise InputError(f"theta must be nonnegative, got {theta}")
    return 150.0 * theta * math.log(k)


def last_column_correction(matrix: PaleyMatrix, i_set) -> float:
    """|<sum_{i in I} c_i, spike column>| for I within the p field columns.

    Always at most |I|/sqrt(p) by the triangle inequality (all first-row
    entries have magnitude 1/sqrt(p)); verified before returning.
    """
    if not isinstance(matrix, PaleyMatrix):
        raise InputError("last_column_correction needs a PaleyMatrix")
    p = matrix.field.p
    members = sorted({int(v) for v in i_set})
    if not members:
        raise InputError("I must be nonempty")
    if members[0] < 0 or members[-1] >= p:
        raise InputError(f"I must be a subset of the first {p} columns")
    spike = matrix.entries[:, p]
    stacked = matrix.entries[:, members].sum(axis=1)
    value = float(abs(np.vdot(spike, stacked)))
    cap = len(members) / math.sqrt(p)
    if value > cap + 1e-12:
        raise NumericalError(
            f"spike correction {value} exceeds |I|/sqrt(p) = {cap} at p={p}"
        )
    return value
