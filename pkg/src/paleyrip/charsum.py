"""Exact character-sum oracles and the empirical property scanner.

``double_char_sum`` and ``self_char_sum`` are exact integer oracles.  The
scanner measures, over enumerated or sampled subset pairs (S, T), the worst
ratio |sum chi(s-t)| / (|S||T|) and the implied exponent
beta = -log_p(worst ratio).  It records evidence only; it never asserts the
conjectured behaviour.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, InputError, NumericalError
from .field import PrimeField

DEFAULT_PAIR_BUDGET = 1 << 26  # exhaustive-mode pair evaluations
DEFAULT_SAMPLE_BUDGET = 1000

# Above this |S|*|T|, sums go through an FFT cross-correlation (rounded back
# to exact integers; values are far below the float53 limit at desk scale).
_FFT_CUTOVER = 1 << 18


def _as_subset(field: PrimeField, subset, name: str) -> tuple[int, ...]:
    values = sorted({int(v) for v in subset})
    if not values:
        raise InputError(f"{name} must be a nonempty subset of F_p")
    if values[0] < 0 or values[-1] >= field.p:
        raise InputError(f"{name} contains residues outside [0, {field.p})")
    return tuple(values)


def double_char_sum(field: PrimeField, s_set, t_set) -> int:
    """Exact integer sum of chi(s - t) over s in S, t in T.

    O(|S||T|) table lookups.
    """
    s = np.asarray(_as_subset(field, s_set, "S"), dtype=np.int64)
    t = np.asarray(_as_subset(field, t_set, "T"), dtype=np.int64)
    return int(field.qr_table[(s[:, None] - t[None, :]) % field.p].sum(dtype=np.int64))


def self_char_sum(field: PrimeField, s_set) -> int:
    """double_char_sum(S, S); identically zero when p % 4 == 3."""
    return double_char_sum(field, s_set, s_set)


def _char_sum_fast(field: PrimeField, s: tuple[int, ...], t: tuple[int, ...]) -> int:
    if len(s) * len(t) <= _FFT_CUTOVER:
        return double_char_sum(field, s, t)
    p = field.p
    f = np.zeros(p)
    g = np.zeros(p)
    f[list(s)] = 1.0
    g[list(t)] = 1.0
    # counts[d] = #{(s, t) : s - t = d (mod p)} via circular cross-correlation
    counts = np.rint(np.fft.ifft(np.fft.fft(f) * np.conj(np.fft.fft(g))).real)
    return int(np.dot(counts.astype(np.int64), field.qr_table.astype(np.int64)))


@dataclass(frozen=True)
class FlatBoundCheck:
    passed: bool
    margin: float
    char_sum: int
    cap: float


def check_flat_charsum_bound(
    field: PrimeField, tau: float, beta: float, s_set, t_set
) -> FlatBoundCheck:
    """Check |sum chi(s-t)| <= p**tau * sqrt(|S||T|) on one instance.

    Requires |S|, |T| <= p**(tau + beta).  The returned margin is
    cap - |sum|, so ``passed`` means margin >= 0.
    """
    s = _as_subset(field, s_set, "S")
    t = _as_subset(field, t_set, "T")
    limit = field.p ** (tau + beta)
    if len(s) > limit + 1e-9 or len(t) > limit + 1e-9:
        raise InputError(
            f"|S|={len(s)}, |T|={len(t)} exceed p**(tau+beta) = {limit:.6g}"
        )
    value = double_char_sum(field, s, t)
    cap = field.p**tau * math.sqrt(len(s) * len(t))
    margin = cap - abs(value)
    return FlatBoundCheck(passed=margin >= 0.0, margin=margin, char_sum=value, cap=cap)


@dataclass(frozen=True)
class PgcScanReport:
    """Worst observed double-character-sum ratio for one (p, alpha)."""

    p: int
    alpha: float
    mode: str
    sample_count: int
    worst_ratio: float
    worst_pair_witness: tuple[tuple[int, ...], tuple[int, ...]]
    implied_beta: float
    rng_seed: int

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "alpha": self.alpha,
            "mode": self.mode,
            "sample_count": self.sample_count,
            "worst_ratio": self.worst_ratio,
            "worst_pair_witness": {
                "S": list(self.worst_pair_witness[0]),
                "T": list(self.worst_pair_witness[1]),
            },
            "implied_beta": self.implied_beta,
            "rng_seed": self.rng_seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _implied_beta(worst_ratio: float, p: int) -> float:
    if worst_ratio == 0.0:
        return math.inf
    value = -math.log(worst_ratio) / math.log(p)
    return 0.0 if value == 0.0 else value


class _WorstTracker:
    """Max ratio with deterministic ties: lexicographically smallest witness."""

    def __init__(self):
        self.ratio = -1.0
        self.pair = None

    def offer(self, ratio: float, s: tuple[int, ...], t: tuple[int, ...]):
        if ratio > self.ratio or (ratio == self.ratio and (s, t) < self.pair):
            self.ratio = ratio
            self.pair = (s, t)


def _mask_to_tuple(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def _qualifying_size_floor(p: int, alpha: float) -> int:
    # the property quantifies over |S| > p**alpha (strict)
    return int(math.floor(p**alpha)) + 1


def adversarial_pairs(field: PrimeField) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Known extremal subset pairs: splits of a maximum clique (p % 4 == 1)
    or order-prefix partitions of a maximum transitive set (p % 4 == 3).

    Every cross-difference in such a pair has character +1, so the pair
    attains ratio exactly 1; random pairs concentrate near p**-0.5 and would
    never exhibit this.
    """
    from . import extremal, paley  # deferred: extremal depends on this module's siblings

    p = field.p
    if p % 4 == 3:
        result = extremal.max_transitive(
            paley.build_paley_tournament(field),
            node_budget=None if p < 200 else 20000,
        )
        ordered = result.witness.vertices
    else:
        result = extremal.max_clique(
            paley.build_paley_graph(field),
            node_budget=None if p < 100 else 20000,
        )
        ordered = result.witness
    pairs = []
    for cut in range(1, len(ordered)):
        head = tuple(sorted(ordered[:cut]))
        tail = tuple(sorted(ordered[cut:]))
        pairs.append((head, tail))
    return pairs


def scan_pgc_property(
    field: PrimeField,
    alpha: float,
    mode: str = "sampled",
    budget: int | None = None,
    seed: int = 0,
    self_pairs: bool = False,
    adversarial: bool = True,
) -> PgcScanReport:
    """Scan subset pairs for the worst character-sum ratio.

    exhaustive: every pair of subsets with |S|, |T| > p**alpha (refused when
    the pair count exceeds the budget).  sampled: ``budget`` seeded random
    pairs of qualifying sizes, plus the known extremal pairs injected as
    adversarial candidates (unless disabled); with ``self_pairs`` only (S, S)
    pairs are drawn and nothing is injected.
    """
    if not 0.0 < alpha <= 1.0:
        raise InputError(f"alpha must be in (0, 1], got {alpha}")
    if mode not in ("exhaustive", "sampled"):
        raise InputError(f"unknown scan mode {mode!r}")
    p = field.p
    kmin = _qualifying_size_floor(p, alpha)
    if kmin > p:
        raise InputError(f"no subsets of F_{p} have size > p**{alpha}")

    if mode == "exhaustive":
        budget = DEFAULT_PAIR_BUDGET if budget is None else budget
        return _scan_exhaustive(field, alpha, kmin, budget, seed)
    budget = DEFAULT_SAMPLE_BUDGET if budget is None else budget
    return _scan_sampled(field, alpha, kmin, budget, seed, self_pairs, adversarial)


def _scan_exhaustive(field, alpha, kmin, budget, seed) -> PgcScanReport:
    p = field.p
    n_subsets = sum(math.comb(p, k) for k in range(kmin, p + 1))
    if n_subsets * n_subsets > budget:
        raise BudgetExceededError(
            f"exhaustive scan needs {n_subsets}^2 pair evaluations "
            f"(budget {budget}); use sampled mode"
        )
    all_masks = np.arange(1 << p, dtype=np.uint32)
    keep = np.bitwise_count(all_masks) >= kmin
    masks = all_masks[keep]
    sizes = np.bitwise_count(masks).astype(np.float64)
    indicators = (
        (masks[:, None] >> np.arange(p, dtype=np.uint32)[None, :]) & 1
    ).astype(np.float64)
    idx = np.arange(p)
    chi_matrix = field.qr_table[(idx[:, None] - idx[None, :]) % p].astype(np.float64)
    partial = indicators @ chi_matrix  # row S, column t: sum_{s in S} chi(s - t)

    n = len(masks)
    block = max(1, 8_000_000 // max(n, 1))
    worst = -1.0
    for lo in range(0, n, block):
        scores = partial[lo : lo + block] @ indicators.T
        ratios = np.abs(scores) / (sizes[lo : lo + block, None] * sizes[None, :])
        worst = max(worst, float(ratios.max()))

    tracker = _WorstTracker()
    for lo in range(0, n, block):
        scores = partial[lo : lo + block] @ indicators.T
        ratios = np.abs(scores) / (sizes[lo : lo + block, None] * sizes[None, :])
        for i, j in np.argwhere(ratios == worst):
            tracker.offer(
                worst,
                _mask_to_tuple(int(masks[lo + i])),
                _mask_to_tuple(int(masks[j])),
            )
    return _finish_report(
        field, alpha, "exhaustive", n_subsets * n_subsets, tracker, seed
    )


def _scan_sampled(field, alpha, kmin, budget, seed, self_pairs, adversarial):
    p = field.p
    rng = np.random.default_rng(seed)
    tracker = _WorstTracker()
    count = 0
    for _ in range(budget):
        s_size = int(rng.integers(kmin, p + 1))
        s = tuple(int(v) for v in np.sort(rng.choice(p, size=s_size, replace=False)))
        if self_pairs:
            t = s
        else:
            t_size = int(rng.integers(kmin, p + 1))
            t = tuple(
                int(v) for v in np.sort(rng.choice(p, size=t_size, replace=False))
            )
        value = _char_sum_fast(field, s, t)
        tracker.offer(abs(value) / (len(s) * len(t)), s, t)
        count += 1
    if adversarial and not self_pairs:
        for s, t in adversarial_pairs(field):
            value = _char_sum_fast(field, s, t)
            tracker.offer(abs(value) / (len(s) * len(t)), s, t)
            count += 1
    return _finish_report(field, alpha, "sampled", count, tracker, seed)


def _finish_report(field, alpha, mode, count, tracker, seed) -> PgcScanReport:
    s, t = tracker.pair
    exact = abs(double_char_sum(field, s, t)) / (len(s) * len(t))
    if exact != tracker.ratio:
        raise NumericalError(
            f"scan worst ratio {tracker.ratio} not reproduced by exact oracle {exact}"
        )
    return PgcScanReport(
        p=field.p,
        alpha=alpha,
        mode=mode,
        sample_count=count,
        worst_ratio=exact,
        worst_pair_witness=(s, t),
        implied_beta=_implied_beta(exact, field.p),
        rng_seed=seed,
    )
