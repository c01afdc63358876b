"""Paley matrices, graphs and tournaments over prime fields.

Exact verification toolkit: Gram/Gauss-sum closed forms, RIP and flat-RIP
constants by support enumeration, character-sum oracles and scans, clique
and transitive-subtournament extremes, spectral and sumset bounds, and a
deterministic JSONL-cached CLI.
"""

from .charsum import (
    PgcScanReport,
    check_flat_charsum_bound,
    double_char_sum,
    scan_pgc_property,
    self_char_sum,
)
from .errors import (
    BoundViolationError,
    BudgetExceededError,
    CertificateError,
    ConstructionError,
    InputError,
    NumericalError,
    PaleyError,
)
from .extremal import (
    BoundsLedger,
    ExtremalResult,
    TransitiveWitness,
    bounds_ledger,
    build_A_and_square,
    gram_of_transitive,
    hp_clique_bound,
    hp_sumset_check,
    is_transitive,
    max_clique,
    max_transitive,
    partition_inequality_check,
    rayleigh_lower_bound,
    rip_implied_transitive_bound,
    sumset_transitive_bound,
    tabib_transitive_bound,
)
from .field import PrimeField, is_prime, primes_in_range
from .paley import (
    PaleyGraph,
    PaleyMatrix,
    PaleyTournament,
    build_paley_graph,
    build_paley_matrix,
    build_paley_tournament,
    gram_inner_product,
)
from .rip import (
    FlatRipReport,
    RipReport,
    coherence,
    flat_rip_constant_exact,
    flat_to_rip_delta,
    last_column_correction,
    rip_constant_exact,
    welch_bound,
)

__version__ = "0.1.0"
