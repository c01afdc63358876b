"""Exact arithmetic in the prime field F_p.

Provides the quadratic multiplicative character (via a one-time squares
sieve), the canonical additive character x -> exp(2*pi*i*x/p), and
quadratic Gauss sums computed by direct summation and checked against
their closed form.

Residues are canonical representatives 0..p-1 everywhere; callers reduce
differences mod p before lookups (see ``PrimeField.chi_diff``).
"""

from __future__ import annotations

import cmath
import math
from functools import cached_property

import numpy as np

from .errors import InputError, NumericalError

# Deterministic Miller-Rabin witness set, valid for every n < 3.3 * 10**24
# (covers the full 64-bit range this toolkit accepts).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# The residue table is O(p) bytes; this is a desk-scale toolkit.
_MAX_P = 1 << 26


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_in_range(lo: int, hi: int, mod4: int | None = None) -> list[int]:
    """Odd primes in [lo, hi], optionally restricted to p % 4 == mod4."""
    if hi < lo or hi < 3:
        return []
    sieve = bytearray([1]) * (hi + 1)
    sieve[0:2] = b"\x00\x00"
    for q in range(2, math.isqrt(hi) + 1):
        if sieve[q]:
            sieve[q * q :: q] = b"\x00" * len(range(q * q, hi + 1, q))
    return [
        n
        for n in range(max(lo, 3), hi + 1)
        if sieve[n] and n % 2 == 1 and (mod4 is None or n % 4 == mod4)
    ]


class PrimeField:
    """F_p with a precomputed quadratic-character table.

    Immutable after construction; every operation is pure, so instances are
    safe to share between threads or processes.

    Attributes:
        p: the odd prime modulus.
        r: parity flag, 0 if p % 4 == 1 and 1 if p % 4 == 3 (so the sign of
           chi(-1) is (-1)**r).
        qr_table: read-only int8 array of length p with qr_table[x] = chi(x).
    """

    def __init__(self, p: int):
        if not isinstance(p, int):
            raise InputError(f"p must be an integer, got {type(p).__name__}")
        if p < 3 or p % 2 == 0 or not is_prime(p):
            raise InputError(f"p must be an odd prime, got {p}")
        if p > _MAX_P:
            raise InputError(f"p={p} exceeds the supported desk-scale limit {_MAX_P}")
        self.p = p
        self.r = 0 if p % 4 == 1 else 1
        table = np.full(p, -1, dtype=np.int8)
        table[0] = 0
        squares = (np.arange(1, (p + 1) // 2, dtype=np.int64) ** 2) % p
        table[squares] = 1
        table.setflags(write=False)
        self.qr_table = table

    def __repr__(self):
        return f"PrimeField(p={self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    # -- characters ---------------------------------------------------------

    def chi(self, x: int) -> int:
        """Quadratic character: 0 at 0, +1 on nonzero squares, -1 otherwise."""
        if not 0 <= x < self.p:
            raise InputError(f"residue {x} out of range [0, {self.p})")
        return int(self.qr_table[x])

    def chi_diff(self, x: int, y: int) -> int:
        """chi(x - y) with the difference reduced mod p."""
        return int(self.qr_table[(x - y) % self.p])

    def psi(self, x: int) -> complex:
        """Canonical additive character exp(2*pi*i*x/p)."""
        if not 0 <= x < self.p:
            raise InputError(f"residue {x} out of range [0, {self.p})")
        return cmath.exp(2j * math.pi * x / self.p)

    @cached_property
    def residues(self) -> tuple[int, ...]:
        """All quadratic residues mod p, ascending; exactly (p-1)/2 of them."""
        return tuple(int(v) for v in np.nonzero(self.qr_table == 1)[0])

    @cached_property
    def _squares(self) -> np.ndarray:
        return (np.arange(self.p, dtype=np.int64) ** 2) % self.p

    # -- Gauss sums ----------------------------------------------------------

    def gauss_sum(self, a: int) -> complex:
        """Quadratic Gauss sum sum_x psi(a*x^2), for a != 0.

        Computed by direct summation and verified against the closed form
        (i)**r * chi(a) * sqrt(p) to 1e-9.  (At a = 0 the sum degenerates
        to p and the closed form does not apply, hence the input error.)
        """
        if not 0 <= a < self.p:
            raise InputError(f"residue {a} out of range [0, {self.p})")
        if a == 0:
            raise InputError("gauss_sum requires a nonzero residue")
        phases = (a * self._squares) % self.p
        value = complex(np.exp((2j * math.pi / self.p) * phases).sum())
        reference = (1j ** self.r) * self.chi(a) * math.sqrt(self.p)
        if abs(value - reference) > 1e-9:
            raise NumericalError(
                f"Gauss sum at p={self.p}, a={a} is {value}, expected {reference}"
            )
        return value
