"""Cyclic-group symbol arithmetic and 1-based cyclic index operations.

Symbols are elements of the integers modulo q, written additively.  Index
values are 1-based positions in [1, N]; N doubles as the wrap-around
representative, so the cyclic difference of an index with itself is N, not
zero.  Both conventions keep the scheme arithmetic free of off-by-one
translation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

# ---------------------------------------------------------------------------
# Plain-integer helpers (hot paths in the scheme and audit code).
# ---------------------------------------------------------------------------


def add_mod(a: int, b: int, q: int) -> int:
    """Group sum of two symbol values modulo q."""
    return (a + b) % q


def sub_mod(a: int, b: int, q: int) -> int:
    """Group difference of two symbol values modulo q."""
    return (a - b) % q


def cyc_add(x: int, y: int, n: int) -> int:
    """1-based cyclic sum: x + y, wrapped back into [1, n]."""
    total = x + y
    return total if total <= n else total - n


def cyc_sub(x: int, y: int, n: int) -> int:
    """1-based cyclic difference: x - y, wrapped back into [1, n]."""
    diff = x - y
    return diff if diff > 0 else diff + n


def cyc_sum(values: Sequence[int], n: int) -> int:
    """Cyclic sum of values in [1, n]; the empty sum is n (the identity)."""
    return (sum(values) - 1) % n + 1


# ---------------------------------------------------------------------------
# Typed wrappers.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Alphabet:
    """Order of the symbol group; answers use the same alphabet."""

    q: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"alphabet order must be at least 2, got {self.q}")


@dataclass(frozen=True)
class Symbol:
    """One q-ary symbol: an element of the additive group modulo q."""

    value: int
    q: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"alphabet order must be at least 2, got {self.q}")
        if not 0 <= self.value < self.q:
            raise ValueError(f"symbol {self.value} outside [0, {self.q})")


@dataclass(frozen=True)
class CyclicIndex:
    """1-based position in [1, n]; n stands for the dummy position."""

    value: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"index modulus must be positive, got {self.n}")
        if not 1 <= self.value <= self.n:
            raise ValueError(f"index {self.value} outside [1, {self.n}]")


def _same_order(a: Symbol, b: Symbol) -> int:
    if a.q != b.q:
        raise ValueError(f"mismatched alphabet orders {a.q} and {b.q}")
    return a.q


def _same_modulus(x: CyclicIndex, y: CyclicIndex) -> int:
    if x.n != y.n:
        raise ValueError(f"mismatched index moduli {x.n} and {y.n}")
    return x.n


def sym_add(a: Symbol, b: Symbol) -> Symbol:
    """Group sum of two symbols from the same alphabet."""
    q = _same_order(a, b)
    return Symbol(add_mod(a.value, b.value, q), q)


def sym_sub(a: Symbol, b: Symbol) -> Symbol:
    """Group difference; inverts sym_add in its second argument."""
    q = _same_order(a, b)
    return Symbol(sub_mod(a.value, b.value, q), q)


def idx_add(x: CyclicIndex, y: CyclicIndex) -> CyclicIndex:
    """Cyclic index sum, staying in [1, n]."""
    n = _same_modulus(x, y)
    return CyclicIndex(cyc_add(x.value, y.value, n), n)


def idx_sub(x: CyclicIndex, y: CyclicIndex) -> CyclicIndex:
    """Cyclic index difference; inverts idx_add in its second argument."""
    n = _same_modulus(x, y)
    return CyclicIndex(cyc_sub(x.value, y.value, n), n)


def f_star(f: Sequence[CyclicIndex], n: int) -> CyclicIndex:
    """Cyclic sum of a whole index vector (the decoder's anchor position)."""
    for entry in f:
        if entry.n != n:
            raise ValueError(f"mismatched index moduli {entry.n} and {n}")
    return CyclicIndex(cyc_sum([entry.value for entry in f], n), n)
