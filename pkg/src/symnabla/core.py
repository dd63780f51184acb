"""Exact arithmetic in the symmetric-difference set ring.

This module computes with finite sets of positive integers whose prime
factors lie in a fixed basis of small primes.  A set element is stored
as a vector of prime exponents, so over the basis (2, 3, 5) the element
12 is the row (2, 1, 0).  Two operations turn these sets into a
commutative ring:

* symmetric difference (``sym_diff``, the ring addition): elements
  present in both operands cancel;
* symmetric product (``sym_prod``, the ring multiplication): every
  pairwise integer product c*d is toggled into an accumulator, so a
  product reached an even number of times vanishes.

An integer product is an exponent-vector sum, so the real work is
multiplicity-parity bookkeeping over pairwise vector sums: rows are
packed into 64-bit integer keys (one bit field per prime, sized to the
operation at hand), the key array is sorted, and runs of equal keys are
kept or dropped by the parity of their length.  If the fields ever
outgrow 63 bits the code falls back to row-wise reduction; results are
identical, only slower.

The object of interest downstream is the n-th symmetric power of the
base set {1, ..., k}, whose cardinality as a function of n the chain and
recurrence modules reproduce without materialising any sets.  Power sets
grow fast, so the power operations take an element cap and raise
SizeLimitError instead of exhausting memory.

All operations are pure: ``SymSet`` is immutable and every operation
returns a new instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .errors import DomainError, SizeLimitError

#: Largest supported k for make_base_set.  18 primes fit below this cap,
#: which is far beyond what the fast methods cover (k <= 8) and enough
#: for brute-force experiments with general k.
MAX_K = 64

#: Default ceiling on the number of elements a symmetric power may hold.
DEFAULT_ELEMENT_CAP = 1 << 24

# A sym_prod accumulates |C|*|D| candidate keys before cancellation; the
# pair count is refused above this bound so a doomed product fails fast
# instead of thrashing memory.
_PAIR_GUARD = 1 << 28

# Chunk size (in keys) for blocked pairwise-product accumulation.
_CHUNK_KEYS = 1 << 25


@lru_cache(maxsize=None)
def _basis_for(k: int) -> tuple[int, ...]:
    """Primes <= k, the exponent-vector basis for SymSets at this k."""
    if not 1 <= k <= MAX_K:
        raise DomainError(f"k must be in 1..{MAX_K}, got {k}")
    sieve = bytearray([1]) * (k + 1)
    primes = []
    for p in range(2, k + 1):
        if sieve[p]:
            primes.append(p)
            for q in range(p * p, k + 1, p):
                sieve[q] = 0
    return tuple(primes)


def _factor(value: int, basis: tuple[int, ...]) -> list[int]:
    """Exponent vector of value over basis; DomainError if not smooth."""
    if value < 1:
        raise DomainError(f"set elements must be positive integers, got {value}")
    exps = []
    for p in basis:
        e = 0
        while value % p == 0:
            value //= p
            e += 1
        exps.append(e)
    if value != 1:
        raise DomainError(
            f"element has a prime factor outside the basis {basis}: residue {value}"
        )
    return exps


def _canonical(exps: np.ndarray) -> np.ndarray:
    """Rows sorted lexicographically, last column most significant.

    This matches ascending order of the packed keys no matter which
    field widths are in effect, so both reduction paths agree on the
    storage order.
    """
    if exps.shape[0] <= 1 or exps.shape[1] == 0:
        return exps
    return exps[np.lexsort(exps.T)]


def _field_shifts(maxima: Iterable[int]) -> tuple[np.ndarray, int]:
    """Bit offsets packing each column above the previous ones.

    Returns (shifts, total_bits); packing is valid in int64 only when
    total_bits <= 63.
    """
    shifts = []
    pos = 0
    for m in maxima:
        shifts.append(pos)
        pos += max(int(m).bit_length(), 1)
    return np.asarray(shifts, dtype=np.int64), pos


def _pack(exps: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    return (exps << shifts).sum(axis=1, dtype=np.int64)


def _unpack(keys: np.ndarray, maxima: Iterable[int]) -> np.ndarray:
    shifts, _ = _field_shifts(maxima)
    cols = []
    for j, m in enumerate(maxima):
        width = max(int(m).bit_length(), 1)
        cols.append((keys >> int(shifts[j])) & ((1 << width) - 1))
    if not cols:
        return np.empty((keys.size, 0), dtype=np.int64)
    return np.stack(cols, axis=1)


def _parity_sorted(keys: np.ndarray) -> np.ndarray:
    """Keys occurring an odd number of times, assuming sorted input."""
    if keys.size == 0:
        return keys
    new_run = np.empty(keys.size, dtype=bool)
    new_run[0] = True
    np.not_equal(keys[1:], keys[:-1], out=new_run[1:])
    starts = np.flatnonzero(new_run)
    lengths = np.diff(np.append(starts, keys.size))
    return keys[starts[(lengths & 1) == 1]]


def _parity_rows(exps: np.ndarray) -> np.ndarray:
    """Rows occurring an odd number of times, in canonical order."""
    if exps.shape[0] == 0:
        return exps
    if exps.shape[1] == 0:
        return exps[: exps.shape[0] % 2]
    uniq, counts = np.unique(exps, axis=0, return_counts=True)
    return _canonical(uniq[counts % 2 == 1])


def _parity_reduce(exps: np.ndarray) -> np.ndarray:
    """Multiplicity-parity reduction of a row multiset, canonical order."""
    if exps.shape[0] == 0 or exps.shape[1] == 0:
        return _parity_rows(exps)
    maxima = exps.max(axis=0)
    _, total = _field_shifts(maxima)
    if total <= 63:
        keys = _pack(exps, _field_shifts(maxima)[0])
        keys.sort(kind="stable")
        return _unpack(_parity_sorted(keys), maxima)
    return _parity_rows(exps)


@dataclass(frozen=True)
class ElementVec:
    """One set element as its exponent vector over a prime basis."""

    basis: tuple[int, ...]
    exponents: tuple[int, ...]

    def __post_init__(self):
        if len(self.basis) != len(self.exponents):
            raise DomainError("exponent vector length must match basis length")
        if any(e < 0 for e in self.exponents):
            raise DomainError("exponents must be non-negative")

    @classmethod
    def from_value(cls, k: int, value: int) -> "ElementVec":
        basis = _basis_for(k)
        return cls(basis, tuple(_factor(value, basis)))

    @property
    def value(self) -> int:
        """The encoded integer."""
        v = 1
        for p, e in zip(self.basis, self.exponents):
            v *= p**e
        return v

    def times(self, other: "ElementVec") -> "ElementVec":
        if self.basis != other.basis:
            raise DomainError("cannot multiply elements over different bases")
        return ElementVec(
            self.basis, tuple(a + b for a, b in zip(self.exponents, other.exponents))
        )

    def squared(self) -> "ElementVec":
        return ElementVec(self.basis, tuple(2 * e for e in self.exponents))


class SymSet:
    """Immutable set of smooth positive integers in exponent encoding.

    Construct via :meth:`from_values`, :meth:`empty` or
    :func:`make_base_set`; the raw constructor accepts a 2-D array of
    exponent rows and normalises it (duplicates collapse, rows are
    stored in canonical order).
    """

    __slots__ = ("_k", "_exps")

    def __init__(self, k: int, exponent_rows, *, _internal: bool = False):
        basis = _basis_for(int(k))
        self._k = int(k)
        if _internal:
            arr = exponent_rows
        else:
            arr = np.asarray(exponent_rows, dtype=np.int64)
            if arr.ndim != 2 or arr.shape[1] != len(basis):
                raise DomainError(
                    f"expected an (m, {len(basis)}) exponent array for k={k}"
                )
            if arr.size and (arr < 0).any():
                raise DomainError("exponents must be non-negative")
            if arr.shape[0] > 1:
                if arr.shape[1] == 0:
                    arr = arr[:1]
                else:
                    arr = _canonical(np.unique(arr, axis=0))
        self._exps = arr
        self._exps.setflags(write=False)

    @classmethod
    def from_values(cls, k: int, values: Iterable[int]) -> "SymSet":
        basis = _basis_for(int(k))
        vals = sorted({int(v) for v in values})
        rows = np.asarray(
            [_factor(v, basis) for v in vals], dtype=np.int64
        ).reshape(len(vals), len(basis))
        return cls(k, rows)

    @classmethod
    def empty(cls, k: int) -> "SymSet":
        basis = _basis_for(int(k))
        return cls(k, np.empty((0, len(basis)), dtype=np.int64))

    @property
    def k(self) -> int:
        return self._k

    @property
    def basis(self) -> tuple[int, ...]:
        return _basis_for(self._k)

    @property
    def exponents(self) -> np.ndarray:
        """Read-only (m, d) int64 array of exponent rows, canonical order."""
        return self._exps

    def values(self) -> list[int]:
        """Elements as plain integers, ascending."""
        basis = self.basis
        out = []
        for row in self._exps:
            v = 1
            for p, e in zip(basis, row):
                v *= p ** int(e)
            out.append(v)
        out.sort()
        return out

    def __len__(self) -> int:
        return self._exps.shape[0]

    def __iter__(self) -> Iterator[ElementVec]:
        basis = self.basis
        for row in self._exps:
            yield ElementVec(basis, tuple(int(e) for e in row))

    def __contains__(self, item) -> bool:
        if isinstance(item, ElementVec):
            if item.basis != self.basis:
                return False
            row = np.asarray(item.exponents, dtype=np.int64)
        else:
            try:
                row = np.asarray(_factor(int(item), self.basis), dtype=np.int64)
            except DomainError:
                return False
        if self._exps.shape[0] == 0:
            return False
        if self._exps.shape[1] == 0:
            return True
        return bool(np.all(self._exps == row, axis=1).any())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymSet):
            return NotImplemented
        return self._k == other._k and np.array_equal(self._exps, other._exps)

    def __hash__(self) -> int:
        return hash((self._k, self._exps.tobytes()))

    def __xor__(self, other: "SymSet") -> "SymSet":
        return sym_diff(self, other)

    def __mul__(self, other: "SymSet") -> "SymSet":
        if not isinstance(other, SymSet):
            return NotImplemented
        return sym_prod(self, other)

    def __repr__(self) -> str:
        if len(self) <= 8:
            return f"SymSet(k={self._k}, {{{', '.join(map(str, self.values()))}}})"
        return f"SymSet(k={self._k}, {len(self)} elements)"


def _check_same_ring(a: SymSet, b: SymSet) -> None:
    if a.k != b.k:
        raise DomainError(f"operands live over different rings: k={a.k} vs k={b.k}")


def make_base_set(k: int) -> SymSet:
    """The set {1, ..., k}, the generator whose symmetric powers we study.

    k is capped at MAX_K (64).
    """
    return SymSet.from_values(k, range(1, k + 1))


def sym_diff(a: SymSet, b: SymSet) -> SymSet:
    """Symmetric difference: elements in exactly one operand."""
    _check_same_ring(a, b)
    merged = np.concatenate([a.exponents, b.exponents])
    return SymSet(a.k, _parity_reduce(merged), _internal=True)


def sym_prod(a: SymSet, b: SymSet) -> SymSet:
    """Symmetric product: pairwise products with even-count cancellation.

    The annihilator rule holds: S * empty == empty.
    """
    _check_same_ring(a, b)
    if len(a) == 0 or len(b) == 0:
        return SymSet.empty(a.k)
    ea, eb = a.exponents, b.exponents
    if eb.shape[0] > ea.shape[0]:
        ea, eb = eb, ea
    m, p = ea.shape[0], eb.shape[0]
    if m * p > _PAIR_GUARD:
        raise SizeLimitError(
            f"symmetric product needs {m * p} pairwise products, over the guard {_PAIR_GUARD}"
        )
    if ea.shape[1] == 0:
        # Only {1} is representable over an empty basis; {1}*{1} == {1}.
        return SymSet(a.k, ea[:1], _internal=True)
    maxima = ea.max(axis=0) + eb.max(axis=0)
    shifts, total = _field_shifts(maxima)
    if total <= 63:
        ka = _pack(ea, shifts)  # canonical row order makes these ascending
        kb = _pack(eb, shifts)
        if p <= 512:
            out = np.empty(m * p, dtype=np.int64)
            for j in range(p):
                np.add(ka, kb[j], out=out[j * m : (j + 1) * m])
            out.sort(kind="stable")
            keys = _parity_sorted(out)
        else:
            rows_per = max(1, _CHUNK_KEYS // p)
            partials = []
            for i0 in range(0, m, rows_per):
                block = (ka[i0 : i0 + rows_per, None] + kb[None, :]).reshape(-1)
                block.sort(kind="stable")
                partials.append(_parity_sorted(block))
            if len(partials) == 1:
                keys = partials[0]
            else:
                merged = np.concatenate(partials)
                merged.sort(kind="stable")
                keys = _parity_sorted(merged)
        return SymSet(a.k, _unpack(keys, maxima), _internal=True)
    # Wide-exponent fallback: reduce raw rows chunk by chunk.  Parity is
    # additive mod 2, so reducing partial accumulations is sound.
    acc = None
    rows_per = max(1, _CHUNK_KEYS // (4 * p))
    for i0 in range(0, m, rows_per):
        block = (ea[i0 : i0 + rows_per, None, :] + eb[None, :, :]).reshape(
            -1, ea.shape[1]
        )
        block = _parity_rows(block)
        acc = block if acc is None else _parity_rows(np.concatenate([acc, block]))
    return SymSet(a.k, acc, _internal=True)


def sym_square(s: SymSet) -> SymSet:
    """Symmetric product of a set with itself.

    Cross terms pair up and cancel, so only the squares survive; the
    result has exactly the same cardinality, with every exponent
    doubled.  Doubling preserves canonical order, so no re-sort is
    needed.
    """
    return SymSet(s.k, s.exponents * 2, _internal=True)


def _check_cap(s: SymSet, cap: int) -> None:
    if len(s) > cap:
        raise SizeLimitError(
            f"symmetric power reached {len(s)} elements, over the cap {cap}"
        )


def sym_power(k: int, n: int, *, max_elements: int = DEFAULT_ELEMENT_CAP) -> SymSet:
    """n-th symmetric power of {1, ..., k} by square-and-multiply.

    sym_power(k, 0) is the ring identity {1}.  Raises SizeLimitError if
    any intermediate power exceeds max_elements.
    """
    if n < 0:
        raise DomainError(f"power index must be >= 0, got {n}")
    base = make_base_set(k)
    if n == 0:
        return SymSet.from_values(k, [1])
    result = base
    _check_cap(result, max_elements)
    for bit in bin(n)[3:]:
        result = sym_square(result)
        if bit == "1":
            result = sym_prod(result, base)
        _check_cap(result, max_elements)
    return result


def brute_card(k: int, n: int, *, max_elements: int = DEFAULT_ELEMENT_CAP) -> int:
    """Cardinality of the n-th symmetric power, by building the set.

    This is the ground-truth oracle the structural methods are checked
    against.  It works for any k up to MAX_K, subject to the element
    cap.
    """
    return len(sym_power(k, n, max_elements=max_elements))


def power_card_sequence(
    k: int, limit: int, *, max_elements: int = DEFAULT_ELEMENT_CAP
) -> list[int]:
    """Cardinalities of powers 0..limit by one multiply per step.

    Equivalent to [brute_card(k, n) for n in range(limit + 1)] but far
    cheaper for a dense sweep, since power n is reused for power n+1.
    """
    if limit < 0:
        raise DomainError(f"limit must be >= 0, got {limit}")
    base = make_base_set(k)
    current = SymSet.from_values(k, [1])
    cards = [1]
    for _ in range(limit):
        current = sym_prod(current, base)
        _check_cap(current, max_elements)
        cards.append(len(current))
    return cards
