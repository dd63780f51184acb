"""Closed-form engines for power-set cardinalities.

Let term(k, n) be the cardinality of the n-th symmetric power of
{1, ..., k}.  Everything here reproduces that number from the binary
expansion of n without building any sets:

* ``sparse_term(k, t)``: the subsequence at the all-ones indices
  2**t - 1, which satisfies a short linear recurrence for each
  k in 2..8 (seeds and coefficients hardcoded below);
* ``fast_term(k, n)`` for k <= 7: the term is the product of sparse
  terms over the maximal runs of 1-bits of n.  The underlying
  multiplicativity breaks at k = 8 (n = 11 is the smallest
  counterexample), so k = 8 is rejected;
* ``matrix_term(n)`` for k = 8: a 5-state matrix word read off the bits
  of n, most significant first - one fixed matrix per 1-bit, another
  per 0-bit - applied to the initial state, then contracted with the
  cardinality functional;
* ``reduce_term(n)`` for k = 8: a memoised rewriting system on binary
  expansions with base cases {0, 1, 3} and five core rules (plus two
  optional shortcut rules that never change values).  It can return the
  full derivation as a ReductionTrace.

``matrix_identity_suite`` and ``annihilation_check`` verify, in exact
integer arithmetic, the matrix identities that make the whole scheme
tick.  ``gap_split_check`` tests the product rule behind fast_term on
the brute oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .chains import (
    cardinality_functional,
    initial_vector,
    is_zero_mat,
    mat_identity,
    mat_mul,
    mat_scale,
    mat_sub,
    mat_vec,
    squaring_matrix,
    transfer_matrix,
    vec_mat,
    vec_outer,
)
from .core import DEFAULT_ELEMENT_CAP, MAX_K, brute_card
from .errors import DomainError

# Sparse-subsequence recurrences: k -> (seeds, coefficients), meaning
# sparse(t) = seeds[t] while available, then
# sparse(t) = sum(coeffs[i] * sparse(t - 1 - i)).
_SPARSE_RECURRENCES: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {
    2: ((1,), (2,)),
    3: ((1,), (3,)),
    4: ((1, 4), (2, 4)),
    5: ((1, 5), (3, 6)),
    6: ((1, 6), (5,)),  # the ratio-5 law only kicks in after the seed
    7: ((1, 7), (6, 1)),
    8: ((1, 8, 48), (7, -2, -24)),
}


def sparse_term(k: int, t: int) -> int:
    """term(k, 2**t - 1), by the hardcoded linear recurrence."""
    if k not in _SPARSE_RECURRENCES:
        raise DomainError(f"sparse recurrences cover k in 2..8, got {k}")
    if t < 0:
        raise DomainError(f"index must be >= 0, got {t}")
    seeds, coeffs = _SPARSE_RECURRENCES[k]
    if t < len(seeds):
        return seeds[t]
    window = list(seeds[-len(coeffs) :])
    for _ in range(t - len(seeds) + 1):
        window.append(sum(c * w for c, w in zip(coeffs, reversed(window))))
        window.pop(0)
    return window[-1]


def _one_run_lengths(n: int) -> list[int]:
    return [len(run) for run in bin(n)[2:].split("0") if run]


def fast_term(k: int, n: int) -> int:
    """Product of sparse terms over the maximal 1-runs of n (k <= 7).

    Rejects k = 8, where run-multiplicativity fails.
    """
    if k == 8:
        raise DomainError(
            "the run-product formula is false at k=8 (n=11 is a counterexample); "
            "use the matrix or reduce method"
        )
    if not 1 <= k <= 7:
        raise DomainError(f"fast_term supports k in 1..7, got {k}")
    if n < 0:
        raise DomainError(f"index must be >= 0, got {n}")
    if k == 1:
        return 1
    result = 1
    for length in _one_run_lengths(n):
        result *= sparse_term(k, length)
    return result


def gap_split_check(k: int, alpha: int, beta: int, s: int) -> bool:
    """Does splitting at a double-zero gap multiply cardinalities?

    Checks term(k, alpha + beta * 2**(s+1)) == term(k, alpha) * term(k, beta)
    on the brute oracle, requiring alpha < 2**s so the gap is real.
    Always true for k <= 7; k = 8 is accepted and falsifiable
    (alpha=3, beta=1, s=2 gives 368 != 384).
    """
    if s < 0 or alpha < 0 or beta < 0:
        raise DomainError("alpha, beta, s must be non-negative")
    if alpha >= 1 << s:
        raise DomainError(f"need alpha < 2**s, got alpha={alpha}, s={s}")
    n = alpha + beta * (1 << (s + 1))
    return brute_card(k, n) == brute_card(k, alpha) * brute_card(k, beta)


# ---------------------------------------------------------------------------
# Matrix word (k = 8)

_STEP8 = transfer_matrix(8).rows
_SQUARE8 = squaring_matrix().rows
_FUNCTIONAL8 = cardinality_functional(8)
_INITIAL8 = initial_vector(8)


def matrix_state(n: int) -> tuple[int, ...]:
    """The 5-component structural state at index n, from the bit word.

    Bits of n are read most significant first; a 1-bit applies the step
    matrix, a 0-bit the squaring matrix, starting from the initial
    state.
    """
    if n < 0:
        raise DomainError(f"index must be >= 0, got {n}")
    v = _INITIAL8
    for ch in bin(n)[2:]:
        v = mat_vec(_STEP8 if ch == "1" else _SQUARE8, v)
    return v


def matrix_term(n: int) -> int:
    """term(8, n) by the matrix word, exact for any n >= 0."""
    v = matrix_state(n)
    return v[0] + v[2] + v[4]


def matrix_term_range(limit: int) -> np.ndarray:
    """term(8, n) for all n in 0..limit, as an int64 array.

    A level-by-level dynamic program over the bit words: state(2m) and
    state(2m+1) both derive from state(m).  int64 is provably safe as
    long as 32 * sparse_term(8, bits(limit)) fits, since every state
    component is bounded by the all-ones term of the same bit length;
    beyond that the call is refused (use matrix_term per index).
    """
    if limit < 0:
        raise DomainError(f"limit must be >= 0, got {limit}")
    bits = int(limit).bit_length()
    if 32 * sparse_term(8, max(bits, 1)) >= 2**63:
        raise DomainError(
            f"values near 2**{bits} bits overflow the int64 sweep; "
            "call matrix_term per index instead"
        )
    step_t = np.array(_STEP8, dtype=np.int64).T
    square_t = np.array(_SQUARE8, dtype=np.int64).T
    states = np.zeros((limit + 1, 5), dtype=np.int64)
    states[0] = _INITIAL8
    level = 1
    while level <= limit:
        hi = min(2 * level - 1, limit)
        idx = np.arange(level, hi + 1)
        parents = states[idx >> 1]
        odd = (idx & 1) == 1
        states[idx[odd]] = parents[odd] @ step_t
        states[idx[~odd]] = parents[~odd] @ square_t
        level *= 2
    return states @ np.array(_FUNCTIONAL8, dtype=np.int64)


# ---------------------------------------------------------------------------
# Rewriting system on binary expansions (k = 8)

_BASE_VALUES = {0: 1, 1: 8, 3: 48}

# Linear rules: child coefficients.  The gap split multiplies instead.
_RULE_COEFFS = {
    "strip_zeros": (1,),
    "suffix_01": (8,),
    "suffix_011": (1, 40),
    "block_111": (7, -2, -24),
    "suffix_011011": (47, -40),
    "suffix_101011": (9, -8),
    "prefix_10101": (9, -8),
}

CORE_RULES = ("strip_zeros", "gap_split", "suffix_01", "suffix_011", "block_111")
OPTIONAL_RULES = ("suffix_011011", "suffix_101011", "prefix_10101")


def _select_rule(n: int, optional_rules: bool) -> tuple[str, tuple[int, ...]]:
    """Deterministic rule choice: trailing zeros first, then the lowest
    double-zero gap, then (optionally) the shortcut patterns, then the
    01 / 011 suffixes, finally the lowest 111 block.  Every child has
    strictly fewer bits, so rewriting terminates."""
    if n in _BASE_VALUES:
        return "base", ()
    s = bin(n)[2:]
    if s[-1] == "0":
        shift = len(s) - len(s.rstrip("0"))
        return "strip_zeros", (n >> shift,)
    p = s.rfind("00")
    if p != -1:
        i = len(s) - 2 - p  # low index of the gap; i >= 1 since n is odd
        return "gap_split", (n & ((1 << i) - 1), n >> (i + 2))
    if optional_rules:
        if s.endswith("011011"):
            head = n >> 6
            return "suffix_011011", ((head << 3) | 0b011, head)
        if s.endswith("101011"):
            head = n >> 6
            return "suffix_101011", ((head << 4) | 0b1011, (head << 2) | 0b11)
        if len(s) >= 5 and s.startswith("10101"):
            t = len(s) - 5
            low = n & ((1 << t) - 1)
            return "prefix_10101", ((0b101 << t) | low, (1 << t) | low)
    if s.endswith("01"):
        return "suffix_01", (n >> 2,)
    if s.endswith("011"):
        return "suffix_011", (((n >> 3) << 1) | 1, n >> 3)
    # odd, no 00 gap, not ending 01/011: the expansion must end in 111
    p = s.rfind("111")
    i = len(s) - 3 - p
    low = n & ((1 << i) - 1)
    high = n >> (i + 3)
    return "block_111", (
        (high << (i + 2)) | (0b11 << i) | low,
        (high << (i + 1)) | (1 << i) | low,
        (high << i) | low,
    )


def _combine(rule: str, n: int, child_values: tuple[int, ...]) -> int:
    if rule == "base":
        return _BASE_VALUES[n]
    if rule == "gap_split":
        return child_values[0] * child_values[1]
    coeffs = _RULE_COEFFS[rule]
    return sum(c * v for c, v in zip(coeffs, child_values))


@dataclass(frozen=True)
class ReductionTrace:
    """One node of a derivation: which rule fired at n and what came out.

    Shared subproblems appear as shared child nodes (the derivation is
    really a DAG); ``to_text`` prints each non-leaf subtree once and
    marks repeats.
    """

    n: int
    rule: str
    value: int
    children: tuple["ReductionTrace", ...]

    def leaves(self) -> Iterator["ReductionTrace"]:
        if not self.children:
            yield self
            return
        for child in self.children:
            yield from child.leaves()

    def iter_nodes(self) -> Iterator["ReductionTrace"]:
        yield self
        for child in self.children:
            yield from child.iter_nodes()

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "bits": bin(self.n)[2:],
            "rule": self.rule,
            "value": self.value,
            "children": [c.as_dict() for c in self.children],
        }

    def to_text(self) -> str:
        lines: list[str] = []
        seen: set[int] = set()

        def walk(node: "ReductionTrace", depth: int) -> None:
            line = (
                f"{'  ' * depth}n={node.n} bits={bin(node.n)[2:]} "
                f"rule={node.rule} value={node.value}"
            )
            if node.children and node.n in seen:
                lines.append(line + " (expanded above)")
                return
            seen.add(node.n)
            lines.append(line)
            for child in node.children:
                walk(child, depth + 1)

        walk(self, 0)
        return "\n".join(lines)


def _reduce_values(n: int, optional_rules: bool, cache: dict[int, int]) -> int:
    """Evaluate the rewriting system iteratively (no recursion limit)."""
    pending = [n]
    rules: dict[int, tuple[str, tuple[int, ...]]] = {}
    while pending:
        m = pending[-1]
        if m in cache:
            pending.pop()
            continue
        if m not in rules:
            rules[m] = _select_rule(m, optional_rules)
        rule, children = rules[m]
        missing = [c for c in children if c not in cache]
        if missing:
            pending.extend(missing)
            continue
        cache[m] = _combine(rule, m, tuple(cache[c] for c in children))
        pending.pop()
    return cache[n]


def reduce_term(
    n: int,
    *,
    trace: bool = False,
    optional_rules: bool = False,
    cache: Optional[dict[int, int]] = None,
):
    """term(8, n) by memoised rewriting.

    Returns the value, or (value, ReductionTrace) when trace is set.
    A cache dict may be shared across calls for sweeps; entries are
    plain n -> value and are valid under either rule set, since the
    optional rules never change values.
    """
    if n < 0:
        raise DomainError(f"index must be >= 0, got {n}")
    values = cache if cache is not None else {}
    value = _reduce_values(n, optional_rules, values)
    if not trace:
        return value
    nodes: dict[int, ReductionTrace] = {}
    pending = [n]
    while pending:
        m = pending[-1]
        if m in nodes:
            pending.pop()
            continue
        rule, children = _select_rule(m, optional_rules)
        missing = [c for c in children if c not in nodes]
        if missing:
            pending.extend(missing)
            continue
        nodes[m] = ReductionTrace(
            m, rule, values[m], tuple(nodes[c] for c in children)
        )
        pending.pop()
    return value, nodes[n]


# ---------------------------------------------------------------------------
# Dispatch

_METHODS = ("auto", "brute", "fast", "matrix", "reduce")


def term(
    k: int,
    n: int,
    method: str = "auto",
    *,
    max_elements: int = DEFAULT_ELEMENT_CAP,
) -> int:
    """Cardinality of the n-th symmetric power of {1, ..., k}.

    method "auto" picks the run-product formula for k <= 7, the matrix
    word for k = 8, and the brute set oracle otherwise.  "matrix" and
    "reduce" exist only at k = 8; "fast" only below it.
    """
    if method not in _METHODS:
        raise DomainError(f"unknown method {method!r}, expected one of {_METHODS}")
    if not 1 <= k <= MAX_K:
        raise DomainError(f"k must be in 1..{MAX_K}, got {k}")
    if n < 0:
        raise DomainError(f"index must be >= 0, got {n}")
    if method == "auto":
        method = "fast" if k <= 7 else ("matrix" if k == 8 else "brute")
    if method == "brute":
        return brute_card(k, n, max_elements=max_elements)
    if method == "fast":
        return fast_term(k, n)
    if k != 8:
        raise DomainError(f"method {method!r} is defined only for k=8, got k={k}")
    if method == "matrix":
        return matrix_term(n)
    return reduce_term(n)


# ---------------------------------------------------------------------------
# Exact identity checks


@dataclass(frozen=True)
class IdentityReport:
    """Pass/fail outcome of a batch of exact matrix identities."""

    entries: tuple[tuple[str, bool], ...]

    @property
    def all_ok(self) -> bool:
        return all(ok for _, ok in self.entries)

    def summary(self) -> str:
        return "\n".join(
            f"{'ok  ' if ok else 'FAIL'} {name}" for name, ok in self.entries
        )


def matrix_identity_suite() -> IdentityReport:
    """Exact integer checks of the squaring/step matrix interplay (k=8).

    These identities are what let the matrix word skip the zero bits of
    n in blocks and are the backbone of the shortcut rewriting rules.
    """
    step = _STEP8
    square = _SQUARE8
    functional = _FUNCTIONAL8
    initial = _INITIAL8
    dim = len(step)

    def dot(u, v):
        return sum(a * b for a, b in zip(u, v))

    r1 = vec_mat(functional, step)
    r2 = vec_mat(r1, step)
    r3 = vec_mat(r2, step)
    sq_step = mat_mul(square, step)
    sq_step2 = mat_mul(sq_step, sq_step)
    # q(X) = X**2 - 9X + 8I, the non-trivial factor of the annihilator
    q = mat_sub(sq_step2, mat_sub(mat_scale(9, sq_step), mat_scale(8, mat_identity(dim))))
    zero_row = (0,) * dim

    entries = [
        (
            "functional applied to the initial state is 1",
            dot(functional, initial) == 1,
        ),
        (
            "functional is invariant under the squaring matrix",
            vec_mat(functional, square) == functional,
        ),
        (
            "one step then squaring scales the functional by 8",
            vec_mat(r1, square) == tuple(8 * x for x in functional),
        ),
        (
            "two steps then squaring equals one step plus 40 functionals",
            vec_mat(r2, square)
            == tuple(a + 40 * b for a, b in zip(r1, functional)),
        ),
        (
            "three steps collapse by the depth-3 recurrence on the functional",
            r3 == tuple(7 * a - 2 * b - 24 * c for a, b, c in zip(r2, r1, functional)),
        ),
        (
            "squaring matrix squared is the rank-one projector onto the initial state",
            mat_mul(square, square) == vec_outer(initial, functional),
        ),
        (
            "square-then-step product satisfies its quartic annihilator",
            is_zero_mat(mat_mul(sq_step2, q)),
        ),
        (
            "no cubic divisor annihilates the square-then-step product",
            not any(
                is_zero_mat(mat)
                for mat in (
                    mat_mul(sq_step2, mat_sub(sq_step, mat_identity(dim))),
                    mat_mul(sq_step2, mat_sub(sq_step, mat_scale(8, mat_identity(dim)))),
                    mat_mul(
                        mat_mul(sq_step, mat_sub(sq_step, mat_identity(dim))),
                        mat_sub(sq_step, mat_scale(8, mat_identity(dim))),
                    ),
                )
            ),
        ),
        (
            "one- and two-step rows are killed by the quadratic factor",
            vec_mat(r1, q) == zero_row and vec_mat(r2, q) == zero_row,
        ),
        (
            "the three-step row survives the quadratic factor yet kills the initial state",
            vec_mat(r3, q) != zero_row and dot(vec_mat(r3, q), initial) == 0,
        ),
    ]
    return IdentityReport(tuple(entries))


# Characteristic polynomials of the sparse recurrences, high degree first.
_ANNIHILATOR_COEFFS = {
    4: (1, -2, -4),
    5: (1, -3, -6),
    6: (1, -5, 0),
    7: (1, -6, -1),
    8: (1, -7, 2, 24),
}


def annihilation_check(k: int) -> bool:
    """Does the sparse recurrence's characteristic polynomial kill the
    cardinality functional against the step matrix?  Exact, k in 4..8."""
    if k not in _ANNIHILATOR_COEFFS:
        raise DomainError(f"annihilation checks cover k in 4..8, got {k}")
    step = transfer_matrix(k).rows
    functional = cardinality_functional(k)
    coeffs = _ANNIHILATOR_COEFFS[k]
    rows = [functional]
    for _ in range(len(coeffs) - 1):
        rows.append(vec_mat(rows[-1], step))
    dim = len(functional)
    acc = [0] * dim
    for coeff, row in zip(coeffs, reversed(rows)):
        for j in range(dim):
            acc[j] += coeff * row[j]
    return all(x == 0 for x in acc)
