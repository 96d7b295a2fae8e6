"""
Zero-error one-shot coding for the noise-free channel Y = X + S.

Purpose: Build M associated symbols whose output multi-sets {x_{i_q} + s_q} are mutually
         disjoint, check disjointness, search exhaustively when no construction applies, and
         report the log2 M fast path when all MQ outputs are distinct
Key Decisions: Exact rationals throughout; floats never decide equality of outputs.
               The construction requires an arithmetic-progression input alphabet and adds one
               interference level at a time: outputs already owned by a multi-set stay with it,
               the rest go in ascending order to the remaining multi-sets ordered by minimum.
               Interference levels are sorted internally; returned tuples follow the caller's order.
Limitations: The exhaustive search is exponential in M and Q and is budgeted
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from loguru import logger

from precoder.channel_model import AssociatedSymbol, Number, exact_value
from precoder.constants import NOISE_FREE_SEARCH_BUDGET
from precoder.exceptions import BudgetExceeded, ComputationError, ConfigError, NotArithmeticProgression
from precoder.outcomes import NotApplicable

ExactValue = Fraction


@dataclass(frozen=True)
class OutputMultiset:
    """The Q outputs one message can produce, one per interference level, with multiplicity."""

    values: tuple[ExactValue, ...]

    @classmethod
    def of(cls, symbol: AssociatedSymbol, x: Sequence[ExactValue], s: Sequence[ExactValue]) -> "OutputMultiset":
        return cls(tuple(sorted(x[i] + s_q for i, s_q in zip(symbol.indices, s))))

    @property
    def counts(self) -> Counter:
        return Counter(self.values)

    def __contains__(self, value: object) -> bool:
        return value in self.values

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Witness:
    tuples: list[AssociatedSymbol]
    multisets: list[OutputMultiset]
    nodes: int


@dataclass(frozen=True)
class NoneExists:
    """Exhaustion certificate: every tuple system was examined (up to relabeling) and none is disjoint."""

    nodes: int

    @property
    def status(self) -> str:
        return "NoneExists"


def _exact_all(values: Sequence[Number]) -> list[ExactValue]:
    return [exact_value(v) for v in values]


def _check_alphabets(x: list[ExactValue], s: list[ExactValue]) -> None:
    if len(x) < 1 or len(s) < 1:
        raise ConfigError("alphabets must be nonempty")
    if len(set(x)) != len(x) or len(set(s)) != len(s):
        raise ConfigError("alphabet entries must be distinct")


def is_arithmetic_progression(x: Sequence[ExactValue]) -> bool:
    steps = {b - a for a, b in itertools.pairwise(sorted(x))}
    return len(steps) <= 1


def output_multisets(
    tuples: Sequence[AssociatedSymbol], x: Sequence[Number], s: Sequence[Number]
) -> list[OutputMultiset]:
    x_e, s_e = _exact_all(x), _exact_all(s)
    return [OutputMultiset.of(t, x_e, s_e) for t in tuples]


def verify_disjoint(multisets: Sequence[OutputMultiset]) -> bool:
    """True iff no value occurs in two different multi-sets (repeats inside one are allowed)."""
    owner: dict[ExactValue, int] = {}
    for m, multiset in enumerate(multisets):
        for value in set(multiset.values):
            if owner.setdefault(value, m) != m:
                return False
    return True


def construct_disjoint(x: Sequence[Number], s: Sequence[Number]) -> list[AssociatedSymbol]:
    """M associated symbols with mutually disjoint output multi-sets.

    Args:
        x: Input alphabet, an arithmetic progression (sorted or not).
        s: Interference alphabet in any order; tuple coordinate q refers to s[q].

    Raises:
        NotArithmeticProgression: If x is not an arithmetic progression.
    """
    x_e, s_e = _exact_all(x), _exact_all(s)
    _check_alphabets(x_e, s_e)
    if not is_arithmetic_progression(x_e):
        raise NotArithmeticProgression(f"input alphabet {[str(v) for v in x_e]} is not an arithmetic progression")
    M = len(x_e)
    x_order = sorted(range(M), key=lambda i: x_e[i])
    s_order = sorted(range(len(s_e)), key=lambda q: s_e[q])

    # columns[m] holds the input indices of message m, one per sorted interference level
    columns: list[list[int]] = [[i] for i in x_order]
    owner: dict[ExactValue, int] = {x_e[i] + s_e[s_order[0]]: m for m, i in enumerate(x_order)}
    minimum = [x_e[i] + s_e[s_order[0]] for i in x_order]

    for q in s_order[1:]:
        level = [(x_e[i] + s_e[q], i) for i in x_order]
        taken: set[int] = set()
        remaining = []
        for value, i in level:
            m = owner.get(value)
            if m is None:
                remaining.append((value, i))
            elif m in taken:
                raise ComputationError(f"two outputs of level s={s_e[q]} fall in one multi-set")
            else:
                taken.add(m)
                columns[m].append(i)
        free = sorted((m for m in range(M) if m not in taken), key=lambda m: minimum[m])
        for m, (value, i) in zip(free, remaining):
            owner[value] = m
            columns[m].append(i)
            minimum[m] = min(minimum[m], value)

    # back to the caller's interference order
    position = {q: k for k, q in enumerate(s_order)}
    tuples = [AssociatedSymbol(tuple(col[position[q]] for q in range(len(s_e)))) for col in columns]
    multisets = [OutputMultiset.of(t, x_e, s_e) for t in tuples]
    if not verify_disjoint(multisets):
        raise ComputationError("constructed multi-sets are not disjoint")
    logger.debug(f"Constructed {M} disjoint multi-sets over {len(s_e)} interference levels")
    return tuples


def exists_disjoint_exhaustive(
    x: Sequence[Number], s: Sequence[Number], budget: int = NOISE_FREE_SEARCH_BUDGET
) -> Witness | NoneExists:
    """Backtracking search for M tuples with mutually disjoint output multi-sets.

    Message m is pinned to input index m at the first interference level; every other level is
    filled one message at a time, rejecting outputs owned by another message.

    Raises:
        BudgetExceeded: If more than `budget` nodes are visited.
    """
    x_e, s_e = _exact_all(x), _exact_all(s)
    _check_alphabets(x_e, s_e)
    M, Q = len(x_e), len(s_e)
    owner: dict[ExactValue, list[int]] = {}  # value -> [message, multiplicity]
    columns = [[m] for m in range(M)]
    used = [[False] * M for _ in range(Q)]
    nodes = 0

    def claim(value: ExactValue, m: int) -> bool:
        entry = owner.get(value)
        if entry is None:
            owner[value] = [m, 1]
            return True
        if entry[0] != m:
            return False
        entry[1] += 1
        return True

    def release(value: ExactValue) -> None:
        entry = owner[value]
        entry[1] -= 1
        if entry[1] == 0:
            del owner[value]

    for m in range(M):
        claim(x_e[m] + s_e[0], m)
        used[0][m] = True

    def search(q: int, m: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"disjointness search exceeded {budget} nodes", nodes)
        if q == Q:
            return True
        next_q, next_m = (q, m + 1) if m + 1 < M else (q + 1, 0)
        for i in range(M):
            if used[q][i]:
                continue
            value = x_e[i] + s_e[q]
            if not claim(value, m):
                continue
            used[q][i] = True
            columns[m].append(i)
            if search(next_q, next_m):
                return True
            columns[m].pop()
            used[q][i] = False
            release(value)
        return False

    if search(1, 0):
        tuples = [AssociatedSymbol(tuple(col)) for col in columns]
        logger.debug(f"Disjoint system found after {nodes} nodes")
        return Witness(tuples=tuples, multisets=[OutputMultiset.of(t, x_e, s_e) for t in tuples], nodes=nodes)
    logger.info(f"No disjoint system exists; search exhausted after {nodes} nodes")
    return NoneExists(nodes=nodes)


def distinct_output_rate(x: Sequence[Number], s: Sequence[Number]) -> float | NotApplicable:
    """log2 M when the MQ outputs x_i + s_q are all distinct."""
    x_e, s_e = _exact_all(x), _exact_all(s)
    outputs = {a + b for a in x_e for b in s_e}
    if len(outputs) == len(x_e) * len(s_e):
        return math.log2(len(x_e))
    return NotApplicable(f"only {len(outputs)} distinct outputs out of {len(x_e) * len(s_e)}")
