"""1-line ORBGRAND noise-effect patterns.

A pattern is a set of reliability ranks (1 = least reliable bit). Patterns
are emitted by increasing logistic weight (the sum of the ranks); patterns
of equal weight come out by increasing size, then lexicographically on the
sorted rank tuple. For n = 3 the full order is::

    {}, {1}, {2}, {3}, {1,2}, {1,3}, {2,3}, {1,2,3}
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .bitlinalg import BitVector

EVEN = 0
ODD = 1


@dataclass(frozen=True)
class ReliabilityRanking:
    """``order[r - 1]`` is the (0-based) position holding rank ``r``."""

    order: np.ndarray
    inverse: np.ndarray

    @property
    def n(self) -> int:
        return int(self.order.size)

    def positions(self, ranks) -> list[int]:
        return [int(self.order[r - 1]) for r in ranks]


def rank_reliabilities(llr) -> ReliabilityRanking:
    """Sort positions by ``|llr|`` ascending; ties keep position order."""
    mag = np.abs(np.asarray(llr, dtype=np.float64))
    order = np.argsort(mag, kind="stable")
    inverse = np.empty_like(order)
    inverse[order] = np.arange(order.size)
    return ReliabilityRanking(order, inverse)


def _distinct_parts(total: int, count: int, lo: int, hi: int) -> Iterator[tuple[int, ...]]:
    """Increasing ``count``-tuples from ``[lo, hi]`` summing to ``total``, in
    lexicographic order."""
    if count == 0:
        if total == 0:
            yield ()
        return
    top_sum = (2 * hi - count + 2) * (count - 1) // 2  # hi-count+2 .. hi
    for a in range(lo, hi + 1):
        low_sum = (2 * a + count) * (count - 1) // 2  # a+1 .. a+count-1
        if a + low_sum > total:
            break
        if a + top_sum < total:
            continue
        for tail in _distinct_parts(total - a, count - 1, a + 1, hi):
            yield (a,) + tail


def rank_subsets(n: int, parity: int | None = None) -> Iterator[tuple[int, ...]]:
    """All rank subsets of ``{1..n}`` in canonical order, optionally keeping
    only those whose size has the given parity."""
    for w in range(n * (n + 1) // 2 + 1):
        c = 0
        while c <= n and c * (c + 1) // 2 <= w:
            if parity is None or c % 2 == parity:
                yield from _distinct_parts(w, c, 1, n)
            c += 1


def required_pattern_parity(even_weight: bool, y_hd: BitVector) -> int | None:
    """Pattern-weight parity that makes ``y_hd ^ pattern`` even, or ``None``
    when the code is not an even-weight code."""
    if not even_weight:
        return None
    return y_hd.parity()


class PatternStream:
    """Stateful iterator over noise-effect patterns for one received word.

    ``next_pattern`` returns ``None`` once the stream is exhausted. Patterns
    removed by the parity filter are not emitted and not counted.
    """

    def __init__(self, ranking: ReliabilityRanking, parity: int | None = None):
        self.ranking = ranking
        self.parity = parity
        self.count = 0
        self.last_ranks: tuple[int, ...] | None = None
        self._it = rank_subsets(ranking.n, parity)

    @classmethod
    def from_llr(cls, llr, parity: int | None = None) -> "PatternStream":
        return cls(rank_reliabilities(llr), parity)

    @property
    def logistic_weight(self) -> int | None:
        return None if self.last_ranks is None else sum(self.last_ranks)

    def next_ranks(self) -> tuple[int, ...] | None:
        ranks = next(self._it, None)
        if ranks is not None:
            self.count += 1
            self.last_ranks = ranks
        return ranks

    def next_positions(self) -> list[int] | None:
        ranks = self.next_ranks()
        return None if ranks is None else self.ranking.positions(ranks)

    def next_pattern(self) -> BitVector | None:
        pos = self.next_positions()
        return None if pos is None else BitVector.from_positions(self.ranking.n, pos)

    def __iter__(self):
        return self

    def __next__(self) -> BitVector:
        p = self.next_pattern()
        if p is None:
            raise StopIteration
        return p
