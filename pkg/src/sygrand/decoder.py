"""GRAND-family decoders for binary linear codes.

Three query policies share one loop over 1-line ORBGRAND patterns:

``orbgrand``
    Return the first guess whose syndrome is zero.
``sygrand``
    Additionally, whenever a guess's syndrome equals column ``p`` of ``H``,
    flipping bit ``p`` of the guess gives a codeword. Such candidates are
    collected in a list; decoding stops once the soft-output estimate of the
    probability that the transmitted codeword is missing from the list drops
    to ``theta``, or once the list holds ``l_max`` entries. The most likely
    list entry is returned. A guess with zero syndrome is returned at once.
``ordept``
    Same candidate discovery, but stops after ``t_budget`` queries or
    ``c_max`` candidates, with no soft-output test.

With ``use_parity_constraint`` on an even-weight code, ``orbgrand`` only
generates guesses of even parity. The list policies keep generating odd
guesses (each counts as a query), since those are exactly the words one flip
away from a codeword.

This module is the readable reference path. The Monte Carlo harness uses a
compiled twin in :mod:`sygrand._kernels`, which is tested against it
trial by trial.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .bitlinalg import BitVector
from .channel import hard_decision
from .codes import LinearCode
from .patterns import PatternStream, rank_reliabilities, required_pattern_parity

LN2 = math.log(2.0)
DEFAULT_MAX_QUERIES = 10**6


class Variant(str, enum.Enum):
    ORBGRAND = "orbgrand"
    SYGRAND = "sygrand"
    ORDEPT = "ordept"


class Status(str, enum.Enum):
    CODEWORD_HIT = "codeword_hit"
    LIST_TERMINATED = "list_terminated"
    LIST_FULL = "list_full"
    ABANDONED = "abandoned"


@dataclass(frozen=True)
class DecoderConfig:
    """Decoder parameters.

    ``l_max`` and ``c_max`` accept ``None`` for an unbounded list.
    """

    variant: Variant = Variant.ORBGRAND
    theta: float = 0.0
    l_max: int | None = 1
    t_budget: int = 50
    c_max: int | None = 3
    max_queries: int = DEFAULT_MAX_QUERIES
    use_parity_constraint: bool = True

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta}")
        if self.l_max is not None and self.l_max < 1:
            raise ValueError(f"l_max must be >= 1, got {self.l_max}")
        if self.c_max is not None and self.c_max < 1:
            raise ValueError(f"c_max must be >= 1, got {self.c_max}")
        if self.t_budget < 1:
            raise ValueError(f"t_budget must be >= 1, got {self.t_budget}")
        if self.max_queries < 1:
            raise ValueError(f"max_queries must be >= 1, got {self.max_queries}")

    @classmethod
    def orbgrand(cls, **kw) -> "DecoderConfig":
        return cls(Variant.ORBGRAND, **kw)

    @classmethod
    def sygrand(cls, theta: float, l_max: int | None, **kw) -> "DecoderConfig":
        return cls(Variant.SYGRAND, theta=theta, l_max=l_max, **kw)

    @classmethod
    def ordept(cls, t_budget: int, c_max: int | None, **kw) -> "DecoderConfig":
        return cls(Variant.ORDEPT, t_budget=t_budget, c_max=c_max, **kw)

    def describe(self) -> str:
        """Short parameter string, e.g. ``theta=0.71;lmax=3``."""
        if self.variant is Variant.SYGRAND:
            lm = "inf" if self.l_max is None else self.l_max
            s = f"theta={self.theta:g};lmax={lm}"
        elif self.variant is Variant.ORDEPT:
            cm = "inf" if self.c_max is None else self.c_max
            s = f"t={self.t_budget};cmax={cm}"
        else:
            s = ""
        extra = [f"maxq={self.max_queries}"]
        if not self.use_parity_constraint:
            extra.append("noparity")
        return ";".join(([s] if s else []) + extra)


class _NeumaierSum:
    __slots__ = ("total", "comp")

    def __init__(self, start: float = 0.0):
        self.total = start
        self.comp = 0.0

    def add(self, x: float) -> None:
        t = self.total + x
        if abs(self.total) >= abs(x):
            self.comp += (self.total - t) + x
        else:
            self.comp += (x - t) + self.total
        self.total = t

    @property
    def value(self) -> float:
        return self.total + self.comp


@dataclass(frozen=True)
class Candidate:
    word: BitVector
    log_likelihood: float
    query: int


class CandidateList:
    """Distinct codewords with their accumulated probability mass."""

    def __init__(self):
        self.entries: list[Candidate] = []
        self._members: set[int] = set()
        self._mass = _NeumaierSum()

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: BitVector) -> bool:
        return word.bits in self._members

    def __iter__(self):
        return iter(self.entries)

    def add(self, word: BitVector, log_likelihood: float, query: int) -> bool:
        """Insert ``word``; returns False (and changes nothing) if already present."""
        if word.bits in self._members:
            return False
        self._members.add(word.bits)
        self.entries.append(Candidate(word, log_likelihood, query))
        self._mass.add(math.exp(log_likelihood))
        return True

    @property
    def mass(self) -> float:
        return self._mass.value


def select_best(candidates) -> BitVector:
    """Most likely entry; ties go to the earliest discovered."""
    entries = list(candidates)
    if not entries:
        raise ValueError("cannot select from an empty candidate list")
    best = entries[0]
    for c in entries[1:]:
        if c.log_likelihood > best.log_likelihood:
            best = c
    return best.word


_clamp_events = 0


def clamp_events() -> int:
    """Number of times :func:`p_not_in_list` had to clamp its inputs."""
    return _clamp_events


def _p_missing(remaining: float, list_mass: float, n: int, k: int) -> float:
    """``A R / (P_L + A R)`` with ``A = 2**(k - n)``, evaluated in log domain."""
    if list_mass <= 0.0:
        return 1.0
    if remaining <= 0.0:
        return 0.0
    x = math.log(list_mass) - math.log(remaining) + (n - k) * LN2
    if x > 0:
        e = math.exp(-x)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(x))


def p_not_in_list(p_noise: float, p_list: float, n: int, k: int,
                  list_outside_noise: bool = True) -> float:
    """Soft-output estimate that the transmitted codeword is not in the list.

    Parameters
    ----------
    p_noise : float
        Summed likelihood of all queried words.
    p_list : float
        Summed likelihood of the list entries.
    list_outside_noise : bool
        True when the list entries were found by bit flips rather than by
        queries, so their mass is added to the explored mass. False when
        every list entry is itself a queried word.
    """
    global _clamp_events
    clamped = min(max(p_noise, 0.0), 1.0), min(max(p_list, 0.0), 1.0)
    if clamped != (p_noise, p_list):
        _clamp_events += 1
    p_noise, p_list = clamped
    explored = p_noise + p_list if list_outside_noise else p_noise
    if explored > 1.0:
        _clamp_events += 1
        explored = 1.0
    return _p_missing(1.0 - explored, p_list, n, k)


@dataclass
class DecodeOutcome:
    """Result of one decoding.

    ``candidates`` is the final list (for a direct syndrome-zero hit it
    includes the hit). ``queries_to_first`` is the query at which the first
    codeword of any kind was found.
    """

    codeword: BitVector
    queries: int
    status: Status
    list_size: int = 0
    p_not_in_list: float = 1.0
    queries_to_first: int | None = None
    candidates: list[Candidate] = field(default_factory=list)
    p_noise: float = 0.0
    budget_exhausted: bool = False


def decode(code: LinearCode, llr, config: DecoderConfig) -> DecodeOutcome:
    """Decode one LLR vector with the policy named by ``config.variant``."""
    llr = np.asarray(llr, dtype=np.float64)
    if llr.size != code.n:
        raise ValueError(f"expected {code.n} LLRs, got {llr.size}")
    variant = config.variant
    n, k = code.n, code.k

    y_hd = hard_decision(llr)
    y_bits = y_hd.bits
    s0 = code.syndrome(y_hd)
    mag = np.abs(llr).tolist()
    # log P(y) = base - sum of |llr| over positions where y differs from y_hd
    base = -math.fsum(np.log1p(np.exp(-np.abs(llr))))

    # On an even-weight code a guess one flip away from a codeword has odd
    # parity, so the list decoders must still generate odd guesses; for them
    # the parity rule only says odd guesses never pass the membership test.
    parity = None
    if config.use_parity_constraint and variant is Variant.ORBGRAND:
        parity = required_pattern_parity(code.even_weight, y_hd)
    stream = PatternStream(rank_reliabilities(llr), parity)
    cols = code.H.col_bits
    column_index = code.column_index if variant is not Variant.ORBGRAND else {}
    l_max = config.l_max if variant is Variant.SYGRAND else config.c_max

    remaining = _NeumaierSum(1.0)  # 1 - P_noise
    cands = CandidateList()
    q = 0
    q_first = None

    def finish(status, budget=False):
        word = select_best(cands) if cands else y_hd
        p_hat = _p_missing(remaining.value - cands.mass, cands.mass, n, k)
        return DecodeOutcome(word, q, status, len(cands), p_hat, q_first,
                             list(cands.entries), 1.0 - remaining.value, budget)

    while q < config.max_queries:
        pos = stream.next_positions()
        if pos is None:
            break
        q += 1
        flip = 0
        s = s0
        ll = base
        for p in pos:
            flip |= 1 << p
            s ^= cols[p]
            ll -= mag[p]
        if pos:
            remaining.add(-math.exp(ll))
        else:
            remaining = _NeumaierSum(-math.expm1(ll))

        if s == 0:
            word = BitVector(n, y_bits ^ flip)
            if q_first is None:
                q_first = q
            # list entries other than the hit were never queried
            outside = cands.mass
            if word in cands:
                outside -= math.exp(ll)
            else:
                cands.add(word, ll, q)
            p_hat = _p_missing(remaining.value - outside, cands.mass, n, k)
            return DecodeOutcome(word, q, Status.CODEWORD_HIT, len(cands), p_hat, q_first,
                                 list(cands.entries), 1.0 - remaining.value)

        for p in column_index.get(s, ()):
            word = BitVector(n, y_bits ^ flip ^ (1 << p))
            ll_w = ll + mag[p] if (flip >> p) & 1 else ll - mag[p]
            if not cands.add(word, ll_w, q):
                continue
            if q_first is None:
                q_first = q
            if variant is Variant.SYGRAND:
                p_hat = _p_missing(remaining.value - cands.mass, cands.mass, n, k)
                if p_hat <= config.theta:
                    return finish(Status.LIST_TERMINATED)
            if l_max is not None and len(cands) >= l_max:
                return finish(Status.LIST_FULL)

        if variant is Variant.ORDEPT and q >= config.t_budget:
            return finish(Status.LIST_TERMINATED if cands else Status.ABANDONED)

    return finish(Status.LIST_TERMINATED if cands else Status.ABANDONED, budget=True)


def grand_decode(code: LinearCode, llr, config: DecoderConfig | None = None) -> DecodeOutcome:
    config = config or DecoderConfig.orbgrand()
    if config.variant is not Variant.ORBGRAND:
        raise ValueError(f"grand_decode needs variant orbgrand, got {config.variant.value}")
    return decode(code, llr, config)


def sygrand_decode(code: LinearCode, llr, config: DecoderConfig) -> DecodeOutcome:
    if config.variant is not Variant.SYGRAND:
        raise ValueError(f"sygrand_decode needs variant sygrand, got {config.variant.value}")
    return decode(code, llr, config)


def ordept_decode(code: LinearCode, llr, config: DecoderConfig) -> DecodeOutcome:
    if config.variant is not Variant.ORDEPT:
        raise ValueError(f"ordept_decode needs variant ordept, got {config.variant.value}")
    return decode(code, llr, config)
