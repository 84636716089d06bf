"""BPSK over the binary-input AWGN channel.

Bit ``c`` maps to the symbol ``(-1)**c``; LLRs are natural-log with the
positive sign favouring bit 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitlinalg import BitVector
from .streams import draw_bits, draw_normals, trial_key

# exp(700) is finite in double precision; exp(710) is not.
LLR_MAX = 700.0


def noise_sigma2(rate: float, ebn0_db: float) -> float:
    """Noise variance ``1 / (2 r Eb/N0)`` for code rate ``r``."""
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    return 1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))


@dataclass(frozen=True)
class ChannelParams:
    ebn0_db: float
    rate: float

    @property
    def sigma2(self) -> float:
        return noise_sigma2(self.rate, self.ebn0_db)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def modulate(c) -> np.ndarray:
    bits = c.to_array() if isinstance(c, BitVector) else np.asarray(c, dtype=np.uint8)
    return 1.0 - 2.0 * bits.astype(np.float64)


def transmit(c, params: ChannelParams | float, rng: np.random.Generator) -> np.ndarray:
    """Received reals ``y = x + z``, ``z ~ N(0, sigma2)``.

    ``params`` may also be a bare noise variance.
    """
    sigma2 = params.sigma2 if isinstance(params, ChannelParams) else float(params)
    x = modulate(c)
    if sigma2 == 0.0:
        return x
    return x + math.sqrt(sigma2) * rng.standard_normal(x.size)


def compute_llrs(y, params: ChannelParams | float) -> np.ndarray:
    sigma2 = params.sigma2 if isinstance(params, ChannelParams) else float(params)
    if sigma2 <= 0.0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    llr = 2.0 * np.asarray(y, dtype=np.float64) / sigma2
    return np.clip(llr, -LLR_MAX, LLR_MAX)


def hard_decision(llr) -> BitVector:
    """Bit ``i`` is 1 iff ``llr[i] <= 0``."""
    return BitVector.from_array(np.asarray(llr) <= 0.0)


def bit_log_probs(llr) -> tuple[np.ndarray, np.ndarray]:
    """Per-bit ``(log P(bit=0), log P(bit=1))`` given the LLRs."""
    llr = np.asarray(llr, dtype=np.float64)
    return -np.logaddexp(0.0, -llr), -np.logaddexp(0.0, llr)


def sequence_log_likelihood(w: BitVector, llr) -> float:
    """Log a-posteriori probability of the word ``w`` under independent bits."""
    llr = np.asarray(llr, dtype=np.float64)
    if w.length != llr.size:
        raise ValueError(f"length mismatch: word {w.length} vs {llr.size} LLRs")
    lp0, lp1 = bit_log_probs(llr)
    bits = w.to_array().astype(bool)
    return float(math.fsum(np.where(bits, lp1, lp0)))


def read_llr_file(path: str) -> np.ndarray:
    with open(path) as fh:
        tokens = fh.read().split()
    try:
        return np.array([float(t) for t in tokens], dtype=np.float64)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def trial_channel(code, ebn0_db: float, seed: int, point: int, trial: int):
    """Regenerate one simulation trial exactly as the Monte Carlo kernel does.

    Returns ``(message, codeword, llr)``.
    """
    key = np.uint64(trial_key(np.uint64(seed), np.uint64(point), np.uint64(trial)))
    ubits = np.empty(code.k, dtype=np.uint8)
    nxt = draw_bits(key, 0, ubits)
    u = BitVector.from_array(ubits)
    c = code.encode(u)
    z = np.empty(code.n, dtype=np.float64)
    draw_normals(key, nxt, z)
    sigma2 = noise_sigma2(code.rate, ebn0_db)
    y = modulate(c) + math.sqrt(sigma2) * z
    return u, c, compute_llrs(y, sigma2)
