"""GRAND-family decoding for binary linear codes with syndrome-assisted
dynamic list decoding and a Monte Carlo evaluation harness."""

from .bitlinalg import (BitMatrix, BitVector, column_match, mat_vec_mul, rank,
                        systematize, weight, xor)
from .channel import (ChannelParams, compute_llrs, hard_decision, noise_sigma2,
                      sequence_log_likelihood, transmit)
from .codes import (GaloisField2m, LinearCode, build_bch, encode, extend_parity, get_code,
                    gf_mul, load_alist, save_alist, sphere_union_rate)
from .decoder import (DecodeOutcome, DecoderConfig, Status, Variant, decode, grand_decode,
                      ordept_decode, p_not_in_list, select_best, sygrand_decode)
from .patterns import PatternStream, rank_reliabilities, required_pattern_parity

__version__ = "0.1.0"
