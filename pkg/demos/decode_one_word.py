"""
Decoding one received word
==========================

A single eBCH(32,21) transmission, decoded three ways. The list decoders
find codewords one bit flip away from each guess, so they usually stop
well before ORBGRAND's first codeword.
"""

import numpy as np

from sygrand import DecoderConfig, decode, get_code, hard_decision
from sygrand.channel import trial_channel

code = get_code("ebch-32-21")
print(code, "rate", round(code.rate, 4), "even weight:", code.even_weight)

# draw a noisy trial at 2.5 dB; trial 93 needs a few hundred ORBGRAND guesses
u, c, llr = trial_channel(code, 2.5, seed=3, point=0, trial=93)
y = hard_decision(llr)
print("bit errors in the hard decision:", (y ^ c).bits.bit_count())
print("syndrome of the hard decision:", bin(code.syndrome(y)))

# %%
# ORBGRAND queries guesses in order of their logistic weight and stops at
# the first codeword.
out = decode(code, llr, DecoderConfig.orbgrand())
print("orbgrand ", out.status.value, "queries", out.queries, "correct", out.codeword == c)

# %%
# SyGRAND keeps a list; it stops when the estimated chance that the sent
# codeword is missing from the list drops to theta, or the list is full.
out = decode(code, llr, DecoderConfig.sygrand(0.71, 3))
print("sygrand  ", out.status.value, "queries", out.queries, "correct", out.codeword == c)
for cand in out.candidates:
    print("   candidate found at query", cand.query, "log-likelihood", round(cand.log_likelihood, 3))
print("   P(sent codeword not in list) ~", round(out.p_not_in_list, 4))

# %%
# ORDEPT uses the same discovery with a fixed budget instead.
out = decode(code, llr, DecoderConfig.ordept(50, 3))
print("ordept   ", out.status.value, "queries", out.queries, "correct", out.codeword == c)

# the LLR vector can be saved for the command line decoder:
#   sygrand decode --code ebch-32-21 --decoder sygrand --llr word.txt
np.savetxt("word.txt", llr[None, :], fmt="%.6f")
