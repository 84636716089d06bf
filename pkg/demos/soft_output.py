"""
How good is the list soft output?
=================================

Each decoding reports an estimate of the probability that the sent
codeword is not in its list. Bucketing trials by the predicted success
probability and comparing with what actually happened shows how the
estimate behaves.

On eBCH(32,21) the estimate is conservative: bit-flip candidates are found
far beyond the query frontier, and the estimate still treats all unexplored
mass as if it could hide another codeword.
"""

from sygrand import DecoderConfig, get_code
from sygrand.sim import calibration_table, run_trials

code = get_code("ebch-32-21")
for cfg in (DecoderConfig.orbgrand(use_parity_constraint=False), DecoderConfig.sygrand(0.71, 3)):
    batch = run_trials(code, cfg, 4.0, 50_000, seed=2)
    print(cfg.variant.value, cfg.describe())
    for b in calibration_table(1.0 - batch.p_hat, batch.in_list):
        if b.count:
            print(f"  [{b.low:.1f}, {b.high:.1f})  n={b.count:6d}  predicted {b.predicted:.3f}  "
                  f"observed {b.empirical:.3f}")
