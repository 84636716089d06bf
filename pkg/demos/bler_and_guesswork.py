"""
BLER and guesswork against ORBGRAND
===================================

A short paired sweep on eBCH(32,21). Every decoder sees the same channel
realisations, so the guesswork ratio is measured on identical noise.
Raise ``MIN_ERRORS`` for publication-grade curves.
"""

from sygrand import DecoderConfig, get_code
from sygrand.sim import StoppingRule, emit_results, sweep

MIN_ERRORS = 50
code = get_code("ebch-32-21")
grid = [3.0, 4.0, 5.0]
rule = StoppingRule(MIN_ERRORS)

for cfg in (DecoderConfig.sygrand(0.71, 3), DecoderConfig.ordept(50, 3)):
    res = sweep(code, cfg, grid, rule, seed=1, reference=DecoderConfig.orbgrand())
    print(cfg.variant.value, cfg.describe())
    for p, r, ratio in zip(res.points, res.ref_points, res.log2_ratios):
        print(f"  {p.ebn0_db:4.1f} dB  BLER {p.bler:.2e} (orbgrand {r.bler:.2e})  "
              f"queries {p.avg_queries:7.2f} (orbgrand {r.avg_queries:7.2f})  log2 ratio {ratio:+.2f}")

# %%
# The same numbers as CSV, ready for an external plotting tool.
print(emit_results(res)[0])
