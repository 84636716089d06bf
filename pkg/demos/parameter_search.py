"""
Choosing theta and the list size
================================

Two one-dimensional searches against the ORBGRAND BLER curve: first the
smallest list size that never loses to ORBGRAND with termination switched
off, then the largest theta that keeps that property.

With few errors per point the reference confidence band is wide and the
search settles on optimistic values (small lists, large theta). A few
thousand errors per point are needed before it lands near (3, 0.71).
"""

import sys

from sygrand import DecoderConfig, get_code
from sygrand.sim import StoppingRule, optimize_parameters

min_errors = int(sys.argv[1]) if len(sys.argv) > 1 else 100
code = get_code("ebch-32-21")
res = optimize_parameters(code, DecoderConfig.orbgrand(), [3.0, 4.0, 5.0, 6.0],
                          StoppingRule(min_errors), seed=1)
print(f"l_max* = {res.l_max}, theta* = {res.theta:g}  ({min_errors} errors per point)")

# the evidence rows for stage 1 and the chosen theta
for row in res.evidence:
    if row["stage"] == 1 or row["param"] == f"theta={res.theta:g}":
        print(row)
