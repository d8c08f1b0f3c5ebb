"""Concentration bounds dominating empirical tails.

The halving iterated function system (x/2 and x/2 + 1/2 with equal
probability) has analytic constants: contraction sum 2, sup-diameter 1/2,
and Lebesgue as its stationary law.  We estimate the tail of the Birkhoff
average of h(x) = x around its pilot mean and compare each rung against
the closed-form two-sided bound; the upper confidence limit must stay
below the bound.
"""

from rdslab import ExperimentConfig, run_tail
from rdslab.harness import report_to_csv

cfg = ExperimentConfig(
    system={"kind": "halving-ifs"},
    observable="birkhoff",
    params={"h": "coordinate", "x0": 0.5},
    n=200,
    t_ladder=[0.15, 0.2, 0.3],
    trials=5000,
    seed=7,
    bound="lln",
)
report = run_tail(cfg)

print(f"pilot mean = {report.center:.5f} (+- {report.center_halfwidth:.5f});"
      " the stationary mean is exactly 1/2")
print(f"bound input provenance: {report.provenance}")
print()
print(report_to_csv(report))
print("every in-regime rung passes; bounds above 1 are flagged vacuous but"
      " remain valid upper bounds")
