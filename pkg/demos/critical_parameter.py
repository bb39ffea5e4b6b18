"""Walk through the critical fibre scale on the round 4-sphere and on CP^2.

Run with ``python demos/critical_parameter.py``; it takes about a minute.
"""

import numpy as np

from twistorprod import MetricParams, SamplingConfig, classify, critical_t_search, make_cp2, make_round_sphere
from twistorprod.classify import CriticalTError, d1_residual, sample_kappas

cfg = SamplingConfig()

print("Round S^4 of radius 1: scalar curvature 12, so 6/s = 0.5.")
sphere = make_round_sphere(1.0)
kappas = sample_kappas(sphere, cfg)
print("  D1 residual of the nu=2 distribution as t1 varies (t2 = 1):")
for t1 in (0.25, 0.4, 0.5, 0.6, 1.0):
    print(f"    t1 = {t1:4.2f}   residual = {d1_residual(2, MetricParams(t1, 1.0), kappas):.3e}")

res = critical_t_search(3, "equal", sphere, distribution="perp")
print(f"  nu=3, complement, t1 = t2: t* = {res.t_star:.10f}")
print(f"    6/s = {res.six_over_s}, 3/(8 chi) = {res.three_over_8chi}, matches = {res.matches}")
for t in (MetricParams(1.0, 1.0), MetricParams(res.t_star, res.t_star)):
    print(f"    label at t = ({t.t1:g}, {t.t2:g}): {classify(3, t, sphere, cfg).label}")

print()
print("CP^2 with Fubini-Study metric (s = 24): only one Weyl half vanishes.")
for orientation in (1, -1):
    entry = make_cp2(orientation)
    for nu, which in ((2, "t1"), (4, "t2")):
        try:
            r = critical_t_search(nu, which, entry)
            found = f"t* = {r.t_star:.8f}" if r.found else f"no zero (min residual {r.residual:.2f})"
        except CriticalTError as exc:
            found = str(exc)
        print(f"  orientation {orientation:+d}, nu={nu}, search {which}: {found}")
    labels = {
        2: classify(2, MetricParams(0.25, 1.0), entry, cfg).label,
        4: classify(4, MetricParams(1.0, 0.25), entry, cfg).label,
    }
    print(f"    labels with the searched parameter at 0.25: {labels}")
