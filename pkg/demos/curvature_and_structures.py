"""Curvature blocks of the catalog charts and the almost product structures
at a single point of the twistor product.

Run with ``python demos/curvature_and_structures.py``.
"""

import numpy as np

from twistorprod import MetricParams, adapted_point, default_catalog
from twistorprod.bivector import point_geometry
from twistorprod.bundle import eigenspace_dims, tangent
from twistorprod.classify import nonint_witnesses
from twistorprod.connection import nijenhuis

np.set_printoptions(precision=4, suppress=True)

print(f"{'chart':<16}{'s':>9}{'|B|':>11}{'|W+|':>11}{'|W-|':>11}")
for entry in default_catalog():
    x = entry.sample_points(1, seed=3)[0]
    geo = point_geometry(entry.chart, x)
    n = geo.decomposition.norms()
    print(f"{entry.id:<16}{geo.scalar:9.4f}{n['B']:11.2e}{n['W_plus']:11.2e}{n['W_minus']:11.2e}")

print()
sphere = default_catalog()[1]
kappa = adapted_point(sphere.chart, np.zeros(4))
print("At kappa = (s1+, s1-) over the origin of S^4:")
for nu in (1, 2, 3, 4):
    print(f"  K_{nu}: eigenspace dimensions (+1, -1) = {eigenspace_dims(nu, kappa)}")

U = tangent(U_plus=[0.0, 1.0, 0.0])
E1, E3 = tangent(X=[1, 0, 0, 0]), tangent(X=[0, 0, 1, 0])
t = MetricParams(1.0, 1.0)
print("Nijenhuis tensors on a horizontal and a vertical vector:")
for nu, A, name in ((1, E3, "E3"), (2, E3, "E3"), (3, E1, "E1"), (4, E1, "E1")):
    print(f"  N_{nu}({name}^h, U) = {nijenhuis(nu, kappa, t, A, U).vector}")
print("Defects against the closed-form values on every chart:")
for entry in default_catalog():
    print(f"  {entry.id:<16}{max(nonint_witnesses(entry).values()):.1e}")
