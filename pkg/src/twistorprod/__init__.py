"""Almost product structures on the product of the two twistor spaces of an
oriented Riemannian 4-manifold: curvature algebra, closed-form connection
data, a coordinate oracle and a numerical Naveira classifier."""

from .bundle import MetricParams, TwistorPoint, adapted_point, random_kappa
from .catalog import (
    CatalogEntry, default_catalog, get_entry, make_cp2, make_flat, make_perturbed_flat,
    make_round_sphere, make_s2xs2,
)
from .chart import MetricChart
from .classify import SamplingConfig, classify, critical_t_search, verify_theorems

__all__ = [
    "CatalogEntry", "MetricChart", "MetricParams", "SamplingConfig", "TwistorPoint",
    "adapted_point", "classify", "critical_t_search", "default_catalog", "get_entry",
    "make_cp2", "make_flat", "make_perturbed_flat", "make_round_sphere", "make_s2xs2",
    "random_kappa", "verify_theorems",
]
