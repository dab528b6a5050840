"""Exact n-point functions of weighted double Hurwitz numbers in z-coordinates."""
from .closed_form import (
    TaskSpec,
    VertexPolynomial,
    compute_H,
    compute_H01,
    compute_H02,
    constant_c,
    dh_cross_check,
    edge_weight,
    leaf_term,
    make_cache,
    reference_formulas,
    u_bar_apply,
)
from .graphs import LabeledGraph, classify, enumerate_connected
from .model import L_series, ModelCache, ModelSpec, build_cache
from .oracle import (
    Partition,
    PSeriesCell,
    connected_F,
    hurwitz_number,
    model_F,
    oracle_npoint,
    partition_function,
)
from .presets import make_spec
from .series import LaurentSeries, SeriesContext, ring_add, ring_mul

__version__ = "0.1.0"
