"""Exact intersection numbers of boundary divisors on genus-zero moduli
spaces and the complex hyperbolic volumes they compute.

All arithmetic is arbitrary-precision rational; there is no floating point
in any computation, so independently derived quantities can be compared for
exact equality.
"""

from .combinat import (
    BoundaryPartition,
    MarkedSet,
    WeightVector,
    check_admissibility,
    enumerate_boundary_partitions,
    format_rational,
    make_weight_vector,
    mu_side_sum,
    parse_rational,
    parse_weights,
)
from .divisors import (
    QDivisor,
    canonical_divisor,
    chern_divisor,
    d_mu,
    kawamata_divisor,
    kawamata_lambda,
    kawamata_lambda_table,
    kawamata_lambda_via_counts,
    minimal_scaling,
    psi_class,
    psi_minus_2delta,
    weighted_divisor,
)
from .intersect import (
    MemoStore,
    VertexColor,
    color_vertices,
    default_memo,
    edge_flag,
    intersect_divisor_cycle,
    intersect_divisor_tree,
    mark_flag,
    product_number,
    qdivisor_power,
    qdivisor_product,
    sigma_split,
)
from .trees import (
    FormalCycle,
    StableTree,
    canonical_key,
    cycle_add,
    cycle_scale,
    cycle_total,
    divisor_tree,
    trivial_tree,
    validate_stability,
)
from .volume import (
    VolumeReport,
    cross_check,
    symmetric_n6_beta,
    volume_kawamata,
    volume_ke,
    volume_mcmullen,
    volume_n5_closed_form,
    volume_n6_symmetric_closed_form,
    volume_psi,
    volume_weighted,
)

__all__ = [
    "BoundaryPartition",
    "FormalCycle",
    "MarkedSet",
    "MemoStore",
    "QDivisor",
    "StableTree",
    "VertexColor",
    "VolumeReport",
    "WeightVector",
    "canonical_divisor",
    "canonical_key",
    "check_admissibility",
    "chern_divisor",
    "color_vertices",
    "cross_check",
    "cycle_add",
    "cycle_scale",
    "cycle_total",
    "d_mu",
    "default_memo",
    "divisor_tree",
    "edge_flag",
    "enumerate_boundary_partitions",
    "format_rational",
    "intersect_divisor_cycle",
    "intersect_divisor_tree",
    "kawamata_divisor",
    "kawamata_lambda",
    "kawamata_lambda_table",
    "kawamata_lambda_via_counts",
    "make_weight_vector",
    "mark_flag",
    "minimal_scaling",
    "mu_side_sum",
    "parse_rational",
    "parse_weights",
    "product_number",
    "psi_class",
    "psi_minus_2delta",
    "qdivisor_power",
    "qdivisor_product",
    "sigma_split",
    "symmetric_n6_beta",
    "trivial_tree",
    "validate_stability",
    "volume_kawamata",
    "volume_ke",
    "volume_mcmullen",
    "volume_n5_closed_form",
    "volume_n6_symmetric_closed_form",
    "volume_psi",
    "volume_weighted",
    "weighted_divisor",
]

__version__ = "0.1.0"
