"""toepfree: exact free-probability calculus over Toeplitz matricial algebras.

The package computes moments, free cumulants, R-transforms, and boxed
convolutions of tuples of noncommutative random variables valued in the
commutative algebra C^N of upper-triangular Toeplitz matrices, entirely in
exact rational arithmetic. Every principal computation has an independent
second code path (lattice Möbius inversion, explicit matrix products,
brute-force enumeration) against which it is tested.
"""

from .errors import (
    ConfigError,
    CrossingPartition,
    DegreeCapExceeded,
    DimensionMismatch,
    EngineError,
    InternalConsistencyError,
    MathDomainError,
    NonInvertible,
    NotEven,
    OddLength,
    PreconditionError,
    ZeroTrace,
)
from .nc_lattice import (
    NcPartition,
    catalan,
    enumerate_nc,
    enumerate_nc_even,
    interleave,
    kreweras,
    leq,
    mobius,
    one_partition,
    zero_partition,
)
from .ncpoly import (
    Generator,
    NcPolynomial,
    format_rational,
    parse_expr,
    parse_rational,
)
from .scalar_space import (
    CumulantSpec,
    MomentFunctional,
    build_space,
    builtin_distribution,
)
from .series import (
    BSeries,
    boxed_convolution,
    boxed_identity,
    check_even,
    check_freeness,
    compress_r_transform,
    even_cumulant_restricted,
    family_assignment,
    free_family_sparsity,
    moment_series,
    moments_from_r,
    r_from_moments,
    r_transform,
    series_add,
    symm_r_transform,
)
from .toeplitz_core import (
    BScalar,
    QTuple,
    TVariable,
    b_add,
    b_inv,
    b_mul,
    b_pow,
    build_q,
    chain_product,
    expect,
    flatten_q,
    t_cumulant,
    t_cumulant_mobius,
    t_moment,
    t_mul,
    t_mul_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "BScalar",
    "BSeries",
    "ConfigError",
    "CrossingPartition",
    "CumulantSpec",
    "DegreeCapExceeded",
    "DimensionMismatch",
    "EngineError",
    "Generator",
    "InternalConsistencyError",
    "MathDomainError",
    "MomentFunctional",
    "NcPartition",
    "NcPolynomial",
    "NonInvertible",
    "NotEven",
    "OddLength",
    "PreconditionError",
    "QTuple",
    "TVariable",
    "ZeroTrace",
    "b_add",
    "b_inv",
    "b_mul",
    "b_pow",
    "boxed_convolution",
    "boxed_identity",
    "build_q",
    "build_space",
    "builtin_distribution",
    "catalan",
    "chain_product",
    "check_even",
    "check_freeness",
    "compress_r_transform",
    "enumerate_nc",
    "enumerate_nc_even",
    "even_cumulant_restricted",
    "expect",
    "family_assignment",
    "flatten_q",
    "format_rational",
    "free_family_sparsity",
    "interleave",
    "kreweras",
    "leq",
    "mobius",
    "moment_series",
    "moments_from_r",
    "one_partition",
    "parse_expr",
    "parse_rational",
    "r_from_moments",
    "r_transform",
    "series_add",
    "symm_r_transform",
    "t_cumulant",
    "t_cumulant_mobius",
    "t_moment",
    "t_mul",
    "t_mul_oracle",
    "zero_partition",
]
