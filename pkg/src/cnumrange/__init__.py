"""C-numerical ranges of matrices and of convex matrix families.

The package computes ``W_C(A) = {tr(C U* A U) : U unitary}``, unions of these
sets over convex hulls of matrices, joint ranges of matrix tuples, and the
planar / k-dimensional geometry needed to certify star-shapedness and
convexity of the resulting sets.
"""

from .matcore import (
    Seed,
    EigenSpectrum,
    ConvergenceError,
    hermitian_parts,
    is_scalar,
    is_hermitian,
    is_normal,
    essential_hermitian_direction,
    haar_unitary,
    haar_unitaries,
    eigenvalues,
    c_value,
    c_values,
    matrix_to_json,
    matrix_from_json,
)
from .crange import (
    RangeCloud,
    BoundaryCurve,
    RangeClass,
    sample_range,
    star_center_default,
    support_function_hermitian,
    support_membership,
    boundary_trace,
    permutation_vertex_hull,
    classify_range,
    rank_one_disk_radius,
)
from .geom2d import (
    Polygon,
    StarPolygon,
    Region2,
    SupportLine,
    StarCertificate,
    convex_hull,
    region_contains,
    region_distance,
    segment_in_region,
    certify_star_center,
    kernel_estimate,
    certify_convex,
    separating_support_lines,
    hausdorff,
    region_hausdorff,
)
from .family import (
    MatrixFamily,
    SimplexGrid,
    SliceSet,
    slice_matrix,
    family_slices,
    hat_family,
    direct_sum,
    product_numerical_range,
)
from .jointrange import (
    MatrixTuple,
    JointCloud,
    PolytopeSlice,
    sample_joint,
    affine_image,
    flat_dimension,
    diag_tuple_polytope,
    joint_family_slices,
    certify_star_center_kd,
    polytope_distance,
    max_along_line,
)

__version__ = "0.1.0"
