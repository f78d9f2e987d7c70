"""geomkit: numerical differential geometry at desk scale.

Chart metrics and model spaces, Christoffel symbols and geodesics, curvature
tensors and Jacobi fields, parametric surfaces, Gauss-Bonnet on geodesic
triangles, plane-curve and linking invariants, quaternion rotations and
Lorentz boosts.
"""

from .errors import (
    ConvergenceError,
    DegenerateError,
    DomainError,
    GeometryError,
    SignatureError,
    SingularMetricError,
)
from .metric import ChartMetric, CurvePath, curve_measures, inner_product, metric_at
from .models import (
    MODEL_NAMES,
    ModelDescriptor,
    beltrami_ball,
    euclidean,
    klein_disk,
    klein_distance,
    make_model,
    parse_model,
    poincare_half_plane,
    riemann_constant,
    sphere_stereographic,
    tractrix_surface,
)
from .connection import (
    GeodesicSolution,
    christoffel,
    geodesic_bvp,
    geodesic_ivp,
    parallel_transport,
    transport_frame,
)
from .curvature import (
    CurvatureReport,
    flatness_check,
    jacobi_deviation,
    riemann_at,
    sectional,
)
from .gauss_bonnet import (
    GeodesicTriangle,
    build_triangle,
    euler_characteristic,
    total_curvature_closed,
    triangle_report,
)
from .topology import (
    PolyCurve,
    linking_number,
    rotation_invariants,
    self_intersections,
    signed_area,
    winding_number,
)
from .quaternion import Quaternion, binary_icosahedral, qmul, rotation_matrix
from .lorentz import Boost, Event, boost_from_velocity

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
