"""Square-Cut: template-guided graph-cut segmentation.

Rays fan out of a user seed through a normalized template polygon; nodes are
sampled non-uniformly along them, an s-t min cut picks the per-ray boundary
levels under a circular stiffness constraint, and the smoothed contour is
rasterized to a binary mask.
"""

from .contour import Contour, RadialProfile, boundary_to_profile, profile_to_mask, rasterize_polygon, smooth_profile
from .errors import (
    DegenerateRay,
    DegenerateTemplate,
    DimensionMismatch,
    EmptyInput,
    EmptyRay,
    FormatError,
    InvalidGeometry,
    NoIntersection,
    SeedOutOfImage,
    SquareCutError,
    Unbounded,
)
from .geometry import (
    Point2,
    RayFan,
    TemplatePolygon,
    cast_rays,
    centroid,
    normalize_template,
    parse_template,
    ray_segment_intersection,
    rectangle_template,
    regular_polygon_template,
    sample_nodes,
    square_template,
)
from .imaging import BinaryMask, GrayImage, load_pgm, mask_from_image, sample_intensity, save_pgm, synth_rectangle
from .maxflow import INF, CutResult, FlowNetwork, extract_boundary
from .metrics import OverlapReport, SummaryStats, dsc, summarize
from .pipeline import SegResult, delta_sweep, mask_centroid, segment, segment_iterative
from .segcore import (
    CostGrid,
    SegParams,
    WeightGrid,
    boundary_seeking_costs,
    build_network,
    compute_costs,
    compute_weights,
    estimate_mean,
)

__version__ = "0.1.0"
