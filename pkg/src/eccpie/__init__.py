"""Eccentric pie charts and regular-cutter pie cutting."""

__version__ = "0.1.0"

from .charts import ChartLayout, ChartSpec, apex_grid, clockwise_counterpart, solve_chart
from .geometry import (
    EccentricSector,
    Orientation,
    Point2,
    central_angle,
    pizza_check,
    ray_extent,
    sector_area_decomposed,
    sector_area_integral,
    segment_area,
    signed_triangle_area,
    triangle_area,
)
from .polysys import (
    MultiPoly,
    PolySystem,
    build_piecut_system,
    build_single_sector_system,
    export_system,
    max_sector_fraction,
    parse_system,
)
from .svg import render_svg
from .taylor import UniPoly, arccos_taylor, eval_unipoly, max_abs_error
