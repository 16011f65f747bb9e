"""Horoball packings of fully asymptotic Coxeter cells in hyperbolic 3-space.

The projective (Klein) model over the Lorentzian form diag(-1,1,1,1) hosts
the four regular honeycombs whose cells have all vertices on the absolute:
(3,3,6), (3,4,4), (4,3,6), (5,3,6).  The package builds their cells and
characteristic orthoschemes, evaluates horoball sector volumes exactly,
sweeps the one-parameter packing families, and certifies the optimal
arrangements against the universal upper bound for congruent balls.
"""

from .coxeter import (
    Cell,
    CoxeterMatrix,
    Orthoscheme,
    SchlafliSymbol,
    TilingClass,
    UnsupportedSymbolError,
    build_cell,
    build_orthoscheme,
    classify_tiling,
    coxeter_matrix,
    recenter_cell,
    vertex_distance,
)
from .horoball import (
    FaceOverflowError,
    Horoball,
    HorosphericTriangle,
    bolyai_arc_length,
    cell_volume_oracle,
    cone_sector_volume,
    edge_intersection,
    heron_area,
    horoball_at,
    horoball_level,
    horospheric_chord_length,
    polar_point,
    sector_volume,
    vertex_sector_volume,
)
from .lorentz import (
    GeometryError,
    Hyperplane,
    MINKOWSKI,
    PointClass,
    ProjectivePoint,
    bilinear_form,
    boost_to_origin,
    classify,
    distance,
    foot_on_line,
    polar,
    reflect,
)
from .packing import (
    DensityReport,
    Family,
    InvalidPackingError,
    PackingConfiguration,
    Violation,
    catalog,
    certify_optimum,
    configuration,
    density,
    families,
    sweep,
    validate_packing,
    volume_function,
)
from .volume import (
    VolumeResult,
    bf_constant,
    bf_series_tail_bound,
    cell_volume,
    hyperbolic_ball_volume,
    lobachevsky,
    monte_carlo_volume,
    orthoscheme_volume,
)

__version__ = "0.1.0"

__all__ = [
    "Cell",
    "CoxeterMatrix",
    "DensityReport",
    "FaceOverflowError",
    "Family",
    "GeometryError",
    "Horoball",
    "HorosphericTriangle",
    "Hyperplane",
    "InvalidPackingError",
    "MINKOWSKI",
    "Orthoscheme",
    "PackingConfiguration",
    "PointClass",
    "ProjectivePoint",
    "SchlafliSymbol",
    "TilingClass",
    "UnsupportedSymbolError",
    "Violation",
    "VolumeResult",
    "bf_constant",
    "bf_series_tail_bound",
    "bilinear_form",
    "bolyai_arc_length",
    "boost_to_origin",
    "build_cell",
    "build_orthoscheme",
    "catalog",
    "cell_volume",
    "cell_volume_oracle",
    "certify_optimum",
    "classify",
    "classify_tiling",
    "cone_sector_volume",
    "configuration",
    "coxeter_matrix",
    "density",
    "distance",
    "edge_intersection",
    "families",
    "foot_on_line",
    "heron_area",
    "horoball_at",
    "horoball_level",
    "horospheric_chord_length",
    "hyperbolic_ball_volume",
    "lobachevsky",
    "monte_carlo_volume",
    "orthoscheme_volume",
    "polar",
    "polar_point",
    "recenter_cell",
    "reflect",
    "sector_volume",
    "sweep",
    "validate_packing",
    "vertex_distance",
    "vertex_sector_volume",
    "volume_function",
    "__version__",
]
