"""Span-projection despeckling and superresolution toolkit for speckled imagery."""

from .despeckle import (
    FilterSpec,
    apply_filter,
    frost_filter,
    homomorphic_wrap,
    kuan_filter,
    lee_filter,
    median_filter,
    posashrink,
    wavelet_threshold,
)
from .image import Subbands, as_image, image_stats
from .io import RasterFormatError, read_image, read_image_info, write_image, write_report
from .metrics import (
    MetricsReport,
    deflection_ratio,
    edge_map,
    enl,
    full_report,
    msd,
    nmv_nv_nsd,
    pratt_fom,
    psnr,
)
from .projection import frob_inner, frob_norm, normalize, span_cascade
from .speckle import (
    SpeckleModel,
    apply_speckle,
    apply_speckle_snr,
    draw_speckle_field,
    measured_snr_db,
)
from .superres import (
    AuxiliaryMatrices,
    ObservationSet,
    bands_from_observations,
    draw_auxiliary,
    reconstruct_and_score,
    superres_four,
    superres_one,
    synthesize_observations,
)
from .wavelet import DB1, DB4, WaveletBasis, dwt2, idwt2, wavelet_basis

__version__ = "0.1.0"

__all__ = [
    "AuxiliaryMatrices",
    "DB1",
    "DB4",
    "FilterSpec",
    "MetricsReport",
    "ObservationSet",
    "RasterFormatError",
    "SpeckleModel",
    "Subbands",
    "WaveletBasis",
    "apply_filter",
    "apply_speckle",
    "apply_speckle_snr",
    "as_image",
    "bands_from_observations",
    "deflection_ratio",
    "draw_auxiliary",
    "draw_speckle_field",
    "dwt2",
    "edge_map",
    "enl",
    "frob_inner",
    "frob_norm",
    "frost_filter",
    "full_report",
    "homomorphic_wrap",
    "idwt2",
    "image_stats",
    "kuan_filter",
    "lee_filter",
    "measured_snr_db",
    "median_filter",
    "msd",
    "nmv_nv_nsd",
    "normalize",
    "posashrink",
    "pratt_fom",
    "psnr",
    "read_image",
    "read_image_info",
    "reconstruct_and_score",
    "span_cascade",
    "superres_four",
    "superres_one",
    "synthesize_observations",
    "wavelet_basis",
    "wavelet_threshold",
    "write_image",
    "write_report",
]
