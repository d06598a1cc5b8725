"""patrec: a 2D photoacoustic tomography workbench.

Synthesizes circular-array sensor data from initial-pressure phantoms with
an analytic Green's-function forward model, reconstructs with time reversal
(TR), back-projection (BP), and truncated back-projection (TBP), and
quantifies the resolution/contrast behavior of each method on under-sampled
grids and sensor arrays.
"""

from .core import (
    AcquisitionConfig,
    ImageGrid,
    SensorData,
    SourceSpectrum,
    Spectrum,
    default_dt,
    dft_forward,
    dft_inverse,
    validate_config,
)
from .forward import PointSource, forward_project, forward_spectrum, greens0_hat, point_source_spectrum
from .reconstruct import (
    ReconstructionRequest,
    normalize_image,
    recommend_mu,
    reconstruct_bp,
    reconstruct_bp_timedomain,
    reconstruct_tbp,
    reconstruct_tr,
)
from .analysis import (
    PairConfiguration,
    QualityReport,
    classify_sampling,
    contrast_metrics,
    kernel_bp,
    kernel_bp_reduced,
    kernel_main_lobe,
    kernel_side_lobe,
    measure_fwhm,
    pearson_correlation,
    ppw,
    predicted_fwhm,
)
from .phantom import PhantomSpec, load_raster, make_disc, make_point, make_vascular
from .wavesolver import SolverGrid, propagate_initial_value, run_time_reversal

__version__ = "0.1.0"

__all__ = [
    "AcquisitionConfig",
    "ImageGrid",
    "PairConfiguration",
    "PhantomSpec",
    "PointSource",
    "QualityReport",
    "ReconstructionRequest",
    "SensorData",
    "SolverGrid",
    "SourceSpectrum",
    "Spectrum",
    "classify_sampling",
    "contrast_metrics",
    "default_dt",
    "dft_forward",
    "dft_inverse",
    "forward_project",
    "forward_spectrum",
    "greens0_hat",
    "kernel_bp",
    "kernel_bp_reduced",
    "kernel_main_lobe",
    "kernel_side_lobe",
    "load_raster",
    "make_disc",
    "make_point",
    "make_vascular",
    "measure_fwhm",
    "normalize_image",
    "pearson_correlation",
    "point_source_spectrum",
    "ppw",
    "predicted_fwhm",
    "propagate_initial_value",
    "recommend_mu",
    "reconstruct_bp",
    "reconstruct_bp_timedomain",
    "reconstruct_tbp",
    "reconstruct_tr",
    "run_time_reversal",
    "validate_config",
]
