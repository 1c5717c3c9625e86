"""sarphys: model-based SAR physical-layer feature toolkit.

Explainable, deterministic transforms of complex SAR data: point-target
echo simulation with multipath, matched-filter focusing, Doppler sub-look
decomposition, time-frequency scattering signatures, polarimetric
decompositions, and seeded clustering of scattering patterns.
"""

__version__ = "0.1.0"

from .core import (
    C,
    ComplexImage,
    FormatError,
    PhysicsBoundError,
    QuadPolImage,
    SarError,
    SensorParams,
    SlcImage,
    ValidationError,
    read_slc,
    window,
    write_slc,
)
from .echosim import (
    BandLimit,
    MultipathTarget,
    PointTarget,
    RawData,
    SceneExtent,
    migration_check,
    multipath_ranges,
    read_raw,
    simulate_raw,
    write_raw,
)
from .focus import (
    FocusReport,
    azimuth_compress,
    focus,
    ideal_psf,
    measure_response,
    range_compress,
)
from .physclust import ClusterModel, FeatureMatrix, adjusted_rand_index, build_features, kmeans
from .polarimetry import (
    CoherencyImage,
    HAlphaImage,
    PauliImage,
    classify_zone,
    coherency,
    h_alpha,
    orientation_angle,
    pauli_rgb,
    psd_project,
    scattering_vectors,
)
from .scene import SceneSpec, load_scene, simulate_scene
from .sublook import SubLookStack, estimate_doppler_centroid, sublook_decompose, sublook_rgb
from .timefreq import Spectrogram, SpectroProjection, behavior_descriptor, project, spectrogram
