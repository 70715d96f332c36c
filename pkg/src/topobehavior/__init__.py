"""Topological summaries of multivariate behavior recordings.

Posture time series are delay-embedded into point clouds, summarized by
Vietoris-Rips persistent homology and persistence landscapes, and compared
across recordings with landscape distances, ordination, permutation tests,
and kernel classifiers.
"""

from .errors import ConfigError, DataError, NumericalError, ParseError
from .ingest import (
    Patch,
    TimeSeries,
    load_postures,
    make_patches,
    project_postures,
    save_postures,
)
from .embed import PointCloud, sliding_window
from .homology import (
    DistanceMatrix,
    Filtration,
    PersistenceDiagram,
    RepresentativeCycle,
    enclosing_radius,
    pairwise_distances,
    persistent_homology,
    representative_cycles,
    vietoris_rips,
)
from .landscape import (
    ClassSummary,
    DiscretizedLandscape,
    Grid,
    Landscape,
    average_landscapes,
    discretize,
    landscape_distance,
    landscape_from_diagram,
    mean_landscape,
    normalize_class_distances,
)
from .stats import (
    MDSEmbedding,
    PCAResult,
    PermutationResult,
    mds,
    pca,
    permutation_test,
)
from .ml import (
    CVReport,
    SVMModel,
    SVRModel,
    svm_cross_validate,
    svm_predict,
    svm_train,
    svr_fit_predict,
)
from .synth import (
    CLASS_PARAMS,
    SynthSpec,
    gen_composite,
    gen_figure_eight,
    gen_posture_class,
    gen_sine,
)
from .pipeline import PipelineConfig, case_study, run_pipeline

__version__ = "0.1.0"
