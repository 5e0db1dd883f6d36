"""ERB-scaled long-short-term spatial coherence (LSTSC) features for microphone arrays."""

__version__ = "0.1.0"

from .erb import ErbFilterbank, build_filterbank, erb_coherence, erb_spectrum
from .errors import (
    AudioIOError,
    ConfigError,
    GeometryError,
    LabelError,
    LstscError,
    NumericError,
    SampleRateError,
    ShapeError,
)
from .evaluate import (
    DiscriminationReport,
    OracleLabels,
    auc_score,
    coherence_mask_enhance,
    evaluate_scene,
    oracle_labels,
    score_discrimination,
    si_snr,
)
from .features import FeatureFile, extract
from .scene import (
    ArrayGeometry,
    LabeledScene,
    Room,
    SceneSpec,
    Source,
    free_field_rir,
    image_source_rir,
    render_scene,
    uca,
    ula,
)
from .spatial import (
    GLOBAL,
    LOCAL,
    CoherenceMap,
    CoherenceTracker,
    LstscState,
    RtfConfig,
    coherence_stream,
    lstsc,
    short_term_rtf,
    whiten,
)
from .stft import MultichannelSpectrogram, StftConfig, analyze, synthesize
