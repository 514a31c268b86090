"""Pydantic models for persisted artifacts (sidecars, manifests, models, reports)"""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt


class Provenance(BaseModel):
    """Tool identity and resolved configuration of the run that wrote an artifact"""
    tool: str
    tool_version: str
    config: Dict[str, Any]


class IqSidecar(BaseModel):
    """Sidecar metadata of a raw cf32le IQ file"""
    format: Literal["cf32le"] = "cf32le"
    sample_rate_hz: PositiveFloat
    num_samples: PositiveInt


class ManifestRecord(BaseModel):
    """One labeled segment of a synthesized dataset"""
    model_config = ConfigDict(populate_by_name=True)

    class_label: str = Field(..., alias="class")
    sir_db: float
    seed: int
    file: str


class MomentsModel(BaseModel):
    """First four moments of an MSE vector; higher moments absent when variance is zero"""
    mean: float
    variance: float
    skewness: Optional[float] = None
    kurtosis: Optional[float] = None


class InputScaleModel(BaseModel):
    """Per-dimension affine normalisation learned from training data"""
    minimum: List[float]
    maximum: List[float]


class AutoencoderFile(BaseModel):
    """Versioned sparse autoencoder serialisation, weights flat row-major"""
    model_config = ConfigDict(populate_by_name=True)

    version: int = 1
    d: PositiveInt
    h: PositiveInt
    l2_weight: float = Field(..., alias="lambda")
    rho_s: float
    beta_s: float
    input_scale: InputScaleModel
    w_enc: List[float]
    b_enc: List[float]
    w_dec: List[float]
    b_dec: List[float]
    training_digests: List[str] = Field(default_factory=list)
    provenance: Optional[Provenance] = None


class CalibrationFile(BaseModel):
    """Detector calibration: clean baseline moments and thresholds"""
    version: int = 1
    baseline: MomentsModel
    variance_threshold: PositiveFloat
    skewness_threshold: PositiveFloat
    num_segments: PositiveInt
    calibrated_on_training_data: bool = False
    provenance: Optional[Provenance] = None


class DetectionReport(BaseModel):
    """Outcome of a detection run"""
    version: int = 1
    interference_detected: bool
    baseline: MomentsModel
    observed: MomentsModel
    relative_increase: Dict[str, Optional[float]]
    variance_threshold: float
    skewness_threshold: float
    num_segments: PositiveInt
    provenance: Optional[Provenance] = None


class NormStatsModel(BaseModel):
    """Per-channel feature mean and standard deviation"""
    mean: List[float]
    std: List[float]


class LstmModelFile(BaseModel):
    """Versioned LSTM classifier serialisation, weights flat row-major"""
    version: int = 1
    hidden_size: PositiveInt
    input_size: PositiveInt
    class_labels: List[str]
    norm_stats: NormStatsModel
    params: Dict[str, List[float]]
    provenance: Optional[Provenance] = None


class SirBreakdownModel(BaseModel):
    """Metrics restricted to segments sharing one SIR tag"""
    sir_db: float
    num_segments: int
    accuracy: float
    accuracy_per_class: List[Optional[float]]
    rmse: float
    rmse_per_class: List[Optional[float]]
    confusion_matrix: List[List[int]]


class ClassificationReportFile(BaseModel):
    """Classifier evaluation report"""
    version: int = 1
    class_labels: List[str]
    num_segments: int
    confusion_matrix: List[List[int]]
    accuracy_overall: float
    accuracy_per_class: List[Optional[float]]
    rmse: float
    rmse_per_class: List[Optional[float]]
    rmse_definition: str = "sqrt(mean_segments(mean_classes((p - onehot)^2)))"
    per_sir: List[SirBreakdownModel]
    provenance: Optional[Provenance] = None


class TriageReport(BaseModel):
    """Two-stage outcome: detection decision and, when detected, the interferer class"""
    version: int = 1
    detection: DetectionReport
    predicted_class: Optional[str] = None
    votes: Dict[str, int] = Field(default_factory=dict)
    mean_probabilities: Dict[str, float] = Field(default_factory=dict)
    provenance: Optional[Provenance] = None


class SweepReportFile(BaseModel):
    """Classification reports of an SIR sweep, one per point in sweep order"""
    version: int = 1
    sir_list_db: List[float]
    segments_per_point: PositiveInt
    points: List[ClassificationReportFile]
    provenance: Optional[Provenance] = None


class SynthReport(BaseModel):
    """Parameters and realised scale of a single synthesized waveform"""
    version: int = 1
    kind: str
    interferer_kind: Optional[str] = None
    sir_db: Optional[float] = None
    snr_db: Optional[float] = None
    beta: Optional[float] = None
    num_samples: PositiveInt
    file: str
    provenance: Optional[Provenance] = None
