"""Contactless continuous authentication from Wi-Fi channel state
information, with a physics-based CSI synthesizer in place of radio
hardware."""

from .body_model import (AirConstants, BodyProfile, NoiseModel, PathGeometry,
                         Scene, TissueLayer, channel_response,
                         default_body_profile, synthesize_csi)
from .csi import CsiFrame, CsiSeries, read_csv, write_csv
from .errors import BodyauthError, ConfigError, FormatError, GeometryError
from .features import PcaReducer, RangeNormalizer, extract_stats, feature_matrix, window
from .matcher import (AuthDecision, GaussianPeriodAuthenticator, PeriodModel,
                      authenticate, fit_period, register, score)
from .metrics import (ConfusionMatrix, EvalReport, InterruptionHistogram,
                      SubjectData, mean_auth_accuracy,
                      mean_defending_precision, mean_interruption_interval,
                      run_evaluation, subject_accuracy)
from .pipeline import (CsiSanitizer, FilterSpec, ProcessedSeries,
                       design_butterworth, filter_series, phase_difference,
                       sanitize)
from .session import Event, Phase, Session, SessionConfig

__version__ = "0.1.0"
