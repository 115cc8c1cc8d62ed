"""smaug: gesture-based authentication from touch and device-motion traces."""

from .authflow import (
    AttemptResult,
    EnrollmentRecord,
    VerificationSession,
    enroll,
    load_record,
    record_from_payload,
    record_to_payload,
    save_record,
    select_gesture,
    verify_attempt,
)
from .config import (
    DEFAULT_SECURITY,
    SecurityParams,
    SmaugConfig,
    default_config,
    experiment_config,
    load_config,
)
from .dtw import dtw
from .errors import (
    CorruptRecord,
    EmptyFusion,
    EmptyRegistry,
    EmptySequence,
    EmptyTouch,
    InconsistentStream,
    InsufficientRounds,
    MalformedDocument,
    NotFound,
    SchemaViolation,
    SmaugError,
    StrokeCountMismatch,
    UnterminatedStroke,
    VersionMismatch,
)
from .pipeline import RoundData, process_round
from .store import TemplateStore, parse_record, serialize_record
from .template import FiveStat, GestureTemplate, generate_template
from .trace import (
    GestureMeta,
    GestureTrace,
    MotionEvent,
    Sensor,
    TouchAction,
    TouchEvent,
    parse_trace,
    serialize_trace,
    validate_trace,
)

__version__ = "1.0.0"
