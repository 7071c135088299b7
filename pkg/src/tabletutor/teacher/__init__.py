from .types import (
    FEEDBACK_KINDS,
    COUNTED_KINDS,
    FeedbackEvent,
    ReasonerOutput,
    PreconditionLedger,
    TeacherBackendConfig,
    TeacherError,
    UnparseableFeedback,
    UnknownPredicate,
    CorrectionFailed,
    TranslationError,
)
__all__ = [
    "FEEDBACK_KINDS",
    "COUNTED_KINDS",
    "FeedbackEvent",
    "ReasonerOutput",
    "PreconditionLedger",
    "TeacherBackendConfig",
    "TeacherError",
    "UnparseableFeedback",
    "UnknownPredicate",
    "CorrectionFailed",
    "TranslationError",
    "ScriptedTeacher",
    "make_teacher",
]


def __getattr__(name):
    # deferred: scripted.py pulls in the oracle templates, which import
    # these shared types back out of this package
    if name == "ScriptedTeacher":
        from .scripted import ScriptedTeacher

        return ScriptedTeacher
    raise AttributeError(name)


def make_teacher(domain_id: str, config: TeacherBackendConfig | None = None):
    config = config or TeacherBackendConfig()
    if config.backend == "scripted":
        from .scripted import ScriptedTeacher

        return ScriptedTeacher(domain_id, config)
    if config.backend == "remote":
        from .remote import RemoteTeacher

        return RemoteTeacher(domain_id, config)
    raise ValueError(f"unknown teacher backend {config.backend!r}")
