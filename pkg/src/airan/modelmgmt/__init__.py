"""Model repository, lifecycle FSM, performance monitoring and model-context sync."""
from .context import ContextManager, ContextMissing, ContextStore, sync_model_context
from .monitor import (DEFAULT_WINDOW, DegradationRule, ModelMonitor, MonitorAction, MonitoringReport,
                      RetrainMode, RetrainPolicy, monitor)
from .registry import (TRANSITIONS, Command, DuplicateVersion, InferenceRecord, InvalidTransition, Layer,
                       LifecycleState, ModelDescriptor, ModelEntry, ModelHandle, ModelRepository, NotActive,
                       TransitionRecord, UnknownModel, UseCase)
from .validation import EmptyValidationSet, MetricBound, score, validate
