"""Model repository with version/dataset lineage and the lifecycle state machine."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from ..simcore import AI_NODE, NodeId, SimTime


class UseCase(enum.Enum):
    ENERGY_SAVING = "ENERGY_SAVING"
    QOS = "QOS"
    RCA = "RCA"
    MOBILITY = "MOBILITY"


class Layer(enum.Enum):
    L1 = "L1"
    L2 = "L2"
    L3 = "L3"


class LifecycleState(enum.Enum):
    REGISTERED = "REGISTERED"
    TRAINED = "TRAINED"
    VALIDATED = "VALIDATED"
    DEPLOYED = "DEPLOYED"
    ACTIVE = "ACTIVE"
    INACTIVE = "INACTIVE"
    RETIRED = "RETIRED"


class Command(enum.Enum):
    TRAIN_DONE = "TRAIN_DONE"
    VALIDATE_PASS = "VALIDATE_PASS"
    VALIDATE_FAIL = "VALIDATE_FAIL"
    DEPLOY = "DEPLOY"
    ACTIVATE = "ACTIVATE"
    DEACTIVATE = "DEACTIVATE"
    RETIRE = "RETIRE"


S, C = LifecycleState, Command
TRANSITIONS: dict[tuple[LifecycleState, Command], LifecycleState] = {
    (S.REGISTERED, C.TRAIN_DONE): S.TRAINED,
    (S.TRAINED, C.VALIDATE_PASS): S.VALIDATED,
    (S.TRAINED, C.VALIDATE_FAIL): S.REGISTERED,
    (S.VALIDATED, C.DEPLOY): S.DEPLOYED,
    (S.DEPLOYED, C.ACTIVATE): S.ACTIVE,
    (S.ACTIVE, C.DEACTIVATE): S.INACTIVE,
    (S.INACTIVE, C.ACTIVATE): S.ACTIVE,
}
for _s in LifecycleState:
    if _s not in (S.ACTIVE, S.RETIRED):
        TRANSITIONS[(_s, C.RETIRE)] = S.RETIRED
del _s


class DuplicateVersion(ValueError):
    pass


class InvalidTransition(ValueError):
    def __init__(self, state: LifecycleState, command: Command, why: str = ""):
        msg = f"{command.value} is not legal in state {state.value}"
        super().__init__(f"{msg}: {why}" if why else msg)
        self.state = state
        self.command = command


class UnknownModel(LookupError):
    pass


class NotActive(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ModelHandle:
    model_id: str
    version: int

    def __str__(self):
        return f"{self.model_id}:v{self.version}"


@dataclass(frozen=True)
class ModelDescriptor:
    model_id: str
    version: int
    use_case: UseCase
    lineage: tuple[str, ...] = ()
    parameter_count: int = 0
    layer: Layer = Layer.L3
    host: NodeId = AI_NODE

    @property
    def handle(self) -> ModelHandle:
        return ModelHandle(self.model_id, self.version)


@dataclass
class ModelEntry:
    descriptor: ModelDescriptor
    state: LifecycleState = LifecycleState.REGISTERED
    fallback_engaged: bool = False
    lineage: list[str] = field(default_factory=list)
    history: list[tuple[SimTime, LifecycleState]] = field(default_factory=list)
    artifact: Any = None


@dataclass(frozen=True)
class TransitionRecord:
    time: SimTime
    seq: int
    handle: ModelHandle
    command: Command
    before: LifecycleState
    after: LifecycleState


@dataclass(frozen=True)
class InferenceRecord:
    time: SimTime
    seq: int
    model_id: str
    handle: ModelHandle | None      # None means the non-AI baseline answered


class ModelRepository:
    """Catalog of every (model_id, version) with its lifecycle.

    All mutation goes through :meth:`transition`; the log of transitions and
    inferences is kept so traces can be audited after a run.
    """

    def __init__(self, clock: Callable[[], SimTime] = lambda: 0):
        self.clock = clock
        self.entries: dict[ModelHandle, ModelEntry] = {}
        self.datasets: set[str] = set()
        self.transitions: list[TransitionRecord] = []
        self.inferences: list[InferenceRecord] = []
        self._seq = 0

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    # -- catalog -----------------------------------------------------------
    def register_dataset(self, dataset_id: str) -> None:
        self.datasets.add(dataset_id)

    def register_model(self, desc: ModelDescriptor, artifact: Any = None) -> ModelHandle:
        h = desc.handle
        if h in self.entries:
            raise DuplicateVersion(f"{h} already registered")
        entry = ModelEntry(desc, lineage=list(desc.lineage), artifact=artifact)
        entry.history.append((self.clock(), LifecycleState.REGISTERED))
        self.entries[h] = entry
        return h

    def entry(self, handle: ModelHandle) -> ModelEntry:
        try:
            return self.entries[handle]
        except KeyError:
            raise UnknownModel(str(handle)) from None

    def state(self, handle: ModelHandle) -> LifecycleState:
        return self.entry(handle).state

    def versions(self, model_id: str) -> list[ModelHandle]:
        return sorted(h for h in self.entries if h.model_id == model_id)

    def latest(self, model_id: str) -> ModelHandle:
        vs = self.versions(model_id)
        if not vs:
            raise UnknownModel(model_id)
        return vs[-1]

    def by_use_case(self, use_case: UseCase) -> list[ModelHandle]:
        return sorted(h for h, e in self.entries.items() if e.descriptor.use_case is use_case)

    def active(self, model_id: str) -> ModelHandle | None:
        for h in self.versions(model_id):
            if self.entries[h].state is LifecycleState.ACTIVE:
                return h
        return None

    def set_artifact(self, handle: ModelHandle, artifact: Any) -> None:
        self.entry(handle).artifact = artifact

    # -- lifecycle ---------------------------------------------------------
    def transition(self, handle: ModelHandle, command: Command, lineage: Iterable[str] = ()) -> LifecycleState:
        entry = self.entry(handle)
        before = entry.state
        after = TRANSITIONS.get((before, command))
        if after is None:
            raise InvalidTransition(before, command)
        if command is Command.TRAIN_DONE:
            extra = list(lineage)
            unknown = [d for d in extra if d not in self.datasets]
            if unknown:
                raise InvalidTransition(before, command, f"unregistered datasets {unknown}")
            if not entry.lineage and not extra:
                raise InvalidTransition(before, command, "a trained model needs dataset lineage")
            entry.lineage.extend(d for d in extra if d not in entry.lineage)
        if command is Command.ACTIVATE:
            self._check_activation(handle, entry)
            current = self.active(handle.model_id)
            if current is not None and current != handle:
                self._apply(current, Command.DEACTIVATE, LifecycleState.INACTIVE)
        self._apply(handle, command, after)
        return after

    def _check_activation(self, handle: ModelHandle, entry: ModelEntry) -> None:
        if entry.fallback_engaged:
            raise InvalidTransition(entry.state, Command.ACTIVATE,
                                    "fallback engaged; a newer validated version must be activated")
        current = self.active(handle.model_id)
        if current is not None and current.version > handle.version:
            raise InvalidTransition(entry.state, Command.ACTIVATE,
                                    f"would regress from active {current}")
        missing = [d for d in entry.lineage if d not in self.datasets]
        if missing or not entry.lineage:
            raise InvalidTransition(entry.state, Command.ACTIVATE, "lineage does not resolve")

    def _apply(self, handle: ModelHandle, command: Command, after: LifecycleState) -> None:
        entry = self.entries[handle]
        now = self.clock()
        self.transitions.append(TransitionRecord(now, self._next_seq(), handle, command, entry.state, after))
        entry.state = after
        entry.history.append((now, after))

    def engage_fallback(self, handle: ModelHandle) -> None:
        """Deactivate ``handle`` and hand its use case to the non-AI baseline."""
        entry = self.entry(handle)
        if entry.state is LifecycleState.ACTIVE:
            self._apply(handle, Command.DEACTIVATE, LifecycleState.INACTIVE)
        entry.fallback_engaged = True

    def fallback_engaged(self, model_id: str) -> bool:
        return self.active(model_id) is None and any(
            self.entries[h].fallback_engaged for h in self.versions(model_id))

    # -- serving -----------------------------------------------------------
    def infer(self, model_id: str, ai: Callable[[Any], Any], baseline: Callable[[], Any]) -> Any:
        """Answer with the ACTIVE version of ``model_id`` if any, else with ``baseline``."""
        h = self.active(model_id)
        self.inferences.append(InferenceRecord(self.clock(), self._next_seq(), model_id, h))
        if h is None:
            return baseline()
        return ai(self.entries[h].artifact)

    # -- export ------------------------------------------------------------
    def export_rows(self) -> list[dict[str, Any]]:
        rows = []
        for h in sorted(self.entries):
            e = self.entries[h]
            rows.append({
                "model_id": h.model_id,
                "version": h.version,
                "use_case": e.descriptor.use_case.value,
                "layer": e.descriptor.layer.value,
                "host": str(e.descriptor.host),
                "lineage": ";".join(e.lineage),
                "state": e.state.value,
                "fallback_engaged": e.fallback_engaged,
                "history": ";".join(f"{t}:{s.value}" for t, s in e.history),
            })
        return rows
