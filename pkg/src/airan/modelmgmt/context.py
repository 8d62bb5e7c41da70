"""Per-UE model context held by gNBs and its transfer on handover."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..simcore import NodeId
from .registry import ModelHandle


class ContextMissing(LookupError):
    pass


@dataclass
class ContextStore:
    """What each gNB believes is the model (id, version) serving each UE."""

    views: dict[NodeId, dict[NodeId, ModelHandle]] = field(default_factory=dict)

    def set(self, gnb: NodeId, ue: NodeId, handle: ModelHandle) -> None:
        self.views.setdefault(gnb, {})[ue] = handle

    def get(self, gnb: NodeId, ue: NodeId) -> ModelHandle | None:
        return self.views.get(gnb, {}).get(ue)

    def drop(self, gnb: NodeId, ue: NodeId) -> None:
        self.views.get(gnb, {}).pop(ue, None)


def sync_model_context(store: ContextStore, ue: NodeId, from_gnb: NodeId, to_gnb: NodeId) -> ModelHandle:
    ctx = store.get(from_gnb, ue)
    if ctx is None:
        raise ContextMissing(f"{from_gnb} holds no model context for {ue}")
    store.set(to_gnb, ue, ctx)
    store.drop(from_gnb, ue)
    return ctx


class ContextManager:
    """Handover-time context handling plus an audit of version mismatches.

    A UE-side model part is pinned to one version; inference at a gNB is a
    mismatch when the gNB would serve a different version. Without sync the
    target gNB falls back to its locally provisioned default version.
    """

    def __init__(self, defaults: dict[NodeId, ModelHandle], sync: bool = True):
        self.defaults = dict(defaults)
        self.sync = sync
        self.store = ContextStore()
        self.ue_model: dict[NodeId, ModelHandle] = {}
        self.inferences = 0
        self.mismatches: list[tuple[NodeId, NodeId, ModelHandle, ModelHandle]] = []

    def attach(self, ue: NodeId, gnb: NodeId, handle: ModelHandle | None = None) -> None:
        h = handle if handle is not None else self.defaults[gnb]
        self.ue_model[ue] = h
        self.store.set(gnb, ue, h)

    def handover(self, ue: NodeId, from_gnb: NodeId, to_gnb: NodeId) -> None:
        if self.sync:
            sync_model_context(self.store, ue, from_gnb, to_gnb)
        else:
            self.store.drop(from_gnb, ue)

    def infer(self, ue: NodeId, gnb: NodeId) -> ModelHandle:
        served = self.store.get(gnb, ue) or self.defaults[gnb]
        self.inferences += 1
        if served != self.ue_model[ue]:
            self.mismatches.append((ue, gnb, self.ue_model[ue], served))
        return served
