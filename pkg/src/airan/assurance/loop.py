from __future__ import annotations

from dataclasses import dataclass, field

from ..simcore import NodeId, SimTime
from .perception import DEFAULT_CATALOG, AppCatalog
from .policy import Predictor, UtilityPolicy, select_action
from .predictor import DEFAULT_ACTION, Action, UserContext, predict_quality

EXPECTATIONS = ("posterior", "observed")


@dataclass(frozen=True)
class Degradation:
    time: SimTime
    ctx: UserContext


@dataclass
class AssuranceRow:
    time: SimTime
    ue: NodeId
    observed_app: str
    action: Action
    predicted_latency: float
    ctx: UserContext
    realized_latency: float | None = None


@dataclass
class AssuranceController:
    """Closed loop: degradation of an assured user triggers the argmax and applies its action."""

    policy: UtilityPolicy = field(default_factory=UtilityPolicy)
    predictor: Predictor = predict_quality
    accuracy: float = 1.0
    catalog: AppCatalog = DEFAULT_CATALOG
    # "posterior" averages over the confusion posterior; "observed" trusts the label
    expectation: str = "posterior"
    shares: dict = field(default_factory=dict)       # ue -> applied Action
    log: list = field(default_factory=list)

    def __post_init__(self):
        if self.expectation not in EXPECTATIONS:
            raise ValueError(f"expectation must be one of {EXPECTATIONS}")

    @property
    def decision_accuracy(self) -> float:
        return self.accuracy if self.expectation == "posterior" else 1.0

    def action_for(self, ue: NodeId) -> Action:
        return self.shares.get(ue, DEFAULT_ACTION)

    def decide(self, ctx: UserContext) -> Action:
        return select_action(ctx, self.policy, self.predictor, self.decision_accuracy, self.catalog)

    def assure(self, trigger: Degradation, decided: Action | None = None) -> Action:
        """Apply the chosen action for a VIP; anyone else keeps their current share."""
        ctx = trigger.ctx
        if not ctx.vip:
            return self.action_for(ctx.ue)
        action = decided if decided is not None else self.decide(ctx)
        self.shares[ctx.ue] = action
        self.log.append(AssuranceRow(trigger.time, ctx.ue, ctx.app_type, action,
                                     self.predictor(ctx, action).latency, ctx))
        return action


def assure_loop(controller: AssuranceController, trigger: Degradation) -> Action:
    return controller.assure(trigger)
