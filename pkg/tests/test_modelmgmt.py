import pytest
from hypothesis import given, settings, strategies as st

from airan.datacollect import DataRecord
from airan.modelmgmt import (Command, ContextManager, ContextMissing, ContextStore, DegradationRule,
                             DuplicateVersion, EmptyValidationSet, InvalidTransition, LifecycleState,
                             MetricBound, ModelDescriptor, ModelHandle, ModelMonitor, ModelRepository,
                             MonitorAction, MonitoringReport, NotActive, RetrainMode, RetrainPolicy,
                             UseCase, sync_model_context, validate)
from airan.simcore import MINUTE, SECOND, gnb, ue

from lcmgen import lifecycle_trace, random_handovers

S, C = LifecycleState, Command
UP = (C.TRAIN_DONE, C.VALIDATE_PASS, C.DEPLOY, C.ACTIVATE)


def _repo():
    repo = ModelRepository()
    repo.register_dataset("d1")
    return repo


def _active(repo, model_id="m1", version=1):
    h = repo.register_model(ModelDescriptor(model_id, version, UseCase.QOS, ("d1",)))
    for cmd in UP:
        repo.transition(h, cmd)
    return h


def test_register_and_duplicate():
    repo = _repo()
    h = repo.register_model(ModelDescriptor("m1", 1, UseCase.RCA))
    assert repo.state(h) is S.REGISTERED
    with pytest.raises(DuplicateVersion):
        repo.register_model(ModelDescriptor("m1", 1, UseCase.RCA))


def test_latest_version_and_use_case_lookup():
    repo = _repo()
    repo.register_model(ModelDescriptor("m1", 1, UseCase.RCA))
    repo.register_model(ModelDescriptor("m1", 2, UseCase.RCA))
    repo.register_model(ModelDescriptor("m2", 1, UseCase.ENERGY_SAVING))
    assert repo.latest("m1") == ModelHandle("m1", 2)
    assert [h.version for h in repo.versions("m1")] == [1, 2]
    assert repo.by_use_case(UseCase.RCA) == [ModelHandle("m1", 1), ModelHandle("m1", 2)]


def test_full_path_visits_four_intermediate_states():
    repo = _repo()
    h = _active(repo)
    states = [s for _, s in repo.entry(h).history]
    assert states == [S.REGISTERED, S.TRAINED, S.VALIDATED, S.DEPLOYED, S.ACTIVE]
    assert len(states[1:-1]) == 3 and len(repo.transitions) == 4


def test_skipping_validation_is_invalid():
    repo = _repo()
    h = repo.register_model(ModelDescriptor("m1", 1, UseCase.QOS, ("d1",)))
    with pytest.raises(InvalidTransition):
        repo.transition(h, C.ACTIVATE)


def test_trained_model_needs_lineage():
    repo = _repo()
    h = repo.register_model(ModelDescriptor("m1", 1, UseCase.QOS))
    with pytest.raises(InvalidTransition):
        repo.transition(h, C.TRAIN_DONE)
    with pytest.raises(InvalidTransition):
        repo.transition(h, C.TRAIN_DONE, ["unknown"])
    assert repo.transition(h, C.TRAIN_DONE, ["d1"]) is S.TRAINED


def test_activation_replaces_and_never_regresses():
    repo = _repo()
    h1 = _active(repo, version=1)
    h2 = _active(repo, version=2)
    assert repo.state(h1) is S.INACTIVE and repo.active("m1") == h2
    with pytest.raises(InvalidTransition):
        repo.transition(h1, C.ACTIVATE)


def test_retire_not_allowed_while_active():
    repo = _repo()
    h = _active(repo)
    with pytest.raises(InvalidTransition):
        repo.transition(h, C.RETIRE)


def test_infer_uses_active_version_or_baseline():
    repo = _repo()
    assert repo.infer("m1", lambda a: "ai", lambda: "base") == "base"
    h = _active(repo)
    assert repo.infer("m1", lambda a: "ai", lambda: "base") == "ai"
    assert repo.inferences[-1].handle == h


def test_export_has_state_history():
    repo = _repo()
    _active(repo)
    (row,) = repo.export_rows()
    assert row["state"] == "ACTIVE" and row["history"].count(":") == 5


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_lifecycle_traces(seed):
    assert lifecycle_trace(seed) == []


# -- monitoring ------------------------------------------------------------------

def _reports(h, values, metric="accuracy"):
    return [MonitoringReport(h, (i * 60 * SECOND, (i + 1) * 60 * SECOND), {metric: v})
            for i, v in enumerate(values)]


def test_fallback_after_third_consecutive_breach():
    repo = _repo()
    h = _active(repo)
    mon = ModelMonitor(repo)
    pol = RetrainPolicy(RetrainMode.PERFORMANCE_TRIGGERED, DegradationRule("accuracy", 0.8), k=3)
    acts = [mon.monitor(r, pol) for r in _reports(h, [0.85, 0.75, 0.75, 0.75])]
    assert acts == [MonitorAction.NONE] * 3 + [MonitorAction.FALLBACK]
    assert repo.state(h) is S.INACTIVE and repo.fallback_engaged("m1")
    assert repo.infer("m1", lambda a: "ai", lambda: "base") == "base"
    with pytest.raises(InvalidTransition):
        repo.transition(h, C.ACTIVATE)
    h2 = _active(repo, version=2)
    assert not repo.fallback_engaged("m1") and repo.active("m1") == h2


def test_non_consecutive_breaches_do_nothing():
    repo = _repo()
    h = _active(repo)
    mon = ModelMonitor(repo)
    pol = RetrainPolicy(RetrainMode.PERFORMANCE_TRIGGERED, DegradationRule("accuracy", 0.8), k=3)
    assert {mon.monitor(r, pol) for r in _reports(h, [0.75, 0.85, 0.75])} == {MonitorAction.NONE}


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.lists(st.booleans(), min_size=1, max_size=30))
def test_fallback_fires_at_first_run_of_k(k, breach_pattern):
    repo = _repo()
    h = _active(repo)
    mon = ModelMonitor(repo)
    pol = RetrainPolicy(RetrainMode.PERFORMANCE_TRIGGERED, DegradationRule("accuracy", 0.8), k=k)
    expected, run = None, 0
    for i, b in enumerate(breach_pattern):
        run = run + 1 if b else 0
        if run == k:
            expected = i
            break
    got = None
    for i, r in enumerate(_reports(h, [0.5 if b else 0.9 for b in breach_pattern])):
        if mon.monitor(r, pol) is MonitorAction.FALLBACK:
            got = i
            break
    assert got == expected


def test_periodic_retrain_every_quarter_hour():
    repo = _repo()
    h = _active(repo)
    mon = ModelMonitor(repo)
    pol = RetrainPolicy(RetrainMode.PERIODIC, period=15 * MINUTE)
    reports = [MonitoringReport(h, (i * MINUTE, (i + 1) * MINUTE), {"accuracy": 0.9}) for i in range(60)]
    acts = [mon.monitor(r, pol) for r in reports]
    assert acts.count(MonitorAction.RETRAIN_REQUESTED) == 4


def test_monitor_needs_active_model():
    repo = _repo()
    h = repo.register_model(ModelDescriptor("m1", 1, UseCase.QOS, ("d1",)))
    pol = RetrainPolicy(RetrainMode.PERFORMANCE_TRIGGERED, DegradationRule("accuracy", 0.8))
    with pytest.raises(NotActive):
        ModelMonitor(repo).monitor(_reports(h, [0.9])[0], pol)


def test_report_and_policy_validation():
    h = ModelHandle("m1", 1)
    with pytest.raises(ValueError):
        MonitoringReport(h, (5, 5))
    with pytest.raises(ValueError):
        MonitoringReport(h, (0, 5), resource_metrics={"compute_utilization": 1.5})
    with pytest.raises(ValueError):
        RetrainPolicy(RetrainMode.PERIODIC)
    with pytest.raises(ValueError):
        RetrainPolicy(RetrainMode.PERFORMANCE_TRIGGERED, DegradationRule("accuracy", 0.8), k=0)


# -- context sync ----------------------------------------------------------------

def test_context_copied_on_handover():
    store = ContextStore()
    store.set(gnb(0), ue(1), ModelHandle("m1", 3))
    sync_model_context(store, ue(1), gnb(0), gnb(1))
    assert store.get(gnb(1), ue(1)) == ModelHandle("m1", 3)


def test_missing_context():
    with pytest.raises(ContextMissing):
        sync_model_context(ContextStore(), ue(1), gnb(0), gnb(1))


def test_handover_without_sync_mismatches():
    cm = ContextManager({gnb(0): ModelHandle("m", 1), gnb(1): ModelHandle("m", 2)}, sync=False)
    cm.attach(ue(0), gnb(0))
    cm.handover(ue(0), gnb(0), gnb(1))
    assert cm.infer(ue(0), gnb(1)) == ModelHandle("m", 2)
    assert len(cm.mismatches) == 1


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_handovers_with_sync_never_mismatch(seed):
    assert random_handovers(seed, 200, sync=True)[0] == 0


# -- validation ------------------------------------------------------------------

def _labelled(n):
    return [DataRecord(gnb(0), i, {"x": float(i % 2), "label": i % 2}) for i in range(n)]


def test_validate_perfect_predictor_passes():
    repo = _repo()
    h = repo.register_model(ModelDescriptor("m1", 1, UseCase.RCA, ("d1",)))
    repo.transition(h, C.TRAIN_DONE)
    assert validate(repo, h, _labelled(20), MetricBound("accuracy", 0.9), lambda r: int(r.attrs["x"]))
    assert repo.state(h) is S.VALIDATED


def test_validate_constant_predictor_fails():
    repo = _repo()
    h = repo.register_model(ModelDescriptor("m1", 1, UseCase.RCA, ("d1",)))
    repo.transition(h, C.TRAIN_DONE)
    assert not validate(repo, h, _labelled(20), MetricBound("accuracy", 0.9), lambda r: 0)
    assert repo.state(h) is S.REGISTERED


def test_validate_empty_set():
    repo = _repo()
    h = repo.register_model(ModelDescriptor("m1", 1, UseCase.RCA, ("d1",)))
    repo.transition(h, C.TRAIN_DONE)
    with pytest.raises(EmptyValidationSet):
        validate(repo, h, [], MetricBound("accuracy", 0.9), lambda r: 0)
