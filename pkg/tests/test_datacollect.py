from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airan.datacollect import (DEFAULT_SCHEMA, Admission, AiBearer, AiPayload, And, BearerLink,
                               BudgetInvalid, CollectionService, CollectionTask, Comparison,
                               CrossDomainCollector, DataRecord, DeadlineClass, Domain, FilterSyntaxError,
                               FilterTypeError, Membership, MissingAttribute, Not, Or,
                               PayloadNotAllowed, Scope, SourceUnavailable, UnknownField,
                               UnreachableDestination, admit_ai_traffic, collect_cross_domain,
                               eval_filter, format_filter, parse_filter, scripted_app_server)
from airan.simcore import AI_NODE, MILLISECOND, MINUTE, OAM, SECOND, Simulator, Topology, gnb, ue

from filtergen import SCHEMA, naive_eval, random_attrs, random_expr, random_records


# -- parsing -----------------------------------------------------------------

def test_parse_velocity_comparison():
    assert parse_filter("velocity > 250", DEFAULT_SCHEMA) == Comparison("velocity", ">", 250)


def test_parse_conjunction_with_parentheses():
    got = parse_filter("(rsrp < -105) AND (prb_util >= 0.5)", DEFAULT_SCHEMA)
    assert got == And((Comparison("rsrp", "<", -105), Comparison("prb_util", ">=", 0.5)))


def test_empty_filter_is_syntax_error_at_zero():
    with pytest.raises(FilterSyntaxError) as err:
        parse_filter("")
    assert err.value.position == 0


def test_syntax_error_reports_position_and_expected():
    with pytest.raises(FilterSyntaxError) as err:
        parse_filter("velocity > 250 AND")
    assert err.value.position == len("velocity > 250 AND")
    assert err.value.expected


def test_comparisons_are_not_associative():
    with pytest.raises(FilterSyntaxError):
        parse_filter("velocity > 1 > 2")


def test_precedence_not_and_or():
    e = parse_filter("NOT vip == true AND rsrp < -100 OR velocity > 250", DEFAULT_SCHEMA)
    assert e == Or((And((Not(Comparison("vip", "==", True)), Comparison("rsrp", "<", -100))),
                    Comparison("velocity", ">", 250)))


def test_membership_parse():
    e = parse_filter('app_type IN ["short_video", "video_call"]', DEFAULT_SCHEMA)
    assert e == Membership("app_type", ("short_video", "video_call"))


def test_type_and_field_errors():
    with pytest.raises(FilterTypeError):
        parse_filter('velocity > "fast"', DEFAULT_SCHEMA)
    with pytest.raises(FilterTypeError):
        parse_filter('app_type > "a"', DEFAULT_SCHEMA)
    with pytest.raises(UnknownField):
        parse_filter("altitude > 3", DEFAULT_SCHEMA)


# -- evaluation ----------------------------------------------------------------

def test_strict_inequality_boundary():
    e = parse_filter("velocity > 250")
    assert eval_filter(e, {"velocity": 300})
    assert not eval_filter(e, {"velocity": 250})


def test_missing_attribute_is_an_error():
    with pytest.raises(MissingAttribute):
        eval_filter(parse_filter("velocity > 250"), {"rsrp": -90.0})


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_filter_matches_naive_interpreter(seed):
    rng = np.random.default_rng(seed)
    expr = random_expr(rng)
    recs = [random_attrs(rng) for _ in range(40)]
    assert [eval_filter(expr, a) for a in recs] == [naive_eval(expr, a) for a in recs]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_print_parse_round_trip(seed):
    expr = random_expr(np.random.default_rng(seed), depth=4)
    text = format_filter(expr)
    again = parse_filter(text, SCHEMA)
    assert again == expr
    assert format_filter(again) == text


# -- tasks -----------------------------------------------------------------------

def _service(gnbs=2, ues=5):
    sim = Simulator(Topology(gnb_count=gnbs, ues_per_gnb=ues))
    return sim, CollectionService(sim, SCHEMA)


@dataclass(frozen=True)
class Sample:
    record: DataRecord


def _feed(sim, svc, records):
    """Offer each record to the service at its own timestamp."""
    sim.on(Sample, lambda s, e: svc.on_sample(e.payload.record))
    for r in records:
        sim.at(r.time, Sample(r))


def test_budget_must_be_positive():
    _, svc = _service()
    with pytest.raises(BudgetInvalid):
        svc.install_task(CollectionTask("t", frozenset({"rsrp"}), DeadlineClass.NEAR_RT, AI_NODE, 0))


def test_real_time_needs_gnb_or_ai_node():
    _, svc = _service()
    with pytest.raises(UnreachableDestination):
        svc.install_task(CollectionTask("t", frozenset({"rsrp"}), DeadlineClass.REAL_TIME, OAM, 1e6))
    with pytest.raises(UnreachableDestination):
        svc.install_task(CollectionTask("u", frozenset({"rsrp"}), DeadlineClass.NEAR_RT, gnb(9), 1e6))


def test_real_time_report_within_ten_ms():
    sim, svc = _service()
    svc.install_task(CollectionTask("rt", frozenset({"velocity"}), DeadlineClass.REAL_TIME, AI_NODE, 1e9,
                                    filter="velocity > 250"))
    t = 3 * MILLISECOND
    _feed(sim, svc, [DataRecord(gnb(0), t, {"velocity": 300.0}, ue(1))])
    sim.run(SECOND)
    (arrived, task, n, generated), = svc.deliveries
    assert generated == t and n == 1 and arrived <= t + 10 * MILLISECOND


def test_oam_batches_at_quarter_hours():
    sim, svc = _service()
    svc.install_task(CollectionTask("oam", frozenset({"prb_util"}), DeadlineClass.OAM, OAM, 1e12))
    rng = np.random.default_rng(0)
    recs = random_records(rng, 200)
    for i, r in enumerate(recs):
        r.time = i * 9 * SECOND
    _feed(sim, svc, recs)
    sim.run(30 * MINUTE)
    flush_times = sorted({t for t, *_ in svc.flushes})
    assert flush_times == [15 * MINUTE, 30 * MINUTE]
    assert sum(n for *_, n in svc.flushes) == len(recs)


def test_high_speed_filter_count_matches_brute_force():
    sim, svc = _service()
    svc.install_task(CollectionTask("hs", frozenset({"velocity"}), DeadlineClass.REAL_TIME, AI_NODE, 1e12,
                                    filter="velocity > 250"))
    rng = np.random.default_rng(5)
    recs = []
    for i in range(1000):
        v = float(rng.uniform(260, 400)) if rng.random() < 0.1 else float(rng.uniform(0, 120))
        recs.append(DataRecord(gnb(i % 2), i * MILLISECOND, {"velocity": v}, ue(i % 10)))
    _feed(sim, svc, recs)
    sim.run(10 * SECOND)
    assert len(svc.delivered["hs"]) == sum(r.attrs["velocity"] > 250 for r in recs)


def test_budget_drops_newest_first():
    sim, svc = _service()
    svc.install_task(CollectionTask("b", frozenset({"rsrp"}), DeadlineClass.NEAR_RT, AI_NODE, 96 * 3))
    recs = [DataRecord(gnb(0), i * MILLISECOND, {"rsrp": -90.0 - i}, ue(0)) for i in range(10)]
    _feed(sim, svc, recs)
    sim.run(2 * SECOND)
    got = [r.attrs["rsrp"] for r in svc.delivered["b"]]
    assert got == [-90.0, -91.0, -92.0]
    assert svc.stats("b").dropped_budget == 7


def test_scope_restricts_cells():
    sim, svc = _service()
    svc.install_task(CollectionTask("s", frozenset({"rsrp"}), DeadlineClass.REAL_TIME, AI_NODE, 1e12,
                                    scope=Scope(cells=frozenset({1}))))
    recs = random_records(np.random.default_rng(2), 50)
    _feed(sim, svc, recs)
    sim.run(SECOND)
    assert len(svc.delivered["s"]) == sum(r.gnb == gnb(1) for r in recs)


# -- bearer ----------------------------------------------------------------------

def test_admission_examples():
    b = AiBearer(ue(0), capacity_bps=1e6, cap_fraction=0.2, epoch=SECOND)
    assert admit_ai_traffic(b, 0.1e6, 0.5) is Admission.SEND
    assert admit_ai_traffic(b, 0.25e6, 0.5) is Admission.DEFER
    assert admit_ai_traffic(b, 0.15e6, 0.9) is Admission.DEFER


def test_bearer_rejects_non_ai_payloads():
    b = AiBearer(ue(0), 1e6, allowed=frozenset({AiPayload.MODEL}))
    with pytest.raises(PayloadNotAllowed):
        admit_ai_traffic(b, 10, 0.1, AiPayload.TRAINING_DATA)
    with pytest.raises(ValueError):
        AiBearer(ue(0), 1e6, cap_fraction=1.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(1e3, 5e6), min_size=1, max_size=15), st.floats(0.0, 0.95))
def test_bearer_share_never_exceeds_cap(sizes, load):
    sim = Simulator(Topology(gnb_count=1, ues_per_gnb=1))
    link = BearerLink(sim, AiBearer(gnb(0), 1e7, 0.2, 100 * MILLISECOND), lambda t: load)
    for s in sizes:
        link.submit(AI_NODE, "blob", s, AiPayload.TRAINING_DATA)
    sim.run(3600 * SECOND)
    assert all(share <= 0.2 + 1e-12 and share + basic <= 1.0 + 1e-12 for _, share, basic in link.audit)
    assert not link.queue


# -- cross-domain ----------------------------------------------------------------

def test_app_server_records_carry_ttft():
    col = CrossDomainCollector([scripted_app_server([{"ttft": 420.0, "app_type": "llm_chat", "time": 5}])])
    recs = collect_cross_domain(col, Domain.APP_SERVER, ["ttft"])
    assert recs[0].attrs == {"ttft": 420.0} and recs[0].domain == "APP_SERVER"


def test_unconfigured_source_and_unknown_attribute():
    col = CrossDomainCollector([scripted_app_server([])])
    with pytest.raises(SourceUnavailable):
        collect_cross_domain(col, Domain.CORE, ["latency"])
    with pytest.raises(UnknownField):
        collect_cross_domain(col, Domain.APP_SERVER, ["rsrp"])
