import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airan.datacollect import DataRecord
from airan.modelmgmt import LifecycleState, ModelRepository, UseCase
from airan.rca import (ROOT_CAUSES, DegenerateDataset, FeatureDomain, FusedFeatures, GeneratorConfig,
                       GridIndex, MissingDomain, OutOfDomain, RcaConfig, RootCause, SchemaMismatch,
                       TreeConfig, TreeEnsemble, UserType, aggregate_grid, diagnose, diagnose_many,
                       fuse_features, grid_index, grid_rows, planted_dataset, precision_recall, rule_baseline,
                       train_classifier, user_type_for)
from airan.simcore import SECOND, gnb, ue

from rcaref import groupby_means, window_fuse

HEALTHY = dict(tcp_rtt=40.0, packet_loss=0.0, sinr=15.0, rsrp=-90.0, handover_failures=0, cell_load=0.3,
               device_class="phone", battery_low=False, grids_visited=1, speed=0.5)


def _f(**kw):
    return FusedFeatures(**{**HEALTHY, **kw})


def _rec(x, y, rtt, rsrp=-90.0, sinr=10.0):
    return {"position_x": x, "position_y": y, "tcp_rtt": rtt, "rsrp": rsrp, "sinr": sinr}


# -- grid ------------------------------------------------------------------------

def test_grid_index_cells():
    assert grid_index(0, 0) == GridIndex(0, 0)
    assert grid_index(49.999, 50.0) == GridIndex(0, 1)
    assert grid_index(120, 10) == GridIndex(2, 0)
    with pytest.raises(OutOfDomain):
        grid_index(-1.0, 3.0)


@settings(max_examples=200)
@given(st.floats(0, 1e5), st.floats(0, 1e5), st.floats(0, 1), st.floats(0, 1))
def test_grid_index_stable_within_cell(x, y, fx, fy):
    dx = fx * (50.0 - x % 50.0)
    dy = fy * (50.0 - y % 50.0)
    if x + dx < (math.floor(x / 50.0) + 1) * 50.0 and y + dy < (math.floor(y / 50.0) + 1) * 50.0:
        assert grid_index(x + dx, y + dy) == grid_index(x, y)


def test_single_record_grid():
    out = aggregate_grid([_rec(10, 10, 25.0, -97.0, 4.0)])
    assert out == {GridIndex(0, 0): out[GridIndex(0, 0)]}
    s = out[GridIndex(0, 0)]
    assert (s.mean_rtt, s.mean_rsrp, s.mean_sinr, s.n) == (25.0, -97.0, 4.0, 1)


def test_two_record_mean():
    assert aggregate_grid([_rec(1, 1, 10.0), _rec(2, 2, 30.0)])[GridIndex(0, 0)].mean_rtt == 20.0


def _random_rows(rng, n):
    return [_rec(float(rng.uniform(0, 500)), float(rng.uniform(0, 500)), float(rng.uniform(5, 200)),
                 float(rng.uniform(-130, -70)), float(rng.uniform(-10, 30))) for _ in range(n)]


def test_grid_matches_groupby():
    rows = _random_rows(np.random.default_rng(0), 10_000)
    got = aggregate_grid(rows)
    ref = groupby_means(rows)
    assert {(g.ix, g.iy) for g in got} == set(ref)
    for g, s in got.items():
        r = ref[(g.ix, g.iy)]
        assert s.n == r[3]
        for a, b in zip((s.mean_rtt, s.mean_rsrp, s.mean_sinr), r[:3]):
            assert math.isclose(a, b, rel_tol=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_grid_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    rows = _random_rows(rng, 200)
    shuffled = [rows[i] for i in rng.permutation(len(rows))]
    assert aggregate_grid(rows) == aggregate_grid(shuffled)


def test_grid_rows_export():
    rows = grid_rows(aggregate_grid([_rec(60, 0, 10.0), _rec(1, 1, 30.0)]))
    assert [(r["ix"], r["iy"], r["n"]) for r in rows] == [(0, 0, 1), (1, 0, 1)]


# -- fusion ----------------------------------------------------------------------

def _sources(rng, ues, t_end):
    app, ran, dev, mob = [], [], [], []
    for u in ues:
        for _ in range(int(rng.integers(3, 12))):
            t = int(rng.integers(0, t_end))
            app.append(DataRecord(gnb(0), t, {"tcp_rtt": float(rng.uniform(5, 200)),
                                              "packet_loss": float(rng.uniform(0, 0.1))}, u, "App"))
            ran.append(DataRecord(gnb(0), t, {"sinr": float(rng.uniform(-5, 25)), "rsrp": float(rng.uniform(-120, -80)),
                                              "handover_failures": int(rng.integers(0, 3)),
                                              "prb_util": float(rng.uniform(0, 1))}, u, "RAN"))
            dev.append(DataRecord(gnb(0), t, {"device_class": str(rng.choice(["phone", "cpe"])),
                                              "battery_low": bool(rng.random() < 0.2)}, u, "UE"))
            mob.append(DataRecord(gnb(0), t, {"position_x": float(rng.uniform(0, 300)),
                                              "position_y": float(rng.uniform(0, 300)),
                                              "velocity": float(rng.uniform(0, 100))}, u, "Mob"))
    return {FeatureDomain.APP: app, FeatureDomain.RAN: ran, FeatureDomain.UE: dev, FeatureDomain.MOB: mob}


def test_fuse_matches_windowing_oracle():
    rng = np.random.default_rng(4)
    ues = [ue(i) for i in range(100)]
    src = _sources(rng, ues, 60 * SECOND)
    window = (0, 60 * SECOND)
    for u in ues:
        got = fuse_features(u, window, src).as_dict()
        ref = window_fuse(u, *window, *(src[d] for d in FeatureDomain))
        assert got.keys() == ref.keys()
        for k, v in ref.items():
            if isinstance(v, float):
                assert math.isclose(got[k], v, rel_tol=1e-12)
            else:
                assert got[k] == v


def test_fuse_missing_mobility():
    src = _sources(np.random.default_rng(1), [ue(0)], SECOND)
    del src[FeatureDomain.MOB]
    with pytest.raises(MissingDomain) as err:
        fuse_features(ue(0), (0, SECOND), src)
    assert err.value.domain is FeatureDomain.MOB


def test_fuse_empty_window_is_missing():
    src = _sources(np.random.default_rng(1), [ue(0)], SECOND)
    with pytest.raises(MissingDomain):
        fuse_features(ue(0), (10 * SECOND, 20 * SECOND), src)


# -- rules -----------------------------------------------------------------------

def test_rule_precedence():
    assert rule_baseline(_f(rsrp=-115.0, sinr=-2.0)) is RootCause.WEAK_COVERAGE
    assert rule_baseline(_f(rsrp=-95.0, sinr=-3.0)) is RootCause.INTERFERENCE
    assert rule_baseline(_f()) is RootCause.NORMAL
    assert rule_baseline(_f(handover_failures=2)) is RootCause.HANDOVER_FAILURE
    assert rule_baseline(_f(tcp_rtt=100.0)) is RootCause.CONGESTION
    assert rule_baseline(_f(tcp_rtt=100.0), rtt_median=60.0) is RootCause.NORMAL


def _rule_table(f, med=40.0):
    table = [(RootCause.WEAK_COVERAGE, f.rsrp < -110),
             (RootCause.INTERFERENCE, f.rsrp >= -100 and f.sinr < 0),
             (RootCause.HANDOVER_FAILURE, f.handover_failures > 0),
             (RootCause.CONGESTION, f.tcp_rtt > 2 * med and f.rsrp >= -110 and f.sinr >= 0)]
    return next((c for c, hit in table if hit), RootCause.NORMAL)


@settings(max_examples=300)
@given(st.floats(-140, -60), st.floats(-10, 30), st.integers(0, 3), st.floats(1, 300))
def test_rules_match_table(rsrp, sinr, hof, rtt):
    f = _f(rsrp=rsrp, sinr=sinr, handover_failures=hof, tcp_rtt=rtt)
    assert rule_baseline(f) is _rule_table(f)


# -- classifier ------------------------------------------------------------------

def test_user_type_bands():
    assert [user_type_for(s) for s in (0.5, 1.0, 80.0, 80.1)] == [
        UserType.INDOOR, UserType.OUTDOOR, UserType.OUTDOOR, UserType.HIGH_SPEED]


def test_separable_two_class_fits_exactly():
    data = planted_dataset(200, np.random.default_rng(0),
                           GeneratorConfig(overlap=0.0, cause_weights=(1, 0, 0, 0, 1)))
    clf = train_classifier(data, RcaConfig(TreeConfig(n_trees=1)))
    assert clf.train_accuracy == 1.0


def test_single_class_is_degenerate():
    data = planted_dataset(50, np.random.default_rng(0), GeneratorConfig(cause_weights=(0, 0, 0, 0, 1)))
    with pytest.raises(DegenerateDataset):
        train_classifier(data)
    with pytest.raises(DegenerateDataset):
        train_classifier([])


@pytest.fixture(scope="module")
def trained():
    rng = np.random.default_rng(7)
    train = planted_dataset(2000, rng)
    test = planted_dataset(800, rng)
    repo = ModelRepository()
    return train_classifier(train, repository=repo), train, test, repo


def test_model_registered_with_lineage(trained):
    clf, _, _, repo = trained
    entry = repo.entry(clf.handle)
    assert entry.descriptor.use_case is UseCase.RCA
    assert entry.state is LifecycleState.TRAINED and entry.lineage == ["rca-train"]
    assert clf.handle in repo.by_use_case(UseCase.RCA)


def test_training_predictions_match_report(trained):
    clf, train, _, _ = trained
    pred = diagnose_many(clf, [f for f, _ in train])
    acc = np.mean([p.root_cause == lab.root_cause for p, (_, lab) in zip(pred, train)])
    assert acc == clf.train_accuracy


def test_diagnose_planted_weak_coverage(trained):
    clf = trained[0]
    assert diagnose(clf, _f(rsrp=-115.0, sinr=3.0, packet_loss=0.03)).root_cause is RootCause.WEAK_COVERAGE


def test_diagnose_is_deterministic(trained):
    clf, _, test, _ = trained
    rows = [f for f, _ in test[:50]]
    assert diagnose_many(clf, rows) == diagnose_many(clf, rows)


def test_schema_mismatch(trained):
    with pytest.raises(SchemaMismatch):
        diagnose(trained[0], {**HEALTHY, "extra": 1.0})
    partial = dict(HEALTHY)
    del partial["speed"]
    with pytest.raises(SchemaMismatch):
        diagnose(trained[0], partial)


def test_heldout_precision(trained):
    clf, _, test, _ = trained
    pred = diagnose_many(clf, [f for f, _ in test])
    pr = precision_recall([l.root_cause for _, l in test], [p.root_cause for p in pred], ROOT_CAUSES)
    assert all(p >= 0.9 for p, _ in pr.values())


def test_precision_recall_counts():
    classes = ("a", "b", "c")
    pr = precision_recall(["a", "a", "b", "c"], ["a", "b", "b", "b"], classes)
    assert pr == {"a": (1.0, 0.5), "b": (1 / 3, 1.0), "c": (0.0, 0.0)}


def test_ensemble_single_tree_and_config():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 0, 1, 1])
    ens = TreeEnsemble(TreeConfig(n_trees=1, min_leaf=1)).fit(X, y)
    assert ens.predict(X).tolist() == [0, 0, 1, 1]
    assert ens.trees[0].threshold[0] == 1.5
    with pytest.raises(ValueError):
        TreeConfig(max_features=0.0)


def test_ensemble_seeded():
    data = planted_dataset(300, np.random.default_rng(2))
    X = np.array([f.to_vector() for f, _ in data])
    y = np.array([ROOT_CAUSES.index(l.root_cause) for _, l in data])
    a = TreeEnsemble(TreeConfig(seed=3)).fit(X, y).predict_proba(X)
    b = TreeEnsemble(TreeConfig(seed=3)).fit(X, y).predict_proba(X)
    assert np.array_equal(a, b)
