"""Differentiated service assurance: perception, quality prediction and utility argmax."""
from .loop import EXPECTATIONS, AssuranceController, AssuranceRow, Degradation, assure_loop
from .perception import DEFAULT_BASE_LATENCY, DEFAULT_CATALOG, AppCatalog, UnknownApp, label_posterior, perceive_traffic
from .policy import UtilityKind, UtilityPolicy, expected_utility, select_action
from .predictor import (ACTIONS, DEFAULT_ACTION, GRANT_LEVELS, WEIGHT_LEVELS, Action, AnalyticPredictor,
                        MobilityState, QualityPrediction, UserContext, cell_rate, congestion_factor,
                        coverage_penalty, effective_load, predict_quality, qoe_score, weight_factor)
