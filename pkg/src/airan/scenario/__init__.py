"""Scenario loading, traffic generation and end-to-end experiment runs."""
from .config import (ENVIRONMENTS, LOAD_BANDS, PRESETS, AssuranceConfig, CollectionTaskConfig, EnergyConfig,
                     FlBlock, ParseError, PolicyConfig, RcaBlock, RetrainConfig, Scenario, TopologyConfig,
                     TrafficConfig, ValidationError, dump_scenario, load_scenario, parse_scenario_text, preset,
                     scenario_from_dict, validate, with_param)
from .experiment import ApplyAction, ArrivalRow, Experiment, ExperimentResult, run_experiment, write_outputs
from .traffic import (Arrival, HandoverEvent, UeProfile, daily_shape, generate_handovers, generate_traffic,
                      load_at, traffic_fingerprint, ue_profiles)
