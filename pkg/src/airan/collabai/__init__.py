"""Collaborative AI: federated training, inference offload, fine-tuning and compute pooling."""
from .compute import (ComputeCapability, ComputeRegistry, ComputeTask, Offload, PoolSchedule, Rejection,
                      TaskKind, decide_offload, schedule_pool)
from .federated import (EmptyRound, FederatedCoordinator, FlConfig, FlRoundLog, LengthMismatch, LocalUpdate,
                        NoParticipants, fed_aggregate, fine_tune, gd_steps, least_squares, mse,
                        records_to_xy, select_participants, synthetic_regression)
