"""Transmit-power minimisation for status-update sensors under average-AoI caps,
via a drift-plus-penalty controller with exhaustive per-slot search."""

from .aoi import AoiAverage, AoiVector, accumulate_average, step_aoi
from .channel import (ChannelRealization, RadioConstants, Topology, channel_stream,
                      draw_channels, rate_bits_per_slot, snr)
from .config import ConfigError, ScenarioConfig, default_config, load_config
from .controller import EpisodeMetrics, SlotRecord, audit_bound, run_episode, simulate_batch
from .harness import run_sweep, write_summary, write_trace
from .optimizer import NetworkState, SlotDecision, sensor_weight, solve_slot
from .power import AllocationResult, min_power_capped, min_power_for_rate
from .queues import QueueVector, constraint_slack, lyapunov_value, update_queue

__version__ = "0.1.0"
