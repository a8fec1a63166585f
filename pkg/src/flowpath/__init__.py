"""Electric-flow shortest-path finders with an emulated query-cost model."""

from .algorithms import (A1Params, A2Params, RunResult, algorithm_a1, algorithm_a2,
                         coupon_collector_bound)
from .conditions import ConditionReport, check_condition_bruteforce, check_condition_edges
from .electric import (effective_resistance, escape_time_bound, flow_state_distribution,
                       solve_flow)
from .emulation import CostLedger, CorruptionMode, EmulationConfig, PerturbationMode
from .graph import Graph, PathWitness, from_edge_list, remove_edge, to_edge_list
from .shortest import dijkstra, validate_path

__version__ = "0.1.0"

__all__ = [
    "A1Params", "A2Params", "ConditionReport", "CorruptionMode", "CostLedger", "EmulationConfig",
    "Graph", "PathWitness", "PerturbationMode", "RunResult", "algorithm_a1", "algorithm_a2",
    "check_condition_bruteforce", "check_condition_edges", "coupon_collector_bound", "dijkstra",
    "effective_resistance", "escape_time_bound", "flow_state_distribution", "from_edge_list",
    "remove_edge", "solve_flow", "to_edge_list", "validate_path",
]
