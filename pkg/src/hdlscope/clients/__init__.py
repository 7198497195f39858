"""Bug-finding and security clients built on the dataflow and hardware analyses."""

from .deadlock import detect_deadlock, proc_cycles
from .drivers import detect_undriven, detect_unloaded
from .missing_reset import DEFAULT_CYCLE_BOUND, HwDepGraph, MissingResetResult, build_hw_dep_graph, detect_missing_reset
from .ports import detect_port_mismatch
from .taint import TaintResult, TaintSpec, TaintSpecError, detect_taint
from .truncation import detect_mis_truncation
from .unreachable import detect_unreachable_state
from .xprop import XSource, detect_x_prop, x_sources

__all__ = [
    "DEFAULT_CYCLE_BOUND", "HwDepGraph", "MissingResetResult", "TaintResult", "TaintSpec",
    "TaintSpecError", "XSource", "build_hw_dep_graph", "detect_deadlock", "detect_mis_truncation",
    "detect_missing_reset", "detect_port_mismatch", "detect_taint", "detect_undriven",
    "detect_unloaded", "detect_unreachable_state", "detect_x_prop", "proc_cycles", "x_sources",
]
