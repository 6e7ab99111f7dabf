"""Two oblivious robots meeting at a moving resource on a rectangular grid.

The robots enter through a corner door and run a three-phase protocol
(entry, boundary, gather) under a fully synchronous scheduler. The package
provides the protocol, a round engine, resource adversaries, trace monitors
and an exhaustive worst-case oracle.
"""

from .adversary import (
    GreedyEvade,
    Oscillator,
    Scripted,
    SsyncEscape,
    StayMaxRandom,
    legal_resource_moves,
    make_strategy,
    oscillator_strategy,
)
from .configuration import (
    Configuration,
    Phase,
    ResourceState,
    RobotState,
    RobotView,
    Status,
    boundary_frame,
    classify_phase,
    detect_init_gather,
    robot_view,
)
from .engine import (
    Outcome,
    SimParams,
    Trace,
    apply_round,
    fsync_step,
    init_episode,
    read_trace,
    run_episode,
    ssync_run,
)
from .errors import (
    RendezvousError, GridError, DimensionTooSmall, InvalidDoor, OutOfGrid,
    NotOnBoundary, AtCorner, ParallelLines, NotActive, InvalidParams,
    IllegalResourceMove, IllegalScript, NoEscape, ViolationDetected, MalformedTrace,
    StateSpaceExceeded,
)
from .grid import GridSpec, Line, Rect, Vertex, build_grid, classify_vertex, neighbors, symmetries
from .minimax import WorstCaseResult, bound_report, worst_case_rounds
from .policy import STAY, Move, admissible_moves, decide
from .verifier import InvariantReport, check_invariants, equivariance_suite

__version__ = "0.1.0"

__all__ = [
    "GreedyEvade",
    "Oscillator",
    "Scripted",
    "SsyncEscape",
    "StayMaxRandom",
    "legal_resource_moves",
    "make_strategy",
    "oscillator_strategy",
    "Configuration",
    "Phase",
    "ResourceState",
    "RobotState",
    "RobotView",
    "Status",
    "boundary_frame",
    "classify_phase",
    "detect_init_gather",
    "robot_view",
    "Outcome",
    "SimParams",
    "Trace",
    "apply_round",
    "fsync_step",
    "init_episode",
    "read_trace",
    "run_episode",
    "ssync_run",
    "RendezvousError",
    "GridError",
    "DimensionTooSmall",
    "InvalidDoor",
    "OutOfGrid",
    "NotOnBoundary",
    "AtCorner",
    "ParallelLines",
    "NotActive",
    "InvalidParams",
    "IllegalResourceMove",
    "IllegalScript",
    "NoEscape",
    "ViolationDetected",
    "MalformedTrace",
    "StateSpaceExceeded",
    "GridSpec",
    "Line",
    "Rect",
    "Vertex",
    "build_grid",
    "classify_vertex",
    "neighbors",
    "symmetries",
    "WorstCaseResult",
    "bound_report",
    "worst_case_rounds",
    "STAY",
    "Move",
    "admissible_moves",
    "decide",
    "InvariantReport",
    "check_invariants",
    "equivariance_suite",
]
