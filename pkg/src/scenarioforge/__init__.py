"""Workshop orchestration engine for participatory scenario building."""

__version__ = "0.1.0"

from .aggregation import (
    ConvergencePolicy,
    ConvergenceReport,
    borda_scores,
    cutoff_top,
    decide,
    kendall_w,
    mean_rating,
    reduction_rate,
)
from .errors import WorkshopError
from .events import Event, replay, state_hash
from .model import Agenda, Phase, Role, StepKind, WorkshopState
from .store import WorkshopStore

__all__ = [
    "Agenda",
    "ConvergencePolicy",
    "ConvergenceReport",
    "Event",
    "Phase",
    "Role",
    "StepKind",
    "WorkshopError",
    "WorkshopState",
    "WorkshopStore",
    "borda_scores",
    "cutoff_top",
    "decide",
    "kendall_w",
    "mean_rating",
    "reduction_rate",
    "replay",
    "state_hash",
]
