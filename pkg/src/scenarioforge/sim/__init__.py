from .agents import AgentPolicy, agent_act
from .condorcet import condorcet_majority_probability
from .runner import SimResult, SimScenario, metrics_csv, run_simulation

__all__ = [
    "AgentPolicy",
    "SimResult",
    "SimScenario",
    "agent_act",
    "condorcet_majority_probability",
    "metrics_csv",
    "run_simulation",
]
