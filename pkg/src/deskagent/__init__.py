"""deskagent: a hierarchical GUI agent with routed grounding experts,
runnable deterministically against a built-in simulated desktop."""

from . import actions, backends, errors, grounding, harness, planning, records, sim

__version__ = "0.1.0"

__all__ = [
    "actions",
    "backends",
    "errors",
    "grounding",
    "harness",
    "planning",
    "records",
    "sim",
    "__version__",
]
