"""Workbench for limiting probabilities of MSO sentences on random graphs
from smooth addable minor-closed classes.

The package combines four pillars:

* a structure algebra on finite graphs with partial valuations
  (:mod:`msolimits.graphs`),
* an MSO front-end with a brute-force model checker (:mod:`msolimits.mso`),
* a game engine deciding rank-m indistinguishability
  (:mod:`msolimits.ef`), and
* a Poisson component model turning class censuses into limiting
  probabilities (:mod:`msolimits.limits`).

A FastAPI service (:mod:`msolimits.service`) exposes the operations; the
``msolimits`` CLI is a thin client for it.
"""

from msolimits.graphs import Graph, Structure, VarSet
from msolimits.errors import InconclusiveError, InfeasibleError, InputError

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "Structure",
    "VarSet",
    "InputError",
    "InfeasibleError",
    "InconclusiveError",
    "__version__",
]
