"""Population-based multiobjective optimizers and the dynamic outer loop."""

from trdmoea.moea.core import (
    Archive,
    Population,
    crowding_distance,
    dominates,
    fast_nondominated_sort,
)
from trdmoea.moea.dynamic import (
    ALGORITHM_IDS,
    ChangeResult,
    CountingProblem,
    RunTimeout,
    parse_algorithm,
    trdmoea_run,
)
from trdmoea.moea.mopso import MopsoParams, mopso_run
from trdmoea.moea.nsga2 import Nsga2Params, nsga2_run
from trdmoea.moea.rmmeda import RmMedaParams, rmmeda_run

__all__ = [
    "ALGORITHM_IDS",
    "Archive",
    "ChangeResult",
    "CountingProblem",
    "MopsoParams",
    "Nsga2Params",
    "Population",
    "RmMedaParams",
    "RunTimeout",
    "crowding_distance",
    "dominates",
    "fast_nondominated_sort",
    "mopso_run",
    "nsga2_run",
    "parse_algorithm",
    "rmmeda_run",
    "trdmoea_run",
]
