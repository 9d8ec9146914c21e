"""Co-scheduling of moldable parallel tasks into packs."""

from .approx import ApproxTrace, ExitReason, pack_approx
from .errors import (BudgetExceeded, CopackError, EmptyPack, InfeasibleAssignment,
                     InfeasibleSchedule, NonPositiveEntry, ParseError, TooManyTasks,
                     ValidationError)
from .exact import exact_k2, exhaustive_opt, export_ilp, verify_ilp_solution
from .heuristics import (HEURISTIC_NAMES, HeuristicKind, HeuristicSpec, best_of,
                         heuristic_spec, pack_by_pack, random_pack, random_proc)
from .metrics import (MetricsReport, baseline_one_pack, compute_metrics, packing_ratio,
                      relative_cost, relative_response_time)
from .pack_core import (CoSchedule, Pack, evaluate, make_packs, one_pack_dp,
                        optimal_one_pack)
from .workload import (SpeedupProfile, SyntheticTaskSpec, Task, Workload, generate_synthetic,
                       load, normalize, save, validate)

__version__ = "0.1.0"
