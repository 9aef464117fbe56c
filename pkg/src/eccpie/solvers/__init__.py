from .homotopy import PathBudgetExceeded, PathResult, PathStatus, TotalDegreeStart, TrackerConfig, track_path, track_paths
from .newton import NewtonError, NewtonResult, SingularJacobianError, newton
from .piecut import Mode, PieCutResult, PieCutSolution, solve_piecut, solve_single_sector
from .roots import Classification, FilterTolerances, Root, RootSet, filter_roots, total_degree_solve
