import math

import numpy as np
import pytest

from eccpie.polysys import PIECUT_VARS, piecut_sector_areas
from eccpie.solvers.homotopy import PathBudgetExceeded
from eccpie.solvers.piecut import (
    REFERENCE_LAMBDAS,
    REFERENCE_SOLUTION,
    REFLECTIONS,
    InfeasibleProportions,
    Mode,
    blade_solution,
    canonical_rotation,
    check_proportions,
    group_reflections,
    reflect_solution,
    rotate_piecut_frame,
    solve_piecut,
    solve_single_sector,
)
from eccpie.geometry import Orientation

REFERENCE_VEC = np.array([REFERENCE_SOLUTION[k] for k in PIECUT_VARS])


@pytest.fixture(scope="module")
def oracle():
    return solve_piecut(0.4, 0.35)


def test_oracle_reproduces_reference_solution(oracle):
    assert len(oracle.solutions) == 1
    sol = oracle.solutions[0]
    assert sol.vector() == pytest.approx(REFERENCE_VEC, abs=1e-8)
    assert sol.residual < 1e-12
    assert sol.areas == pytest.approx([l * math.pi for l in REFERENCE_LAMBDAS], abs=1e-12)


def test_oracle_class_is_the_four_reflections(oracle):
    sol = oracle.solutions[0]
    assert sol.class_size == 4
    members = [np.array([m[k] for k in PIECUT_VARS]) for m in sol.members]
    base = sol.vector()
    for sx, sy in REFLECTIONS:
        target = reflect_solution(base, sx, sy)
        assert min(np.max(np.abs(m - target)) for m in members) < 1e-9
    # every member still has the right areas, in some order
    for m in members:
        areas = sorted(piecut_sector_areas((m[0], 0.0), m[1:7]))
        assert areas == pytest.approx(sorted(l * math.pi for l in REFERENCE_LAMBDAS), abs=1e-10)


def test_centered_cutter_for_equal_shares():
    res = solve_piecut(1 / 3, 1 / 3)
    assert len(res.solutions) == 1
    v = res.solutions[0].values
    assert v["x0"] == pytest.approx(0.0, abs=1e-10)
    assert (v["x1"], v["y1"]) == pytest.approx((0.0, 1.0), abs=1e-10)
    assert v["beta"] == pytest.approx(2 * math.pi / 3, abs=1e-10)
    assert "rotation_family" in res.diagnostics


def test_refine_from_perturbed_start():
    rng = np.random.default_rng(0)
    start = REFERENCE_VEC + rng.choice([-0.002, 0.002], size=11)
    res = solve_piecut(0.4, 0.35, Mode.REFINE, starts=[start])
    sol = res.solutions[0]
    assert sol.iterations <= 10
    assert sol.vector() == pytest.approx(REFERENCE_VEC, abs=1e-8)


def test_refine_needs_starts():
    with pytest.raises(ValueError):
        solve_piecut(0.4, 0.35, Mode.REFINE)


def test_pipeline_is_gated():
    with pytest.raises(PathBudgetExceeded):
        solve_piecut(0.4, 0.35, Mode.PIPELINE)


def test_infeasible_share():
    res = solve_piecut(0.95, 0.03)
    assert res.warnings
    assert res.solutions == []
    with pytest.raises(InfeasibleProportions):
        solve_piecut(0.95, 0.03, strict=True)


def test_check_proportions():
    assert check_proportions([0.4, 0.35, 0.25]) == pytest.approx((0.4, 0.35, 0.25))
    for bad in ([0.5, 0.5], [0.5, 0.6, -0.1], [0.4, 0.4, 0.4]):
        with pytest.raises(ValueError):
            check_proportions(bad)


def test_blade_solution_geometry():
    v = blade_solution(0.2, 0.4, Orientation.COUNTERCLOCKWISE)
    for i in (1, 3, 5):
        assert math.hypot(v[i], v[i + 1]) == pytest.approx(1.0, abs=1e-15)
    dirs = [math.atan2(v[i + 1], v[i] - 0.2) for i in (1, 3, 5)]
    assert (dirs[1] - dirs[0]) % (2 * math.pi) == pytest.approx(2 * math.pi / 3)
    assert v[9] == pytest.approx(math.sin(v[7]))


def test_canonical_rotation_only_touches_centered():
    v = blade_solution(0.0, 1.0, Orientation.COUNTERCLOCKWISE)
    w = canonical_rotation(v)
    assert (w[1], w[2]) == pytest.approx((0.0, 1.0), abs=1e-12)
    assert w[7:] == pytest.approx(v[7:])
    off = blade_solution(0.3, 1.0, Orientation.COUNTERCLOCKWISE)
    assert canonical_rotation(off) is off


def test_group_reflections_canonical_member_first():
    v = REFERENCE_VEC
    vs = [reflect_solution(v, sx, sy) for sx, sy in REFLECTIONS[::-1]]
    classes = group_reflections(vs)
    assert len(classes) == 1
    assert classes[0][0] == pytest.approx(v)


def test_rotate_frame():
    apex, pts, theta = rotate_piecut_frame(REFERENCE_SOLUTION)
    assert pts[0] == pytest.approx((0.0, 1.0), abs=1e-9)
    assert math.hypot(*apex) == pytest.approx(REFERENCE_SOLUTION["x0"])


def test_single_sector_centered():
    run = solve_single_sector(0.25, 0.0)
    assert run.roots.n_paths == 40
    assert run.roots.path_status["converged"] == 40
    assert len(run.refined) == 2
    for r in run.refined:
        assert min(np.max(np.abs(r - o)) for o in run.oracle) < 1e-10
