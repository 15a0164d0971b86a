import math
import random

import numpy as np
import pytest

from tbtsp.costs import CostTensor, TBTSP, build_tbtsp_costs
from tbtsp.model import Configuration
from tbtsp.solver import (
    CapacityError,
    TourSolution,
    reoptimize_configs,
    relaxation_count,
    solution_from_json,
    solution_to_json,
    solve_exact,
    solve_heuristic,
    validate_edge_list,
    validate_solution,
)

from oracles import brute_force_configs, brute_force_tour


def random_tensor(rng, n, h, s, scale=10.0):
    k = h * s
    arr = np.array([rng.uniform(0.5, scale) for _ in range((n * k) ** 2)])
    arr = arr.reshape(n, k, n, k)
    for i in range(n):
        arr[i, :, i, :] = np.inf
    return CostTensor(n, h, s, TBTSP, arr.reshape(n, h, s, n, h, s), "f" * 64)


class TestExact:
    def test_two_waypoints(self):
        rng = random.Random(0)
        t = random_tensor(rng, 2, 2, 1)
        sol = solve_exact(t)
        C = t.flat()
        want = min(C[0, c0, 1, c1] + C[1, c1, 0, c0]
                   for c0 in range(2) for c1 in range(2))
        assert sol.total_time == pytest.approx(want, rel=1e-12)
        assert sol.order == (1, 2)
        assert sol.optimal and sol.gap == 0.0

    def test_matches_brute_force(self):
        rng = random.Random(42)
        for _ in range(25):
            n = rng.randint(2, 5)
            h = rng.choice([1, 2, 3])
            s = rng.choice([1, 2])
            t = random_tensor(rng, n, h, s)
            sol = solve_exact(t)
            assert sol.total_time == pytest.approx(brute_force_tour(t), abs=1e-9)
            assert validate_solution(t, sol).ok

    def test_ddtsp_shape_reduction(self):
        rng = random.Random(9)
        for _ in range(10):
            t = random_tensor(rng, 4, 3, 1)
            sol = solve_exact(t)
            assert sol.total_time == pytest.approx(brute_force_tour(t), abs=1e-9)

    def test_budget_guard(self):
        rng = random.Random(1)
        t = random_tensor(rng, 5, 2, 2)
        with pytest.raises(CapacityError, match="heuristic"):
            solve_exact(t, budget=relaxation_count(5, 4) - 1)

    def test_scaling_invariance(self):
        rng = random.Random(7)
        t = random_tensor(rng, 4, 2, 2)
        base = solve_exact(t)
        scaled_tensor = CostTensor(t.n, t.h, t.s, t.kind, t.costs * 3.7,
                                   t.instance_hash)
        scaled = solve_exact(scaled_tensor)
        assert scaled.order == base.order
        assert scaled.configs == base.configs
        assert scaled.total_time == pytest.approx(3.7 * base.total_time, rel=1e-12)

    def test_total_time_is_edge_sum(self):
        rng = random.Random(12)
        t = random_tensor(rng, 5, 2, 2)
        sol = solve_exact(t)
        report = validate_solution(t, sol)
        assert report.ok
        assert report.total_time == pytest.approx(sol.total_time, rel=1e-9)


class TestReoptimize:
    def test_forced_when_single_config(self):
        rng = random.Random(3)
        t = random_tensor(rng, 4, 1, 1)
        order = (1, 3, 2, 4)
        sol = reoptimize_configs(t, order)
        C = t.flat()
        want = C[0, 0, 2, 0] + C[2, 0, 1, 0] + C[1, 0, 3, 0] + C[3, 0, 0, 0]
        assert sol.total_time == pytest.approx(float(want), rel=1e-12)

    def test_matches_brute_force(self):
        rng = random.Random(31)
        for _ in range(15):
            t = random_tensor(rng, 4, 2, 2)
            order = [1] + rng.sample([2, 3, 4], 3)
            sol = reoptimize_configs(t, order)
            assert sol.total_time == pytest.approx(
                brute_force_configs(t, order), abs=1e-9)

    def test_rotation_invariance(self):
        rng = random.Random(8)
        t = random_tensor(rng, 5, 2, 1)
        order = (1, 4, 2, 5, 3)
        base = reoptimize_configs(t, order).total_time
        for shift in range(1, 5):
            rotated = order[shift:] + order[:shift]
            assert reoptimize_configs(t, rotated).total_time == \
                pytest.approx(base, rel=1e-12)

    def test_rejects_non_permutation(self):
        rng = random.Random(4)
        t = random_tensor(rng, 3, 1, 1)
        with pytest.raises(ValueError):
            reoptimize_configs(t, (1, 2, 2))


class TestHeuristic:
    def test_never_beats_exact(self):
        rng = random.Random(77)
        for trial in range(12):
            t = random_tensor(rng, rng.randint(2, 5), 2, 1)
            exact = solve_exact(t)
            heur = solve_heuristic(t, seed=trial)
            assert heur.total_time >= exact.total_time - 1e-9
            assert validate_solution(t, heur).ok
            assert not heur.optimal and heur.gap is None

    def test_two_waypoints_matches_exact(self):
        rng = random.Random(2)
        t = random_tensor(rng, 2, 3, 2)
        assert solve_heuristic(t, seed=5).total_time == \
            pytest.approx(solve_exact(t).total_time, rel=1e-12)

    def test_deterministic_per_seed(self):
        rng = random.Random(10)
        t = random_tensor(rng, 6, 2, 2)
        a = solve_heuristic(t, seed=123)
        b = solve_heuristic(t, seed=123)
        assert a == b

    def test_close_to_exact_on_benchmark_cell(self, paper_limits):
        from tbtsp.model import DiscretizationScheme, make_grid_instance
        scheme = DiscretizationScheme.from_counts(8, (0.2, 0.6, 1.0), paper_limits)
        inst = make_grid_instance(3, 3, 9.0, paper_limits, scheme)
        tensor = build_tbtsp_costs(inst)
        exact = solve_exact(tensor)
        heur = solve_heuristic(tensor, seed=0)
        assert heur.total_time <= 1.05 * exact.total_time


class TestValidation:
    def test_duplicate_visit_is_degree_violation(self):
        rng = random.Random(6)
        t = random_tensor(rng, 3, 1, 1)
        sol = TourSolution((1, 2, 2), (Configuration(1, 0, 0),
                                       Configuration(2, 0, 0),
                                       Configuration(2, 0, 0)), 1.0, False, None)
        report = validate_solution(t, sol)
        assert not report.ok and "degree" in report.first_violation

    def test_config_mismatch_is_flow_violation(self):
        rng = random.Random(6)
        t = random_tensor(rng, 2, 2, 1)
        # leave wp 2 with a different config than it was entered with
        edges = [(0, 0, 1, 0), (1, 1, 0, 0)]
        report = validate_edge_list(t, edges)
        assert not report.ok and "flow" in report.first_violation

    def test_two_cycles_is_subtour_violation(self):
        rng = random.Random(6)
        t = random_tensor(rng, 4, 1, 1)
        edges = [(0, 0, 1, 0), (1, 0, 0, 0), (2, 0, 3, 0), (3, 0, 2, 0)]
        report = validate_edge_list(t, edges)
        assert not report.ok and "subtour" in report.first_violation

    def test_wrong_objective_reported(self):
        rng = random.Random(6)
        t = random_tensor(rng, 3, 1, 1)
        sol = solve_exact(t)
        doctored = TourSolution(sol.order, sol.configs, sol.total_time + 1.0,
                                True, 0.0)
        report = validate_solution(t, doctored)
        assert not report.ok and "objective" in report.first_violation

    def test_exact_output_passes(self):
        rng = random.Random(15)
        t = random_tensor(rng, 5, 2, 1)
        assert validate_solution(t, solve_exact(t)).ok


class TestSolutionJson:
    def test_round_trip(self):
        rng = random.Random(19)
        t = random_tensor(rng, 4, 2, 2)
        sol = solve_exact(t)
        again = solution_from_json(solution_to_json(sol))
        assert again == sol

    def test_document_fields(self):
        rng = random.Random(20)
        t = random_tensor(rng, 3, 1, 2)
        doc = solution_to_json(solve_exact(t))
        for key in ('"order"', '"configs"', '"total_time"', '"optimal"', '"gap"',
                    '"wp"', '"heading_idx"', '"speed_idx"'):
            assert key in doc
