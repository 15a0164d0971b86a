import random

import numpy as np
import pytest

from tbtsp.costs import CostTensor, TBTSP, build_ddtsp_costs, build_tbtsp_costs
from tbtsp.milp import check_assignment, encode_solution, export_milp, u_name, x_name
from tbtsp.model import DiscretizationScheme, make_grid_instance
from tbtsp.solver import solve_exact

from test_solver import random_tensor


class TestModelStructure:
    def test_counts_for_three_waypoints_single_config(self):
        rng = random.Random(1)
        model = export_milp(random_tensor(rng, 3, 1, 1))
        assert model.num_binaries == 6
        assert model.num_integers == 2
        assert model.num_assignment_rows == 6
        assert model.num_flow_rows == 3
        assert model.num_subtour_rows == 2

    def test_two_waypoints_have_no_subtour_rows(self):
        rng = random.Random(2)
        model = export_milp(random_tensor(rng, 2, 2, 1))
        assert model.num_subtour_rows == 0
        assert model.num_binaries == 2 * 1 * 4  # ordered pairs x (h*s)^2

    def test_sections_present(self):
        rng = random.Random(3)
        text = export_milp(random_tensor(rng, 3, 1, 1)).text
        for section in ("Minimize", "Subject To", "Bounds", "Binaries",
                        "Generals", "End"):
            assert section in text
        body = "\n".join(l for l in text.splitlines() if not l.startswith("\\"))
        assert "u_1" not in body  # fixed to 1 and substituted out
        assert " 2 <= u_2 <= 3" in body

    def test_count_formulas_scale(self):
        rng = random.Random(4)
        model = export_milp(random_tensor(rng, 4, 2, 1))
        assert model.num_binaries == 4 * 3 * 4
        assert model.num_integers == 3
        assert model.num_assignment_rows == 8
        assert model.num_flow_rows == 4 * 2 * 1
        assert model.num_subtour_rows == 6


class TestValidatorContract:
    @pytest.mark.parametrize("n,h,s", [(2, 1, 1), (3, 1, 1), (3, 2, 1), (4, 2, 2)])
    def test_dp_optimum_is_feasible_with_matching_objective(self, n, h, s):
        rng = random.Random(10 * n + h + s)
        tensor = random_tensor(rng, n, h, s)
        sol = solve_exact(tensor)
        model = export_milp(tensor)
        objective, violations = check_assignment(model.text,
                                                 encode_solution(tensor, sol))
        assert violations == []
        assert abs(objective - sol.total_time) <= 1e-9 * max(1.0, sol.total_time)

    def test_grid_tbtsp_and_ddtsp_models(self, paper_limits):
        scheme = DiscretizationScheme.from_counts(2, (1.0,), paper_limits)
        inst = make_grid_instance(2, 2, 9.0, paper_limits, scheme)
        for tensor in (build_tbtsp_costs(inst), build_ddtsp_costs(inst)):
            sol = solve_exact(tensor)
            model = export_milp(tensor)
            objective, violations = check_assignment(model.text,
                                                     encode_solution(tensor, sol))
            assert violations == []
            assert abs(objective - sol.total_time) <= 1e-9 * max(1.0, sol.total_time)

    def test_detects_missing_edge(self):
        rng = random.Random(6)
        tensor = random_tensor(rng, 3, 1, 1)
        sol = solve_exact(tensor)
        values = encode_solution(tensor, sol)
        dropped = next(k for k in values if k.startswith("x_"))
        values[dropped] = 0.0
        _, violations = check_assignment(export_milp(tensor).text, values)
        assert violations

    def test_detects_subtour_violation(self):
        rng = random.Random(7)
        tensor = random_tensor(rng, 4, 1, 1)
        sol = solve_exact(tensor)
        values = encode_solution(tensor, sol)
        # clash two sequence positions: some lifted subtour row must break
        others = [wp for wp in sol.order if wp != 1]
        values[u_name(others[0])] = values[u_name(others[-1])]
        _, violations = check_assignment(export_milp(tensor).text, values)
        assert violations

    def test_detects_bound_violation(self):
        rng = random.Random(8)
        tensor = random_tensor(rng, 3, 1, 1)
        sol = solve_exact(tensor)
        values = encode_solution(tensor, sol)
        values[u_name(sol.order[1])] = 99.0
        _, violations = check_assignment(export_milp(tensor).text, values)
        assert any("bounds" in v or "mtz" in v for v in violations)


class TestNaming:
    def test_variable_names_are_one_based(self):
        assert x_name(1, 2, 3, 4, 5, 6) == "x_1_2_3_4_5_6"
        assert u_name(7) == "u_7"

    def test_objective_coefficients_round_trip(self):
        rng = random.Random(9)
        tensor = random_tensor(rng, 2, 1, 1)
        model = export_milp(tensor)
        sol = solve_exact(tensor)
        objective, _ = check_assignment(model.text, encode_solution(tensor, sol))
        assert objective == pytest.approx(sol.total_time, abs=1e-12)