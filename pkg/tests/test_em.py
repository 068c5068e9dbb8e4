import math

import numpy as np
import pytest

from cevsim.em import (
    NoiseSkeleton,
    NonFiniteState,
    em_step,
    hitting_index,
    make_noise,
    simulate_skeleton,
)
from cevsim.model import ModelParams, SimGrid

PARAMS = ModelParams(mu=1.0, sigma=1.0, p=0.5, x0=1.0)


class TestEmStep:
    def test_negative_state_passes_through(self):
        assert em_step(-0.3, PARAMS, 0.1, 2.0) == -0.3

    def test_zero_is_absorbing(self):
        assert em_step(0.0, PARAMS, 0.1, -5.0) == 0.0

    def test_hand_value(self):
        # 1 + 1*0.04*1 + 1*sqrt(1)*sqrt(0.04)*0.5 = 1.14
        assert em_step(1.0, PARAMS, 0.04, 0.5) == pytest.approx(1.14, abs=1e-15)

    def test_nan_input_raises(self):
        with pytest.raises(NonFiniteState):
            em_step(float("nan"), PARAMS, 0.1, 0.0)


class TestSimulateSkeleton:
    def test_flat_path_zero_noise(self):
        params = ModelParams(mu=0.0, sigma=1.0, p=0.5, x0=1.0)
        grid = SimGrid(horizon=1.0, steps=10)
        path = simulate_skeleton(params, grid, NoiseSkeleton(np.zeros(10)))
        assert np.all(path.values == 1.0)
        assert path.absorption_index is None

    def test_two_step_absorption(self):
        grid = SimGrid(horizon=0.08, steps=2)
        path = simulate_skeleton(PARAMS, grid, NoiseSkeleton(np.array([0.5, -10.0])))
        assert path.values[1] == pytest.approx(1.14, abs=1e-15)
        expected = 1.14 + 0.04 * 1.14 + math.sqrt(1.14) * 0.2 * -10.0
        assert path.values[2] == pytest.approx(expected, abs=1e-12)
        assert path.values[2] < 0.0
        assert path.absorption_index == 2

    def test_freeze_after_absorption(self):
        grid = SimGrid(horizon=1.0, steps=20)
        xi = np.zeros(20)
        xi[4] = -50.0
        path = simulate_skeleton(PARAMS, grid, NoiseSkeleton(xi))
        k = path.absorption_index
        assert k == 5
        assert np.all(path.values[k:] == path.values[k])
        assert np.all(path.values[:k] > 0.0)

    def test_determinism(self):
        grid = SimGrid(horizon=3.0, steps=500)
        noise = make_noise(grid, master_seed=42, path_index=3)
        a = simulate_skeleton(PARAMS, grid, noise)
        b = simulate_skeleton(PARAMS, grid, noise)
        assert np.array_equal(a.values, b.values)
        assert a.absorption_index == b.absorption_index

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            simulate_skeleton(PARAMS, SimGrid(1.0, 5), NoiseSkeleton(np.zeros(4)))


class TestHittingIndex:
    @pytest.mark.parametrize(
        "values,expected",
        [
            ([1.0, 0.5, 0.2], None),
            ([1.0, -0.01, -0.01], 1),
            ([1.0, 0.0, 0.0], 1),
        ],
    )
    def test_cases(self, values, expected):
        grid = SimGrid(horizon=1.0, steps=len(values) - 1)
        path = simulate_skeleton(
            ModelParams(0.0, 1.0, 0.5, 1.0), grid, NoiseSkeleton(np.zeros(grid.steps))
        )
        path.values = np.array(values, dtype=float)
        assert hitting_index(path) == expected


class TestNoise:
    def test_pure_function_of_seed_and_index(self):
        grid = SimGrid(horizon=1.0, steps=1000)
        a = make_noise(grid, master_seed=7, path_index=12)
        b = make_noise(grid, master_seed=7, path_index=12)
        c = make_noise(grid, master_seed=7, path_index=13)
        assert np.array_equal(a.xi, b.xi)
        assert not np.array_equal(a.xi, c.xi)
        assert a.seed_tag == "philox:7:12"

    def test_standard_normal_statistics(self):
        grid = SimGrid(horizon=1.0, steps=200_000)
        xi = make_noise(grid, master_seed=1, path_index=0).xi
        n = len(xi)
        assert abs(xi.mean()) < 4.0 / math.sqrt(n)
        assert abs(xi.var() - 1.0) < 6.0 / math.sqrt(n)
