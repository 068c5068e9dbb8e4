import numpy as np
import pytest

from cevsim.em import NoiseSkeleton, make_noise
from cevsim.model import ModelParams, ParameterError, SimGrid
from cevsim.oracle import (
    TruncationLevel,
    lipschitz_constant,
    oracle_terminals,
    prolong,
    simulate_truncated,
    truncated_diffusion,
)

PARAMS = ModelParams(mu=-1.0, sigma=1.0, p=0.5, x0=0.25)


class TestTruncatedDiffusion:
    def test_floored_at_zero(self):
        p = ModelParams(mu=0, sigma=1, p=0.5, x0=1.0)
        assert truncated_diffusion(0.0, TruncationLevel(10), p) == pytest.approx(0.1 ** 0.5)

    def test_plain_power_above_floor(self):
        p = ModelParams(mu=0, sigma=1, p=0.5, x0=1.0)
        assert truncated_diffusion(1.0, TruncationLevel(10), p) == 1.0

    def test_absolute_value_symmetry(self):
        p = ModelParams(mu=0, sigma=1, p=0.5, x0=1.0)
        assert truncated_diffusion(-1.0, TruncationLevel(10), p) == 1.0

    def test_lipschitz_certificate(self):
        p = ModelParams(mu=0, sigma=1.3, p=0.75, x0=1.0)
        lv = TruncationLevel(20)
        L = lipschitz_constant(lv, p)
        gen = np.random.default_rng(0)
        xs = gen.uniform(-5, 5, 2000)
        ys = gen.uniform(-5, 5, 2000)
        for x, y in zip(xs, ys):
            gap = abs(truncated_diffusion(x, lv, p) - truncated_diffusion(y, lv, p))
            assert gap <= L * abs(x - y) * (1 + 1e-12)

    def test_level_must_sit_below_start(self):
        with pytest.raises(ParameterError):
            TruncationLevel(2).check_below_start(PARAMS)


class TestSimulateTruncated:
    def test_constant_path_zero_noise_zero_drift(self):
        p = ModelParams(mu=0.0, sigma=1.0, p=0.5, x0=0.25)
        grid = SimGrid(horizon=1.0, steps=20)
        values, theta = simulate_truncated(p, TruncationLevel(10), grid, NoiseSkeleton(np.zeros(20)))
        assert np.all(values == 0.25)
        assert theta is None

    def test_stops_at_floor_crossing(self):
        p = ModelParams(mu=0.0, sigma=1.0, p=0.5, x0=1.0)
        grid = SimGrid(horizon=1.0, steps=10)
        xi = np.zeros(10)
        xi[3] = -10.0  # force the state below 0.5
        values, theta = simulate_truncated(p, TruncationLevel(2), grid, NoiseSkeleton(xi))
        assert theta == 4
        assert values[theta] <= 0.5
        assert np.all(values[theta:] == values[theta])


class TestProlong:
    def test_single_level_matches_simulate(self):
        grid = SimGrid(horizon=3.0, steps=500)
        noise = make_noise(grid, 7, 0)
        lv = TruncationLevel(10)
        a, ta = simulate_truncated(PARAMS, lv, grid, noise)
        b, tb = prolong(PARAMS, [lv], grid, noise)
        assert np.array_equal(a, b)
        assert tb == (None if ta is None else ta * grid.dt)

    def test_nesting_invariants(self):
        grid = SimGrid(horizon=3.0, steps=2000)
        for j in range(20):
            noise = make_noise(grid, 13, j)
            v4, t4 = simulate_truncated(PARAMS, TruncationLevel(5), grid, noise)
            v8, t8 = simulate_truncated(PARAMS, TruncationLevel(10), grid, noise)
            if t4 is None:
                assert np.array_equal(v4, v8)
            else:
                assert np.array_equal(v4[: t4 + 1], v8[: t4 + 1])
                if t8 is not None:
                    assert t8 >= t4

    def test_prolongation_equals_final_floor_run(self):
        # while a level runs its state exceeds its floor, so all levels'
        # coefficients reduce to |x|; the level-by-level construction is
        # exactly the single run with the last floor
        grid = SimGrid(horizon=3.0, steps=1000)
        levels = [TruncationLevel(i) for i in (5, 25, 125)]
        for j in range(20):
            noise = make_noise(grid, 29, j)
            vp, tau = prolong(PARAMS, levels, grid, noise)
            vf, tf = simulate_truncated(PARAMS, levels[-1], grid, noise)
            assert np.array_equal(vp, vf)
            assert tau == (None if tf is None else tf * grid.dt)

    def test_rejects_nonincreasing_levels(self):
        grid = SimGrid(horizon=1.0, steps=10)
        with pytest.raises(ValueError):
            prolong(PARAMS, [TruncationLevel(8), TruncationLevel(4)], grid,
                    NoiseSkeleton(np.zeros(10)))


class TestOracleTerminals:
    def test_matches_per_path_simulation(self):
        grid = SimGrid(horizon=3.0, steps=400)
        terms = oracle_terminals(PARAMS, TruncationLevel(100), grid, 30, 17)
        from cevsim import rng
        for j in range(30):
            noise = NoiseSkeleton(rng.path_normals(17, j, 400, rng.ORACLE_STREAM))
            values, theta = simulate_truncated(PARAMS, TruncationLevel(100), grid, noise)
            expected = 0.0 if theta is not None else values[-1]
            assert terms[j] == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_worker_independence(self):
        grid = SimGrid(horizon=3.0, steps=300)
        a = oracle_terminals(PARAMS, TruncationLevel(100), grid, 200, 3, workers=1)
        b = oracle_terminals(PARAMS, TruncationLevel(100), grid, 200, 3, workers=8)
        assert np.array_equal(a, b)
