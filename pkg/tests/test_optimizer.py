"""Unit tests for the greedy ratio search and its exact oracles."""

import math

import numpy as np
import pytest

from mecsim.energy import DeviceSpec, TaskSpec, affine_coefficients, total_energy
from mecsim.optimizer import (
    PoolDevice,
    TaskPool,
    find_worst,
    global_oracle,
    greedy_optimize,
    init_plan,
    plan_for_ratios,
    restricted_oracle,
)

# A < B for this device/task/se combination (offload-favorable)
FAVORABLE_DEVICE = DeviceSpec(
    cpu_hz=1e9, energy_coeff=1e-27, bandwidth_hz=1e6, noise_var=1e-9, channel_gain=1.0
)
FAVORABLE_TASK = TaskSpec(data_bits=1e6, cycles_per_bit=1000.0)


def single_task_pool(se=1.0):
    return TaskPool(
        devices={"md000": PoolDevice(device=FAVORABLE_DEVICE, se=se, tasks=(FAVORABLE_TASK,))}
    )


def device_with_tradeoff(full_local_minus_offload: float, se: float = 1.0):
    """Device whose single unit task has the requested B - A energy gap.

    The full-offload energy A is steered through noise_var, the
    full-local energy B through the energy coefficient; both stay
    positive for any requested gap.
    """
    gap = full_local_minus_offload
    target_a = 1e-3 + max(0.0, -gap)
    target_b = target_a + gap
    # A = (2^se - 1) * noise_var * D / (W * se) with D = W = 1e6, h = 1
    noise_var = target_a * se / (2.0**se - 1.0)
    # B = coeff * cycles * f^2 * D = coeff * 1e27
    return PoolDevice(
        device=DeviceSpec(
            cpu_hz=1e9,
            energy_coeff=target_b / (1000.0 * 1e18 * 1e6),
            bandwidth_hz=1e6,
            noise_var=noise_var,
            channel_gain=1.0,
        ),
        se=se,
        tasks=(TaskSpec(data_bits=1e6, cycles_per_bit=1000.0),),
    )


def exact_tie_pool():
    """Pool whose single task has bitwise-equal corner energies.

    Every parameter is a power of two, so A = noise_var = 2^-10 and
    B = coeff * cycles * f^2 * D = 2^-100 * 2^90 = 2^-10 compute exactly.
    """
    device = DeviceSpec(
        cpu_hz=2.0**30,
        energy_coeff=2.0**-100,
        bandwidth_hz=2.0**20,
        noise_var=2.0**-10,
        channel_gain=1.0,
    )
    task = TaskSpec(data_bits=2.0**20, cycles_per_bit=2.0**10)
    return TaskPool(devices={"md000": PoolDevice(device=device, se=1.0, tasks=(task,))})


def random_pool(rng, max_users=6, max_tasks=8):
    devices = {}
    for n in range(int(rng.integers(1, max_users + 1))):
        tasks = tuple(
            TaskSpec(
                data_bits=float(rng.uniform(1e4, 1e7)),
                cycles_per_bit=float(rng.uniform(100, 3000)),
            )
            for _ in range(int(rng.integers(1, max_tasks + 1)))
        )
        devices[f"md{n:03d}"] = PoolDevice(
            device=DeviceSpec(
                cpu_hz=float(rng.uniform(1e8, 3e9)),
                energy_coeff=float(rng.uniform(1e-28, 1e-26)),
                bandwidth_hz=float(rng.uniform(1e5, 5e7)),
                noise_var=float(rng.uniform(1e-10, 1e-4)),
                channel_gain=float(rng.uniform(0.2, 1.0)),
            ),
            se=float(rng.uniform(0.3, 8.0)),
            tasks=tasks,
        )
    return TaskPool(devices=devices)


class TestPoolValidation:
    def test_empty_pool(self):
        with pytest.raises(ValueError):
            TaskPool(devices={})

    def test_device_needs_tasks(self):
        with pytest.raises(ValueError):
            PoolDevice(device=FAVORABLE_DEVICE, se=1.0, tasks=())

    def test_se_positive(self):
        with pytest.raises(ValueError):
            PoolDevice(device=FAVORABLE_DEVICE, se=0.0, tasks=(FAVORABLE_TASK,))


class TestInitPlan:
    def test_single_task(self):
        plan = init_plan(single_task_pool())
        assert plan.ratios == {("md000", 0): 0.5}

    def test_all_half(self):
        pool = TaskPool(
            devices={
                "a": PoolDevice(device=FAVORABLE_DEVICE, se=1.0, tasks=(FAVORABLE_TASK,) * 3),
                "b": PoolDevice(device=FAVORABLE_DEVICE, se=2.0, tasks=(FAVORABLE_TASK,) * 3),
            }
        )
        plan = init_plan(pool)
        assert len(plan.ratios) == 6
        assert all(r == 0.5 for r in plan.ratios.values())

    def test_total_is_midpoint_of_corners(self):
        rng = np.random.default_rng(2)
        pool = random_pool(rng)
        plan = init_plan(pool)
        expected = 0.0
        for task_id in pool.task_ids():
            task, device, se = pool.task(task_id)
            a, b = affine_coefficients(task, device, se)
            expected += (a + b) / 2.0
        assert plan.total_energy_j == pytest.approx(expected, rel=1e-12)

    def test_plan_total_matches_breakdown_sum(self):
        plan = init_plan(random_pool(np.random.default_rng(4)))
        assert plan.total_energy_j == pytest.approx(
            math.fsum(b.e_total for b in plan.breakdowns.values()), rel=1e-9
        )


class TestFindWorst:
    def test_single_favorable_task(self):
        pool = single_task_pool()
        assert find_worst(pool, init_plan(pool), 0.1) == ("md000", 0)

    def test_none_when_local_favorable(self):
        pool = TaskPool(devices={"md000": device_with_tradeoff(-0.5)})
        assert find_worst(pool, init_plan(pool), 0.1) is None

    def test_largest_marginal_wins(self):
        pool = TaskPool(
            devices={"md000": device_with_tradeoff(5.0), "md001": device_with_tradeoff(3.0)}
        )
        assert find_worst(pool, init_plan(pool), 0.1) == ("md000", 0)
        pool = TaskPool(
            devices={"md000": device_with_tradeoff(3.0), "md001": device_with_tradeoff(5.0)}
        )
        assert find_worst(pool, init_plan(pool), 0.1) == ("md001", 0)

    def test_tie_breaks_lexicographically(self):
        pool = TaskPool(
            devices={"md001": device_with_tradeoff(4.0), "md000": device_with_tradeoff(4.0)}
        )
        assert find_worst(pool, init_plan(pool), 0.1) == ("md000", 0)

    def test_saturated_tasks_excluded(self):
        pool = single_task_pool()
        plan = plan_for_ratios(pool, {("md000", 0): 1.0})
        assert find_worst(pool, plan, 0.1) is None

    def test_step_must_be_positive(self):
        pool = single_task_pool()
        with pytest.raises(ValueError):
            find_worst(pool, init_plan(pool), 0.0)


class TestGreedyOptimize:
    def test_unit_instance_saturates_in_five_steps(self):
        pool = single_task_pool(se=1.0)  # A = 1e-9 J, B = 1.0 J
        plan, trace = greedy_optimize(pool)
        assert len(trace.steps) == 5
        assert trace.termination == "all-saturated"
        assert plan.ratios[("md000", 0)] == 1.0
        assert plan.total_energy_j == pytest.approx(1e-9, rel=1e-12)
        ratios = [s.ratio for s in trace.steps]
        assert ratios[-1] == 1.0
        assert all(b > a for a, b in zip(ratios, ratios[1:]))

    def test_flat_energy_terminates_immediately(self):
        pool = exact_tie_pool()
        a, b = affine_coefficients(*pool.task(("md000", 0)))
        assert a == b
        plan, trace = greedy_optimize(pool)
        assert trace.steps == ()
        assert plan.ratios[("md000", 0)] == 0.5
        assert trace.termination == "no-improvement"

    def test_all_favorable_reaches_sum_of_offload_costs(self):
        pool = TaskPool(
            devices={f"md{i:03d}": device_with_tradeoff(float(i + 1)) for i in range(4)}
        )
        plan, trace = greedy_optimize(pool)
        expected = 0.0
        for task_id in pool.task_ids():
            a, _ = affine_coefficients(*pool.task(task_id))
            expected += a
        assert plan.total_energy_j == pytest.approx(expected, rel=1e-12)
        assert trace.termination == "all-saturated"

    def test_trace_strictly_decreasing(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            pool = random_pool(rng)
            _, trace = greedy_optimize(pool)
            energies = [trace.initial_energy_j] + [s.total_energy_j for s in trace.steps]
            assert all(b < a for a, b in zip(energies, energies[1:]))

    def test_step_bound(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            pool = random_pool(rng)
            _, trace = greedy_optimize(pool)
            assert len(trace.steps) <= 5 * pool.n_tasks()

    def test_matches_restricted_oracle(self):
        rng = np.random.default_rng(14)
        for _ in range(25):
            pool = random_pool(rng)
            plan, _ = greedy_optimize(pool)
            oracle = restricted_oracle(pool)
            assert plan.total_energy_j == pytest.approx(oracle.total_energy_j, rel=1e-9)

    def test_final_not_above_initial(self):
        rng = np.random.default_rng(15)
        for _ in range(10):
            pool = random_pool(rng)
            plan, trace = greedy_optimize(pool)
            assert plan.total_energy_j <= trace.initial_energy_j * (1 + 1e-12)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(16)
        pool = random_pool(rng, max_users=4, max_tasks=5)
        renamed = TaskPool(
            devices={f"zz{k}": v for k, v in reversed(list(pool.devices.items()))}
        )
        plan_a, _ = greedy_optimize(pool)
        plan_b, _ = greedy_optimize(renamed)
        assert plan_a.total_energy_j == pytest.approx(plan_b.total_energy_j, rel=1e-12)
        assert sorted(plan_a.ratios.values()) == pytest.approx(sorted(plan_b.ratios.values()))


class TestOracles:
    def test_restricted_corner_selection(self):
        favorable = TaskPool(devices={"md000": device_with_tradeoff(2.0)})
        assert restricted_oracle(favorable).ratios[("md000", 0)] == 1.0
        unfavorable = TaskPool(devices={"md000": device_with_tradeoff(-2.0)})
        assert restricted_oracle(unfavorable).ratios[("md000", 0)] == 0.5
        tie = exact_tie_pool()
        assert restricted_oracle(tie).ratios[("md000", 0)] == 0.5
        assert global_oracle(tie).ratios[("md000", 0)] == 0.5

    def test_global_corner_selection_and_energy(self):
        unfavorable = TaskPool(devices={"md000": device_with_tradeoff(-2.0)})
        plan = global_oracle(unfavorable)
        a, b = affine_coefficients(*unfavorable.task(("md000", 0)))
        assert plan.ratios[("md000", 0)] == 0.0
        assert plan.total_energy_j == pytest.approx(min(a, b), rel=1e-12)
        favorable = TaskPool(devices={"md000": device_with_tradeoff(2.0)})
        plan = global_oracle(favorable)
        a, b = affine_coefficients(*favorable.task(("md000", 0)))
        assert plan.ratios[("md000", 0)] == 1.0
        assert plan.total_energy_j == pytest.approx(min(a, b), rel=1e-12)

    def test_global_matches_grid_search(self):
        rng = np.random.default_rng(18)
        grid = [i / 100.0 for i in range(101)]
        for _ in range(20):
            pool = random_pool(rng, max_users=1, max_tasks=1)
            task, device, se = pool.task(("md000", 0))
            brute = min(total_energy(task, device, se, l).e_total for l in grid)
            assert global_oracle(pool).total_energy_j == pytest.approx(brute, rel=1e-9)

    def test_oracle_dominance(self):
        rng = np.random.default_rng(19)
        for _ in range(20):
            pool = random_pool(rng)
            init = init_plan(pool).total_energy_j
            restricted = restricted_oracle(pool).total_energy_j
            unrestricted = global_oracle(pool).total_energy_j
            slack = 1 + 1e-12
            assert unrestricted <= restricted * slack
            assert restricted <= init * slack
