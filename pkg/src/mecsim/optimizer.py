"""Iterative greedy offloading-ratio search plus exact closed-form oracles.

The request pool maps each device to its task list. Every task starts at
an offloading ratio of 0.5; each round the search picks the unsaturated
task whose next +10% ratio step buys the largest strict energy decrease,
applies it, and stops as soon as no step helps. Because per-task energy
is affine in the ratio, the reachable optimum (ratios confined to
[0.5, 1.0]) has a closed form, as does the true optimum over [0, 1];
both are provided as oracles so the search can be checked exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import DeviceSpec, EnergyBreakdown, TaskSpec, affine_coefficients, total_energy

TaskId = tuple[str, int]

DEFAULT_STEP = 0.1
INITIAL_RATIO = 0.5

TERMINATION_NO_IMPROVEMENT = "no-improvement"
TERMINATION_ALL_SATURATED = "all-saturated"


@dataclass(frozen=True)
class PoolDevice:
    """One device's uplink state and its pending tasks."""

    device: DeviceSpec
    se: float
    tasks: tuple[TaskSpec, ...]

    def __post_init__(self) -> None:
        if self.se <= 0:
            raise ValueError(f"device se must be > 0, got {self.se}")
        if not self.tasks:
            raise ValueError("device must hold at least one task")


@dataclass(frozen=True)
class TaskPool:
    """Request pool keyed by device id."""

    devices: dict[str, PoolDevice]

    def __post_init__(self) -> None:
        if not self.devices:
            raise ValueError("task pool is empty")

    def task_ids(self) -> list[TaskId]:
        """All (device id, task index) pairs in canonical order.

        Devices sort lexicographically by id; this ordering is also the
        deterministic tie-break used by the greedy step selection.
        """
        return [
            (device_id, index)
            for device_id in sorted(self.devices)
            for index in range(len(self.devices[device_id].tasks))
        ]

    def task(self, task_id: TaskId) -> tuple[TaskSpec, DeviceSpec, float]:
        entry = self.devices[task_id[0]]
        return entry.tasks[task_id[1]], entry.device, entry.se

    def n_tasks(self) -> int:
        return sum(len(entry.tasks) for entry in self.devices.values())


@dataclass(frozen=True)
class OffloadPlan:
    """Offloading ratios with their per-task and total energies."""

    ratios: dict[TaskId, float]
    breakdowns: dict[TaskId, EnergyBreakdown]
    total_energy_j: float


@dataclass(frozen=True)
class GreedyStep:
    iteration: int
    task: TaskId
    ratio: float
    total_energy_j: float


@dataclass(frozen=True)
class GreedyTrace:
    """Accepted iterations of one greedy run; energies strictly decrease."""

    initial_energy_j: float
    steps: tuple[GreedyStep, ...]
    termination: str


def plan_for_ratios(pool: TaskPool, ratios: dict[TaskId, float]) -> OffloadPlan:
    """Evaluate the energy model at the given ratios and assemble a plan."""
    breakdowns = {}
    for task_id in pool.task_ids():
        task, device, se = pool.task(task_id)
        breakdowns[task_id] = total_energy(task, device, se, ratios[task_id])
    total = math.fsum(b.e_total for b in breakdowns.values())
    return OffloadPlan(ratios=dict(ratios), breakdowns=breakdowns, total_energy_j=total)


def init_plan(pool: TaskPool) -> OffloadPlan:
    """Starting plan: every task at the 0.5 offloading ratio."""
    return plan_for_ratios(pool, {task_id: INITIAL_RATIO for task_id in pool.task_ids()})


def _pool_coefficients(pool: TaskPool) -> tuple[list[TaskId], np.ndarray, np.ndarray]:
    """Per-task affine energy coefficients in canonical task order."""
    ids = pool.task_ids()
    full_offload = np.empty(len(ids))
    full_local = np.empty(len(ids))
    for i, task_id in enumerate(ids):
        task, device, se = pool.task(task_id)
        full_offload[i], full_local[i] = affine_coefficients(task, device, se)
    return ids, full_offload, full_local


def _best_step(
    full_offload: np.ndarray,
    full_local: np.ndarray,
    ratios: np.ndarray,
    step: float,
) -> int | None:
    """Index of the unsaturated task with the largest strict energy decrease.

    Raising ratio l by d changes energy by (full_offload - full_local)*d,
    so the decrease is (full_local - full_offload)*min(step, 1 - l). Ties
    resolve to the lowest canonical index via argmax.
    """
    headroom = 1.0 - ratios
    decrease = (full_local - full_offload) * np.minimum(step, headroom)
    decrease[headroom <= 0.0] = -np.inf
    best = int(np.argmax(decrease))
    if decrease[best] > 0.0:
        return best
    return None


def find_worst(pool: TaskPool, plan: OffloadPlan, step: float) -> TaskId | None:
    """The task whose next ratio increase cuts total energy the most.

    Returns None when no unsaturated task offers a strict decrease.
    """
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    ids, full_offload, full_local = _pool_coefficients(pool)
    ratios = np.asarray([plan.ratios[task_id] for task_id in ids])
    best = _best_step(full_offload, full_local, ratios, step)
    return ids[best] if best is not None else None


def greedy_optimize(pool: TaskPool, step: float = DEFAULT_STEP) -> tuple[OffloadPlan, GreedyTrace]:
    """Run the iterative greedy ratio search from the all-0.5 plan.

    Each accepted iteration raises the selected task's ratio by
    min(step, 1 - ratio) and keeps the step only if the recomputed total
    energy strictly decreases; the first unhelpful probe (or running out
    of candidates) terminates. Ratios advance on the exact grid
    0.5 + k*step, clamped to 1.0, so saturation lands on 1.0 and each
    task accepts at most ceil(0.5/step) steps.
    """
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    ids, full_offload, full_local = _pool_coefficients(pool)
    n = len(ids)
    ratios = np.full(n, INITIAL_RATIO)
    counts = np.zeros(n, dtype=int)

    def objective(r: np.ndarray) -> float:
        return float(full_offload @ r + full_local @ (1.0 - r))

    current = objective(ratios)
    initial = current
    steps: list[GreedyStep] = []
    termination = TERMINATION_NO_IMPROVEMENT
    iteration = 0
    while True:
        best = _best_step(full_offload, full_local, ratios, step)
        if best is None:
            saturated = ratios >= 1.0
            termination = (
                TERMINATION_ALL_SATURATED if bool(np.all(saturated)) else TERMINATION_NO_IMPROVEMENT
            )
            break
        new_ratio = min(1.0, INITIAL_RATIO + (counts[best] + 1) * step)
        trial = ratios.copy()
        trial[best] = new_ratio
        proposed = objective(trial)
        if proposed >= current:
            termination = TERMINATION_NO_IMPROVEMENT
            break
        iteration += 1
        ratios = trial
        counts[best] += 1
        current = proposed
        steps.append(
            GreedyStep(iteration=iteration, task=ids[best], ratio=new_ratio, total_energy_j=current)
        )

    plan = plan_for_ratios(pool, dict(zip(ids, ratios.tolist())))
    trace = GreedyTrace(initial_energy_j=initial, steps=tuple(steps), termination=termination)
    return plan, trace


def restricted_oracle(pool: TaskPool) -> OffloadPlan:
    """Exact optimum over ratios in [0.5, 1.0], the greedy-reachable box.

    Energy is affine per task, so each task independently sits at 1.0
    when full offload beats full local execution and stays at the 0.5
    initialization otherwise (ties keep 0.5).
    """
    ids, full_offload, full_local = _pool_coefficients(pool)
    ratios = {
        task_id: 1.0 if full_offload[i] < full_local[i] else INITIAL_RATIO
        for i, task_id in enumerate(ids)
    }
    return plan_for_ratios(pool, ratios)


def global_oracle(pool: TaskPool) -> OffloadPlan:
    """True optimum of the separable affine energy over ratios in [0, 1].

    Each task lands on the cheaper corner, min(full_offload, full_local),
    with exact ties keeping the 0.5 initialization. Documents how far the
    increase-only greedy can sit from the unconstrained optimum.
    """
    ids, full_offload, full_local = _pool_coefficients(pool)
    ratios = {}
    for i, task_id in enumerate(ids):
        if full_offload[i] < full_local[i]:
            ratios[task_id] = 1.0
        elif full_offload[i] > full_local[i]:
            ratios[task_id] = 0.0
        else:
            ratios[task_id] = INITIAL_RATIO
    return plan_for_ratios(pool, ratios)
