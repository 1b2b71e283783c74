"""Seeded Monte Carlo runs over network drops.

Trial ``k`` of an experiment always uses seed ``base_seed + k``, whatever the
allocator or the swept value, so allocators are compared on identical drops.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .allocators import (
    ALLOCATORS,
    RicaParams,
    allocate_exhaustive,
    allocate_new_auction,
    allocate_random,
    allocate_rica,
    make_instance,
)
from .config import ScenarioConfig
from .errors import UsageError
from .netmodel import sinr_cellular, sum_rate

THREADS_ENV = "D2DSIM_THREADS"


@dataclass(frozen=True)
class TrialResult:
    seed: int
    allocator: str
    num_cellular: int
    num_d2d: int
    sum_rate: float
    ue1_sinr_db: float
    revenue: float = 0.0
    runtime_ms: float = field(default=0.0, compare=False)


def run_allocator(name: str, inst, seed: int, params: RicaParams = RicaParams()):
    """Run one named allocator; returns ``(allocation, revenue, outcome_or_None)``."""
    if name == "random":
        return allocate_random(inst, seed), 0.0, None
    if name == "rica":
        out = allocate_rica(inst, params)
        return out.allocation, out.revenue, out
    if name == "new-auction":
        out = allocate_new_auction(inst, params)
        return out.allocation, out.revenue, out
    if name == "exhaustive":
        return allocate_exhaustive(inst), 0.0, None
    raise UsageError(f"unknown allocator {name!r}; expected one of {', '.join(ALLOCATORS)}")


def check_allocator_names(names: Sequence[str]) -> None:
    if not names:
        raise UsageError("at least one allocator name is required")
    for name in names:
        if name not in ALLOCATORS:
            raise UsageError(
                f"unknown allocator {name!r}; expected one of {', '.join(ALLOCATORS)}"
            )


def run_trial(
    config: ScenarioConfig, allocator: str, seed: int, params: RicaParams = RicaParams()
) -> TrialResult:
    check_allocator_names([allocator])
    if config.num_cellular < 1:
        raise UsageError("a trial needs at least one cellular UE (UE1 is cellular index 0)")
    t0 = time.perf_counter()
    inst = make_instance(config, seed)
    alloc, revenue, _ = run_allocator(allocator, inst, seed, params)
    rate = sum_rate(alloc, inst.gains, inst.powers)
    ue1 = sinr_cellular(0, alloc, inst.gains, inst.powers)
    return TrialResult(
        seed=seed,
        allocator=allocator,
        num_cellular=config.num_cellular,
        num_d2d=config.num_d2d,
        sum_rate=rate,
        ue1_sinr_db=10.0 * math.log10(ue1),
        revenue=revenue,
        runtime_ms=1e3 * (time.perf_counter() - t0),
    )


@dataclass(frozen=True)
class ExperimentResult:
    config: ScenarioConfig
    trials: tuple
    allocators: tuple = ()

    def select(self, allocator: Optional[str] = None, num_cellular=None, num_d2d=None) -> list:
        return [
            t
            for t in self.trials
            if (allocator is None or t.allocator == allocator)
            and (num_cellular is None or t.num_cellular == num_cellular)
            and (num_d2d is None or t.num_d2d == num_d2d)
        ]

    def series(self, index: int) -> tuple:
        """Trials of the ``index``-th requested allocator (names may repeat)."""
        n = len(self.trials) // len(self.allocators)
        return self.trials[index * n : (index + 1) * n]

    def curve(self, allocator: str, num_cellular=None):
        from .metrics import aggregate_curve

        return aggregate_curve(self, allocator, num_cellular=num_cellular)

    @property
    def curves(self) -> dict:
        """Mean sum-rate curves keyed by ``(allocator, num_cellular)``."""
        keys = sorted({(t.allocator, t.num_cellular) for t in self.trials})
        return {k: self.curve(k[0], k[1]) for k in keys}


def worker_count(workers: Optional[int] = None) -> int:
    if workers is None:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            workers = int(raw)
        except ValueError:
            raise UsageError(f"{THREADS_ENV}={raw!r} is not an integer") from None
    return max(1, workers)


def _task(args):
    return run_trial(*args)


def run_grid(
    config: ScenarioConfig,
    allocators: Sequence[str],
    c_values: Sequence[int],
    d_values: Sequence[int],
    trials: int,
    base_seed: int,
    params: RicaParams = RicaParams(),
    workers: Optional[int] = None,
) -> ExperimentResult:
    """Every allocator on every (C, D) point, ``trials`` paired drops per point.

    Results are sorted by (allocator order, C, D, seed), so the output does not
    depend on how trials were scheduled.
    """
    allocators = list(allocators)
    check_allocator_names(allocators)
    if trials < 1:
        raise UsageError(f"trials={trials} violates trials >= 1")
    if not c_values or not d_values:
        raise UsageError("swept value lists must be nonempty")
    tasks = []
    for name in allocators:
        for c in c_values:
            for d in d_values:
                cfg = config.replace(num_cellular=int(c), num_d2d=int(d))
                tasks += [(cfg, name, base_seed + k, params) for k in range(trials)]
    n = worker_count(workers)
    if n > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * n))))
    else:
        results = [_task(t) for t in tasks]
    series = [i for i in range(len(allocators)) for _ in range(len(tasks) // len(allocators))]
    ranked = sorted(
        zip(series, results), key=lambda sr: (sr[0], sr[1].num_cellular, sr[1].num_d2d, sr[1].seed)
    )
    return ExperimentResult(
        config=config, trials=tuple(r for _, r in ranked), allocators=tuple(allocators)
    )


def sweep_d2d_count(
    config: ScenarioConfig,
    allocator: str,
    d_values: Sequence[int],
    trials_per_point: int,
    base_seed: int,
    params: RicaParams = RicaParams(),
    workers: Optional[int] = None,
) -> ExperimentResult:
    """Sum rate as a function of the number of D2D pairs at fixed C."""
    return run_grid(
        config, [allocator], [config.num_cellular], d_values, trials_per_point, base_seed,
        params, workers,
    )


def compare_allocators(
    config: ScenarioConfig,
    names: Sequence[str],
    trials: int,
    base_seed: int,
    params: RicaParams = RicaParams(),
    workers: Optional[int] = None,
) -> ExperimentResult:
    """Several allocators on the same seeded drops at the config's (C, D)."""
    return run_grid(
        config, names, [config.num_cellular], [config.num_d2d], trials, base_seed, params,
        workers,
    )
