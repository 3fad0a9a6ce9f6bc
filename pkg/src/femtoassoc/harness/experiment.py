"""Seeded user-count sweeps over every association algorithm."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Mapping, Optional

import numpy as np
import yaml
from scipy import stats

from ..association import (
    greedy,
    randomized_assign,
    randomized_reduce,
    restrict_by_ratio,
    restrict_by_ratio_with_mbs,
    rounding_approximation,
    selfish,
    sequential_fixing,
)
from ..association.assignment import Assignment
from ..lpcore import solve_rlp
from ..metrics import evaluate
from ..model import ScenarioConfig, build_problem, generate_scenario
from ..scheduling import random_order, spt_schedule

log = logging.getLogger(__name__)

ALGORITHMS = ("sequential_fixing", "rounding", "greedy", "randomized", "selfish")
BOUND = "rlp_bound"
METRICS = ("makespan", "expected_makespan", "waiting_time", "jain", "runtime")
GREEDY_RESTRICTIONS = ("ratio", "ratio_with_mbs", "none")
DEFAULT_SCHEDULERS = {
    "sequential_fixing": "spt",
    "greedy": "spt",
    "randomized": "spt",
    "rounding": "random",
    "selfish": "random",
}


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentPlan:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    users: tuple[int, ...] = (30, 40, 50, 60, 70, 80)
    runs: int = 10
    base_seed: int = 0
    access: tuple[str, ...] = ("open",)
    algorithms: tuple[str, ...] = ALGORITHMS
    schedulers: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_SCHEDULERS))
    rho: float = 5.0
    gamma: float = 5.0
    greedy_restriction: str = "ratio"
    lambda_s: Optional[float] = None
    lambda_factor: float = 1.5
    lp_rule: str = "dantzig"

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(int(n) for n in self.users))
        object.__setattr__(self, "access", tuple(self.access))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        sched = dict(DEFAULT_SCHEDULERS)
        sched.update(self.schedulers)
        object.__setattr__(self, "schedulers", sched)
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.users or min(self.users) < 1:
            raise ValueError("user sweep must be nonempty and positive")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")
        bad_access = set(self.access) - {"open", "closed"}
        if not self.access or bad_access:
            raise ValueError(f"access modes must be 'open'/'closed', got {self.access}")
        if self.greedy_restriction not in GREEDY_RESTRICTIONS:
            raise ValueError(f"greedy_restriction must be one of {GREEDY_RESTRICTIONS}")
        if self.lambda_s is None and self.lambda_factor < 1:
            raise ValueError("lambda_factor must be >= 1 so every user keeps its fastest BS")
        bad_sched = {v for v in self.schedulers.values() if v not in ("spt", "random")}
        if bad_sched:
            raise ValueError(f"unknown schedulers: {sorted(bad_sched)}")

    def to_mapping(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario.to_mapping(),
            "algorithms": {
                "rho": self.rho,
                "gamma": self.gamma,
                "greedy_restriction": self.greedy_restriction,
                "lambda_s": self.lambda_s,
                "lambda_factor": self.lambda_factor,
                "lp_rule": self.lp_rule,
            },
            "experiment": {
                "users": list(self.users),
                "runs": self.runs,
                "seed": self.base_seed,
                "access": list(self.access),
                "algorithms": list(self.algorithms),
                "schedulers": dict(self.schedulers),
            },
        }

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ExperimentPlan":
        data = dict(data or {})
        unknown = set(data) - {"scenario", "algorithms", "experiment"}
        if unknown:
            raise ValueError(f"unknown config sections: {sorted(unknown)}")
        algo = dict(data.get("algorithms") or {})
        exp = dict(data.get("experiment") or {})
        kwargs: dict[str, Any] = {"scenario": ScenarioConfig.from_mapping(data.get("scenario") or {})}
        for key in ("rho", "gamma", "greedy_restriction", "lambda_s", "lambda_factor", "lp_rule"):
            if key in algo:
                value = algo.pop(key)
                if key in ("rho", "gamma", "lambda_factor") or (key == "lambda_s" and value is not None):
                    value = float(value)
                kwargs[key] = value
        if algo:
            raise ValueError(f"unknown algorithm keys: {sorted(algo)}")
        renames = {"seed": "base_seed"}
        for key in ("users", "runs", "seed", "access", "algorithms", "schedulers"):
            if key in exp:
                value = exp.pop(key)
                if key == "access" and isinstance(value, str):
                    value = ("open", "closed") if value == "both" else (value,)
                kwargs[renames.get(key, key)] = value
        if exp:
            raise ValueError(f"unknown experiment keys: {sorted(exp)}")
        return cls(**kwargs)

    def lambda_for(self, problem) -> float:
        """Absolute service-time cap for the randomized scheme on ``problem``."""
        if self.lambda_s is not None:
            return float(self.lambda_s)
        return self.lambda_factor * float(problem.t_min.max())

    def greedy_input(self, problem):
        if self.greedy_restriction == "ratio":
            return restrict_by_ratio(problem, self.gamma)
        if self.greedy_restriction == "ratio_with_mbs":
            return restrict_by_ratio_with_mbs(problem, self.gamma)
        return problem

    def replace(self, **changes) -> "ExperimentPlan":
        values = {k: getattr(self, k) for k in self.__dataclass_fields__}
        values.update(changes)
        return ExperimentPlan(**values)


def load_plan(path) -> ExperimentPlan:
    with open(path) as fh:
        return ExperimentPlan.from_mapping(yaml.safe_load(fh))


@dataclass(frozen=True)
class RunRecord:
    access: str
    num_users: int
    run: int
    seed: int
    algorithm: str
    makespan: float
    expected_makespan: float
    waiting_time: Optional[float]
    jain: Optional[float]
    runtime: float
    scenario: str


@dataclass(frozen=True)
class SummaryRow:
    num_users: int
    algorithm: str
    access: str
    metric: str
    mean: Optional[float]
    ci_low: Optional[float]
    ci_high: Optional[float]


@dataclass
class SweepResult:
    rows: list[SummaryRow]
    runs: list[RunRecord]
    manifest: dict[str, Any]

    def value(self, access: str, num_users: int, algorithm: str, metric: str) -> SummaryRow:
        for row in self.rows:
            if (row.access, row.num_users, row.algorithm, row.metric) == (access, num_users, algorithm, metric):
                return row
        raise KeyError((access, num_users, algorithm, metric))

    def mean(self, access: str, num_users: int, algorithm: str, metric: str = "makespan") -> float:
        return self.value(access, num_users, algorithm, metric).mean

    def to_dict(self) -> dict[str, Any]:
        return {
            "manifest": self.manifest,
            "rows": [asdict(r) for r in self.rows],
            "runs": [asdict(r) for r in self.runs],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SweepResult":
        return cls(
            rows=[SummaryRow(**r) for r in data["rows"]],
            runs=[RunRecord(**r) for r in data["runs"]],
            manifest=dict(data["manifest"]),
        )


def confidence_interval(values, level: float = 0.95) -> tuple[float, float, float]:
    """Mean and Student-t interval over independent runs."""
    v = np.asarray(values, dtype=float)
    mean = float(v.mean())
    if v.size < 2:
        return mean, mean, mean
    half = float(stats.t.ppf(0.5 + level / 2, v.size - 1) * v.std(ddof=1) / math.sqrt(v.size))
    return mean, mean - half, mean + half


def _sub_seed(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


def _timed(fn: Callable, *args):
    start = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - start


def run_single(plan: ExperimentPlan, access: str, num_users: int, run: int) -> list[RunRecord]:
    """Every algorithm on one seeded scenario."""
    seed = plan.base_seed + run
    scenario = generate_scenario(plan.scenario.replace(num_users=num_users, access=access), seed)
    problem = build_problem(scenario)
    fingerprint = scenario.fingerprint()
    records = []

    lp, lp_time = _timed(solve_rlp, problem)
    records.append(
        RunRecord(access, num_users, run, seed, BOUND, lp.T, lp.T, None, None, lp_time, fingerprint)
    )

    for index, name in enumerate(ALGORITHMS):
        if name not in plan.algorithms:
            continue
        expected = None
        try:
            if name == "sequential_fixing":
                assignment, elapsed = _timed(lambda p: sequential_fixing(p, rule=plan.lp_rule), problem)
            elif name == "rounding":
                assignment, elapsed = _timed(rounding_approximation, problem, plan.rho)
            elif name == "greedy":
                assignment, elapsed = _timed(lambda p: greedy(plan.greedy_input(p)), problem)
            elif name == "selfish":
                assignment, elapsed = _timed(selfish, problem)
            else:
                start = time.perf_counter()
                state = randomized_reduce(problem, plan.lambda_for(problem))
                sampled = randomized_assign(state, _sub_seed(seed, index, 1))
                elapsed = time.perf_counter() - start
                assignment = Assignment.from_bs_of(problem, sampled.bs_of, "randomized")
                expected = state.max_expected_load
        except Exception as exc:
            raise ExperimentError(f"{name} failed at N={num_users}, seed={seed}, access={access}: {exc}") from exc

        if plan.schedulers[name] == "spt":
            schedule = spt_schedule(assignment, problem)
        else:
            schedule = random_order(assignment, problem, _sub_seed(seed, index, 2))
        report = evaluate(assignment, schedule, problem, scenario, runtime=elapsed, seed=seed)
        records.append(
            RunRecord(
                access=access,
                num_users=num_users,
                run=run,
                seed=seed,
                algorithm=name,
                makespan=report.makespan,
                expected_makespan=report.makespan if expected is None else expected,
                waiting_time=report.waiting_time,
                jain=report.jain,
                runtime=report.runtime,
                scenario=fingerprint,
            )
        )
    return records


def summarize(runs: list[RunRecord], plan: ExperimentPlan) -> list[SummaryRow]:
    rows = []
    names = [BOUND] + [a for a in ALGORITHMS if a in plan.algorithms]
    for access in plan.access:
        for n in plan.users:
            for name in names:
                group = [r for r in runs if (r.access, r.num_users, r.algorithm) == (access, n, name)]
                for metric in METRICS:
                    values = [getattr(r, metric) for r in group]
                    if not values or any(v is None for v in values):
                        rows.append(SummaryRow(n, name, access, metric, None, None, None))
                    else:
                        rows.append(SummaryRow(n, name, access, metric, *confidence_interval(values)))
    return rows


def run_experiment(plan: ExperimentPlan, progress: Optional[Callable[[str], None]] = None) -> SweepResult:
    """Run the sweep; run ``r`` of every point uses scenario seed ``base_seed + r``."""
    from .. import __version__

    runs: list[RunRecord] = []
    for access in plan.access:
        for n in plan.users:
            for r in range(plan.runs):
                runs.extend(run_single(plan, access, n, r))
            if progress:
                progress(f"{access} N={n} done")
            log.info("finished access=%s N=%d", access, n)
    runs.sort(key=lambda rec: (plan.access.index(rec.access), rec.num_users, rec.run, rec.algorithm))
    manifest = {
        "config": plan.to_mapping(),
        "seeds": [plan.base_seed + r for r in range(plan.runs)],
        "version": __version__,
        "metrics": list(METRICS),
        "confidence": "Student-t 95% over runs",
    }
    return SweepResult(rows=summarize(runs, plan), runs=runs, manifest=manifest)
