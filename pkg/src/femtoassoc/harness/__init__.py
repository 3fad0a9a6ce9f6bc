from .experiment import (
    ALGORITHMS,
    BOUND,
    METRICS,
    ExperimentPlan,
    RunRecord,
    SummaryRow,
    SweepResult,
    confidence_interval,
    load_plan,
    run_experiment,
)
from .output import read_json, read_summary_csv, write_outputs

__all__ = [
    "ALGORITHMS",
    "BOUND",
    "METRICS",
    "ExperimentPlan",
    "RunRecord",
    "SummaryRow",
    "SweepResult",
    "confidence_interval",
    "load_plan",
    "read_json",
    "read_summary_csv",
    "run_experiment",
    "write_outputs",
]
