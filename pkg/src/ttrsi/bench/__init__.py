"""Experiment harness: records, desk-scale experiments and the ``ttbench`` CLI."""
from .experiments import (
    count_inversions,
    exp_gaussian,
    exp_oscillatory,
    exp_psi_squared,
    exp_relu,
    exp_scaling,
    loglog_slope,
    median_by,
    scaling_slopes,
)
from .records import CSV_FIELDS, ExperimentRecord, records_from_csv, records_from_json, records_to_csv, records_to_json
