"""Calibrated multi-class probability estimates for small data sets.

A K-class problem is decomposed into binary tasks (one-vs-rest or all
pairs), each task's scores are calibrated on Monte-Carlo-generated data
with a near-isotonic ensemble, and the binary probabilities are recombined
by normalization or pairwise coupling.
"""

from .calibration import (
    CalibrationMap,
    CalibrationPoint,
    EnirEnsemble,
    apply_calibration,
    calibration_from_json,
    calibration_to_json,
    dgg_generate,
    dgg_group,
    fit_enir,
    fit_isotonic,
)
from .classifiers import (
    NBModel,
    RFModel,
    RFParams,
    fit_gaussian_nb,
    fit_random_forest,
    predict_proba_nb,
    predict_proba_rf,
)
from .coupling import CouplingResult, normalize_combine, pairwise_couple
from .dataset import (
    FoldPlan,
    LabeledDataset,
    generate_waveform,
    load_csv,
    merge_classes,
    stratified_kfold,
)
from .decomposition import (
    BinaryTask,
    Scheme,
    binary_task_count,
    build_allpairs_tasks,
    build_ovr_tasks,
)
from .harness import (
    ClassifierSpec,
    CouplingParams,
    DatasetRecipe,
    DggParams,
    ExperimentConfig,
    ExperimentResult,
    Scenario,
    ScenarioResult,
    emit_table,
    emit_timing_table,
    run_experiment,
    run_fold,
    run_scenario,
)
from .metrics import log_loss, mse, one_hot
from .stats import TestResult, paired_t_test, welch_t_test

__version__ = "0.1.0"

__all__ = [
    "BinaryTask",
    "CalibrationMap",
    "CalibrationPoint",
    "ClassifierSpec",
    "CouplingParams",
    "CouplingResult",
    "DatasetRecipe",
    "DggParams",
    "EnirEnsemble",
    "ExperimentConfig",
    "ExperimentResult",
    "FoldPlan",
    "LabeledDataset",
    "NBModel",
    "RFModel",
    "RFParams",
    "Scenario",
    "ScenarioResult",
    "Scheme",
    "TestResult",
    "apply_calibration",
    "binary_task_count",
    "build_allpairs_tasks",
    "build_ovr_tasks",
    "calibration_from_json",
    "calibration_to_json",
    "dgg_generate",
    "dgg_group",
    "emit_table",
    "emit_timing_table",
    "fit_enir",
    "fit_gaussian_nb",
    "fit_isotonic",
    "fit_random_forest",
    "generate_waveform",
    "load_csv",
    "log_loss",
    "merge_classes",
    "mse",
    "normalize_combine",
    "one_hot",
    "paired_t_test",
    "pairwise_couple",
    "predict_proba_nb",
    "predict_proba_rf",
    "run_experiment",
    "run_fold",
    "run_scenario",
    "stratified_kfold",
    "welch_t_test",
]
