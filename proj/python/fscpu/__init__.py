"""Feature selection for positive-unlabeled data.

The heavy lifting lives in the compiled extension; this package re-exports it.
"""

from fscpu._core import (  # noqa: F401
    ClusterBackend,
    ClusterConfig,
    Clustering,
    ConditionConfig,
    Dataset,
    ExperimentResult,
    FeatureMask,
    FscpuConfigError,
    FscpuDataError,
    NormalizationParams,
    ObjectiveMode,
    ObjectiveReport,
    RunConfig,
    RunResult,
    ScoreLog,
    SyntheticSpec,
    ThetaTraceRow,
    ThetaVector,
    __version__,
    apply_minmax,
    brute_force_best_subset,
    combined_score,
    count_labeled,
    evaluate_mask,
    experiment_table_csv,
    fit_minmax,
    fit_predict,
    fsr,
    generate_clustered,
    generate_outlier,
    init_theta,
    load_csv,
    mi_score,
    normalize,
    objective_value,
    optimize,
    run,
    run_checks,
    run_condition,
    same_f_value,
    sample_and_repair,
    subsample_rows,
    write_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
