"""Multi-scale Beta-Binomial ANDOVA."""

from ._core import (
    InputError,
    NumericalError,
    auc,
    bayesian_fdr,
    decide,
    derive_seed,
    elicit_beta,
    elicit_delta,
    fit,
    laplace_inner,
    level_prior_summary,
    log_d,
    pmap_independent,
    prjap,
    read_dataset,
    simulate,
    solve_tree,
    threshold_for_fdr,
    version,
    window_evidence,
)

__version__ = version()


def fit_file(path, **kwargs):
    """Fit a CSV or JSON dataset file; keyword arguments as in fit()."""
    values, labels = read_dataset(str(path))
    return fit(values, group_labels=labels, **kwargs)


__all__ = [
    "InputError",
    "NumericalError",
    "auc",
    "bayesian_fdr",
    "decide",
    "derive_seed",
    "elicit_beta",
    "elicit_delta",
    "fit",
    "fit_file",
    "laplace_inner",
    "level_prior_summary",
    "log_d",
    "pmap_independent",
    "prjap",
    "read_dataset",
    "simulate",
    "solve_tree",
    "threshold_for_fdr",
    "version",
    "window_evidence",
]
