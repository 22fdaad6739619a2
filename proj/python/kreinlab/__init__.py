"""Krein resolvent difference spectra on the half-line, the unit disc and FEM meshes."""

import json

from ._core import (
    ConfigError,
    DomainError,
    KreinlabError,
    bessel_i,
    bessel_i_log,
    bessel_j_zeros,
    constants,
    dtn_modes,
    fem_eigenvalues,
    fem_resolvent_difference,
    full_boundary_spectrum,
    half_disc_exact,
    halfline_check,
    krein_spectrum,
    poisson_gram_modes,
    weyl_fit,
)
from ._core import run_experiment as _run_experiment

__all__ = [
    "ConfigError", "DomainError", "KreinlabError", "bessel_i", "bessel_i_log", "bessel_j_zeros",
    "constants", "dtn_modes", "fem_eigenvalues", "fem_resolvent_difference", "full_boundary_spectrum",
    "half_disc_exact", "halfline_check", "krein_spectrum", "poisson_gram_modes", "run", "weyl_fit",
]


def run(config, out_dir=""):
    """Run an experiment config (dict, list of dicts, or JSON text).

    Returns (exit_code, summary) with the summary parsed from JSON when available.
    """
    text = config if isinstance(config, str) else json.dumps(config)
    code, summary = _run_experiment(text, str(out_dir))
    return code, (json.loads(summary) if summary else None)
