"""quenchmetric: metric geometry of quenched ground-state manifolds.

Closed-form momentum-space solver for the cluster-XY chain (`engine`), a
dense exact-diagonalization oracle for small chains (`ed`), equilibration
statistics and rigorous bounds (`analysis`), and a deterministic sweep
front end (`config`, `sweep`, `cli`).
"""

from .params import COORD_NAMES, MetricTensor, ModelParams, QuenchSpec
from .engine import (
    BogoliubovTable,
    KGrid,
    bogoliubov_angle,
    bogoliubov_table,
    build_k_grid,
    dephased_purity,
    dispersion,
    evolved_amplitudes,
    fidelity_sq,
    ground_energy,
    metric_delta,
    metric_from_fidelity,
    metric_t0,
    metric_total,
    quench_tables,
)

__all__ = [
    "COORD_NAMES",
    "MetricTensor",
    "ModelParams",
    "QuenchSpec",
    "BogoliubovTable",
    "KGrid",
    "bogoliubov_angle",
    "bogoliubov_table",
    "build_k_grid",
    "dephased_purity",
    "dispersion",
    "evolved_amplitudes",
    "fidelity_sq",
    "ground_energy",
    "metric_delta",
    "metric_from_fidelity",
    "metric_t0",
    "metric_total",
    "quench_tables",
]

__version__ = "0.1.0"
