import numpy as np
import pytest

from quenchmetric import engine
from quenchmetric.params import ModelParams, QuenchSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_noncritical(rng, n_sites, *, span=1.4, gap_floor=0.05, max_tries=500):
    """A parameter point whose whole momentum grid is safely gapped."""
    for _ in range(max_tries):
        lam = rng.uniform(-span, span, 3)
        params = ModelParams(*lam, n_sites)
        if engine.min_gap(params) > gap_floor:
            return params
    raise RuntimeError("could not sample a noncritical point")


def random_quench(rng, n_sites, *, span=1.2, offset_span=0.3, gap_floor=0.05, max_tries=500):
    """A quench whose base and quenched points are both safely gapped."""
    for _ in range(max_tries):
        lam = rng.uniform(-span, span, 3)
        off = rng.uniform(-offset_span, offset_span, 3)
        params = ModelParams(*lam, n_sites)
        if engine.min_gap(params) > gap_floor and engine.min_gap(params.displaced(off)) > gap_floor:
            return QuenchSpec(params, tuple(off))
    raise RuntimeError("could not sample a noncritical quench")
