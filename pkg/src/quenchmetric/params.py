"""Parameter bundles shared by the analytic engine, the ED oracle and the CLI.

The model is a periodic chain of ``n_sites`` spins with a three-site
stabilizer term, XX and YY couplings and a transverse field,

    H = - sum_i X_{i-1} Z_i X_{i+1} - h sum_i Z_i
        + lambda_y sum_i Y_i Y_{i+1} + lambda_x sum_i X_i X_{i+1}

so the manifold coordinates are (lambda_x, lambda_y, h).  A quench is a
constant displacement ``offset`` of those coordinates: the ground state of
``base`` evolves under the Hamiltonian at ``base + offset``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Manifold coordinate order used for every 3-vector / 3x3 tensor in the package.
COORD_NAMES = ("lambda_x", "lambda_y", "h")


@dataclass(frozen=True)
class ModelParams:
    """Coupling constants of the chain at one point of the manifold."""

    lambda_x: float
    lambda_y: float
    h: float
    n_sites: int

    def __post_init__(self) -> None:
        if self.n_sites % 2 != 0 or self.n_sites < 4:
            raise ValueError(f"n_sites must be even and >= 4, got {self.n_sites}")
        for name in COORD_NAMES:
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be a finite real number, got {value!r}")

    @property
    def coords(self) -> np.ndarray:
        """Manifold coordinates as a length-3 array (lambda_x, lambda_y, h)."""
        return np.array([self.lambda_x, self.lambda_y, self.h], dtype=float)

    def displaced(self, offset) -> "ModelParams":
        """Same chain at coordinates shifted by a length-3 ``offset``."""
        off = np.asarray(offset, dtype=float)
        if off.shape != (3,):
            raise ValueError(f"offset must have shape (3,), got {off.shape}")
        return ModelParams(
            self.lambda_x + off[0], self.lambda_y + off[1], self.h + off[2], self.n_sites
        )


@dataclass(frozen=True)
class QuenchSpec:
    """A sudden parameter quench: prepare at ``base``, evolve at ``base + offset``."""

    base: ModelParams
    offset: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        off = tuple(float(x) for x in self.offset)
        object.__setattr__(self, "offset", off)
        self.base.displaced(off)  # validates finiteness of the quenched point

    @property
    def quenched(self) -> ModelParams:
        """Parameters of the Hamiltonian that drives the time evolution."""
        return self.base.displaced(self.offset)

    @property
    def is_trivial(self) -> bool:
        return self.offset == (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class MetricTensor:
    """Symmetric 3x3 metric over (lambda_x, lambda_y, h).

    ``rescaled`` marks per-site normalization (components divided by the
    number of spins).  ``near_critical`` is set when a gap hit the numerical
    floor somewhere in the computation; the components are still finite.
    """

    components: np.ndarray
    t: float
    rescaled: bool = True
    near_critical: bool = False

    def __post_init__(self) -> None:
        comp = np.array(self.components, dtype=float)
        if comp.shape != (3, 3):
            raise ValueError(f"components must be 3x3, got {comp.shape}")
        scale = max(1.0, float(np.max(np.abs(comp))))
        if np.max(np.abs(comp - comp.T)) > 1e-10 * scale:
            raise ValueError("metric components must be symmetric")
        comp = 0.5 * (comp + comp.T)
        comp.setflags(write=False)
        object.__setattr__(self, "components", comp)

    @property
    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues of the 3x3 tensor."""
        return np.linalg.eigvalsh(self.components)

    def rescaled_by(self, n_sites: int) -> "MetricTensor":
        """Per-site version of a raw (extensive) tensor."""
        if self.rescaled:
            return self
        return MetricTensor(
            self.components / n_sites, self.t, rescaled=True, near_critical=self.near_critical
        )

    def norm(self, kind: str = "frobenius") -> float:
        """Scalar size of the scanned (lambda_x, lambda_y) block.

        All three choices act on the 2x2 coupling block, which is the part
        that varies in a phase-diagram scan: ``frobenius`` (default),
        ``max-eig`` (largest absolute eigenvalue) and ``trace``.
        """
        block = self.components[:2, :2]
        if kind == "frobenius":
            return float(np.linalg.norm(block))
        if kind == "max-eig":
            return float(np.max(np.abs(np.linalg.eigvalsh(block))))
        if kind == "trace":
            return float(np.trace(block))
        raise ValueError(f"unknown norm kind {kind!r}")
