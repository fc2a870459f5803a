"""Closed-form momentum-space solver for the cluster-XY chain.

After a Jordan-Wigner map the chain splits into independent momentum blocks
labelled by k = pi(2m+1)/N, m = 0..N/2-1 (the grid of the even
fermion-parity sector).  Each block is a two-level problem characterized by

    delta_k   = sin(2k) - (lambda_x - lambda_y) sin(k)
    epsilon_k = cos(2k) - (lambda_x + lambda_y) cos(k) - h
    gap_k     = sqrt(delta_k**2 + epsilon_k**2)
    theta_k   = -atan2(delta_k, epsilon_k) / 2

The two-argument arctangent (rather than atan(delta/epsilon)) selects the
ground state of every block in all quadrants; the even-sector ground energy
is then exactly -2 sum_k gap_k.  A quench displaces the couplings by a
constant offset q; the prepared ground state at lambda evolves under the
Hamiltonian at lambda+q, and every block rotates with mismatch angle
chi_k = theta_k(lambda) - theta_k(lambda+q) and phase 4*t*gap_k(lambda+q).

All angles are in radians, time is in units with hbar = 1 and the couplings
normalized as written above.  Everything here is a pure function of its
inputs; tables are immutable and safe to share between workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import MetricTensor, ModelParams, QuenchSpec

#: Below this single-particle gap a block counts as critical.  Values are
#: still computed (they stay finite at any finite N); callers only get a flag.
GAP_FLOOR = 1e-12


@dataclass(frozen=True)
class KGrid:
    """Momenta k = pi(2m+1)/N of the even-parity sector, m = 0..N/2-1."""

    momenta: np.ndarray
    n_sites: int

    def __post_init__(self) -> None:
        k = np.asarray(self.momenta, dtype=float)
        k.setflags(write=False)
        object.__setattr__(self, "momenta", k)


@dataclass(frozen=True)
class BogoliubovTable:
    """Per-momentum block data and analytic coupling gradients.

    Gradient arrays have shape (3, N/2) with rows ordered as
    (lambda_x, lambda_y, h).  ``chi`` is the quench mismatch angle
    theta(lambda) - theta(lambda+q); it is populated only on the base table
    of a quench pair.  ``critical_mask`` marks blocks whose gap hit
    ``GAP_FLOOR``; their gradients are evaluated with the gap clamped at the
    floor so everything stays finite.
    """

    momenta: np.ndarray
    delta: np.ndarray
    epsilon: np.ndarray
    gap: np.ndarray
    theta: np.ndarray
    grad_delta: np.ndarray
    grad_epsilon: np.ndarray
    grad_theta: np.ndarray
    grad_gap: np.ndarray
    critical_mask: np.ndarray
    chi: np.ndarray | None = None

    @property
    def near_critical(self) -> bool:
        return bool(self.critical_mask.any())


def build_k_grid(n_sites: int) -> KGrid:
    """Momentum grid of an ``n_sites`` chain (even, >= 4)."""
    if n_sites % 2 != 0 or n_sites < 4:
        raise ValueError(f"n_sites must be even and >= 4, got {n_sites}")
    m = np.arange(n_sites // 2)
    return KGrid(np.pi * (2 * m + 1) / n_sites, n_sites)


def dispersion(params: ModelParams, k):
    """Block coefficients (delta, epsilon, gap) at momentum ``k`` (scalar or array)."""
    k = np.asarray(k, dtype=float)
    delta = np.sin(2 * k) - (params.lambda_x - params.lambda_y) * np.sin(k)
    epsilon = np.cos(2 * k) - (params.lambda_x + params.lambda_y) * np.cos(k) - params.h
    return delta, epsilon, np.hypot(delta, epsilon)


def bogoliubov_angle(params: ModelParams, k):
    """Ground-state rotation angle theta_k = -atan2(delta_k, epsilon_k)/2."""
    delta, epsilon, _ = dispersion(params, k)
    return -0.5 * np.arctan2(delta, epsilon)


def parameter_gradients(k):
    """Exact gradients of (delta, epsilon) over (lambda_x, lambda_y, h).

    The Hamiltonian is linear in the couplings, so these are k-functions only:
    grad delta = (-sin k, +sin k, 0), grad epsilon = (-cos k, -cos k, -1).
    """
    k = np.asarray(k, dtype=float)
    sk, ck = np.sin(k), np.cos(k)
    zeros = np.zeros_like(k)
    grad_delta = np.stack([-sk, sk, zeros])
    grad_epsilon = np.stack([-ck, -ck, -np.ones_like(k)])
    return grad_delta, grad_epsilon


def angle_and_gap_gradients(params: ModelParams, k):
    """Analytic (grad theta, grad gap) 3-vectors at momentum ``k``.

    grad theta = -(epsilon grad delta - delta grad epsilon) / (2 gap^2),
    grad gap   =  (epsilon grad epsilon + delta grad delta) / gap.
    Blocks at the gap floor are evaluated with the gap clamped (finite output).
    """
    delta, epsilon, gap = dispersion(params, k)
    grad_delta, grad_epsilon = parameter_gradients(k)
    safe = np.maximum(gap, GAP_FLOOR)
    grad_theta = -0.5 * (epsilon * grad_delta - delta * grad_epsilon) / safe**2
    grad_gap = (epsilon * grad_epsilon + delta * grad_delta) / safe
    return grad_theta, grad_gap


def bogoliubov_table(params: ModelParams, grid: KGrid | None = None) -> BogoliubovTable:
    """Full per-block table over the momentum grid."""
    if grid is None:
        grid = build_k_grid(params.n_sites)
    k = grid.momenta
    delta, epsilon, gap = dispersion(params, k)
    theta = -0.5 * np.arctan2(delta, epsilon)
    grad_delta, grad_epsilon = parameter_gradients(k)
    safe = np.maximum(gap, GAP_FLOOR)
    grad_theta = -0.5 * (epsilon * grad_delta - delta * grad_epsilon) / safe**2
    grad_gap = (epsilon * grad_epsilon + delta * grad_delta) / safe
    return BogoliubovTable(
        momenta=k,
        delta=delta,
        epsilon=epsilon,
        gap=gap,
        theta=theta,
        grad_delta=grad_delta,
        grad_epsilon=grad_epsilon,
        grad_theta=grad_theta,
        grad_gap=grad_gap,
        critical_mask=gap < GAP_FLOOR,
    )


def quench_tables(quench: QuenchSpec, grid: KGrid | None = None):
    """(base, quenched) tables; the base table carries chi = theta - theta'."""
    if grid is None:
        grid = build_k_grid(quench.base.n_sites)
    base = bogoliubov_table(quench.base, grid)
    quenched = bogoliubov_table(quench.quenched, grid)
    chi = base.theta - quenched.theta
    base = BogoliubovTable(
        momenta=base.momenta,
        delta=base.delta,
        epsilon=base.epsilon,
        gap=base.gap,
        theta=base.theta,
        grad_delta=base.grad_delta,
        grad_epsilon=base.grad_epsilon,
        grad_theta=base.grad_theta,
        grad_gap=base.grad_gap,
        critical_mask=base.critical_mask,
        chi=chi,
    )
    return base, quenched


def ground_energy(params: ModelParams) -> float:
    """Even-sector ground-state energy, -2 sum_k gap_k."""
    _, _, gap = dispersion(params, build_k_grid(params.n_sites).momenta)
    return float(-2.0 * np.sum(gap))


def min_gap(params: ModelParams) -> float:
    """Smallest single-particle gap over the momentum grid."""
    _, _, gap = dispersion(params, build_k_grid(params.n_sites).momenta)
    return float(np.min(gap))


def t0_components(table: BogoliubovTable) -> np.ndarray:
    """Raw (extensive) equilibrium components sum_k grad(theta) outer grad(theta)."""
    comp = table.grad_theta @ table.grad_theta.T
    return 0.5 * (comp + comp.T)


def metric_t0(params: ModelParams, *, rescaled: bool = True) -> MetricTensor:
    """Equilibrium metric g(0) = (1/N) sum_k grad(theta_k) outer grad(theta_k)."""
    table = bogoliubov_table(params)
    comp = t0_components(table)
    if rescaled:
        comp = comp / params.n_sites
    return MetricTensor(comp, t=0.0, rescaled=rescaled, near_critical=table.near_critical)


def metric_delta(quench: QuenchSpec, t: float, *, rescaled: bool = True) -> MetricTensor:
    """Time-dependent part of the metric after the quench.

    Per momentum block, with primes at the quenched point lambda+q,
    phase = 4*t*gap', c = cos(chi), s = sin(chi):

      grad(theta') grad(theta') * (2 - 2 cos(phase) - 4 sin^2(phase) c^2 s^2)
    + [grad(theta') grad(theta) + transpose] * (cos(phase) - 1)
    - 4 t sin(phase) [grad(theta') grad(gap') + transpose] * c s (1 - 2 s^2)
    + 16 t^2 s^2 (1 - s^2) grad(gap') grad(gap')

    summed over the grid and divided by N.  Vanishes identically at t = 0 and
    for a trivial quench, and stays bounded when the quenched point itself
    approaches criticality.
    """
    base, quenched = quench_tables(quench)
    comp = delta_components(base, quenched, t)
    if rescaled:
        comp = comp / quench.base.n_sites
    flag = base.near_critical or quenched.near_critical
    return MetricTensor(comp, t=float(t), rescaled=rescaled, near_critical=flag)


def delta_components(base: BogoliubovTable, quenched: BogoliubovTable, t: float) -> np.ndarray:
    """Raw (extensive) time-dependent components from prebuilt quench tables."""
    chi = base.chi
    gt, gtp, ggp = base.grad_theta, quenched.grad_theta, quenched.grad_gap
    phase = 4.0 * t * quenched.gap
    c4, s4 = np.cos(phase), np.sin(phase)
    shi, chl = np.sin(chi), np.cos(chi)
    s2 = shi * shi
    w1 = 2.0 - 2.0 * c4 - 4.0 * s4 * s4 * chl * chl * s2
    w2 = c4 - 1.0
    w3 = -4.0 * t * s4 * chl * shi * (1.0 - 2.0 * s2)
    w4 = 16.0 * t * t * s2 * (1.0 - s2)
    comp = (
        np.einsum("im,jm,m->ij", gtp, gtp, w1)
        + np.einsum("im,jm,m->ij", gtp, gt, w2)
        + np.einsum("im,jm,m->ij", gt, gtp, w2)
        + np.einsum("im,jm,m->ij", gtp, ggp, w3)
        + np.einsum("im,jm,m->ij", ggp, gtp, w3)
        + np.einsum("im,jm,m->ij", ggp, ggp, w4)
    )
    return 0.5 * (comp + comp.T)


def metric_total(quench: QuenchSpec, t: float, *, rescaled: bool = True) -> MetricTensor:
    """g(t) = g(0) + time-dependent part, at the base point of the quench."""
    g0 = metric_t0(quench.base, rescaled=rescaled)
    dg = metric_delta(quench, t, rescaled=rescaled)
    return MetricTensor(
        g0.components + dg.components,
        t=float(t),
        rescaled=rescaled,
        near_critical=g0.near_critical or dg.near_critical,
    )


def evolved_amplitudes(quench: QuenchSpec, t: float, k):
    """Two-level amplitudes of the evolved state in the quenched eigenbasis.

    Returns (cos chi_k, i e^{-4 i t gap'_k} sin chi_k); the squared moduli
    always sum to one.
    """
    theta = bogoliubov_angle(quench.base, k)
    theta_q = bogoliubov_angle(quench.quenched, k)
    chi = theta - theta_q
    _, _, gap_q = dispersion(quench.quenched, k)
    return np.cos(chi) + 0j, 1j * np.exp(-4j * t * gap_q) * np.sin(chi)


def fidelity_sq(quench: QuenchSpec, dlambda, t: float) -> float:
    """Squared overlap of the evolved states at lambda and lambda + dlambda.

    Product over the momentum grid of the squared modulus of a four-term
    block amplitude built from the mismatch angles at the displaced and
    undisplaced points and the quenched-gap phases.  Equals 1 at zero
    displacement and reduces to prod_k cos^2(theta(lambda+d) - theta(lambda))
    at t = 0.
    """
    dl = np.asarray(dlambda, dtype=float)
    grid = build_k_grid(quench.base.n_sites)
    k = grid.momenta
    off = np.asarray(quench.offset)

    theta = bogoliubov_angle(quench.base, k)
    theta_q = bogoliubov_angle(quench.quenched, k)
    theta_d = bogoliubov_angle(quench.base.displaced(dl), k)
    theta_dq = bogoliubov_angle(quench.base.displaced(dl + off), k)
    _, _, gap_q = dispersion(quench.quenched, k)
    _, _, gap_dq = dispersion(quench.base.displaced(dl + off), k)

    chi = theta - theta_q
    chi_d = theta_d - theta_dq
    dth = theta_dq - theta_q

    factor = (
        np.cos(dth) * np.cos(chi_d) * np.cos(chi)
        + np.cos(dth) * np.exp(4j * t * (gap_dq - gap_q)) * np.sin(chi_d) * np.sin(chi)
        + np.sin(dth) * np.exp(-4j * t * gap_q) * np.cos(chi_d) * np.sin(chi)
        - np.sin(dth) * np.exp(4j * t * gap_dq) * np.sin(chi_d) * np.cos(chi)
    )
    return float(np.prod(np.abs(factor) ** 2))


def dephased_purity_from_angles(chi) -> float:
    """Purity of the time-averaged state given the mismatch angles chi_k.

    prod_k (1 - sin^2(2 chi_k)/2), evaluated as exp(sum log1p) so very small
    values at large N keep full relative precision.
    """
    chi = np.asarray(chi, dtype=float)
    return float(np.exp(np.sum(np.log1p(-0.5 * np.sin(2.0 * chi) ** 2))))


def dephased_purity(quench: QuenchSpec) -> float:
    """Purity of the completely dephased evolved state; time independent."""
    base, _ = quench_tables(quench)
    return dephased_purity_from_angles(base.chi)


def metric_from_fidelity(
    quench: QuenchSpec, t: float, *, base_step: float = 1e-3, rescaled: bool = True
) -> MetricTensor:
    """Metric from the second-order expansion of the squared fidelity.

    g_{mu nu}(t) = -(1/2) d^2 F^2 / d(dlambda_mu) d(dlambda_nu) at zero
    displacement, via five-point central stencils (one Richardson level on
    the mixed terms).  If the curvature signal drops below the rounding
    floor near criticality the step widens tenfold (up to three times) and
    the result is flagged.
    """
    step = float(base_step)
    widened = False
    comp = None
    for _ in range(4):
        comp, ok = _fidelity_hessian(quench, t, step)
        if ok:
            break
        step *= 10.0
        widened = True
    comp = -0.5 * comp
    if rescaled:
        comp = comp / quench.base.n_sites
    comp = 0.5 * (comp + comp.T)
    base, quenched = quench_tables(quench)
    flag = widened or base.near_critical or quenched.near_critical
    return MetricTensor(comp, t=float(t), rescaled=rescaled, near_critical=flag)


def _fidelity_hessian(quench: QuenchSpec, t: float, step: float):
    """Hessian of F^2 at dlambda = 0; second value is False when F^2 stayed
    indistinguishable from 1 over the whole stencil (step too small)."""

    def f(dl):
        return fidelity_sq(quench, dl, t)

    hess = np.zeros((3, 3))
    samples = []
    eye = np.eye(3)
    for mu in range(3):
        e = eye[mu]
        f1p, f1m = f(step * e), f(-step * e)
        f2p, f2m = f(2 * step * e), f(-2 * step * e)
        samples += [f1p, f1m, f2p, f2m]
        hess[mu, mu] = (-f2p + 16 * f1p - 30.0 + 16 * f1m - f2m) / (12 * step * step)
    for mu in range(3):
        for nu in range(mu + 1, 3):
            cross = []
            for s in (step, 2 * step):
                d = s * eye[mu], s * eye[nu]
                val = (f(d[0] + d[1]) - f(d[0] - d[1]) - f(-d[0] + d[1]) + f(-d[0] - d[1])) / (
                    4 * s * s
                )
                cross.append(val)
            hess[mu, nu] = hess[nu, mu] = (4 * cross[0] - cross[1]) / 3
    ok = max(abs(v - 1.0) for v in samples) > 1e-11
    return hess, ok
