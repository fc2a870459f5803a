"""Dense exact-diagonalization oracle for small chains (N <= 12).

Builds the spin Hamiltonian directly from Pauli strings (periodic
boundaries) and implements the model-free definitions of the metric and its
quench dynamics, for cross-validation of the momentum-space engine:

  * metric as the second-order perturbation sum over excited states,
  * metric as projected finite-difference state derivatives,
  * exact quench evolution and the displacement generator
    D(t) = int_0^t U(t')^dag (dH) U(t') dt' with all time integrals done in
    closed form in the eigenbasis (no quadrature),
  * purity of the dephased state.

Basis convention: computational basis index s has bit i = 1 when spin i
points down, so Z_i |s> = +|s> on a cleared bit.  The fermion-parity
operator is prod_i Z_i; the momentum-space engine describes the even-parity
sector, so oracle comparisons first check the ground state's parity.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .params import MetricTensor, ModelParams, QuenchSpec

#: Dense diagonalization ceiling.
MAX_SITES = 12
#: Eigenvalues closer than this are grouped as one degenerate level.
DEGENERACY_TOL = 1e-10


class DegenerateGroundStateError(RuntimeError):
    """Ground state too close to the first excited state for the requested op."""

    def __init__(self, gap: float):
        super().__init__(f"ground state degenerate within tolerance (gap = {gap:.3e})")
        self.gap = gap


class LevelCrossingError(RuntimeError):
    """A finite-difference stencil straddled a level crossing."""


@dataclass(frozen=True)
class PauliString:
    """Product of single-site Paulis with a real coefficient.

    ``ops`` is one character per site out of 'IXYZ'.
    """

    ops: str
    coefficient: float

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.ops) if c != "I")


def string_matrix(ps: PauliString) -> np.ndarray:
    """Dense matrix of a Pauli string (one nonzero per column)."""
    n = len(ps.ops)
    dim = 1 << n
    s = np.arange(dim)
    flip = 0
    phase = np.ones(dim, dtype=complex)
    for i, op in enumerate(ps.ops):
        if op == "I":
            continue
        bit = (s >> i) & 1
        if op == "X":
            flip |= 1 << i
        elif op == "Y":
            flip |= 1 << i
            phase = phase * np.where(bit == 0, 1j, -1j)
        elif op == "Z":
            phase = phase * np.where(bit == 0, 1.0, -1.0)
        else:
            raise ValueError(f"unknown Pauli symbol {op!r}")
    mat = np.zeros((dim, dim), dtype=complex)
    mat[s ^ flip, s] = ps.coefficient * phase
    return mat


def _place(n: int, ops: dict[int, str]) -> str:
    chars = ["I"] * n
    for site, op in ops.items():
        chars[site % n] = op
    return "".join(chars)


def local_terms(params: ModelParams) -> list[list[PauliString]]:
    """Per-site local terms H_i of the Hamiltonian (periodic boundaries)."""
    n = params.n_sites
    terms = []
    for i in range(n):
        terms.append(
            [
                PauliString(_place(n, {i - 1: "X", i: "Z", i + 1: "X"}), -1.0),
                PauliString(_place(n, {i: "Z"}), -params.h),
                PauliString(_place(n, {i: "Y", i + 1: "Y"}), params.lambda_y),
                PauliString(_place(n, {i: "X", i + 1: "X"}), params.lambda_x),
            ]
        )
    return terms


def derivative_strings(n_sites: int, direction: str) -> list[PauliString]:
    """Local terms of dH/d(direction); single Pauli strings, one per site."""
    if direction == "lambda_x":
        return [PauliString(_place(n_sites, {i: "X", i + 1: "X"}), 1.0) for i in range(n_sites)]
    if direction == "lambda_y":
        return [PauliString(_place(n_sites, {i: "Y", i + 1: "Y"}), 1.0) for i in range(n_sites)]
    if direction == "h":
        return [PauliString(_place(n_sites, {i: "Z"}), -1.0) for i in range(n_sites)]
    raise ValueError(f"unknown direction {direction!r}")


def _check_size(n_sites: int) -> None:
    if not 4 <= n_sites <= MAX_SITES:
        raise ValueError(f"dense oracle supports 4 <= n_sites <= {MAX_SITES}, got {n_sites}")


def build_hamiltonian(params: ModelParams, disorder: tuple[float, ...] | None = None) -> np.ndarray:
    """Dense Hamiltonian matrix; real symmetric.

    ``disorder`` adds a diagonal field in the Pauli-Z product basis (one
    entry per basis state).  A weak random choice lifts the chain's
    structural gap degeneracies, which a quadratic perturbation cannot do;
    see ``analysis.symmetry_breaking_diagonal``.
    """
    _check_size(params.n_sites)
    dim = 1 << params.n_sites
    ham = np.zeros((dim, dim), dtype=complex)
    for site_terms in local_terms(params):
        for ps in site_terms:
            if ps.coefficient != 0.0:
                ham += string_matrix(ps)
    if disorder is not None:
        if len(disorder) != dim:
            raise ValueError("disorder must have one entry per basis state")
        ham[np.diag_indices(dim)] += np.asarray(disorder, dtype=float)
    if np.max(np.abs(ham.imag)) > 1e-12:
        raise AssertionError("Hamiltonian should be real symmetric")
    return np.ascontiguousarray(ham.real)


@lru_cache(maxsize=32)
def _derivative_matrix(n_sites: int, direction: str) -> np.ndarray:
    mat = np.zeros((1 << n_sites, 1 << n_sites), dtype=complex)
    for ps in derivative_strings(n_sites, direction):
        mat += string_matrix(ps)
    out = np.ascontiguousarray(mat.real)
    out.setflags(write=False)
    return out


def derivative_operator(n_sites: int, direction: str) -> np.ndarray:
    """Dense dH/d(direction); parameter independent since H is linear."""
    _check_size(n_sites)
    return _derivative_matrix(n_sites, direction)


def translation_operator(n_sites: int) -> np.ndarray:
    """One-site shift permutation on the computational basis."""
    dim = 1 << n_sites
    s = np.arange(dim)
    top = (s >> (n_sites - 1)) & 1
    shifted = ((s << 1) & (dim - 1)) | top
    mat = np.zeros((dim, dim))
    mat[shifted, s] = 1.0
    return mat


def parity_signs(n_sites: int) -> np.ndarray:
    """Diagonal of the fermion-parity operator prod_i Z_i (+1 on even states)."""
    s = np.arange(1 << n_sites)
    pop = np.array([bin(x).count("1") for x in s])
    return np.where(pop % 2 == 0, 1.0, -1.0)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of a dense real-symmetric Hamiltonian, ascending order.

    Columns of ``states`` are phase fixed (largest-magnitude amplitude made
    real positive) so outputs are deterministic across linear-algebra
    backends.
    """

    energies: np.ndarray
    states: np.ndarray

    @property
    def gap(self) -> float:
        return float(self.energies[1] - self.energies[0])

    @property
    def ground_state(self) -> np.ndarray:
        return self.states[:, 0]


def spectral_decomposition(ham: np.ndarray) -> SpectralDecomposition:
    energies, states = np.linalg.eigh(ham)
    for idx in range(states.shape[1]):
        col = states[:, idx]
        peak = np.argmax(np.abs(col))
        ref = col[peak]
        states[:, idx] = col * (np.conj(ref) / abs(ref))
    energies.setflags(write=False)
    states.setflags(write=False)
    return SpectralDecomposition(energies, states)


@lru_cache(maxsize=16)
def _decomposition(params: ModelParams, disorder: tuple[float, ...] | None = None):
    return spectral_decomposition(build_hamiltonian(params, disorder))


def decomposition(params: ModelParams, disorder: tuple[float, ...] | None = None):
    """Memoized spectral decomposition of H(params) [+ optional diagonal field]."""
    return _decomposition(params, disorder)


def ground_parity(params: ModelParams) -> float:
    """<prod_i Z_i> in the ground state; +1 means the even sector."""
    dec = decomposition(params)
    psi0 = dec.ground_state
    return float(np.real(np.vdot(psi0, parity_signs(params.n_sites) * psi0)))


def evolve(state: np.ndarray, quench: QuenchSpec, t: float,
           disorder: tuple[float, ...] | None = None) -> np.ndarray:
    """Evolve a state with exp(-i t H(base+offset)); exact eigenbasis phases."""
    dec = decomposition(quench.quenched, disorder)
    coeff = dec.states.conj().T @ state
    return dec.states @ (np.exp(-1j * dec.energies * t) * coeff)


@dataclass(frozen=True)
class DOperator:
    """Time-integrated Heisenberg derivative of the quench Hamiltonian."""

    matrix: np.ndarray
    t: float
    direction: str


def _phase_integrals(energies: np.ndarray, t: float) -> np.ndarray:
    """I(w)_{mn} = (e^{i w t} - 1)/(i w) for w = E_m - E_n, with the t limit
    on (near-)degenerate pairs."""
    w = energies[:, None] - energies[None, :]
    small = np.abs(w) < DEGENERACY_TOL
    w_safe = np.where(small, 1.0, w)
    integral = (np.exp(1j * w * t) - 1.0) / (1j * w_safe)
    return np.where(small, t, integral)


def d_operator(quench: QuenchSpec, direction: str, t: float,
               disorder: tuple[float, ...] | None = None) -> DOperator:
    """D(t) = int_0^t U^dag(t') dH U(t') dt' in closed form."""
    dec = decomposition(quench.quenched, disorder)
    gen = derivative_operator(quench.base.n_sites, direction)
    gen_eig = dec.states.conj().T @ gen @ dec.states
    d_eig = gen_eig * _phase_integrals(dec.energies, t)
    mat = dec.states @ d_eig @ dec.states.conj().T
    return DOperator(mat, float(t), direction)


def qgt_spectral(params: ModelParams) -> MetricTensor:
    """Equilibrium metric from the second-order perturbation sum (raw/extensive)."""
    dec = decomposition(params)
    if dec.gap <= 1e-10:
        raise DegenerateGroundStateError(dec.gap)
    psi0 = dec.ground_state
    denom = dec.energies[0] - dec.energies[1:]
    amps = np.empty((3, dec.energies.size - 1), dtype=complex)
    from .params import COORD_NAMES

    for mu, name in enumerate(COORD_NAMES):
        gen = derivative_operator(params.n_sites, name)
        amps[mu] = (dec.states[:, 1:].conj().T @ (gen @ psi0))
    comp = (amps.conj() / denom**2) @ amps.T
    if np.max(np.abs(comp.imag)) > 1e-10:
        raise AssertionError("metric should be real for a real Hamiltonian")
    return MetricTensor(comp.real, t=0.0, rescaled=False)


def qgt_definition(params: ModelParams, step: float = 1e-4) -> MetricTensor:
    """Equilibrium metric from projected finite-difference state derivatives.

    Ground states on the stencil are phase aligned with the center state
    (overlap made real positive), then contracted through 1 - |psi0><psi0|.
    """
    center = decomposition(params)
    if center.gap <= 1e-10:
        raise DegenerateGroundStateError(center.gap)
    psi0 = center.ground_state
    dpsi = []
    for mu in range(3):
        offset = np.zeros(3)
        offset[mu] = step
        plus = _aligned_ground_state(params.displaced(offset), psi0)
        minus = _aligned_ground_state(params.displaced(-offset), psi0)
        dpsi.append((plus - minus) / (2.0 * step))
    comp = np.empty((3, 3), dtype=complex)
    for mu in range(3):
        for nu in range(3):
            comp[mu, nu] = np.vdot(dpsi[mu], dpsi[nu]) - np.vdot(dpsi[mu], psi0) * np.vdot(
                psi0, dpsi[nu]
            )
    if np.max(np.abs(comp.imag)) > 1e-10:
        raise AssertionError("metric should be real for a real Hamiltonian")
    comp = 0.5 * (comp.real + comp.real.T)
    return MetricTensor(comp, t=0.0, rescaled=False)


def align_phase(state: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Rotate the global phase of ``state`` so its overlap with ``reference``
    is real positive; raises on near-orthogonal pairs (level crossing)."""
    overlap = np.vdot(reference, state)
    if abs(overlap) < 0.5:
        raise LevelCrossingError(
            f"stencil state overlaps center by only {abs(overlap):.3f}; level crossing"
        )
    return state * (np.conj(overlap) / abs(overlap))


def _aligned_ground_state(params: ModelParams, reference: np.ndarray) -> np.ndarray:
    dec = decomposition(params)
    if dec.gap <= 1e-10:
        raise DegenerateGroundStateError(dec.gap)
    return align_phase(dec.ground_state, reference)


def _tensor_amplitudes(quench: QuenchSpec, t: float,
                       disorder: tuple[float, ...] | None = None):
    """<psi_n| dH_mu + i[H, D_mu] |psi_0> for all mu and n, plus denominators."""
    dec0 = decomposition(quench.base, disorder)
    if dec0.gap <= 1e-10:
        raise DegenerateGroundStateError(dec0.gap)
    ham = build_hamiltonian(quench.base, disorder)
    psi0 = dec0.ground_state
    amps = np.empty((3, dec0.energies.size - 1), dtype=complex)
    from .params import COORD_NAMES

    for mu, name in enumerate(COORD_NAMES):
        dmat = d_operator(quench, name, t, disorder).matrix
        gen = derivative_operator(quench.base.n_sites, name)
        op = gen + 1j * (ham @ dmat - dmat @ ham)
        amps[mu] = dec0.states[:, 1:].conj().T @ (op @ psi0)
    denom = dec0.energies[0] - dec0.energies[1:]
    return amps, denom


def qgt_tensor_evolved(quench: QuenchSpec, t: float,
                       disorder: tuple[float, ...] | None = None) -> MetricTensor:
    """Metric of the evolved manifold at time t (real part; raw/extensive)."""
    amps, denom = _tensor_amplitudes(quench, t, disorder)
    comp = (amps.conj() / denom**2) @ amps.T
    comp = 0.5 * (comp.real + comp.real.T)
    return MetricTensor(comp, t=float(t), rescaled=False)


def q_general(quench: QuenchSpec, direction: str, t: float,
              disorder: tuple[float, ...] | None = None) -> float:
    """Diagonal metric component along ``direction`` of the evolved manifold.

    sum_{n>0} |<psi_0| dH + i[H, D] |psi_n>|^2 / (E_0 - E_n)^2, with every
    piece evaluated at the base point and D built from the quenched
    Hamiltonian.  Reduces to the equilibrium perturbation sum at t = 0.
    """
    from .params import COORD_NAMES

    mu = COORD_NAMES.index(direction)
    amps, denom = _tensor_amplitudes(quench, t, disorder)
    return float(np.sum(np.abs(amps[mu]) ** 2 / denom**2))


def q1_simplified(quench: QuenchSpec, direction: str, t: float,
                  disorder: tuple[float, ...] | None = None) -> float:
    """Quench-only metric component: the connected variance of D(t).

    Computed both as <D^2> - <D>^2 in the base ground state and as the
    perturbation sum over |<psi_0|i[H, D]|psi_n>|^2/(E_0-E_n)^2; the two
    routes are cross-asserted before returning.
    """
    dec0 = decomposition(quench.base, disorder)
    if dec0.gap <= 1e-10:
        raise DegenerateGroundStateError(dec0.gap)
    psi0 = dec0.ground_state
    dmat = d_operator(quench, direction, t, disorder).matrix
    dpsi = dmat @ psi0
    mean = np.real(np.vdot(psi0, dpsi))
    variance = np.real(np.vdot(dpsi, dpsi)) - mean * mean

    ham = build_hamiltonian(quench.base, disorder)
    comm = 1j * (ham @ dmat - dmat @ ham)
    amps = dec0.states[:, 1:].conj().T @ (comm @ psi0)
    denom = dec0.energies[0] - dec0.energies[1:]
    spectral = float(np.sum(np.abs(amps) ** 2 / denom**2))
    if abs(spectral - variance) > 1e-10 * max(1.0, abs(variance)):
        raise AssertionError(
            f"spectral ({spectral!r}) and variance ({variance!r}) routes disagree"
        )
    return float(variance)


def connected_corr_terms(quench: QuenchSpec, direction: str, t: float) -> np.ndarray:
    """Per-neighbor contributions to the connected double time integral.

    Entry j is int_0^t int_0^t <dH_0(t') dH_j(t'')>_C dt' dt'' in the base
    ground state, with Heisenberg evolution under the quenched Hamiltonian.
    Each local term integrates to a closed-form phase factor, so this
    reduces to products of per-term D operators in the quenched eigenbasis.
    Individual entries may be complex-valued in general; the ring sum is real.
    """
    dec_q = decomposition(quench.quenched)
    psi0 = decomposition(quench.base).ground_state
    coeff = dec_q.states.conj().T @ psi0
    phases = _phase_integrals(dec_q.energies, t)
    terms = np.empty(quench.base.n_sites, dtype=complex)
    d0_c = None
    for j, ps in enumerate(derivative_strings(quench.base.n_sites, direction)):
        gen_eig = dec_q.states.conj().T @ string_matrix(ps) @ dec_q.states
        dj_c = (gen_eig * phases) @ coeff
        if j == 0:
            d0_c = dj_c
            mean0 = np.vdot(coeff, d0_c)
        terms[j] = np.vdot(d0_c, dj_c) - mean0 * np.vdot(coeff, dj_c)
    return terms


def connected_corr_integral(quench: QuenchSpec, direction: str, t: float) -> float:
    """Per-site double time integral of connected correlations of dH terms:
    the ring sum of ``connected_corr_terms``."""
    total = np.sum(connected_corr_terms(quench, direction, t))
    if abs(total.imag) > 1e-9 * max(1.0, abs(total.real)):
        raise AssertionError(f"per-site correlator sum should be real, got {total!r}")
    return float(total.real)


def dephase_purity_ed(quench: QuenchSpec, disorder: tuple[float, ...] | None = None) -> float:
    """Purity of the base ground state dephased in the quenched eigenbasis.

    Eigenvalues within the degeneracy tolerance are grouped into one level;
    for a non-degenerate spectrum this is sum_n |c_n|^4.
    """
    dec_q = decomposition(quench.quenched, disorder)
    psi0 = decomposition(quench.base, disorder).ground_state
    weights = np.abs(dec_q.states.conj().T @ psi0) ** 2
    return grouped_purity(weights, dec_q.energies)


def grouped_purity(weights: np.ndarray, energies: np.ndarray) -> float:
    """sum over degenerate-level groups of (total weight in group)^2."""
    order = np.argsort(energies)
    en = np.asarray(energies)[order]
    w = np.asarray(weights)[order]
    boundaries = np.nonzero(np.diff(en) > DEGENERACY_TOL)[0] + 1
    groups = np.split(w, boundaries)
    return float(sum(g.sum() ** 2 for g in groups))
