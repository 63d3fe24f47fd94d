"""Named two-qubit states, the two twirling maps, and noisy decompositions.

The Bell-diagonal twirl keeps the Bell-basis diagonal of a state; the Werner
twirl keeps only the fidelity.  ``max_p``/``decompose`` realise the mixture
``rho = p |Psi_00><Psi_00| + (1-p) sigma`` that the postselected-swap bounds
are phrased in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qcore
from .errors import (
    DimensionMismatchError,
    InfeasibleDecompositionError,
    StateValidationError,
)
from .qcore import DensityOperator, bell_vector, density_operator

DEFAULT_REGISTERS = ("A", "B")


def _require_two_qubits(rho: DensityOperator) -> None:
    if rho.n_qubits != 2:
        raise DimensionMismatchError(f"expected a 2-qubit state, got {rho.n_qubits} qubits")


@dataclass(frozen=True)
class BellDiagonalCoeffs:
    """Probability 4-vector over Bell labels, indexed k = 2i + j."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (4,):
            raise DimensionMismatchError("Bell-diagonal coefficients must be a 4-vector")
        if v.min() < -1e-12:
            raise StateValidationError(f"negative coefficient {v.min()}")
        if abs(v.sum() - 1.0) > 1e-10:
            raise StateValidationError(f"coefficients sum to {v.sum()}, not 1")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def fidelity(self) -> float:
        return float(self.values[0])

    def __getitem__(self, k: int) -> float:
        return float(self.values[k])

    def reconstruct(self, registers=DEFAULT_REGISTERS) -> DensityOperator:
        m = sum(self.values[lab.index] * qcore.bell_projector(lab.i, lab.j)
                for lab in qcore.ALL_LABELS)
        return density_operator(m, registers)


@dataclass(frozen=True)
class WernerState:
    """One-parameter twirl survivor: fidelity F and Werner parameter (4F-1)/3."""

    F: float

    def __post_init__(self):
        if not 0.25 - 1e-12 <= self.F <= 1 + 1e-12:
            raise StateValidationError(f"Werner fidelity {self.F} outside [1/4, 1]")

    @property
    def w(self) -> float:
        return (4 * self.F - 1) / 3

    def coeffs(self) -> BellDiagonalCoeffs:
        t = (1 - self.F) / 3
        return BellDiagonalCoeffs(np.array([self.F, t, t, t]))

    def reconstruct(self, registers=DEFAULT_REGISTERS) -> DensityOperator:
        return self.coeffs().reconstruct(registers)


@dataclass(frozen=True)
class NoisyDecomposition:
    """(p, F, sigma) with rho = p |Psi_00><Psi_00| + (1-p) sigma and fidelity F."""

    p: float
    F: float
    sigma: DensityOperator

    def reconstruct(self) -> DensityOperator:
        m = self.p * qcore.bell_projector(0, 0) + (1 - self.p) * self.sigma.matrix
        return density_operator(m, self.sigma.registers)

    @property
    def sigma_fidelity(self) -> float:
        if self.p >= 1.0:
            return 0.0
        return (self.F - self.p) / (1 - self.p)


def bd_twirl(rho: DensityOperator) -> BellDiagonalCoeffs:
    """Bell-basis diagonal lambda_ij = <Psi_ij| rho |Psi_ij>."""
    _require_two_qubits(rho)
    vals = np.array([qcore.fidelity_to_pure(rho, v) for v in qcore.BELL_VECTORS])
    # round-off can leave the sum a hair away from 1
    return BellDiagonalCoeffs(vals / vals.sum())


def bd_twirl_state(rho: DensityOperator) -> DensityOperator:
    return bd_twirl(rho).reconstruct(rho.registers)


def werner_twirl(rho: DensityOperator) -> WernerState:
    """Keep only the fidelity; realised analytically, no unitary sampling."""
    _require_two_qubits(rho)
    return WernerState(qcore.fidelity_to_pure(rho, bell_vector(0, 0)))


def werner_state(F: float, registers=DEFAULT_REGISTERS) -> DensityOperator:
    return WernerState(F).reconstruct(registers)


def r_state(p: float, registers=DEFAULT_REGISTERS) -> DensityOperator:
    """p |Psi_00><Psi_00| + (1-p) |01><01|; orthogonal non-Bell-diagonal noise."""
    if not 0 <= p <= 1:
        raise StateValidationError(f"r_state requires p in [0,1], got {p}")
    ket01 = np.zeros(4, dtype=complex)
    ket01[1] = 1.0
    m = p * qcore.bell_projector(0, 0) + (1 - p) * np.outer(ket01, ket01.conj())
    return density_operator(m, registers)


def s_state(p: float, registers=DEFAULT_REGISTERS) -> DensityOperator:
    """p |Psi_00><Psi_00| + (1-p) |11><11|; the noise overlaps the target."""
    if not 0 <= p <= 1:
        raise StateValidationError(f"s_state requires p in [0,1], got {p}")
    ket11 = np.zeros(4, dtype=complex)
    ket11[3] = 1.0
    m = p * qcore.bell_projector(0, 0) + (1 - p) * np.outer(ket11, ket11.conj())
    return density_operator(m, registers)


def theta_state(theta: float, registers=DEFAULT_REGISTERS) -> DensityOperator:
    """Pure cos(theta)|00> + sin(theta)|11>."""
    v = np.zeros(4, dtype=complex)
    v[0], v[3] = np.cos(theta), np.sin(theta)
    return qcore.pure_density(v, registers)


def opt_state(p: float, F: float, registers=DEFAULT_REGISTERS, noise_sign: int = +1) -> DensityOperator:
    """The mixture saturating the postselected-swap fidelity ceiling.

    ``p |Psi_00><Psi_00| + (1-p)|psi><psi|`` with
    ``|psi> = sqrt(Ft)|Psi_00> + sqrt(1-Ft)|Psi_11>`` and ``Ft = (F-p)/(1-p)``.
    """
    if not 0 <= p <= F <= 1:
        raise StateValidationError(f"opt_state requires 0 <= p <= F <= 1, got p={p}, F={F}")
    if p == 1.0:
        return qcore.pure_density(bell_vector(0, 0), registers)
    ft = (F - p) / (1 - p)
    psi = np.sqrt(ft) * bell_vector(0, 0) + noise_sign * np.sqrt(1 - ft) * bell_vector(1, 1)
    m = p * qcore.bell_projector(0, 0) + (1 - p) * np.outer(psi, psi.conj())
    return density_operator(m, registers)


def bd_state(lam, registers=DEFAULT_REGISTERS) -> DensityOperator:
    return BellDiagonalCoeffs(np.asarray(lam, dtype=float)).reconstruct(registers)


def make_named(kind: str, registers=DEFAULT_REGISTERS, **params) -> DensityOperator:
    """Dispatch on a state family name; used by the CLI JSON descriptors."""
    builders = {
        "werner": lambda: werner_state(params["F"], registers),
        "r_state": lambda: r_state(params["p"], registers),
        "s_state": lambda: s_state(params["p"], registers),
        "theta": lambda: theta_state(params["theta"], registers),
        "opt": lambda: opt_state(params["p"], params["F"], registers),
        "bd": lambda: bd_state(params["lambda"], registers),
    }
    if kind not in builders:
        raise StateValidationError(f"unknown state kind {kind!r}")
    return builders[kind]()


def parse_state(descriptor: dict, registers=DEFAULT_REGISTERS) -> DensityOperator:
    """Build a state from a JSON descriptor.

    Supported forms: ``{"kind": "r_state", "p": 0.9}``,
    ``{"kind": "bd", "lambda": [l0, l1, l2, l3]}``, and
    ``{"kind": "matrix", "entries": [[re, im], ...]}`` (row-major, 16 entries).
    """
    kind = descriptor.get("kind")
    if kind == "matrix":
        entries = descriptor["entries"]
        if len(entries) != 16:
            raise StateValidationError(f"matrix descriptor needs 16 entries, got {len(entries)}")
        flat = np.array([complex(re, im) for re, im in entries])
        return density_operator(flat.reshape(4, 4), registers)
    params = {k: v for k, v in descriptor.items() if k != "kind"}
    return make_named(kind, registers=registers, **params)


def max_p(rho: DensityOperator) -> float:
    """Largest q with rho - q |Psi_00><Psi_00| PSD, by bisection on the minimum eigenvalue."""
    _require_two_qubits(rho)
    proj = qcore.bell_projector(0, 0)
    f = qcore.fidelity_to_pure(rho, bell_vector(0, 0))

    def feasible(q: float) -> bool:
        return np.linalg.eigvalsh(rho.matrix - q * proj)[0] >= -1e-12

    lo, hi = 0.0, f
    if not feasible(lo):
        return 0.0
    if feasible(hi):
        return hi
    for _ in range(60):
        mid = (lo + hi) / 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def decompose(rho: DensityOperator, p: float) -> NoisyDecomposition:
    """Extract sigma = (rho - p |Psi_00><Psi_00|)/(1-p); p must not exceed max_p."""
    _require_two_qubits(rho)
    F = qcore.fidelity_to_pure(rho, bell_vector(0, 0))
    if p >= 1.0:
        # only |Psi_00> itself admits p = 1; sigma is I/4 by convention
        if abs(F - 1.0) > 1e-10:
            raise InfeasibleDecompositionError("p = 1 requires the perfect Bell state")
        sigma = density_operator(np.eye(4) / 4, rho.registers)
        return NoisyDecomposition(1.0, 1.0, sigma)
    if p > max_p(rho) + 1e-9:
        raise InfeasibleDecompositionError(f"p = {p} exceeds max feasible {max_p(rho)}")
    m = (rho.matrix - p * qcore.bell_projector(0, 0)) / (1 - p)
    sigma = density_operator(m, rho.registers)
    return NoisyDecomposition(float(p), F, sigma)


def random_density(rng: np.random.Generator, n_qubits: int = 2, rank: int | None = None) -> DensityOperator:
    """Full-rank generic mixed state (Ginibre construction), seed-controlled."""
    d = 2 ** n_qubits
    k = rank or d
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    m /= np.trace(m).real
    regs = tuple(f"q{i}" for i in range(n_qubits))
    return density_operator(m, regs)


def random_sigma_with_fidelity(rng: np.random.Generator, fid: float,
                               registers=DEFAULT_REGISTERS) -> DensityOperator:
    """Random two-qubit state with an exact target fidelity to |Psi_00>."""
    tau = random_density(rng, 2)
    f0 = qcore.fidelity_to_pure(tau, bell_vector(0, 0))
    if f0 < fid:
        # mix towards the target Bell state
        t = (fid - f0) / (1 - f0)
        m = (1 - t) * tau.matrix + t * qcore.bell_projector(0, 0)
    else:
        # mix towards an orthogonal Bell state
        t = (f0 - fid) / f0 if f0 > 0 else 0.0
        m = (1 - t) * tau.matrix + t * qcore.bell_projector(1, 1)
    return density_operator(m, registers)
