"""Dense complex linear algebra over labelled multi-qubit registers.

States are plain numpy arrays wrapped together with an ordered tuple of
register labels.  The tensor order of the matrix is the order of the labels.
Bell basis convention: ``|Psi_ij> = (I (x) X^i Z^j)(|00> + |11>)/sqrt(2)``,
i.e. the Pauli acts on the *second* register of the pair.  Every sign in the
package depends on this choice, so nothing else may redefine it.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import (
    DimensionMismatchError,
    NotHermitianError,
    NotUnitaryError,
    RegisterCollisionError,
    StateValidationError,
    UnknownRegisterError,
)

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_SLACK = 1e-9

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PauliLabel:
    """Phase-free Pauli word X^i Z^j; the label of a Bell state / BSM outcome."""

    i: int
    j: int

    def __post_init__(self):
        if self.i not in (0, 1) or self.j not in (0, 1):
            raise ValueError(f"Pauli label bits must be 0/1, got ({self.i},{self.j})")

    @property
    def index(self) -> int:
        return 2 * self.i + self.j

    @classmethod
    def from_index(cls, k: int) -> "PauliLabel":
        return cls((k >> 1) & 1, k & 1)

    def __mul__(self, other: "PauliLabel") -> "PauliLabel":
        # product of Pauli words up to global phase: bitwise XOR
        return PauliLabel(self.i ^ other.i, self.j ^ other.j)

    def matrix(self) -> np.ndarray:
        return np.linalg.matrix_power(PAULI_X, self.i) @ np.linalg.matrix_power(PAULI_Z, self.j)

    @property
    def name(self) -> str:
        return {(0, 0): "I", (0, 1): "Z", (1, 0): "X", (1, 1): "XZ"}[(self.i, self.j)]

    @classmethod
    def from_name(cls, name: str) -> "PauliLabel":
        table = {"I": (0, 0), "Z": (0, 1), "X": (1, 0), "XZ": (1, 1), "ZX": (1, 1), "Y": (1, 1)}
        if name not in table:
            raise ValueError(f"unknown Pauli name {name!r}")
        return cls(*table[name])


ALL_LABELS = tuple(PauliLabel.from_index(k) for k in range(4))

_PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def bell_vector(i: int, j: int) -> np.ndarray:
    """Bell state |Psi_ij> with X^i Z^j applied to the second qubit."""
    return _frozen(np.kron(PAULI_I, PauliLabel(i, j).matrix()) @ _PHI_PLUS)


def bell_projector(i: int, j: int) -> np.ndarray:
    v = bell_vector(i, j)
    return _frozen(np.outer(v, v.conj()))


BELL_VECTORS = tuple(bell_vector(lab.i, lab.j) for lab in ALL_LABELS)


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian PSD trace-one matrix over an ordered tuple of qubit labels."""

    matrix: np.ndarray
    registers: tuple[str, ...]

    @property
    def n_qubits(self) -> int:
        return len(self.registers)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def position(self, label: str) -> int:
        try:
            return self.registers.index(label)
        except ValueError:
            raise UnknownRegisterError(f"register {label!r} not in {self.registers}") from None

    def validate(self, psd_slack: float = PSD_SLACK) -> "DensityOperator":
        m = self.matrix
        if m.shape != (2 ** self.n_qubits,) * 2:
            raise DimensionMismatchError(
                f"matrix shape {m.shape} does not match {self.n_qubits} registers"
            )
        if np.abs(m - m.conj().T).max() > HERMITICITY_TOL:
            raise NotHermitianError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise StateValidationError(f"trace {tr} deviates from 1 beyond tolerance")
        lo = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
        if lo < -psd_slack:
            raise StateValidationError(f"minimum eigenvalue {lo} below -{psd_slack}")
        return self

    def fidelity(self, psi: np.ndarray) -> float:
        return fidelity_to_pure(self, psi)


def density_operator(matrix: np.ndarray, registers, check: bool = True) -> DensityOperator:
    if len(set(registers)) != len(tuple(registers)):
        raise RegisterCollisionError(f"duplicate labels in {tuple(registers)}")
    op = DensityOperator(_frozen(matrix), tuple(registers))
    if check:
        op.validate()
    return op


def pure_density(vector: np.ndarray, registers) -> DensityOperator:
    v = np.asarray(vector, dtype=complex)
    v = v / np.linalg.norm(v)
    return density_operator(np.outer(v, v.conj()), registers)


def tensor(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    """Kronecker product; register tuples concatenate in order."""
    overlap = set(a.registers) & set(b.registers)
    if overlap:
        raise RegisterCollisionError(f"registers {sorted(overlap)} present on both operands")
    return DensityOperator(_frozen(np.kron(a.matrix, b.matrix)), a.registers + b.registers)


def _as_tensor(op: DensityOperator) -> np.ndarray:
    n = op.n_qubits
    return op.matrix.reshape((2,) * (2 * n))


def partial_trace(rho: DensityOperator, drop) -> DensityOperator:
    """Trace out the given registers, keeping the rest in their original order."""
    drop = tuple(drop)
    pos = [rho.position(lab) for lab in drop]
    n = rho.n_qubits
    if len(pos) == n:
        raise DimensionMismatchError("cannot trace out every register")
    t = _as_tensor(rho)
    keep = [k for k in range(n) if k not in pos]
    letters = list(string.ascii_lowercase + string.ascii_uppercase)
    row = [letters[k] for k in range(n)]
    col = [letters[n + k] for k in range(n)]
    for k in pos:
        col[k] = row[k]
    out = "".join(row[k] for k in keep) + "".join(letters[n + k] for k in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d = 2 ** len(keep)
    return DensityOperator(_frozen(reduced.reshape(d, d)), tuple(rho.registers[k] for k in keep))


def partial_transpose(rho: DensityOperator, regs) -> np.ndarray:
    """Transpose the listed registers' indices only; involutive.  Returns a bare matrix."""
    pos = [rho.position(lab) for lab in tuple(regs)]
    n = rho.n_qubits
    t = _as_tensor(rho).copy()
    for k in pos:
        t = np.swapaxes(t, k, n + k)
    return t.reshape(rho.dim, rho.dim)


def apply_local(rho: DensityOperator, u: np.ndarray, reg: str) -> DensityOperator:
    """Conjugate one register by a single-qubit unitary, identity elsewhere."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise DimensionMismatchError(f"local operator must be 2x2, got {u.shape}")
    if np.abs(u.conj().T @ u - PAULI_I).max() > HERMITICITY_TOL:
        raise NotUnitaryError("local operator is not unitary")
    k = rho.position(reg)
    n = rho.n_qubits
    t = np.tensordot(u, _as_tensor(rho), axes=([1], [k]))
    t = np.moveaxis(t, 0, k)
    t = np.tensordot(t, u.conj(), axes=([n + k], [1]))
    t = np.moveaxis(t, -1, n + k)
    return DensityOperator(_frozen(t.reshape(rho.dim, rho.dim)), rho.registers)


def fidelity_to_pure(rho: DensityOperator, psi: np.ndarray) -> float:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (rho.dim,):
        raise DimensionMismatchError(f"state dim {rho.dim} vs vector shape {psi.shape}")
    val = float(np.real(psi.conj() @ rho.matrix @ psi))
    return clamp_unit(val, what="fidelity")


def clamp_unit(value: float, tol: float = PSD_SLACK, what: str = "value") -> float:
    """Clamp into [0,1] when within ``tol`` of the boundary; larger violations raise."""
    if value < -tol or value > 1 + tol:
        raise StateValidationError(f"{what} {value} outside [0,1] beyond tolerance {tol}")
    return min(1.0, max(0.0, value))


def min_eigenvalue(m: np.ndarray) -> float:
    m = np.asarray(m, dtype=complex)
    if np.abs(m - m.conj().T).max() > HERMITICITY_TOL:
        raise NotHermitianError("min_eigenvalue requires a Hermitian matrix")
    return float(np.linalg.eigvalsh(m)[0])


def project_pair(rho: DensityOperator, pair: tuple[str, str], vec: np.ndarray):
    """Project two registers onto a 2-qubit ket and drop them.

    Returns ``(weight, remainder)`` where ``weight`` is the trace of the
    unnormalised projected operator and ``remainder`` is the normalised state
    on the surviving registers (``None`` when the weight vanishes).
    """
    a, b = (rho.position(lab) for lab in pair)
    n = rho.n_qubits
    v = np.asarray(vec, dtype=complex).reshape(2, 2)
    t = _as_tensor(rho)
    # contract ket side then bra side
    t = np.tensordot(v.conj(), t, axes=([0, 1], [a, b]))
    a2, b2 = (k - sum(p < k for p in (a, b)) for k in (n + a, n + b))
    t = np.tensordot(v, t, axes=([0, 1], [a2, b2]))
    keep = [k for k in range(n) if k not in (a, b)]
    d = 2 ** len(keep)
    mat = t.reshape(d, d)
    weight = float(np.real(np.trace(mat)))
    if weight < 1e-14:
        return weight, None
    regs = tuple(rho.registers[k] for k in keep)
    return weight, DensityOperator(_frozen(mat / weight), regs)


def kron_all(mats) -> np.ndarray:
    return reduce(np.kron, mats)


def embed_pair_operator(op4: np.ndarray, positions: tuple[int, int], n: int) -> np.ndarray:
    """Embed a 2-qubit operator acting on the given tensor positions of n qubits."""
    a, b = positions
    t = np.asarray(op4, dtype=complex).reshape(2, 2, 2, 2)
    full = t
    for _ in range(n - 2):
        full = np.tensordot(full, PAULI_I, axes=0)
    # axes of `full`: (rowA,rowB,colA,colB, rowC1,colC1, rowC2,colC2, ...)
    rows = [None] * n
    cols = [None] * n
    rest = [k for k in range(n) if k not in (a, b)]
    rows[a], rows[b], cols[a], cols[b] = 0, 1, 2, 3
    for idx, k in enumerate(rest):
        rows[k] = 4 + 2 * idx
        cols[k] = 5 + 2 * idx
    full = np.transpose(full, axes=rows + cols)
    return full.reshape(2 ** n, 2 ** n)
