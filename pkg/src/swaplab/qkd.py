"""BBM92 secret-key fractions over repeater-chain outputs.

QBERs come from two-qubit Pauli correlators; the secret-key fraction uses
the binary-entropy formula with the basis pair chosen from {XZ, XY, YZ}.
Postselected keying processes each syndrome block separately with one
globally chosen basis pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import chain as chain_mod
from . import qcore, states
from .errors import DimensionMismatchError
from .qcore import DensityOperator

BASIS_PAIRS = ("XZ", "XY", "YZ")


@dataclass(frozen=True)
class QberTriple:
    qx: float
    qy: float
    qz: float

    def pair(self, name: str) -> tuple[float, float]:
        table = {"XZ": (self.qx, self.qz), "XY": (self.qx, self.qy),
                 "YZ": (self.qy, self.qz)}
        return table[name]


def qber(sigma: DensityOperator) -> QberTriple:
    """Error rates from the three Pauli correlators.

    The Y correlator carries a plus sign because the target Bell state is an
    eigenstate of Y(x)Y with eigenvalue -1: perfectly correlated Y outcomes
    appear as anticorrelation, which the protocol flips away.
    """
    if sigma.n_qubits != 2:
        raise DimensionMismatchError("qber needs a 2-qubit state")
    m = sigma.matrix

    def corr(pauli):
        op = np.kron(pauli, pauli)
        return float(np.real(np.trace(op @ m)))

    qx = qcore.clamp_unit(0.5 * (1 - corr(qcore.PAULI_X)), what="QBER")
    qy = qcore.clamp_unit(0.5 * (1 + corr(qcore.PAULI_Y)), what="QBER")
    qz = qcore.clamp_unit(0.5 * (1 - corr(qcore.PAULI_Z)), what="QBER")
    return QberTriple(qx, qy, qz)


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def skf_from_qber(qa: float, qb: float) -> float:
    return max(0.0, 1.0 - binary_entropy(qa) - binary_entropy(qb))


def skf(sigma: DensityOperator, bases: str = "XZ") -> float:
    """Secret-key fraction for one basis pair; 1 - h(Q_a) - h(Q_b), floored at 0.

    Taken literally, a perfectly anticorrelated basis (Q = 1) costs nothing
    since h(1) = 0; the formula is used as stated.
    """
    if bases not in BASIS_PAIRS:
        raise ValueError(f"basis pair must be one of {BASIS_PAIRS}, got {bases!r}")
    qa, qb = qber(sigma).pair(bases)
    return skf_from_qber(qa, qb)


def best_basis_skf(sigma: DensityOperator) -> tuple[str, float]:
    """Maximise over the three basis pairs; ties break in the order XZ, XY, YZ."""
    best_pair, best_val = BASIS_PAIRS[0], -1.0
    for pair in BASIS_PAIRS:
        val = skf(sigma, pair)
        if val > best_val + 1e-15:
            best_pair, best_val = pair, val
    return best_pair, best_val


def _skf_of_bd(coeffs: states.BellDiagonalCoeffs) -> float:
    lam = coeffs.values
    qx, qy, qz = lam[1] + lam[3], lam[2] + lam[1], lam[2] + lam[3]
    triple = QberTriple(qx, qy, qz)
    return max(skf_from_qber(*triple.pair(p)) for p in BASIS_PAIRS)


CHAIN_N_MAX = 14


def chain_skf(link: DensityOperator, n: int, mode: str) -> float:
    """Secret-key fraction after swapping n identical links, correct-at-end.

    Modes: ``postselected`` keys each syndrome block separately (one basis
    pair fixed globally at the value maximising the total), ``nonpostselected``
    keys the syndrome-averaged state, ``bd_approx`` uses the Bell-diagonal
    fast path (provably equal to non-postselected), ``werner_approx`` keeps
    only the fidelity.
    """
    if n < 2:
        raise ValueError("chain_skf needs n >= 2")
    if mode == "werner_approx":
        w = states.werner_twirl(link).w
        q = 0.5 - 0.5 * w ** n
        return max(0.0, 1.0 - 2 * binary_entropy(q))
    if mode == "bd_approx":
        coeffs = chain_mod.bd_chain([states.bd_twirl(link)] * n)
        return _skf_of_bd(coeffs)
    if mode not in ("postselected", "nonpostselected"):
        raise ValueError(f"unknown mode {mode!r}")
    if n > CHAIN_N_MAX:
        raise ValueError(
            f"exact syndrome enumeration is capped at n = {CHAIN_N_MAX}; "
            "larger chains need the merged-recursion fallback with a raised "
            "entry budget")
    protocol = chain_mod.builtin_protocol("correct_at_end", n)
    dist = chain_mod.outcome_distribution(link, n, protocol)
    if mode == "nonpostselected":
        return best_basis_skf(dist.average_state())[1]
    best = 0.0
    for pair in BASIS_PAIRS:
        total = sum(e.probability * skf(e.state, pair) for e in dist.entries)
        best = max(best, total)
    return best
