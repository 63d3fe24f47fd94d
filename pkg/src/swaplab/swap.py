"""Two-link entanglement swapping.

Register convention for a swap: the first state sits on (B1, A1), the second
on (A2, B2).  The BSM projects the middle pair (A1, A2) onto a Bell state and
the Pauli correction lands on B2, rotating every outcome back towards
|Psi_00>.  Operands are relabelled internally, so callers may pass states with
any register names.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qcore
from .errors import DimensionMismatchError
from .qcore import DensityOperator, PauliLabel, bell_vector, density_operator
from .states import BellDiagonalCoeffs, NoisyDecomposition

PROB_FLOOR = 1e-14


@dataclass(frozen=True)
class SwapOutcome:
    """One BSM branch: outcome label, its probability, and the corrected state."""

    label: PauliLabel
    probability: float
    state: DensityOperator | None
    fidelity: float | None

    @property
    def defined(self) -> bool:
        return self.state is not None


def _relabel(rho: DensityOperator, names: tuple[str, str]) -> DensityOperator:
    if rho.n_qubits != 2:
        raise DimensionMismatchError(f"swap inputs must be 2-qubit, got {rho.n_qubits}")
    return DensityOperator(rho.matrix, names)


def _correction(label: PauliLabel) -> np.ndarray:
    # Z^j X^i maps |Psi_ij> on (B1,B2) back to |Psi_00>
    return np.linalg.matrix_power(qcore.PAULI_Z, label.j) @ np.linalg.matrix_power(
        qcore.PAULI_X, label.i
    )


def postselected_swap(rho1: DensityOperator, rho2: DensityOperator,
                      outcome: PauliLabel) -> SwapOutcome:
    """Swap conditioned on one BSM outcome.

    Returns the corrected end-to-end state on (B1, B2), the outcome
    probability, and the fidelity to |Psi_00|.  Outcomes with probability
    below 1e-14 are flagged (state None) rather than raised.
    """
    r1 = _relabel(rho1, ("B1", "A1"))
    r2 = _relabel(rho2, ("A2", "B2"))
    big = qcore.tensor(r1, r2)
    prob, rest = qcore.project_pair(big, ("A1", "A2"), bell_vector(outcome.i, outcome.j))
    if rest is None:
        return SwapOutcome(outcome, prob, None, None)
    corrected = qcore.apply_local(rest, _correction(outcome), "B2")
    fid = qcore.fidelity_to_pure(corrected, bell_vector(0, 0))
    return SwapOutcome(outcome, qcore.clamp_unit(prob, what="probability"), corrected, fid)


def all_swap_outcomes(rho1: DensityOperator, rho2: DensityOperator) -> list[SwapOutcome]:
    return [postselected_swap(rho1, rho2, lab) for lab in qcore.ALL_LABELS]


def nonpostselected_swap(rho1: DensityOperator, rho2: DensityOperator) -> DensityOperator:
    """Probability-weighted average of the four corrected outcomes."""
    acc = np.zeros((4, 4), dtype=complex)
    for out in all_swap_outcomes(rho1, rho2):
        if out.defined:
            acc += out.probability * out.state.matrix
    return density_operator(acc, ("B1", "B2"))


def teleport_channel(resource: DensityOperator, input_state: DensityOperator) -> DensityOperator:
    """Send a single qubit through standard teleportation with a noisy resource.

    The BSM acts on (C, A) where C carries the input and A the first resource
    qubit; each outcome is corrected on B and the four branches are averaged.
    """
    if input_state.n_qubits != 1:
        raise DimensionMismatchError("teleport input must be a single qubit")
    res = _relabel(resource, ("A", "B"))
    inp = DensityOperator(input_state.matrix, ("C",))
    big = qcore.tensor(inp, res)
    acc = np.zeros((2, 2), dtype=complex)
    for lab in qcore.ALL_LABELS:
        w, rest = qcore.project_pair(big, ("C", "A"), bell_vector(lab.i, lab.j))
        if rest is None:
            continue
        corrected = qcore.apply_local(rest, _correction(lab), "B")
        acc += w * corrected.matrix
    return density_operator(acc, ("B",))


def bd_swap(lam: BellDiagonalCoeffs, mu: BellDiagonalCoeffs) -> BellDiagonalCoeffs:
    """XOR convolution of Bell-diagonal coefficient vectors.

    Every BSM outcome yields this same state with probability 1/4, so the
    postselected and averaged results coincide on Bell-diagonal inputs.
    """
    out = np.zeros(4)
    for k1 in range(4):
        for k2 in range(4):
            out[k1 ^ k2] += lam[k1] * mu[k2]
    return BellDiagonalCoeffs(out)


def noise_overlaps(sigma1: DensityOperator, sigma2: DensityOperator,
                   outcome: PauliLabel) -> tuple[float, float]:
    """(p~, p~*F~) of the noise-only swap, i.e. the outcome probability and the
    unnormalised overlap with the target Bell state, both for sigma1 (x) sigma2."""
    out = postselected_swap(sigma1, sigma2, outcome)
    if not out.defined:
        return out.probability, 0.0
    return out.probability, out.probability * out.fidelity


def noisy_swap_stats(d1: NoisyDecomposition, d2: NoisyDecomposition,
                     outcome: PauliLabel) -> tuple[float, float | None]:
    """Closed-form swap statistics for states p|Psi_00><Psi_00| + (1-p) sigma.

    Works for unequal (p, F) on the two sides.  Returns (probability,
    fidelity); fidelity is None when the branch probability vanishes.
    """
    p1, p2, f1, f2 = d1.p, d2.p, d1.F, d2.F
    pt, ptft = noise_overlaps(d1.sigma, d2.sigma, outcome)
    cross = (1 - p1) * (1 - p2)
    prob = (p1 + p2 - p1 * p2) / 4 + cross * pt
    if prob < PROB_FLOOR:
        return prob, None
    num = p1 * f2 + p2 * f1 - p1 * p2 + 4 * cross * ptft
    den = p1 + p2 - p1 * p2 + 4 * cross * pt
    return prob, qcore.clamp_unit(num / den, what="fidelity")


def swap_overlaps_00_batch(sig1: np.ndarray, sig2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised (p~, p~*F~) at outcome 00 for stacked 4x4 noise pairs.

    ``sig1``/``sig2`` have shape (m, 4, 4) with register order (left, shared)
    and (shared, right) respectively.  Used by the Monte-Carlo sweeps, where
    looping over dense swaps would dominate the runtime.
    """
    t1 = sig1.reshape(-1, 2, 2, 2, 2)
    t2 = sig2.reshape(-1, 2, 2, 2, 2)
    # reduced states on the shared (measured) qubits
    red1 = np.einsum("miaib->mab", t1)
    red2 = np.einsum("maibi->mab", t2)
    pt = 0.5 * np.real(np.einsum("mab,mab->m", red1, red2))
    ptft = 0.25 * np.real(np.einsum("miajb,maibj->m", t1, t2))
    return pt, ptft


def noisy_fidelity_00_batch(p1, f1, sig1, p2, f2, sig2) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised (probability, fidelity) of outcome 00 for decomposition pairs."""
    pt, ptft = swap_overlaps_00_batch(sig1, sig2)
    cross = (1 - p1) * (1 - p2)
    prob = (p1 + p2 - p1 * p2) / 4 + cross * pt
    num = p1 * f2 + p2 * f1 - p1 * p2 + 4 * cross * ptft
    den = p1 + p2 - p1 * p2 + 4 * cross * pt
    with np.errstate(invalid="ignore", divide="ignore"):
        fid = np.where(den > PROB_FLOOR, num / np.where(den > 0, den, 1.0), np.nan)
    return prob, fid
