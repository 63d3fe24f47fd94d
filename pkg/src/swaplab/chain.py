"""N-link repeater chains: swap-and-correct protocols and chain simulation.

Link k (k = 1..N) lives on registers ("L{k}a", "L{k}b").  Repeater node k
holds L{k}b and L{k+1}a; end node 0 holds L1a and end node N holds L{N}b.
Corrections at a repeater node act on its left qubit (the BSM that follows
makes the choice of qubit irrelevant); end-node corrections are applied after
all measurements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qcore
from .errors import ChainSizeError, UnsupportedConfigurationError
from .qcore import DensityOperator, PauliLabel, bell_vector, density_operator
from .states import BellDiagonalCoeffs
from .swap import bd_swap

BRUTE_MAX_LINKS = 5
IDENTITY = PauliLabel(0, 0)

Syndrome = tuple[PauliLabel, ...]


@dataclass(frozen=True)
class CorrectionRule:
    """Pauli correction: a constant times the product of selected syndrome entries."""

    const: PauliLabel = IDENTITY
    indices: frozenset[int] = field(default_factory=frozenset)

    def evaluate(self, syndrome: Syndrome) -> PauliLabel:
        out = self.const
        for idx in self.indices:
            out = out * syndrome[idx - 1]
        return out


@dataclass(frozen=True)
class SwapAndCorrectProtocol:
    """BSM ordering plus syndrome-conditioned corrections for an N-link chain.

    ``rules[k]`` is the correction at node k for k = 0..N; ``bsm_order`` lists
    the repeater nodes 1..N-1 in measurement order.
    """

    n_links: int
    bsm_order: tuple[int, ...]
    rules: tuple[CorrectionRule, ...]

    def __post_init__(self):
        n = self.n_links
        if n < 2:
            raise ValueError(f"a chain needs at least 2 links, got {n}")
        if sorted(self.bsm_order) != list(range(1, n)):
            raise ValueError(f"bsm_order must permute 1..{n - 1}, got {self.bsm_order}")
        if len(self.rules) != n + 1:
            raise ValueError(f"need {n + 1} correction rules, got {len(self.rules)}")

    def correction(self, node: int, syndrome: Syndrome) -> PauliLabel:
        return self.rules[node].evaluate(syndrome)


def builtin_protocol(kind: str, n: int) -> SwapAndCorrectProtocol:
    """The two standard protocols: sequential teleportation and correct-at-end."""
    if n < 2:
        raise ValueError(f"a chain needs at least 2 links, got n={n}")
    order = tuple(range(1, n))
    if kind == "sequential":
        rules = [CorrectionRule(), CorrectionRule()]
        rules += [CorrectionRule(indices=frozenset({k - 1})) for k in range(2, n + 1)]
    elif kind == "correct_at_end":
        rules = [CorrectionRule() for _ in range(n)]
        rules.append(CorrectionRule(indices=frozenset(range(1, n))))
    else:
        raise ValueError(f"unknown protocol kind {kind!r}")
    return SwapAndCorrectProtocol(n, order, tuple(rules))


def random_valid_protocol(rng: np.random.Generator, n: int) -> SwapAndCorrectProtocol:
    """Draw arbitrary physical corrections and complete the last one for correctness.

    Node N's rule is solved from the requirement that the accumulated Pauli
    word cancels for every syndrome, so validity holds by construction.
    """
    order = tuple(rng.permutation(np.arange(1, n)))
    rules: list[CorrectionRule | None] = [None] * (n + 1)
    rules[0] = CorrectionRule(PauliLabel.from_index(int(rng.integers(4))),
                              frozenset(int(i) for i in range(1, n) if rng.random() < 0.5))
    measured: list[int] = []
    for node in order:
        allowed = list(measured)
        picked = frozenset(i for i in allowed if rng.random() < 0.5)
        rules[node] = CorrectionRule(PauliLabel.from_index(int(rng.integers(4))), picked)
        measured.append(int(node))
    # completion: const parts and index sets must cancel modulo the syndrome itself
    const = rules[0].const
    toggles: set[int] = set(rules[0].indices)
    for k in range(1, n):
        const = const * rules[k].const
        toggles ^= set(rules[k].indices)
        toggles ^= {k}
    rules[n] = CorrectionRule(const, frozenset(toggles))
    return SwapAndCorrectProtocol(n, order, tuple(rules))


@dataclass(frozen=True)
class ProtocolReport:
    valid: bool
    physical: bool
    failing_syndromes: tuple[Syndrome, ...]
    brute_checked: bool


def _all_syndromes(n: int):
    count = 4 ** (n - 1)
    for code in range(count):
        yield tuple(PauliLabel.from_index((code >> (2 * k)) & 3) for k in range(n - 1))


def validate_protocol(protocol: SwapAndCorrectProtocol) -> ProtocolReport:
    """Check physicality structurally and correctness over every syndrome.

    For chains of up to 4 links, also verifies by brute force that perfect
    input links are mapped to the perfect end-to-end state.
    """
    n = protocol.n_links
    if n > 8:
        raise ChainSizeError("correctness enumeration supported for n <= 8")
    physical = True
    measured: set[int] = set()
    for node in protocol.bsm_order:
        if not protocol.rules[node].indices <= measured:
            physical = False
        measured.add(node)
    failing = []
    for syn in _all_syndromes(n):
        word = protocol.correction(0, syn) * protocol.correction(n, syn)
        for j in range(1, n):
            word = word * syn[j - 1] * protocol.correction(j, syn)
        if word != IDENTITY:
            failing.append(syn)
    brute_checked = False
    if physical and not failing and n <= 4:
        brute_checked = True
        perfect = [qcore.pure_density(bell_vector(0, 0), (f"L{k}a", f"L{k}b"))
                   for k in range(1, n + 1)]
        target = bell_vector(0, 0)
        for syn in _all_syndromes(n):
            state, prob = run_chain_postselected(perfect, protocol, syn)
            if abs(prob - 0.25 ** (n - 1)) > 1e-12 or state.fidelity(target) < 1 - 1e-10:
                failing.append(syn)
    return ProtocolReport(physical and not failing, physical, tuple(failing), brute_checked)


def _chain_registers(links) -> list[DensityOperator]:
    out = []
    for k, link in enumerate(links, start=1):
        if link.n_qubits != 2:
            raise ChainSizeError("chain links must be 2-qubit states")
        out.append(DensityOperator(link.matrix, (f"L{k}a", f"L{k}b")))
    return out


def run_chain_postselected(links, protocol: SwapAndCorrectProtocol,
                           syndrome: Syndrome):
    """One syndrome branch of the chain, by dense simulation.

    Applies every correction dictated by the protocol, projects each repeater
    node onto its measured Bell state, and returns the normalised end-to-end
    state together with the branch probability.  Limited to 5 links (10
    qubits); longer chains must use the Bell-diagonal fast path.
    """
    links = list(links)
    n = len(links)
    if n != protocol.n_links:
        raise ChainSizeError(f"protocol is for {protocol.n_links} links, got {n}")
    if n > BRUTE_MAX_LINKS:
        raise ChainSizeError(
            f"dense path supports up to {BRUTE_MAX_LINKS} links; use bd_chain beyond")
    if len(syndrome) != n - 1:
        raise ValueError(f"syndrome must have {n - 1} entries")
    relabeled = _chain_registers(links)
    big = relabeled[0]
    for piece in relabeled[1:]:
        big = qcore.tensor(big, piece)
    # corrections first (end nodes act on untouched registers, so order is free)
    for node in range(n + 1):
        c = protocol.correction(node, syndrome)
        if c == IDENTITY:
            continue
        if node == 0:
            reg = "L1a"
        elif node == n:
            reg = f"L{n}b"
        else:
            reg = f"L{node}b"
        big = qcore.apply_local(big, c.matrix(), reg)
    prob = 1.0
    for node in range(1, n):
        s = syndrome[node - 1]
        w, big = qcore.project_pair(big, (f"L{node}b", f"L{node + 1}a"), bell_vector(s.i, s.j))
        prob *= w
        if big is None:
            return None, 0.0
    return density_operator(big.matrix, ("L1a", f"L{n}b")), prob


def run_chain_nonpostselected(links, protocol: SwapAndCorrectProtocol) -> DensityOperator:
    """Average over all 4^(N-1) corrected syndrome branches."""
    links = list(links)
    n = len(links)
    acc = np.zeros((4, 4), dtype=complex)
    for syn in _all_syndromes(n):
        state, prob = run_chain_postselected(links, protocol, syn)
        if state is not None:
            acc += prob * state.matrix
    return density_operator(acc, ("L1a", f"L{n}b"))


def bd_chain(coeff_list) -> BellDiagonalCoeffs:
    """Left fold of the Bell-diagonal swap map; O(N) for any chain length."""
    coeff_list = list(coeff_list)
    if not coeff_list:
        raise ValueError("bd_chain needs at least one link")
    out = coeff_list[0]
    for nxt in coeff_list[1:]:
        out = bd_swap(out, nxt)
    return out


def chain_fidelity_bounds(fidelities) -> tuple[float, float]:
    """(product lower bound, rank-two upper bound) on the end-to-end fidelity."""
    fs = np.asarray(list(fidelities), dtype=float)
    if np.any((fs < 0) | (fs > 1)):
        raise ValueError("link fidelities must lie in [0,1]")
    lower = float(np.prod(fs))
    upper = float(0.5 * np.prod(2 * fs - 1) + 0.5)
    return lower, upper


@dataclass(frozen=True)
class DistributionEntry:
    state: DensityOperator
    probability: float
    syndrome_count: int


@dataclass(frozen=True)
class OutcomeDistribution:
    entries: tuple[DistributionEntry, ...]

    @property
    def total_probability(self) -> float:
        return float(sum(e.probability for e in self.entries))

    def average_state(self) -> DensityOperator:
        acc = sum(e.probability * e.state.matrix for e in self.entries)
        return density_operator(acc, self.entries[0].state.registers)


MAX_DISTRIBUTION_ENTRIES = 500_000


def _is_correct_at_end(protocol: SwapAndCorrectProtocol) -> bool:
    n = protocol.n_links
    ref = builtin_protocol("correct_at_end", n)
    return protocol.rules == ref.rules


def _round_key(matrix: np.ndarray) -> bytes:
    r = np.round(matrix.real, 9) + 0.0
    i = np.round(matrix.imag, 9) + 0.0
    return r.tobytes() + i.tobytes()


def outcome_distribution(link, n: int, protocol: SwapAndCorrectProtocol) -> OutcomeDistribution:
    """Distribution of corrected end-to-end states for identical links.

    Syndromes are enumerated by sequential pairwise BSM projections while the
    pending end-node correction (the product of outcomes seen so far) is
    tracked exactly; numerically identical intermediate states are merged
    after canonical rounding, which keeps the enumeration polynomial for
    structured links.  Only the correct-at-end protocol is supported.
    """
    if isinstance(link, (list, tuple)):
        links = list(link)
        if len(links) != n:
            raise ValueError("number of links does not match n")
        same = all(np.abs(l.matrix - links[0].matrix).max() < 1e-14 for l in links)
        if not same and n > BRUTE_MAX_LINKS:
            raise UnsupportedConfigurationError(
                "distinct links are only supported up to 5 links")
    else:
        links = [link] * n
    if n < 2:
        raise ValueError("outcome_distribution needs n >= 2")
    if not _is_correct_at_end(protocol):
        raise UnsupportedConfigurationError(
            "outcome_distribution supports the correct_at_end protocol only")
    links = _chain_registers(links)
    # pending[(state key, pauli index)] = [exact unnormalised sum, prob, count]
    first = links[0]
    pending = {(_round_key(first.matrix), 0): [first.matrix.copy(), 1.0, 1]}
    for step in range(1, n):
        nxt = links[step]
        fresh: dict = {}
        for (_, gidx), (mat, prob, count) in pending.items():
            omega = DensityOperator(mat / np.trace(mat).real, ("left", "mid"))
            paired = qcore.tensor(omega, DensityOperator(nxt.matrix, ("mid2", "right")))
            for lab in qcore.ALL_LABELS:
                w, rest = qcore.project_pair(paired, ("mid", "mid2"),
                                             bell_vector(lab.i, lab.j))
                if rest is None:
                    continue
                new_prob = prob * w
                new_g = gidx ^ lab.index
                key = (_round_key(rest.matrix), new_g)
                slot = fresh.setdefault(key, [np.zeros((4, 4), dtype=complex), 0.0, 0])
                slot[0] += new_prob * rest.matrix
                slot[1] += new_prob
                slot[2] += count
            if len(fresh) > MAX_DISTRIBUTION_ENTRIES:
                raise UnsupportedConfigurationError(
                    "state merging exceeded the entry budget; no exact enumeration "
                    "is available for this link family at this n")
        pending = fresh
    # fold the accumulated correction into the right qubit and merge final classes
    final: dict = {}
    for (_, gidx), (mat, prob, count) in pending.items():
        g = PauliLabel.from_index(gidx)
        state = DensityOperator(mat / prob, ("left", "right"))
        if g != IDENTITY:
            state = qcore.apply_local(state, g.matrix(), "right")
        key = _round_key(state.matrix)
        slot = final.setdefault(key, [np.zeros((4, 4), dtype=complex), 0.0, 0])
        slot[0] += prob * state.matrix
        slot[1] += prob
        slot[2] += count
    entries = []
    for mat, prob, count in sorted(final.values(), key=lambda s: -s[1]):
        entries.append(DistributionEntry(
            density_operator(mat / prob, ("L1a", f"L{n}b")), prob, count))
    return OutcomeDistribution(tuple(entries))
