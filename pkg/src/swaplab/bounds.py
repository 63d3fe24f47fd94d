"""Fidelity bounds for postselected swapping of states p|Psi_00><Psi_00| + (1-p)sigma.

The exact ceiling 1 - 2p(1-F) and the analytic floor come in closed form.
The tighter floor relaxes the product-state domain to PPT states and solves,
for each fixed swap probability delta, a semidefinite program over operators
invariant under U (x) U (x) U (x) U.  Those operators are spanned by the 24
register permutations, which cuts the variable count from 256 to 23 and makes
whole-grid sweeps cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

from . import qcore, sdp
from .errors import StateValidationError
from .qcore import PauliLabel, bell_projector
from .states import opt_state
from .swap import all_swap_outcomes

REGISTER_ORDER = ("B1", "A1", "A2", "B2")  # tensor positions 0..3
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _check_domain(p: float, F: float) -> None:
    if not 0 <= p <= F <= 1:
        raise StateValidationError(f"need 0 <= p <= F <= 1, got p={p}, F={F}")


def f_max(p: float, F: float) -> float:
    """Exact maximum post-swap fidelity over the (p, F) state family."""
    _check_domain(p, F)
    return 1 - 2 * p * (1 - F)


def f_min_analytic(p: float, F: float) -> float:
    """Closed-form lower bound on the minimum post-swap fidelity."""
    _check_domain(p, F)
    return p * (2 * F - p) / (1 + (1 - p) ** 2)


def f_tilde(p: float, F: float) -> float:
    return (F - p) / (1 - p) if p < 1 else 1.0


def delta_tilde(p: float, delta: float) -> float:
    return (4 * delta - 2 * p + p * p) / (4 * (1 - p) ** 2)


def delta_from_tilde(p: float, dt: float) -> float:
    return p / 2 - p * p / 4 + (1 - p) ** 2 * dt


# ---------------------------------------------------------------------------
# permutation algebra on four qubit registers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PermutationOperator:
    tau: tuple[int, ...]
    matrix: np.ndarray

    @property
    def cycle_type(self) -> tuple[int, ...]:
        seen, lengths = set(), []
        for start in range(4):
            if start in seen:
                continue
            length, cur = 0, start
            while cur not in seen:
                seen.add(cur)
                cur = self.tau[cur]
                length += 1
            lengths.append(length)
        return tuple(sorted(lengths, reverse=True))


def _perm_matrix(tau: tuple[int, ...]) -> np.ndarray:
    inv = [tau.index(i) for i in range(4)]
    m = np.zeros((16, 16))
    for col in range(16):
        bits = [(col >> (3 - k)) & 1 for k in range(4)]
        row_bits = [bits[inv[i]] for i in range(4)]
        row = sum(b << (3 - i) for i, b in enumerate(row_bits))
        m[row, col] = 1.0
    return m


def _compose(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    # (a o b)(x) = a(b(x)); matches M_a @ M_b = M_(a o b)
    return tuple(a[b[i]] for i in range(4))


def _invert(tau: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(tau.index(i) for i in range(4))


TRACE_BY_CYCLE_TYPE = {
    (1, 1, 1, 1): 16,
    (2, 1, 1): 8,
    (2, 2): 4,
    (3, 1): 4,
    (4,): 2,
}


@dataclass(frozen=True)
class PermutationAlgebra:
    operators: tuple[PermutationOperator, ...]
    trace_table: dict

    def index(self, tau: tuple[int, ...]) -> int:
        return self._lookup[tau]

    def trace_of(self, tau: tuple[int, ...]) -> int:
        op = self.operators[self.index(tau)]
        return self.trace_table[op.cycle_type]


def build_permutation_algebra() -> PermutationAlgebra:
    """All 24 register-permutation operators, with their exact trace table."""
    ops = tuple(PermutationOperator(tau, qcore._frozen(_perm_matrix(tau)))
                for tau in permutations(range(4)))
    algebra = PermutationAlgebra(ops, dict(TRACE_BY_CYCLE_TYPE))
    object.__setattr__(algebra, "_lookup", {op.tau: k for k, op in enumerate(ops)})
    for op in ops:
        tr = int(round(np.trace(op.matrix).real))
        if tr != algebra.trace_table[op.cycle_type]:
            raise AssertionError(f"trace table mismatch for {op.tau}")
    return algebra


_SWAP_A1A2 = (0, 2, 1, 3)
_SWAP_B1A1 = (1, 0, 2, 3)
_SWAP_A2B2 = (0, 1, 3, 2)
_SWAP_B1B2 = (3, 1, 2, 0)


def coefficient_vectors(algebra: PermutationAlgebra):
    """The five linear functionals of the symmetrised problem, over all 24 taus.

    Each is assembled purely from permutation traces: projecting onto the
    singlet on a register pair is (I - SWAP)/2 on that pair.
    """
    taus = [op.tau for op in algebra.operators]
    tr = algebra.trace_of

    def vec(fn):
        return np.array([fn(t) for t in taus], dtype=float)

    x = vec(lambda t: tr(t))
    v = vec(lambda t: 0.5 * (tr(t) - tr(_compose(_SWAP_A1A2, t))))
    w1 = vec(lambda t: 0.5 * (tr(t) - tr(_compose(_SWAP_B1A1, t))))
    w2 = vec(lambda t: 0.5 * (tr(t) - tr(_compose(_SWAP_A2B2, t))))
    u = vec(lambda t: 0.25 * (
        tr(t)
        - tr(_compose(_SWAP_A1A2, t))
        - tr(_compose(_SWAP_B1B2, t))
        + tr(_compose(_SWAP_B1B2, _compose(_SWAP_A1A2, t)))
    ))
    return u, v, w1, w2, x


def _pt_a2b2(m: np.ndarray) -> np.ndarray:
    t = m.reshape((2,) * 8).copy()
    t = np.swapaxes(t, 2, 6)
    t = np.swapaxes(t, 3, 7)
    return t.reshape(16, 16)


@dataclass(frozen=True)
class InvariantBasis:
    """Hermitian generators spanning the commutant of U^(x4), plus functional rows."""

    generators: np.ndarray          # (r, 16, 16) complex Hermitian
    generators_pt: np.ndarray       # partial transpose on (A2, B2)
    rows: dict                      # functional name -> coefficient row (r,)
    symmetric_mask: np.ndarray      # True where the generator is real symmetric


@lru_cache(maxsize=1)
def invariant_basis() -> InvariantBasis:
    algebra = build_permutation_algebra()
    u, v, w1, w2, x = coefficient_vectors(algebra)
    taus = [op.tau for op in algebra.operators]
    mats = [op.matrix for op in algebra.operators]

    gens, coeff_cols, is_sym = [], [], []
    done = set()
    for k, tau in enumerate(taus):
        kinv = algebra.index(_invert(tau))
        pair = tuple(sorted((k, kinv)))
        if pair in done:
            continue
        done.add(pair)
        a = (mats[k] + mats[k].T) / 2
        gens.append(a.astype(complex))
        col = np.zeros(24)
        col[k] += 0.5
        col[kinv] += 0.5
        coeff_cols.append(col)
        is_sym.append(True)
        if k != kinv:
            b = 1j * (mats[k] - mats[k].T) / 2
            gens.append(b)
            colb = np.zeros(24)  # inverse-antisymmetric: every functional row vanishes
            coeff_cols.append(colb)
            is_sym.append(False)

    gens = np.array(gens)
    cols = np.array(coeff_cols)  # (r, 24)
    is_sym = np.array(is_sym)

    # prune linear dependencies among the generators (rank-revealing QR)
    flat = np.stack([np.concatenate([g.real.ravel(), g.imag.ravel()]) for g in gens])
    from scipy.linalg import qr

    _, _, piv = qr(flat.T, pivoting=True, mode="economic")
    rank = np.linalg.matrix_rank(flat, tol=1e-9)
    keep = np.sort(piv[:rank])
    gens = gens[keep]
    cols = cols[keep]
    is_sym = is_sym[keep]

    rows = {
        name: cols @ vecf
        for name, vecf in (("u", u), ("v", v), ("w1", w1), ("w2", w2), ("x", x))
    }
    gens_pt = np.array([_pt_a2b2(g) for g in gens])

    # cross-validate the trace-built rows against direct inner products
    psi11 = bell_projector(1, 1)
    pv = qcore.embed_pair_operator(psi11, (1, 2), 4)
    pw1 = qcore.embed_pair_operator(psi11, (0, 1), 4)
    pw2 = qcore.embed_pair_operator(psi11, (2, 3), 4)
    pu = qcore.embed_pair_operator(psi11, (0, 3), 4) @ pv
    for name, op in (("u", pu), ("v", pv), ("w1", pw1), ("w2", pw2), ("x", np.eye(16))):
        direct = np.real(np.einsum("lab,ba->l", gens, op.astype(complex)))
        if np.abs(direct - rows[name]).max() > 1e-9:
            raise AssertionError(f"coefficient vector {name} disagrees with direct traces")

    return InvariantBasis(gens, gens_pt, rows, is_sym)


@lru_cache(maxsize=1)
def _zero_fidelity_face():
    """Exact face data for noise orthogonal to the target on both pairs.

    When both pair fidelities vanish, any feasible operator and its partial
    transpose are supported on the orthogonal complement of the two singlet
    subspaces (a 9-dimensional space).  Projecting the invariant generators
    onto that face restores a strictly feasible interior, so the boundary of
    the (p, F) wedge solves as cleanly as its inside.
    """
    basis = invariant_basis()
    mask = basis.symmetric_mask
    gens = basis.generators[mask]
    psi11 = bell_projector(1, 1)
    p1 = qcore.embed_pair_operator(psi11, (0, 1), 4)
    p2 = qcore.embed_pair_operator(psi11, (2, 3), 4)
    evals, evecs = np.linalg.eigh(p1 + p2)
    v = evecs[:, evals < 0.5]
    pi = v @ v.conj().T
    face_gens = pi @ gens @ pi
    # prune generators that vanish or repeat on the face
    flat = np.stack([np.concatenate([g.real.ravel(), g.imag.ravel()]) for g in face_gens])
    from scipy.linalg import qr

    _, _, piv = qr(flat.T, pivoting=True, mode="economic")
    rank = np.linalg.matrix_rank(flat, tol=1e-9)
    keep = np.sort(piv[:rank])
    face_gens = face_gens[keep]
    face_pt = np.array([_pt_a2b2(g) for g in face_gens])
    pv = qcore.embed_pair_operator(psi11, (1, 2), 4)
    pu = qcore.embed_pair_operator(psi11, (0, 3), 4) @ pv
    row_u = np.real(np.einsum("lab,ba->l", face_gens, pu.astype(complex)))
    row_v = np.real(np.einsum("lab,ba->l", face_gens, pv.astype(complex)))
    row_x = np.real(np.einsum("lab,ab->l", face_gens, np.eye(16, dtype=complex)))
    # the partial transpose of a feasible operator is face-supported as well;
    # off-face components must vanish identically
    offface = face_pt - pi @ face_pt @ pi
    supp_rows = np.concatenate(
        [offface.real.reshape(len(face_gens), -1),
         offface.imag.reshape(len(face_gens), -1)], axis=1).T
    keep_rows = np.abs(supp_rows).max(axis=1) > 1e-12
    supp_rows = supp_rows[keep_rows]
    blocks = [
        (np.zeros((v.shape[1],) * 2, dtype=complex),
         v.conj().T @ face_gens @ v),
        (np.zeros((v.shape[1],) * 2, dtype=complex),
         v.conj().T @ face_pt @ v),
    ]
    return row_u, row_v, row_x, supp_rows, blocks


def _face_problem(dt: float | None, sense: str) -> sdp.SdpProblem:
    row_u, row_v, row_x, supp_rows, blocks = _zero_fidelity_face()
    eqs = [(row_x, 1.0)]
    if dt is not None:
        eqs.append((row_v, dt))
    eqs.extend((row, 0.0) for row in supp_rows)
    sign = {"min": 1.0, "max": -1.0}[sense]
    objective = sign * (row_u if dt is not None else row_v)
    return sdp.make_problem(objective, eqs, blocks)


@dataclass(frozen=True)
class SymmetrizedProblem:
    p: float
    F: float
    delta: float
    sense: str
    u: np.ndarray
    v: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    x: np.ndarray
    f_tilde: float
    delta_tilde: float


def symmetrized_meta(p: float, F: float, delta: float, sense: str) -> SymmetrizedProblem:
    algebra = build_permutation_algebra()
    u, v, w1, w2, x = coefficient_vectors(algebra)
    return SymmetrizedProblem(p, F, delta, sense, u, v, w1, w2, x,
                              f_tilde(p, F), delta_tilde(p, delta))


def build_symmetrized_sdp(p: float, F: float, delta: float, sense: str = "min",
                          transpose_symmetric: bool = True) -> sdp.SdpProblem:
    """PPT relaxation over invariant operators, at fixed swap probability.

    The variable count after the Hermiticity reduction is bounded by 48 (14
    in practice); the two PSD blocks are the operator and its partial
    transpose on (A2, B2).  All constraint operators are real symmetric, so
    the map sigma -> sigma^T preserves the feasible set and the objective;
    with ``transpose_symmetric`` an optimum is sought on the fixed-point set,
    dropping the antisymmetric generators and keeping the data real.
    """
    _check_domain(p, F)
    ft = f_tilde(p, F)
    dt = delta_tilde(p, delta)
    if not -1e-12 <= ft <= 1 + 1e-12:
        raise StateValidationError(f"noise fidelity {ft} outside [0,1]")
    if not -1e-12 <= dt <= 1 + 1e-12:
        raise StateValidationError(f"noise swap probability {dt} outside [0,1]")
    if ft < 1e-12 and transpose_symmetric:
        return _face_problem(dt, sense)
    basis = invariant_basis()
    if transpose_symmetric:
        mask = basis.symmetric_mask
        gens, gens_pt = basis.generators[mask], basis.generators_pt[mask]
        rows = {k: r[mask] for k, r in basis.rows.items()}
    else:
        gens, gens_pt, rows = basis.generators, basis.generators_pt, basis.rows
    sign = {"min": 1.0, "max": -1.0}[sense]
    zero = np.zeros((16, 16), dtype=complex)
    return sdp.make_problem(
        sign * rows["u"],
        [
            (rows["v"], dt),
            (rows["w1"], ft),
            (rows["w2"], ft),
            (rows["x"], 1.0),
        ],
        [(zero, gens), (zero, gens_pt)],
    )


@lru_cache(maxsize=1)
def _hermitian_basis_16():
    out = []
    for i in range(16):
        e = np.zeros((16, 16), dtype=complex)
        e[i, i] = 1
        out.append(e)
    for i in range(16):
        for j in range(i + 1, 16):
            e = np.zeros((16, 16), dtype=complex)
            e[i, j] = e[j, i] = 1
            out.append(e)
            e = np.zeros((16, 16), dtype=complex)
            e[i, j] = 1j
            e[j, i] = -1j
            out.append(e)
    return np.array(out)


def build_unsymmetrized_sdp(p: float, F: float, delta: float, sense: str = "min") -> sdp.SdpProblem:
    """The same PPT relaxation over all 256 Hermitian parameters; oracle path."""
    _check_domain(p, F)
    ft = f_tilde(p, F)
    dt = delta_tilde(p, delta)
    basis = _hermitian_basis_16()
    psi00 = bell_projector(0, 0)
    pv = qcore.embed_pair_operator(psi00, (1, 2), 4)
    pw1 = qcore.embed_pair_operator(psi00, (0, 1), 4)
    pw2 = qcore.embed_pair_operator(psi00, (2, 3), 4)
    pu = qcore.embed_pair_operator(psi00, (0, 3), 4) @ pv

    def row(op):
        return np.real(np.einsum("lab,ba->l", basis, op.astype(complex)))

    sign = {"min": 1.0, "max": -1.0}[sense]
    zero = np.zeros((16, 16), dtype=complex)
    basis_pt = np.array([_pt_a2b2(g) for g in basis])
    return sdp.make_problem(
        sign * row(pu),
        [(row(pv), dt), (row(pw1), ft), (row(pw2), ft), (row(np.eye(16)), 1.0)],
        [(zero, basis), (zero, basis_pt)],
    )


def _acceptable(sol: sdp.SdpSolution) -> bool:
    # a stalled iterate with a clean primal certificate and a small verified
    # duality gap is still a valid bound at the sweep tolerances
    if sol.status == sdp.OPTIMAL:
        return True
    return (
        sol.status == sdp.MAX_ITERATIONS
        and sol.max_equality_residual <= 1e-7
        and sol.min_block_eigenvalue >= -1e-7
        and not np.isnan(sol.duality_gap)
        and abs(sol.duality_gap) <= 2e-6
    )


def _solve_h(p: float, F: float, delta: float, sense: str, tol: float = 1e-8) -> float:
    problem = build_symmetrized_sdp(p, F, delta, sense)
    sol = sdp.solve(problem, tol=tol)
    if not _acceptable(sol):
        raise RuntimeError(
            f"SDP solve failed with status {sol.status} at p={p}, F={F}, delta={delta}")
    value = sol.objective_value
    return value if sense == "min" else -value


def fidelity_from_h(p: float, F: float, delta: float, h: float) -> float:
    return (F * p / 2 - p * p / 4 + (1 - p) ** 2 * h) / delta


def delta_region(p: float, F: float, tol: float = 1e-8) -> tuple[float, float]:
    """Feasible range of the postselected swap probability, via two SDP solves."""
    _check_domain(p, F)
    if p == 1.0:
        return 0.25, 0.25
    ft = f_tilde(p, F)
    if ft < 1e-12:
        lo_sol = sdp.solve(_face_problem(None, "min"), tol=tol)
        hi_sol = sdp.solve(_face_problem(None, "max"), tol=tol)
    else:
        basis = invariant_basis()
        mask = basis.symmetric_mask
        rows = {k: r[mask] for k, r in basis.rows.items()}
        zero = np.zeros((16, 16), dtype=complex)
        eqs = [(rows["w1"], ft), (rows["w2"], ft), (rows["x"], 1.0)]
        blocks = [(zero, basis.generators[mask]), (zero, basis.generators_pt[mask])]
        lo_sol = sdp.solve(sdp.make_problem(rows["v"], eqs, blocks), tol=tol)
        hi_sol = sdp.solve(sdp.make_problem(-rows["v"], eqs, blocks), tol=tol)
    for sol in (lo_sol, hi_sol):
        if not _acceptable(sol):
            raise RuntimeError(
                f"delta_region solve failed ({sol.status}) at p={p}, F={F}")
    dt_lo = lo_sol.objective_value
    dt_hi = -hi_sol.objective_value
    return delta_from_tilde(p, dt_lo), delta_from_tilde(p, dt_hi)


def _golden_section(fun, lo: float, hi: float, xtol: float, sense: str):
    sgn = 1.0 if sense == "min" else -1.0
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = sgn * fun(c), sgn * fun(d)
    while (b - a) > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = sgn * fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = sgn * fun(d)
    xs = c if fc <= fd else d
    return xs, sgn * min(fc, fd)


def _optimize_over_delta(p: float, F: float, sense: str, n_grid: int = 100,
                         xtol: float = 1e-6, region: tuple[float, float] | None = None):
    if region is None:
        region = delta_region(p, F)
    lo, hi = region
    width = hi - lo
    if width <= 1e-9:
        delta = (lo + hi) / 2
        h = _solve_h(p, F, delta, sense)
        return fidelity_from_h(p, F, delta, h), delta
    pad = max(1e-9, 1e-6 * width)
    lo_in, hi_in = lo + pad, hi - pad
    cache: dict[float, float] = {}

    def value(delta: float) -> float:
        key = round(delta, 12)
        if key not in cache:
            cache[key] = fidelity_from_h(p, F, delta, _solve_h(p, F, delta, sense))
        return cache[key]

    grid = np.linspace(lo_in, hi_in, n_grid)
    vals = np.array([value(d) for d in grid])
    k = int(np.argmin(vals)) if sense == "min" else int(np.argmax(vals))
    a = grid[max(0, k - 1)]
    b = grid[min(n_grid - 1, k + 1)]
    if b - a > xtol:
        d_star, v_star = _golden_section(value, a, b, xtol, sense)
    else:
        d_star, v_star = grid[k], vals[k]
    # the refined point should not be worse than the best grid point
    if (sense == "min" and vals[k] < v_star) or (sense == "max" and vals[k] > v_star):
        d_star, v_star = grid[k], float(vals[k])
    return float(v_star), float(d_star)


def f_min_sdp(p: float, F: float, region: tuple[float, float] | None = None) -> tuple[float, float]:
    """PPT lower bound on the minimum post-swap fidelity and its minimising delta."""
    _check_domain(p, F)
    if F == 1.0 or p == 1.0:
        return 1.0 if F == 1.0 else f_min_analytic(p, F), 0.25
    return _optimize_over_delta(p, F, "min")if region is None else \
        _optimize_over_delta(p, F, "min", region=region)


def f_max_sdp(p: float, F: float, region: tuple[float, float] | None = None) -> tuple[float, float]:
    """PPT upper bound and its maximising delta; a cross-check of the exact ceiling."""
    _check_domain(p, F)
    if F == 1.0 or p == 1.0:
        return 1.0 if F == 1.0 else f_max(p, F), 0.25
    return _optimize_over_delta(p, F, "max") if region is None else \
        _optimize_over_delta(p, F, "max", region=region)


def fidelity_vs_delta(p: float, F: float, n_points: int = 100):
    """Rate-fidelity trade-off: (delta, lower, upper) on a grid of the feasible region."""
    _check_domain(p, F)
    lo, hi = delta_region(p, F)
    width = hi - lo
    pad = max(1e-9, 1e-6 * max(width, 1e-6))
    grid = np.linspace(lo + pad, hi - pad, n_points) if width > 2 * pad else np.array([(lo + hi) / 2])
    rows = []
    for delta in grid:
        h_lo = _solve_h(p, F, float(delta), "min")
        h_hi = _solve_h(p, F, float(delta), "max")
        rows.append((
            float(delta),
            fidelity_from_h(p, F, float(delta), h_lo),
            fidelity_from_h(p, F, float(delta), h_hi),
        ))
    return rows


def psi_witness_min_fidelity(p: float, F: float) -> float:
    """Lowest-fidelity BSM branch when swapping two copies of the ceiling state."""
    state = opt_state(p, F)
    fids = [o.fidelity for o in all_swap_outcomes(state, state) if o.defined]
    return min(fids)


@dataclass(frozen=True)
class BoundSweepRow:
    p: float
    F: float
    f_max: float
    f_min_analytic: float
    f_min_sdp: float
    delta_star: float
    bd_lower: float
    bd_upper: float
    f_werner: float
    psi_witness: float | None = None

    def check_ordering(self, slack: float = 1e-6) -> bool:
        chain = (
            self.f_min_analytic, self.f_min_sdp, self.bd_lower,
            self.f_werner, self.bd_upper, self.f_max,
        )
        return all(a <= b + slack for a, b in zip(chain, chain[1:]))


def bound_sweep_row(p: float, F: float, with_witness: bool = False) -> BoundSweepRow:
    lo, d_star = f_min_sdp(p, F)
    return BoundSweepRow(
        p=p, F=F,
        f_max=f_max(p, F),
        f_min_analytic=f_min_analytic(p, F),
        f_min_sdp=lo,
        delta_star=d_star,
        bd_lower=F * F,
        bd_upper=F * F + (1 - F) ** 2,
        f_werner=F * F + (1 - F) ** 2 / 3,
        psi_witness=psi_witness_min_fidelity(p, F) if with_witness else None,
    )


def sweep_fixed_f(F: float, p_steps: int) -> list[BoundSweepRow]:
    if p_steps < 1:
        raise ValueError("p_steps must be at least 1")
    return [bound_sweep_row(float(p), F) for p in np.linspace(0.0, F, p_steps)]


def sweep_fixed_p(p: float, f_lo: float, f_hi: float, f_steps: int) -> list[BoundSweepRow]:
    if f_steps < 1:
        raise ValueError("f_steps must be at least 1")
    if not p <= f_lo <= f_hi <= 1:
        raise ValueError("need p <= f_lo <= f_hi <= 1")
    return [bound_sweep_row(p, float(f), with_witness=True)
            for f in np.linspace(f_lo, f_hi, f_steps)]
