"""Dense semidefinite programming for small problems.

Solves  minimize c.x  subject to  A x = b  and, for each block,
G0 + sum_i x_i G_i >= 0 (Hermitian PSD).  Equalities are eliminated onto
their affine subspace, a phase-I problem produces a strictly feasible start
(performing facial reduction when the feasible set has empty interior), and
the main iteration is primal-dual path following with Nesterov-Todd scaling.
Internally all blocks are merged into one block-diagonal cone, which keeps
the hot loop free of per-block Python overhead; everything is dense and sized
for a few hundred variables at most.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CertificateError, NotHermitianError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
MAX_ITERATIONS = "max_iterations"

_HERM_TOL = 1e-10


@dataclass(frozen=True)
class SdpBlock:
    """Affine PSD constraint g0 + sum_i x_i gs[i] >= 0."""

    g0: np.ndarray
    gs: np.ndarray  # shape (n_vars, d, d)

    def __post_init__(self):
        if np.abs(self.g0 - self.g0.conj().T).max() > _HERM_TOL:
            raise NotHermitianError("SDP block matrices must be Hermitian")
        if np.abs(self.gs - self.gs.conj().transpose(0, 2, 1)).max() > _HERM_TOL:
            raise NotHermitianError("SDP block matrices must be Hermitian")

    @property
    def dim(self) -> int:
        return self.g0.shape[0]

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return self.g0 + np.tensordot(x, self.gs, axes=(0, 0))


@dataclass(frozen=True)
class SdpProblem:
    objective: np.ndarray
    eq_matrix: np.ndarray
    eq_rhs: np.ndarray
    blocks: tuple[SdpBlock, ...]

    @property
    def n_vars(self) -> int:
        return self.objective.shape[0]

    def __post_init__(self):
        n = self.n_vars
        if self.eq_matrix.size and self.eq_matrix.shape[1] != n:
            raise ValueError("equality matrix width does not match variable count")
        for blk in self.blocks:
            if blk.gs.shape[0] != n:
                raise ValueError("block generator count does not match variable count")


@dataclass
class SdpSolution:
    x: np.ndarray
    objective_value: float
    status: str
    duality_gap: float
    max_equality_residual: float
    min_block_eigenvalue: float
    dual_objective: float = np.nan
    iterations: int = 0


def make_problem(objective, equalities, blocks) -> SdpProblem:
    """Convenience constructor from (vector, rhs) equality pairs."""
    c = np.asarray(objective, dtype=float)
    if equalities:
        A = np.array([np.asarray(a, dtype=float) for a, _ in equalities])
        b = np.array([float(v) for _, v in equalities])
    else:
        A = np.zeros((0, c.size))
        b = np.zeros(0)
    blks = tuple(
        SdpBlock(np.asarray(g0, dtype=complex), np.asarray(gs, dtype=complex))
        for g0, gs in blocks
    )
    return SdpProblem(c, A, b, blks)


# ---------------------------------------------------------------------------
# core path following on: min c.z  s.t.  G0 + sum_l z_l G[l] >= 0 (one block)
# ---------------------------------------------------------------------------


def _chol(m: np.ndarray) -> np.ndarray | None:
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        return None


def _max_step(Linv: np.ndarray, delta: np.ndarray) -> float:
    """Largest alpha with S + alpha*delta > 0, where Linv = chol(S)^-1."""
    sym = Linv @ delta @ Linv.conj().T
    lo = np.linalg.eigvalsh((sym + sym.conj().T) / 2)[0]
    if lo >= -1e-14:
        return np.inf
    return -1.0 / lo


@dataclass
class _CoreResult:
    z: np.ndarray
    dual: np.ndarray
    gap: float
    rd_norm: float
    iterations: int
    converged: bool


def _core_solve(c, G0, G, gap_tol, rd_tol, max_iter, z0, stop_early=None,
                step_cap=None):
    """NT-scaled path following on a single PSD block; z0 must be strictly interior.

    Convergence uses ``gap <= gap_tol * max(1, |c.z|)`` so badly off-centre
    starting points (e.g. from an unbounded phase-I ray) cannot inflate the
    target.  Returns the iterate with the best merit seen when stalling.
    """
    d = G0.shape[0]
    n = c.size
    # run in real arithmetic when the data allows it; halves the LAPACK cost
    if np.abs(G0.imag).max() < 1e-14 and np.abs(G.imag).max() < 1e-14:
        G0 = np.ascontiguousarray(G0.real)
        G = np.ascontiguousarray(G.real)
        dtype = float
    else:
        dtype = complex
    Gflat = G.reshape(n, d * d)
    GflatT = np.ascontiguousarray(G.transpose(0, 2, 1).reshape(n, d * d))
    z = z0.copy()
    S = G0 + np.tensordot(z, G, axes=(0, 0))
    Z = np.eye(d, dtype=dtype)
    best = None
    best_merit = np.inf
    for it in range(1, max_iter + 1):
        gap = float(np.real(np.einsum("ab,ba->", S, Z)))
        rd = c - np.real(GflatT @ Z.ravel())
        rd_norm = float(np.abs(rd).max()) if rd.size else 0.0
        scale = max(1.0, abs(float(c @ z)))
        merit = abs(gap) / scale + rd_norm
        if merit < best_merit:
            best_merit = merit
            best = _CoreResult(z.copy(), Z.copy(), gap, rd_norm, it, False)
        if gap <= gap_tol * scale and rd_norm <= rd_tol:
            return _CoreResult(z.copy(), Z.copy(), gap, rd_norm, it, True)
        if stop_early is not None and stop_early(z):
            return _CoreResult(z.copy(), Z.copy(), gap, rd_norm, it, True)
        mu = gap / d

        Ls = _chol(S)
        Lz = _chol(Z)
        if Ls is None or Lz is None:
            break
        T = Ls.conj().T @ Z @ Ls
        evals, evecs = np.linalg.eigh((T + T.conj().T) / 2)
        if evals[0] <= 0:
            break
        Thalf = (evecs * np.sqrt(evals)) @ evecs.conj().T
        Linv = np.linalg.inv(Ls)
        Lzinv = np.linalg.inv(Lz)
        Winv = Linv.conj().T @ Thalf @ Linv
        Winv = (Winv + Winv.conj().T) / 2
        Sinv = Linv.conj().T @ Linv

        H = Winv @ G @ Winv  # (n, d, d) via broadcasting
        M = np.real(Gflat @ H.transpose(0, 2, 1).reshape(n, d * d).T)
        M = (M + M.T) / 2 + 1e-13 * np.eye(n)

        def direction(sigma_mu):
            target = sigma_mu * Sinv - Z
            rhs = np.real(GflatT @ target.ravel()) - rd
            try:
                dz = np.linalg.solve(M, rhs)
            except np.linalg.LinAlgError:
                dz = np.linalg.lstsq(M, rhs, rcond=None)[0]
            dS = np.tensordot(dz, G, axes=(0, 0))
            dZ = target - Winv @ dS @ Winv
            return dz, dS, (dZ + dZ.conj().T) / 2

        dz_a, dS_a, dZ_a = direction(0.0)
        ap = min(1.0, 0.99 * _max_step(Linv, dS_a))
        ad = min(1.0, 0.99 * _max_step(Lzinv, dZ_a))
        gap_aff = float(np.real(np.einsum(
            "ab,ba->", S + ap * dS_a, Z + ad * dZ_a)))
        sigma = min(0.8, max(1e-4, (max(gap_aff, 0.0) / gap) ** 3))
        dz, dS, dZ = direction(sigma * mu)
        ap = min(1.0, 0.98 * _max_step(Linv, dS))
        ad = min(1.0, 0.98 * _max_step(Lzinv, dZ))
        if ap < 1e-9 and ad < 1e-9:
            # stalled: one pure centering attempt before giving up
            dz, dS, dZ = direction(mu)
            ap = min(1.0, 0.98 * _max_step(Linv, dS))
            ad = min(1.0, 0.98 * _max_step(Lzinv, dZ))
        if step_cap is not None:
            dz_norm = float(np.abs(dz).max())
            if dz_norm > 0:
                ap = min(ap, step_cap * (1.0 + float(np.abs(z).max())) / dz_norm)
        if ap < 1e-9 and ad < 1e-9:
            break
        z = z + ap * dz
        S = S + ap * dS
        S = (S + S.conj().T) / 2
        Z = Z + ad * dZ
        Z = (Z + Z.conj().T) / 2
    return best


# ---------------------------------------------------------------------------
# phase I + facial reduction + public solve
# ---------------------------------------------------------------------------


def _phase_one(G0, G, max_iter):
    """Find z with the block strictly PD, or report the best slack achieved.

    Also returns the dual iterate: at a zero optimum it is an exposing
    operator for the minimal face containing the feasible set.
    """
    n = G.shape[0]
    d = G0.shape[0]
    aug = np.concatenate([G, np.eye(d, dtype=complex)[None, :, :]])
    c = np.zeros(n + 1)
    c[-1] = 1.0
    t0 = max(0.0, -float(np.linalg.eigvalsh(G0)[0])) + 1.0
    z0 = np.zeros(n + 1)
    z0[-1] = t0
    res = _core_solve(
        c, G0, aug, gap_tol=1e-9, rd_tol=1e-7, max_iter=max_iter, z0=z0,
        stop_early=lambda z: z[-1] < -1e-6, step_cap=20.0,
    )
    return res.z[:-1], res.z[-1], res.dual


def _orth_complement(v: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the complement of span(columns of v)."""
    d = v.shape[0]
    u, sv, _ = np.linalg.svd(v, full_matrices=True)
    rank = int(np.sum(sv > 1e-10 * (sv[0] if sv.size else 1.0)))
    return u[:, rank:] if rank < d else np.zeros((d, 0), dtype=v.dtype)


def _block_diag(mats) -> np.ndarray:
    dims = [m.shape[-1] for m in mats]
    total = sum(dims)
    if mats[0].ndim == 2:
        out = np.zeros((total, total), dtype=complex)
        off = 0
        for m, d in zip(mats, dims):
            out[off:off + d, off:off + d] = m
            off += d
        return out
    n = mats[0].shape[0]
    out = np.zeros((n, total, total), dtype=complex)
    off = 0
    for m, d in zip(mats, dims):
        out[:, off:off + d, off:off + d] = m
        off += d
    return out


def solve(problem: SdpProblem, tol: float = 1e-7, max_iter: int = 200) -> SdpSolution:
    """Interior-point solve; infeasibility is a status, never an exception."""
    if not 1e-10 <= tol <= 1e-4:
        raise ValueError(f"tol must lie in [1e-10, 1e-4], got {tol}")
    c = problem.objective.astype(float)
    A, b = problem.eq_matrix, problem.eq_rhs
    n = problem.n_vars
    dims = [blk.dim for blk in problem.blocks]
    offsets = np.concatenate([[0], np.cumsum(dims)])

    def report(x, status, dual=None, iters=0):
        obj = float(c @ x)
        res = float(np.abs(A @ x - b).max()) if A.size else 0.0
        eigs = [np.linalg.eigvalsh(blk.evaluate(x))[0] for blk in problem.blocks]
        min_eig = float(min(eigs)) if eigs else 0.0
        dual_obj = np.nan
        gap = np.nan
        if dual is not None:
            Zs = [dual[offsets[j]:offsets[j + 1], offsets[j]:offsets[j + 1]]
                  for j in range(len(problem.blocks))]
            adj = np.zeros(n)
            trace_g0 = 0.0
            for blk, Zj in zip(problem.blocks, Zs):
                d = blk.dim
                adj += np.real(
                    blk.gs.transpose(0, 2, 1).reshape(n, d * d) @ Zj.ravel())
                trace_g0 += float(np.real(np.einsum("ab,ba->", blk.g0, Zj)))
            resid = c - adj
            if A.size:
                y = np.linalg.lstsq(A.T, resid, rcond=None)[0]
                dual_obj = float(b @ y) - trace_g0
            else:
                dual_obj = -trace_g0
            gap = obj - dual_obj
        return SdpSolution(x, obj, status, gap, res, min_eig, dual_obj, iters)

    # eliminate equalities
    if A.size:
        _, sv, vt = np.linalg.svd(A, full_matrices=True)
        rank = int(np.sum(sv > 1e-12 * (sv[0] if sv.size else 1.0)))
        xp = np.linalg.lstsq(A, b, rcond=None)[0]
        if np.abs(A @ xp - b).max() > 1e-9 * max(1.0, np.abs(b).max()):
            return report(xp, INFEASIBLE)
        basis = vt[rank:].T  # (n, nf)
    else:
        xp = np.zeros(n)
        basis = np.eye(n)
    nf = basis.shape[1]

    G0 = _block_diag([blk.evaluate(xp) for blk in problem.blocks])
    G = _block_diag([np.einsum("il,iab->lab", basis, blk.gs)
                     for blk in problem.blocks])

    if nf == 0:
        lo = float(np.linalg.eigvalsh(G0)[0])
        status = OPTIMAL if lo >= -1e-8 else INFEASIBLE
        sol = report(xp, status)
        if status == OPTIMAL:
            sol.duality_gap = 0.0
            sol.dual_objective = sol.objective_value
        return sol

    # drop variables that the cone never sees
    seen = np.abs(G).max(axis=(1, 2)) > 1e-14
    c_red_full = basis.T @ c
    if not seen.all():
        if np.abs(c_red_full[~seen]).max() > 1e-12:
            return report(xp, INFEASIBLE)  # objective unbounded along a free ray
        basis = basis[:, seen]
        G = G[seen]
        nf = int(seen.sum())
    c_red = basis.T @ c

    # phase I, with facial reduction when the feasible set has empty interior:
    # a zero eigenvector n of the maximal-rank point forces the linear
    # constraints S(z) n = 0, which are eliminated before cutting the block
    # down to the positive eigenspace
    qs: list[np.ndarray] = []
    x_off = xp.copy()        # x = x_off + x_map @ z at every round
    x_map = basis
    z0 = None
    if float(np.linalg.eigvalsh(G0)[0]) > 1e-7:
        z0 = np.zeros(nf)    # the least-norm equality solution is already interior
    rounds = 0
    while z0 is None and rounds < 4:
        rounds += 1
        z_feas, slack, expose = _phase_one(G0, G, max_iter)
        if slack < -1e-9:
            z0 = z_feas
            break
        if slack > 1e-7:
            return report(x_off + x_map @ z_feas, INFEASIBLE)
        # null directions of this particular optimum are only candidates (it
        # need not have maximal rank); the dual optimum Z* certifies the true
        # face via <S(z), Z*> = 0 over the whole feasible set.  Diagonalising
        # Z* restricted to the primal null subspace picks out exactly the
        # certified directions.  Any ambiguity below makes the cut
        # untrustworthy, and the honest answer is then a failed solve rather
        # than a wrong value.
        def give_up():
            if slack < -1e-12:
                return z_feas  # barely interior; let phase II try
            return None

        val = G0 + np.tensordot(z_feas, G, axes=(0, 0))
        evals, evecs = np.linalg.eigh((val + val.conj().T) / 2)
        scale = max(1.0, float(np.abs(evals).max()))
        cand = evecs[:, evals < 1e-7 * scale]
        nullv = None
        if cand.shape[1]:
            K = cand.conj().T @ expose @ cand
            kvals, kvecs = np.linalg.eigh((K + K.conj().T) / 2)
            zmax = max(float(np.linalg.eigvalsh(
                (expose + expose.conj().T) / 2)[-1]), 1e-30)
            certified = kvals > 1e-5 * zmax
            if certified.any():
                nullv = cand @ kvecs[:, certified]
        if nullv is None:
            z0 = give_up()
            break
        q = _orth_complement(nullv)
        lhs_c = np.einsum("lab,bk->lak", G, nullv).reshape(nf, -1)
        lhs = np.concatenate([lhs_c.real, lhs_c.imag], axis=1).T
        rhs_c = (G0 @ nullv).reshape(-1)
        rhs = -np.concatenate([rhs_c.real, rhs_c.imag])
        zp = np.linalg.lstsq(lhs, rhs, rcond=None)[0]
        if np.abs(lhs @ zp - rhs).max() > 1e-6:
            z0 = give_up()
            break
        _, sv2, vt2 = np.linalg.svd(lhs, full_matrices=True)
        sv_top = sv2[0] if sv2.size else 1.0
        rank2 = int(np.sum(sv2 > 1e-6 * sv_top))
        if (rank2 < sv2.size and sv2[rank2] > 1e-10 * sv_top) or q.shape[1] == 0:
            z0 = give_up()
            break
        n2 = vt2[rank2:].T
        if n2.shape[1] == 0:
            z0 = give_up()
            break
        qs.append(q)
        G0 = q.conj().T @ (G0 + np.tensordot(zp, G, axes=(0, 0))) @ q
        G = q.conj().T @ np.einsum("lm,lab->mab", n2, G) @ q
        x_off = x_off + x_map @ zp
        x_map = x_map @ n2
        c_red = x_map.T @ c
        nf = n2.shape[1]
    if z0 is None:
        return report(x_off, MAX_ITERATIONS)

    gap_goal = max(1e-11, min(tol, 1e-8))
    res = _core_solve(c_red, G0, G, gap_goal, max(1e-7, tol), max_iter, z0)
    x = x_off + x_map @ res.z

    dual = res.dual
    for q in reversed(qs):
        dual = q @ dual @ q.conj().T

    sol = report(x, MAX_ITERATIONS, dual=dual, iters=res.iterations)
    # the optimality label is earned from the reported certificate quantities,
    # not from the inner loop alone: a stalled iterate that already meets the
    # contract is optimal, a "converged" one that fails it is not
    scale = max(1.0, abs(sol.objective_value))
    gap_ok = not np.isnan(sol.duality_gap) and abs(sol.duality_gap) <= 1e-7 * scale
    core_ok = res.gap <= 1e-6 * scale and res.rd_norm <= 1e-6
    if gap_ok and core_ok and sol.max_equality_residual <= 1e-8 \
            and sol.min_block_eigenvalue >= -1e-8:
        sol.status = OPTIMAL
    return sol


@dataclass(frozen=True)
class CertificateReport:
    passed: bool
    objective: float
    max_equality_residual: float
    min_block_eigenvalue: float


def check_certificate(problem: SdpProblem, solution: SdpSolution,
                      eq_tol: float = 1e-8, psd_tol: float = 1e-8) -> CertificateReport:
    """Recompute residuals and block spectra from x alone; raise beyond 10x tolerance."""
    x = solution.x
    obj = float(problem.objective @ x)
    res = (
        float(np.abs(problem.eq_matrix @ x - problem.eq_rhs).max())
        if problem.eq_matrix.size
        else 0.0
    )
    eigs = [float(np.linalg.eigvalsh(blk.evaluate(x))[0]) for blk in problem.blocks]
    min_eig = min(eigs) if eigs else 0.0
    passed = (
        res <= eq_tol
        and min_eig >= -psd_tol
        and abs(obj - solution.objective_value) <= 1e-9 * max(1.0, abs(obj))
    )
    if res > 10 * eq_tol or min_eig < -10 * psd_tol:
        raise CertificateError(
            f"certificate violated: residual={res:.3e}, min eig={min_eig:.3e}")
    return CertificateReport(passed, obj, res, min_eig)
