"""Primal-dual interior-point solver on the homogeneous self-dual embedding.

Solves the compiled form

    minimize    c@x
    subject to  E x = f
                G x + s = h,   s in K

with K a product of nonnegative, second-order, and PSD cones, using
Nesterov-Todd scalings and a Mehrotra predictor-corrector.  The embedding
carries (x, y, z, tau, s, kappa); tau -> 0 with kappa > 0 yields an
infeasibility certificate instead of a solution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .cones import ConeWorkspace, smat, svec, svec_dim
from .program import Compiled, ConicProgram

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"
MAX_ITERATIONS = "MaxIterations"
NUMERICAL_FAILURE = "NumericalFailure"

_STEP = 0.99
_REG = 1e-12
_NEIGHBORHOOD = 1e-3


@dataclass
class Solution:
    status: str
    objective: float = np.nan
    x: np.ndarray | None = None
    y: np.ndarray | None = None
    z: np.ndarray | None = None
    s: np.ndarray | None = None
    iterations: int = 0
    residuals: dict = field(default_factory=dict)
    var_blocks: dict = field(default_factory=dict)
    sense: str = "min"
    dual_objective: float = np.nan

    def block(self, name: str):
        start, shape = self.var_blocks[name]
        count = int(np.prod(shape)) if shape else 1
        vals = self.x[start : start + count]
        return vals.reshape(shape) if shape else float(vals[0])

    def psd_block(self, name: str, n: int):
        v = self.block(name)
        return smat(np.asarray(v).ravel(), n)


class _KKT:
    """Sparse LU of the augmented Newton system

        [ dI   E'   G' ] [ax]   [bx]
        [ -E   -dI  0  ] [ay] = [by]
        [ -G   0    H  ] [az]   [bz]

    with the per-iteration NT scaling H = W'W assembled blockwise.  The
    augmented form avoids squaring the conditioning the way normal
    equations would, which matters for 1e-8-grade certificates.
    """

    def __init__(self, E: sp.csr_matrix, G: sp.csr_matrix, ws: ConeWorkspace):
        self.E = E.tocsr()
        self.G = G.tocsr()
        self.ws = ws
        self.n = G.shape[1]
        self.p = E.shape[0]
        self.m = ws.dim
        n, p, m = self.n, self.p, self.m
        reg = sp.diags(np.concatenate([np.full(n, _REG), np.full(p, -_REG),
                                       np.zeros(m)]))
        # static skeleton built once; H block replaced per refactor
        self._A_static = sp.bmat(
            [[sp.csr_matrix((n, n)), self.E.T if p else sp.csr_matrix((n, 0)), self.G.T],
             [-self.E if p else sp.csr_matrix((0, n)), sp.csr_matrix((p, p)), sp.csr_matrix((p, m))],
             [-self.G, sp.csr_matrix((m, p)), sp.csr_matrix((m, m))]],
            format="csr") + reg
        self._lu = None
        self._identity = True

    def _h_block(self, identity: bool) -> sp.csr_matrix:
        ws = self.ws
        if identity:
            return sp.eye(self.m, format="csr")
        blocks = []
        if ws.l:
            blocks.append(sp.diags(ws._w_l**2))
        for (eta, wbar) in ws._soc:
            d = wbar.size
            M = np.empty((d, d))
            for j in range(d):
                ej = np.zeros(d)
                ej[j] = 1.0
                M[:, j] = ws._apply_soc(eta, wbar, ws._apply_soc(eta, wbar, ej))
            blocks.append(sp.csr_matrix(M))
        for (R, _, _), n_s in zip(ws._psd, ws.s):
            sd = svec_dim(n_s)
            M = np.empty((sd, sd))
            RRt = R @ R.T
            for j in range(sd):
                ej = np.zeros(sd)
                ej[j] = 1.0
                M[:, j] = svec(RRt @ smat(ej, n_s) @ RRt)
            blocks.append(sp.csr_matrix(M))
        return sp.block_diag(blocks, format="csr") if blocks else sp.csr_matrix((0, 0))

    def refactor(self, identity: bool = False):
        from scipy.sparse.linalg import splu
        self._identity = identity
        n, p, m = self.n, self.p, self.m
        H = self._h_block(identity)
        A = self._A_static + sp.bmat(
            [[sp.csr_matrix((n + p, n + p)), sp.csr_matrix((n + p, m))],
             [sp.csr_matrix((m, n + p)), H]], format="csc")
        self._lu = splu(A.tocsc())

    def _apply_H(self, v):
        if self._identity:
            return v.copy()
        return self.ws.apply_Wt(self.ws.apply_W(v))

    def _k3_residual(self, ax, ay, az, bx, by, bz):
        rx = bx - (self.E.T @ ay + self.G.T @ az)
        ry = by - (-(self.E @ ax))
        rz = bz - (-(self.G @ ax) + self._apply_H(az))
        return rx, ry, rz

    def solve(self, bx, by, bz, refine: int = 3):
        """Solve K3 (ax, ay, az) = (bx, by, bz); see class docstring."""
        n, p = self.n, self.p
        rhs = np.concatenate([bx, by, bz])
        sol = self._lu.solve(rhs)
        ax, ay, az = sol[:n], sol[n : n + p], sol[n + p :]
        scale = 1.0 + max(np.abs(bx).max(initial=0), np.abs(by).max(initial=0),
                          np.abs(bz).max(initial=0))
        for _ in range(refine):
            rx, ry, rz = self._k3_residual(ax, ay, az, bx, by, bz)
            if max(np.abs(rx).max(initial=0), np.abs(ry).max(initial=0),
                   np.abs(rz).max(initial=0)) < 1e-14 * scale:
                break
            dsol = self._lu.solve(np.concatenate([rx, ry, rz]))
            ax = ax + dsol[:n]
            ay = ay + dsol[n : n + p]
            az = az + dsol[n + p :]
        return ax, ay, az


def _norm(v):
    return float(np.linalg.norm(v))


def solve_compiled(cc: Compiled, feastol=1e-8, abstol=1e-8, reltol=1e-8,
                   max_iter=100) -> Solution:
    c, E, f, G, h = cc.c, cc.E.tocsr(), cc.f, cc.G.tocsr(), cc.h
    n = c.size
    ws = ConeWorkspace(cc.dims)
    m, p = ws.dim, E.shape[0]
    if m == 0:
        # degenerate: no cone rows; pad with a slack 1 >= 0 row
        G = sp.csr_matrix((1, n))
        h = np.ones(1)
        ws = ConeWorkspace({"l": 1, "q": [], "s": []})
        m = 1

    kkt = _KKT(E, G, ws)
    e = ws.identity()
    nf = Solution(status=NUMERICAL_FAILURE, sense=cc.sense, var_blocks=cc.var_blocks)

    # -- initial point ---------------------------------------------------------
    try:
        kkt.refactor(identity=True)
        x, _, _ = kkt.solve(np.zeros(n), -f, -h)
        s_hat = h - G @ x
        mg = ws.margin(s_hat)
        shift = max(1.0, 0.1 * float(np.abs(s_hat).max(initial=0.0)))
        s = s_hat if mg > shift else s_hat + (shift - min(mg, 0.0)) * e
        ax, y, az = kkt.solve(-c, np.zeros(p), np.zeros(m))
        z_hat = az
        mg = ws.margin(z_hat)
        shift = max(1.0, 0.1 * float(np.abs(z_hat).max(initial=0.0)))
        z = z_hat if mg > shift else z_hat + (shift - min(mg, 0.0)) * e
    except (np.linalg.LinAlgError, ValueError):
        return nf
    tau, kappa = 1.0, 1.0

    norm_f, norm_h, norm_c = 1.0 + _norm(f), 1.0 + _norm(h), 1.0 + _norm(c)
    best = None
    best_score = np.inf
    mu0 = None
    stall = 0

    for it in range(max_iter):
        # residuals of the embedding
        rd = E.T @ y + G.T @ z + c * tau
        rp_eq = -E @ x + f * tau
        rp_co = -G @ x + h * tau - s
        rg = -(c @ x + f @ y + h @ z) - kappa
        sz = s @ z
        mu = (sz + tau * kappa) / (ws.degree + 1)

        pcost = c @ x / tau
        dcost = -(f @ y + h @ z) / tau
        gap = sz / tau**2
        relgap = gap / max(1.0, abs(pcost))
        pres = max(_norm(E @ x / tau - f) / norm_f,
                   _norm(G @ x / tau + s / tau - h) / norm_h)
        dres = _norm((E.T @ y + G.T @ z) / tau + c) / norm_c

        if mu0 is None:
            mu0 = max(mu, 1e-300)
        score = max(pres, dres, relgap)
        if score < 0.98 * best_score:
            best_score = score
            stall = 0
            best = (x / tau, y / tau, z / tau, s / tau, pcost, dcost, it,
                    dict(primal=pres, dual=dres, gap=gap, relgap=relgap))
        else:
            stall += 1
        if stall >= 10 or mu / mu0 < 1e-15:
            break

        if pres <= feastol and dres <= feastol and (gap <= abstol or relgap <= reltol):
            return _finish(cc, OPTIMAL, x / tau, y / tau, z / tau, s / tau,
                           pcost, dcost, it,
                           dict(primal=pres, dual=dres, gap=gap, relgap=relgap))

        # infeasibility certificates
        hz_fy = f @ y + h @ z
        if hz_fy < -1e-14:
            pinfres = _norm(E.T @ y + G.T @ z) / (-hz_fy)
            if pinfres <= feastol * norm_c:
                sol = Solution(status=INFEASIBLE, sense=cc.sense,
                               var_blocks=cc.var_blocks, iterations=it)
                sol.y = y / (-hz_fy)
                sol.z = z / (-hz_fy)
                sol.residuals = {"certificate": pinfres}
                return sol
        cx = c @ x
        if cx < -1e-14:
            dinfres = max(_norm(E @ x), _norm(G @ x + s)) / (-cx)
            if dinfres <= feastol * max(norm_f, norm_h):
                sol = Solution(status=UNBOUNDED, sense=cc.sense,
                               var_blocks=cc.var_blocks, iterations=it)
                sol.x = x / (-cx)
                sol.residuals = {"certificate": dinfres}
                return sol

        # Newton machinery
        try:
            ws.update_scaling(s, z)
            kkt.refactor(identity=False)
            vx, vy, vz = kkt.solve(c, f, h)
        except (np.linalg.LinAlgError, ValueError):
            break
        lam = ws.lam
        lam_sq = ws.jordan_mul(lam, lam)

        def direction(rx, ry, rz, rt, rhs_s, rhs_kappa):
            rz_tilde = rz + ws.apply_Wt(ws.jordan_solve(lam, rhs_s))
            ux, uy, uz = kkt.solve(rx, ry, rz_tilde)
            denom = c @ vx + f @ vy + h @ vz + kappa / tau
            dtau = (rt + c @ ux + f @ uy + h @ uz + rhs_kappa / tau) / denom
            dx = ux - dtau * vx
            dy = uy - dtau * vy
            dz = uz - dtau * vz
            ds = ws.apply_Wt(ws.jordan_solve(lam, rhs_s)) - ws.apply_Wt(ws.apply_W(dz))
            dkappa = (rhs_kappa - kappa * dtau) / tau
            return dx, dy, dz, ds, dtau, dkappa

        def max_alpha(ds, dz, dtau, dkappa):
            a = min(ws.max_step(s, ds), ws.max_step(z, dz))
            if dtau < 0:
                a = min(a, -tau / dtau)
            if dkappa < 0:
                a = min(a, -kappa / dkappa)
            return a

        try:
            # affine (predictor) direction
            dxa, dya, dza, dsa, dta, dka = direction(
                -rd, -rp_eq, -rp_co, -rg, -lam_sq, -tau * kappa)
            alpha_aff = min(1.0, max_alpha(dsa, dza, dta, dka))
            mu_aff = ((s + alpha_aff * dsa) @ (z + alpha_aff * dza)
                      + (tau + alpha_aff * dta) * (kappa + alpha_aff * dka)) / (ws.degree + 1)
            sigma = min(1.0, max(0.0, (mu_aff / mu))) ** 3

            # combined (corrector) direction
            corr = ws.jordan_mul(ws.apply_Winv_t(dsa), ws.apply_W(dza))
            rhs_s = sigma * mu * e - lam_sq - corr
            rhs_kappa = sigma * mu - tau * kappa - dta * dka
            fac = 1.0 - sigma
            dx, dy, dz, ds, dt, dk = direction(
                -fac * rd, -fac * rp_eq, -fac * rp_co, -fac * rg, rhs_s, rhs_kappa)
            alpha = min(1.0, _STEP * max_alpha(ds, dz, dt, dk))
            # wide-neighborhood backtracking: keep the scaled product's
            # spectrum above a small fraction of the new duality measure
            for _ in range(30):
                s_sc = ws.apply_Winv_t(s + alpha * ds)
                z_sc = ws.apply_W(z + alpha * dz)
                tk = (tau + alpha * dt) * (kappa + alpha * dk)
                mu_new = (s_sc @ z_sc + tk) / (ws.degree + 1)
                lo = min(ws.margin(ws.jordan_mul(s_sc, z_sc)), tk)
                if lo >= _NEIGHBORHOOD * mu_new:
                    break
                alpha *= 0.8
        except (np.linalg.LinAlgError, ValueError, ZeroDivisionError):
            break
        if not np.isfinite(alpha) or alpha <= 1e-13:
            break

        x = x + alpha * dx
        y = y + alpha * dy
        z = z + alpha * dz
        s = s + alpha * ds
        tau = tau + alpha * dt
        kappa = kappa + alpha * dk
        if tau <= 0 or kappa < 0 or ws.margin(s) <= 0 or ws.margin(z) <= 0:
            break
    else:
        return _classify_best(cc, best, MAX_ITERATIONS, max_iter,
                              feastol, abstol, reltol) or nf
    return _classify_best(cc, best, NUMERICAL_FAILURE, max_iter,
                          feastol, abstol, reltol) or nf


def _classify_best(cc, best, fallback_status, max_iter, feastol, abstol, reltol):
    if best is None:
        return None
    xb, yb, zb, sb, pc, dc, itb, res = best
    ok = (res["primal"] <= feastol and res["dual"] <= feastol
          and (res["gap"] <= abstol or res["relgap"] <= reltol))
    status = OPTIMAL if ok else fallback_status
    return _finish(cc, status, xb, yb, zb, sb, pc, dc, itb, res)


def _finish(cc, status, x, y, z, s, pcost, dcost, iters, res) -> Solution:
    sol = Solution(status=status, sense=cc.sense, var_blocks=cc.var_blocks)
    sol.x, sol.y, sol.z, sol.s = x, y, z, s
    sol.iterations = iters
    internal_obj = pcost + cc.c0
    sol.objective = -internal_obj if cc.sense == "max" else internal_obj
    internal_dual = dcost + cc.c0
    sol.dual_objective = -internal_dual if cc.sense == "max" else internal_dual
    sol.residuals = res
    return sol
