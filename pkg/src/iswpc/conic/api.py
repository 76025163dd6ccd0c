"""Public entry points: solve a ConicProgram, certify a returned solution."""

from __future__ import annotations

import numpy as np

from .cones import ConeWorkspace, smat, svec_dim
from .presolve import presolve_compiled
from .program import Compiled, ConicProgram
from .solver import (INFEASIBLE, MAX_ITERATIONS, NUMERICAL_FAILURE, OPTIMAL,
                     UNBOUNDED, Solution, solve_compiled)


def solve(program: ConicProgram, tol: float = 1e-8, max_iter: int = 100,
          use_presolve: bool = True) -> Solution:
    """Solve to tolerance ``tol`` (feasibility and duality-gap alike).

    The returned solution is expressed on the original variables; duals of
    presolve-eliminated rows are recovered from stationarity.
    """
    cc = program.compile()
    if use_presolve:
        ccp, pmap = presolve_compiled(cc)
        if pmap.infeasible:
            return Solution(status=INFEASIBLE, sense=cc.sense,
                            var_blocks=cc.var_blocks,
                            residuals={"presolve": "contradictory equalities"})
    else:
        ccp, pmap = cc, None

    sol = solve_compiled(ccp, feastol=tol, abstol=tol, reltol=tol,
                         max_iter=max_iter)
    if pmap is None:
        return sol

    out = Solution(status=sol.status, sense=cc.sense, var_blocks=cc.var_blocks,
                   iterations=sol.iterations, residuals=dict(sol.residuals))
    if sol.status in (OPTIMAL, MAX_ITERATIONS) and sol.x is not None:
        x = pmap.restore_x(sol.x)
        y, z = pmap.restore_duals(sol.y, sol.z, cc, x)
        out.x, out.y, out.z = x, y, z
        out.s = cc.h - cc.G @ x
        internal = float(cc.c @ x) + cc.c0
        out.objective = -internal if cc.sense == "max" else internal
        dual_internal = float(-cc.f @ y - cc.h @ z) + cc.c0
        out.dual_objective = -dual_internal if cc.sense == "max" else dual_internal
    elif sol.status == UNBOUNDED and sol.x is not None:
        ray = np.zeros(pmap.n_orig)
        ray[pmap.kept_cols] = pmap.col_scale * sol.x
        out.x = ray
    elif sol.status == INFEASIBLE and sol.z is not None:
        y, z = pmap.restore_duals(sol.y, sol.z, cc, np.zeros(pmap.n_orig))
        out.y, out.z = y, z
    return out


def certify(program: ConicProgram, sol: Solution) -> dict:
    """Independent residual recomputation for an Optimal solution.

    Reports primal feasibility per cone family, dual feasibility, cone
    membership of the duals, complementarity and the duality gap, computed
    directly from the program data.
    """
    cc = program.compile()
    ws = ConeWorkspace(cc.dims)
    x, y, z = sol.x, sol.y, sol.z
    s = cc.h - cc.G @ x
    rep: dict = {}
    rep["eq_residual"] = float(np.abs(cc.E @ x - cc.f).max(initial=0.0))
    l = cc.dims["l"]
    rep["nonneg_margin"] = float(s[:l].min(initial=np.inf))
    off = l
    soc_m, psd_m = np.inf, np.inf
    for d in cc.dims["q"]:
        blk = s[off : off + d]
        soc_m = min(soc_m, blk[0] - np.linalg.norm(blk[1:]))
        off += d
    for ns in cc.dims["s"]:
        d = svec_dim(ns)
        psd_m = min(psd_m, float(np.linalg.eigvalsh(smat(s[off : off + d], ns))[0]))
        off += d
    rep["soc_margin"] = float(soc_m)
    rep["min_psd_eig"] = float(psd_m)
    rep["dual_residual"] = float(
        np.abs(cc.c + cc.E.T @ y + cc.G.T @ z).max(initial=0.0)
        / (1.0 + np.abs(cc.c).max(initial=0.0)))
    rep["dual_cone_margin"] = float(ws.margin(z)) if ws.dim else np.inf
    pcost = float(cc.c @ x)
    dcost = float(-cc.f @ y - cc.h @ z)
    rep["complementarity"] = float(s @ z) / max(1.0, abs(pcost))
    rep["gap"] = abs(pcost - dcost) / max(1.0, abs(pcost))
    rep["primal_violation"] = max(
        rep["eq_residual"],
        max(0.0, -rep["nonneg_margin"]) if np.isfinite(rep["nonneg_margin"]) else 0.0,
        max(0.0, -rep["soc_margin"]) if np.isfinite(rep["soc_margin"]) else 0.0,
        max(0.0, -rep["min_psd_eig"]) if np.isfinite(rep["min_psd_eig"]) else 0.0,
    )
    return rep
