"""Presolve: fixed-variable elimination and Ruiz equilibration.

Works on the compiled form.  Equality rows with a single nonzero pin a
variable; pinned columns are substituted into all blocks.  Scaling uses
iterated row/column sqrt-max equilibration, with one uniform scalar per
SOC/PSD block so cones are preserved.  The map object undoes everything,
including recovery of the duals of eliminated rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .cones import svec_dim
from .program import Compiled, ConicProgram, _RowAccum


@dataclass
class PresolveMap:
    n_orig: int
    kept_cols: np.ndarray
    fixed: dict          # col -> value
    fixed_by_row: dict   # eliminated E-row -> (col, coef)
    kept_eq_rows: np.ndarray
    row_scale_eq: np.ndarray
    row_scale_cone: np.ndarray
    col_scale: np.ndarray
    obj_scale: float
    infeasible: bool = False

    def restore_x(self, x_scaled: np.ndarray) -> np.ndarray:
        x = np.zeros(self.n_orig)
        x[self.kept_cols] = self.col_scale * x_scaled
        for j, v in self.fixed.items():
            x[j] = v
        return x

    def restore_duals(self, y_scaled, z_scaled, cc_orig: Compiled, x_full):
        p_orig = cc_orig.E.shape[0]
        y = np.zeros(p_orig)
        y[self.kept_eq_rows] = self.row_scale_eq * y_scaled / self.obj_scale
        z = self.row_scale_cone * z_scaled / self.obj_scale
        # duals of eliminated singleton rows from stationarity on the fixed var
        if self.fixed_by_row:
            grad = cc_orig.c + cc_orig.E.T @ y + cc_orig.G.T @ z
            for row, (col, coef) in self.fixed_by_row.items():
                y[row] = -grad[col] / coef
        return y, z


def _ruiz(E, f, G, h, c, dims, iters=6):
    p, n = E.shape
    m = G.shape[0]
    # group labels: one per E row, one per nonneg row, one per SOC/PSD block
    group = np.empty(m, dtype=np.int64)
    group[: dims["l"]] = np.arange(dims["l"])
    gid = dims["l"]
    off = dims["l"]
    for d in dims["q"]:
        group[off : off + d] = gid
        gid += 1
        off += d
    for ns in dims["s"]:
        d = svec_dim(ns)
        group[off : off + d] = gid
        gid += 1
        off += d
    re = np.ones(p)
    rg_group = np.ones(gid)
    ce = np.ones(n)
    E = E.tocsr().astype(float)
    G = G.tocsr().astype(float)
    for _ in range(iters):
        rg = rg_group[group] if m else rg_group[:0]
        stacked = sp.vstack([E, G]) if p else G
        absA = abs(stacked)
        col_max = np.asarray(absA.max(axis=0).todense()).ravel()
        col_max[col_max == 0] = 1.0
        dcol = 1.0 / np.sqrt(col_max)
        E = E.multiply(dcol[None, :]).tocsr()
        G = G.multiply(dcol[None, :]).tocsr()
        ce *= dcol
        if p:
            row_max_e = np.asarray(abs(E).max(axis=1).todense()).ravel()
            row_max_e[row_max_e == 0] = 1.0
            dre = 1.0 / np.sqrt(row_max_e)
            E = E.multiply(dre[:, None]).tocsr()
            re *= dre
        if m:
            row_max_g = np.asarray(abs(G).max(axis=1).todense()).ravel()
            gmax = np.full(gid, 0.0)
            np.maximum.at(gmax, group, row_max_g)
            gmax[gmax == 0] = 1.0
            drg = 1.0 / np.sqrt(gmax)
            G = G.multiply(drg[group][:, None]).tocsr()
            rg_group *= drg
    rg_rows = rg_group[group] if m else np.ones(0)
    f = f * re
    h = h * rg_rows
    c = c * ce
    s_obj = 1.0 / max(1.0, np.abs(c).max(initial=0.0))
    c = c * s_obj
    return E, f, G, h, c, re, rg_rows, ce, s_obj


def presolve_compiled(cc: Compiled, scale: bool = True):
    E = cc.E.tocsr().astype(float)
    G = cc.G.tocsr().astype(float)
    c = cc.c.astype(float).copy()
    c0 = cc.c0
    n = c.size
    p = E.shape[0]

    fixed: dict[int, float] = {}
    fixed_by_row: dict[int, tuple[int, float]] = {}
    active_rows = np.ones(p, dtype=bool)
    active_cols = np.ones(n, dtype=bool)
    infeasible = False

    El = E.tolil()
    f_cur = cc.f.astype(float).copy()
    Ecol = E.tocsc()
    changed = True
    while changed:
        changed = False
        for i in range(p):
            if not active_rows[i]:
                continue
            nz = [(j, v) for j, v in zip(El.rows[i], El.data[i]) if v != 0.0]
            if not nz:
                if abs(f_cur[i]) > 1e-9:
                    infeasible = True
                active_rows[i] = False
                continue
            if len(nz) == 1:
                j, coef = nz[0]
                val = f_cur[i] / coef
                fixed[j] = val
                fixed_by_row[i] = (j, coef)
                active_rows[i] = False
                active_cols[j] = False
                f_cur -= Ecol[:, j].toarray().ravel() * val
                El[:, j] = 0.0
                changed = True

    vfix = np.zeros(n)
    for j, v in fixed.items():
        vfix[j] = v
    kept_cols = np.nonzero(active_cols)[0]
    kept_eq_rows = np.nonzero(active_rows)[0]
    E2 = E[kept_eq_rows][:, kept_cols].tocsr() if kept_eq_rows.size else sp.csr_matrix((0, kept_cols.size))
    f2 = (cc.f - E @ vfix)[kept_eq_rows]
    G2 = G[:, kept_cols].tocsr()
    h2 = cc.h - G @ vfix
    c2 = c[kept_cols]
    c0 = c0 + float(c @ vfix)

    if scale and kept_cols.size and not infeasible:
        E2, f2, G2, h2, c2, re, rg, ce, s_obj = _ruiz(E2, f2, G2, h2, c2, cc.dims)
        c0s = c0 * s_obj
    else:
        re = np.ones(kept_eq_rows.size)
        rg = np.ones(G2.shape[0])
        ce = np.ones(kept_cols.size)
        s_obj = 1.0
        c0s = c0

    out = Compiled(c=c2, c0=c0s, E=E2, f=f2, G=G2, h=h2, dims=cc.dims,
                   sense=cc.sense, var_blocks=cc.var_blocks)
    pmap = PresolveMap(
        n_orig=n, kept_cols=kept_cols, fixed=fixed, fixed_by_row=fixed_by_row,
        kept_eq_rows=kept_eq_rows, row_scale_eq=re, row_scale_cone=rg,
        col_scale=ce, obj_scale=s_obj, infeasible=infeasible,
    )
    return out, pmap


def presolve(program: ConicProgram):
    """Spec-facing presolve: equivalent minimize-form program + unscaling map."""
    cc = program.compile()
    out, pmap = presolve_compiled(cc)
    q = ConicProgram(sense="min")
    x = q.add_vars("x", (out.c.size,))
    q.add_objective(x, out.c, out.c0)
    E = out.E.tocoo()
    for i in range(out.E.shape[0]):
        mask = E.row == i
        q.add_zero(E.col[mask], E.data[mask], -out.f[i])
    G = out.G.tocsr()
    h = out.h
    row = 0
    l = out.dims["l"]
    for i in range(l):
        sl = G[row + i]
        q.add_nonneg(sl.indices, -sl.data, h[row + i])
    row += l
    for d in out.dims["q"]:
        rows = []
        for i in range(d):
            sl = G[row + i]
            rows.append((sl.indices, -sl.data, h[row + i]))
        q.add_soc(rows)
        row += d
    for ns in out.dims["s"]:
        d = svec_dim(ns)
        acc = _RowAccum()
        for i in range(d):
            sl = G[row + i]
            acc.add(sl.indices, -sl.data, h[row + i])
        q._psds.append((ns, acc))
        row += d
    return q, pmap
