"""Solver-agnostic conic program container.

A program is a set of named variable blocks, a linear objective, and
constraint blocks of the form ``A x + b in cone`` over the zero cone,
nonnegative orthant, second-order cones and PSD cones.  ``compile()``
produces the stacked matrices consumed by the interior-point solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .cones import NONNEG, PSD, SOC, ZERO, svec, svec_dim


class ProgramError(ValueError):
    pass


def _as_idx_val(idx, val):
    idx = np.atleast_1d(np.asarray(idx, dtype=np.int64)).ravel()
    val = np.broadcast_to(np.asarray(val, dtype=float), idx.shape).ravel()
    keep = val != 0.0
    return idx[keep], val[keep]


@dataclass
class _RowAccum:
    """Triplet accumulator for one stacked constraint family."""

    rows: list = field(default_factory=list)
    cols: list = field(default_factory=list)
    vals: list = field(default_factory=list)
    consts: list = field(default_factory=list)
    n_rows: int = 0

    def add(self, idx, val, const):
        idx, val = _as_idx_val(idx, val)
        self.rows.append(np.full(idx.shape, self.n_rows, dtype=np.int64))
        self.cols.append(idx)
        self.vals.append(val)
        self.consts.append(float(const))
        self.n_rows += 1

    def matrix(self, n_vars):
        if self.n_rows == 0:
            return sp.csr_matrix((0, n_vars)), np.zeros(0)
        rows = np.concatenate(self.rows) if self.rows else np.zeros(0, np.int64)
        cols = np.concatenate(self.cols) if self.cols else np.zeros(0, np.int64)
        vals = np.concatenate(self.vals) if self.vals else np.zeros(0)
        A = sp.csr_matrix((vals, (rows, cols)), shape=(self.n_rows, n_vars))
        return A, np.asarray(self.consts)


@dataclass
class Compiled:
    """Stacked internal form:

    minimize c@x + c0  s.t.  E x = f,  G x + s = h,  s in K,

    where K stacks the nonneg rows, then the SOC blocks, then the svec'd
    PSD blocks (``dims`` records the layout)."""

    c: np.ndarray
    c0: float
    E: sp.csr_matrix
    f: np.ndarray
    G: sp.csr_matrix
    h: np.ndarray
    dims: dict
    sense: str
    var_blocks: dict


class ConicProgram:
    """Incrementally built conic program.

    Rows follow the convention ``sum(val * x[idx]) + const  <cone>  0``:
    ``add_zero`` pins the expression to 0, ``add_nonneg`` keeps it >= 0,
    ``add_soc`` stacks expressions into (t, u) with ||u|| <= t, and
    ``add_psd`` forms F0 + sum_i x_i F_i >= 0 (PSD order).
    """

    def __init__(self, sense: str = "min"):
        if sense not in ("min", "max"):
            raise ProgramError(f"sense must be min or max, got {sense!r}")
        self.sense = sense
        self.n_vars = 0
        self.var_blocks: dict[str, tuple[int, tuple]] = {}
        self._obj_idx: list[np.ndarray] = []
        self._obj_val: list[np.ndarray] = []
        self.obj_const = 0.0
        self._zero = _RowAccum()
        self._nonneg = _RowAccum()
        self._socs: list[_RowAccum] = []
        self._psds: list[tuple[int, _RowAccum]] = []
        self._psd_var_blocks: list[tuple[str, int]] = []

    # -- variables -------------------------------------------------------------

    def add_vars(self, name: str, shape=()) -> np.ndarray | int:
        if name in self.var_blocks:
            raise ProgramError(f"duplicate variable block {name!r}")
        shape = tuple(shape) if isinstance(shape, (tuple, list)) else (int(shape),)
        count = int(np.prod(shape)) if shape else 1
        start = self.n_vars
        self.n_vars += count
        self.var_blocks[name] = (start, shape)
        idx = np.arange(start, start + count, dtype=np.int64)
        if not shape:
            return int(idx[0])
        return idx.reshape(shape)

    def add_psd_var(self, name: str, n: int) -> np.ndarray:
        """svec variable block constrained to be a PSD matrix of order n."""
        idx = self.add_vars(name, (svec_dim(n),))
        acc = _RowAccum()
        for j, col in enumerate(idx):
            acc.add([col], [1.0], 0.0)
        self._psds.append((n, acc))
        self._psd_var_blocks.append((name, n))
        return idx

    # -- objective ---------------------------------------------------------

    def add_objective(self, idx, val, const: float = 0.0):
        idx, val = _as_idx_val(idx, val)
        self._obj_idx.append(idx)
        self._obj_val.append(val)
        self.obj_const += float(const)

    # -- constraints -------------------------------------------------------

    def add_zero(self, idx, val, const=0.0):
        self._zero.add(idx, val, const)

    def add_nonneg(self, idx, val, const=0.0):
        self._nonneg.add(idx, val, const)

    def add_nonneg_membership(self, idx):
        for j in np.atleast_1d(np.asarray(idx, dtype=np.int64)).ravel():
            self._nonneg.add([j], [1.0], 0.0)

    def add_soc(self, rows):
        """rows: iterable of (idx, val, const); first row is the cone's t."""
        acc = _RowAccum()
        for idx, val, const in rows:
            acc.add(idx, val, const)
        if acc.n_rows < 2:
            raise ProgramError("SOC block needs at least dimension 2")
        self._socs.append(acc)

    def add_psd(self, n: int, const_mat, terms):
        """F0 + sum x_i F_i PSD, with terms = [(var_index, F_i), ...]."""
        const_mat = np.zeros((n, n)) if const_mat is None else np.asarray(const_mat, float)
        if const_mat.shape != (n, n):
            raise ProgramError("PSD constant block has wrong shape")
        sd = svec_dim(n)
        cols: dict[int, np.ndarray] = {}
        for var, F in terms:
            F = np.asarray(F, dtype=float)
            if F.shape != (n, n):
                raise ProgramError("PSD coefficient has wrong shape")
            v = svec(0.5 * (F + F.T))
            var = int(var)
            cols[var] = cols.get(var, 0.0) + v
        acc = _RowAccum()
        f0 = svec(0.5 * (const_mat + const_mat.T))
        keys = sorted(cols)
        mat = np.array([cols[k] for k in keys]) if keys else np.zeros((0, sd))
        for r in range(sd):
            nz = np.nonzero(mat[:, r])[0] if keys else []
            acc.add([keys[i] for i in nz], [mat[i, r] for i in nz], f0[r])
        self._psds.append((n, acc))

    @staticmethod
    def trace_terms(svec_idx: np.ndarray, mat: np.ndarray):
        """(idx, val) with sum(val * x[idx]) == tr(mat @ X) for svec'd X."""
        return svec_idx, svec(0.5 * (mat + mat.T))

    # -- compile / inspect ---------------------------------------------------

    def objective_vector(self) -> tuple[np.ndarray, float]:
        c = np.zeros(self.n_vars)
        for idx, val in zip(self._obj_idx, self._obj_val):
            np.add.at(c, idx, val)
        return c, self.obj_const

    def compile(self) -> Compiled:
        self.validate()
        c, c0 = self.objective_vector()
        sign = 1.0
        if self.sense == "max":
            c = -c
            c0 = -c0
            sign = -1.0
        Az, bz = self._zero.matrix(self.n_vars)
        blocks = [self._nonneg.matrix(self.n_vars)]
        q_dims, s_dims = [], []
        for acc in self._socs:
            blocks.append(acc.matrix(self.n_vars))
            q_dims.append(acc.n_rows)
        for n, acc in self._psds:
            blocks.append(acc.matrix(self.n_vars))
            s_dims.append(n)
        A = sp.vstack([b[0] for b in blocks], format="csr")
        bvec = np.concatenate([b[1] for b in blocks])
        # rows are "A x + b" -->  E x = f  and  G x + s = h with s in K
        dims = {"l": self._nonneg.n_rows, "q": q_dims, "s": s_dims}
        return Compiled(
            c=c, c0=c0, E=Az, f=-bz, G=(-A).tocsr(), h=bvec, dims=dims,
            sense=self.sense, var_blocks=dict(self.var_blocks),
        )

    def validate(self):
        for fam in (self._zero, self._nonneg, *self._socs, *(a for _, a in self._psds)):
            for cols in fam.cols:
                if cols.size and (cols.min() < 0 or cols.max() >= self.n_vars):
                    raise ProgramError("constraint references unknown variable")
        for idx in self._obj_idx:
            if idx.size and (idx.min() < 0 or idx.max() >= self.n_vars):
                raise ProgramError("objective references unknown variable")
        for n, acc in self._psds:
            if acc.n_rows != svec_dim(n):
                raise ProgramError("PSD block row count does not match its order")

    def stats(self) -> dict:
        return {
            "vars": self.n_vars,
            "zero_rows": self._zero.n_rows,
            "nonneg_rows": self._nonneg.n_rows,
            "soc_blocks": [a.n_rows for a in self._socs],
            "psd_blocks": [n for n, _ in self._psds],
        }

    def dump(self) -> str:
        """Human-readable listing for external cross-checking."""
        out = [f"conic program ({self.sense}), {self.n_vars} vars"]
        for name, (start, shape) in self.var_blocks.items():
            out.append(f"  var {name}: start={start} shape={shape}")
        c, c0 = self.objective_vector()
        nz = np.nonzero(c)[0]
        out.append(f"  objective: {' + '.join(f'{c[j]:.6g}*x{j}' for j in nz)} + {c0:.6g}")

        def fmt(acc: _RowAccum, tag: str):
            for r, (idx, val, const) in enumerate(zip(acc.cols, acc.vals, acc.consts)):
                expr = " + ".join(f"{v:.6g}*x{j}" for j, v in zip(idx, val)) or "0"
                out.append(f"  {tag}[{r}]: {expr} + {const:.6g}")

        fmt(self._zero, "zero")
        fmt(self._nonneg, "nonneg")
        for k, acc in enumerate(self._socs):
            fmt(acc, f"soc{k}")
        for k, (n, acc) in enumerate(self._psds):
            out.append(f"  psd{k}: order {n}")
            fmt(acc, f"psd{k}")
        return "\n".join(out)
