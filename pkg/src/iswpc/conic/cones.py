"""Cone arithmetic: symmetric vectorization, Jordan products, NT scalings.

Cones are handled in their standard vector embeddings:

* nonnegative orthant -- plain componentwise arithmetic,
* second-order cone  -- (t, u) with ||u||_2 <= t, arrow-matrix algebra,
* PSD cone           -- svec'd symmetric matrices with sqrt(2)-scaled
                        off-diagonals so that <svec A, svec B> = tr(AB).
"""

from __future__ import annotations

import numpy as np

ZERO = "zero"
NONNEG = "nonneg"
SOC = "soc"
PSD = "psd"

_SQRT2 = np.sqrt(2.0)

_svec_cache: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def svec_dim(n: int) -> int:
    return n * (n + 1) // 2


def _svec_idx(n: int):
    """Cached (rows, cols, offdiag mask) for the lower triangle of an n x n."""
    try:
        return _svec_cache[n]
    except KeyError:
        rows, cols = np.tril_indices(n)
        off = rows != cols
        _svec_cache[n] = (rows, cols, off)
        return _svec_cache[n]


def svec(mat: np.ndarray) -> np.ndarray:
    """Vectorize a symmetric matrix; off-diagonals scaled by sqrt(2)."""
    n = mat.shape[0]
    rows, cols, off = _svec_idx(n)
    v = np.asarray(mat, dtype=float)[rows, cols].copy()
    v[off] *= _SQRT2
    return v


def smat(vec: np.ndarray, n: int) -> np.ndarray:
    """Inverse of svec."""
    rows, cols, off = _svec_idx(n)
    v = np.asarray(vec, dtype=float).copy()
    v[off] /= _SQRT2
    out = np.zeros((n, n))
    out[rows, cols] = v
    out[cols, rows] = v
    return out


def _soc_residual(v):
    return v[0] - np.linalg.norm(v[1:])


def _soc_max_step(v, dv):
    """Largest a >= 0 with v + t*dv in the SOC for all t in [0, a]."""
    # Roots of q(t) = (v0+t d0)^2 - ||v1+t d1||^2 together with v0+t d0 >= 0.
    a = dv[0] ** 2 - dv[1:] @ dv[1:]
    b = 2.0 * (v[0] * dv[0] - v[1:] @ dv[1:])
    c = v[0] ** 2 - v[1:] @ v[1:]
    roots = []
    if abs(a) > 1e-300:
        disc = b * b - 4.0 * a * c
        if disc >= 0.0:
            sq = np.sqrt(disc)
            roots.extend([(-b - sq) / (2 * a), (-b + sq) / (2 * a)])
    elif abs(b) > 1e-300:
        roots.append(-c / b)
    if dv[0] < 0.0:
        roots.append(-v[0] / dv[0])
    best = np.inf
    for r in roots:
        if r > 1e-300:
            best = min(best, r)
    return best


class ConeWorkspace:
    """Block layout plus the per-iteration NT scaling for a cone product.

    ``dims`` is a dict with keys ``l`` (nonneg count), ``q`` (list of SOC
    dims) and ``s`` (list of PSD matrix orders).  Vectors over the cone are
    stacked in that order, PSD blocks svec'd.
    """

    def __init__(self, dims):
        self.l = int(dims.get("l", 0))
        self.q = [int(d) for d in dims.get("q", [])]
        self.s = [int(d) for d in dims.get("s", [])]
        self.dim = self.l + sum(self.q) + sum(svec_dim(n) for n in self.s)
        # <s, z> on the central path equals mu times this degree.
        self.degree = self.l + len(self.q) + sum(self.s)
        self._slices = []
        off = self.l
        for d in self.q:
            self._slices.append(slice(off, off + d))
            off += d
        self._psd_slices = []
        for n in self.s:
            self._psd_slices.append(slice(off, off + svec_dim(n)))
            off += svec_dim(n)
        # scaling state
        self._w_l = None
        self._soc = []   # (eta, wbar) per SOC block
        self._psd = []   # (R, Rinv, lam_diag) per PSD block
        self.lam = None

    # -- static cone geometry -------------------------------------------------

    def identity(self) -> np.ndarray:
        e = np.zeros(self.dim)
        e[: self.l] = 1.0
        for sl in self._slices:
            e[sl.start] = 1.0
        for n, sl in zip(self.s, self._psd_slices):
            e[sl] = svec(np.eye(n))
        return e

    def margin(self, v: np.ndarray) -> float:
        """Distance-to-boundary proxy: min over blocks of the smallest eigenvalue."""
        m = np.inf
        if self.l:
            m = min(m, float(np.min(v[: self.l])))
        for sl in self._slices:
            m = min(m, _soc_residual(v[sl]))
        for n, sl in zip(self.s, self._psd_slices):
            m = min(m, float(np.linalg.eigvalsh(smat(v[sl], n))[0]))
        return m

    def max_step(self, v: np.ndarray, dv: np.ndarray) -> float:
        """Largest a with v + t*dv in the cone for all t in [0, a]."""
        step = np.inf
        if self.l:
            neg = dv[: self.l] < 0.0
            if np.any(neg):
                step = min(step, float(np.min(-v[: self.l][neg] / dv[: self.l][neg])))
        for sl in self._slices:
            step = min(step, _soc_max_step(v[sl], dv[sl]))
        for n, sl in zip(self.s, self._psd_slices):
            S = smat(v[sl], n)
            D = smat(dv[sl], n)
            try:
                L = np.linalg.cholesky(S)
            except np.linalg.LinAlgError:
                # fall back to eigenvalue shift for boundary points
                w, V = np.linalg.eigh(S)
                w = np.maximum(w, 1e-14 * max(1.0, w[-1]))
                L = V * np.sqrt(w)
            M = np.linalg.solve(L, np.linalg.solve(L, D).T).T
            lo = float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])
            if lo < 0.0:
                step = min(step, -1.0 / lo)
        return step

    # -- Jordan algebra --------------------------------------------------------

    def jordan_mul(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        out = np.empty(self.dim)
        out[: self.l] = u[: self.l] * v[: self.l]
        for sl in self._slices:
            ub, vb = u[sl], v[sl]
            out[sl.start] = ub @ vb
            out[sl.start + 1 : sl.stop] = ub[0] * vb[1:] + vb[0] * ub[1:]
        for n, sl in zip(self.s, self._psd_slices):
            U, V = smat(u[sl], n), smat(v[sl], n)
            out[sl] = svec(0.5 * (U @ V + V @ U))
        return out

    def jordan_solve(self, lam: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        """Solve lam o x = rhs for x (lam in the cone interior)."""
        out = np.empty(self.dim)
        out[: self.l] = rhs[: self.l] / lam[: self.l]
        for sl in self._slices:
            lb, rb = lam[sl], rhs[sl]
            det = lb[0] ** 2 - lb[1:] @ lb[1:]
            x0 = (lb[0] * rb[0] - lb[1:] @ rb[1:]) / det
            out[sl.start] = x0
            out[sl.start + 1 : sl.stop] = (rb[1:] - x0 * lb[1:]) / lb[0]
        for n, sl in zip(self.s, self._psd_slices):
            L = smat(lam[sl], n)
            d, V = np.linalg.eigh(L)
            R = V.T @ smat(rhs[sl], n) @ V
            X = 2.0 * R / np.add.outer(d, d)
            out[sl] = svec(V @ X @ V.T)
        return out

    # -- Nesterov-Todd scaling -------------------------------------------------

    def update_scaling(self, s: np.ndarray, z: np.ndarray) -> None:
        """Compute the NT scaling W with W z = W^{-T} s = lam."""
        lam = np.empty(self.dim)
        if self.l:
            self._w_l = np.sqrt(s[: self.l] / z[: self.l])
            lam[: self.l] = np.sqrt(s[: self.l] * z[: self.l])
        self._soc = []
        for sl in self._slices:
            sb, zb = s[sl], z[sl]
            J = np.ones(sb.size)
            J[1:] = -1.0
            sj = sb[0] ** 2 - sb[1:] @ sb[1:]
            zj = zb[0] ** 2 - zb[1:] @ zb[1:]
            sn = sb / np.sqrt(sj)
            zn = zb / np.sqrt(zj)
            gamma = np.sqrt((1.0 + sn @ zn) / 2.0)
            wbar = (sn + J * zn) / (2.0 * gamma)
            eta = (sj / zj) ** 0.25
            self._soc.append((eta, wbar))
            lam[sl] = self._apply_soc(eta, wbar, zb)
        self._psd = []
        for n, sl in zip(self.s, self._psd_slices):
            S, Z = smat(s[sl], n), smat(z[sl], n)
            Ls = np.linalg.cholesky(S)
            Lz = np.linalg.cholesky(Z)
            U, sig, Vt = np.linalg.svd(Lz.T @ Ls)
            R = Ls @ Vt.T / np.sqrt(sig)
            Rinv = (U / np.sqrt(sig)).T @ Lz.T
            self._psd.append((R, Rinv, sig))
            lam[sl] = svec(np.diag(sig))
        self.lam = lam

    @staticmethod
    def _apply_soc(eta, wbar, v):
        # W = eta * [[w0, w1'], [w1, I + w1 w1'/(1+w0)]], the square root of
        # the quadratic representation 2 wbar wbar' - J on the unit hyperboloid
        w0, w1 = wbar[0], wbar[1:]
        out = np.empty_like(v)
        out[0] = w0 * v[0] + w1 @ v[1:]
        out[1:] = v[0] * w1 + v[1:] + w1 * (w1 @ v[1:]) / (1.0 + w0)
        return eta * out

    @staticmethod
    def _apply_soc_inv(eta, wbar, v):
        # W^{-1} = eta^{-1} J W J
        w0, w1 = wbar[0], wbar[1:]
        out = np.empty_like(v)
        out[0] = w0 * v[0] - w1 @ v[1:]
        out[1:] = -v[0] * w1 + v[1:] + w1 * (w1 @ v[1:]) / (1.0 + w0)
        return out / eta

    def apply_W(self, v: np.ndarray) -> np.ndarray:
        out = np.empty(self.dim)
        if self.l:
            out[: self.l] = self._w_l * v[: self.l]
        for (eta, wbar), sl in zip(self._soc, self._slices):
            out[sl] = self._apply_soc(eta, wbar, v[sl])
        for (R, _, _), (n, sl) in zip(self._psd, zip(self.s, self._psd_slices)):
            out[sl] = svec(R.T @ smat(v[sl], n) @ R)
        return out

    def apply_Wt(self, v: np.ndarray) -> np.ndarray:
        out = np.empty(self.dim)
        if self.l:
            out[: self.l] = self._w_l * v[: self.l]
        for (eta, wbar), sl in zip(self._soc, self._slices):
            out[sl] = self._apply_soc(eta, wbar, v[sl])
        for (R, _, _), (n, sl) in zip(self._psd, zip(self.s, self._psd_slices)):
            out[sl] = svec(R @ smat(v[sl], n) @ R.T)
        return out

    def apply_Winv(self, v: np.ndarray) -> np.ndarray:
        out = np.empty(self.dim)
        if self.l:
            out[: self.l] = v[: self.l] / self._w_l
        for (eta, wbar), sl in zip(self._soc, self._slices):
            out[sl] = self._apply_soc_inv(eta, wbar, v[sl])
        for (_, Rinv, _), (n, sl) in zip(self._psd, zip(self.s, self._psd_slices)):
            out[sl] = svec(Rinv.T @ smat(v[sl], n) @ Rinv)
        return out

    def apply_Winv_t(self, v: np.ndarray) -> np.ndarray:
        out = np.empty(self.dim)
        if self.l:
            out[: self.l] = v[: self.l] / self._w_l
        for (eta, wbar), sl in zip(self._soc, self._slices):
            out[sl] = self._apply_soc_inv(eta, wbar, v[sl])
        for (_, Rinv, _), (n, sl) in zip(self._psd, zip(self.s, self._psd_slices)):
            out[sl] = svec(Rinv @ smat(v[sl], n) @ Rinv.T)
        return out

    def apply_H_inv(self, v: np.ndarray) -> np.ndarray:
        """(W^T W)^{-1} v."""
        return self.apply_Winv(self.apply_Winv_t(v))

    def scaled_block_matrices(self):
        """Per-block dense operators of W^{-T}, used to assemble G' = W^{-T} G.

        Returns (w_l, soc_mats, psd_ops) where soc_mats are small dense
        matrices and psd_ops map svec bases through R^{-1} (.) R^{-T}.
        """
        soc_mats = []
        for (eta, wbar), sl in zip(self._soc, self._slices):
            d = sl.stop - sl.start
            M = np.empty((d, d))
            for j in range(d):
                ej = np.zeros(d)
                ej[j] = 1.0
                M[:, j] = self._apply_soc_inv(eta, wbar, ej)
            soc_mats.append(M)
        psd_mats = []
        for (_, Rinv, _), n in zip(self._psd, self.s):
            sd = svec_dim(n)
            M = np.empty((sd, sd))
            for j in range(sd):
                ej = np.zeros(sd)
                ej[j] = 1.0
                M[:, j] = svec(Rinv @ smat(ej, n) @ Rinv.T)
            psd_mats.append(M)
        return self._w_l, soc_mats, psd_mats

    def block_slices(self):
        out = [("nonneg", slice(0, self.l))] if self.l else []
        out += [("soc", sl) for sl in self._slices]
        out += [("psd", sl) for sl in self._psd_slices]
        return out
