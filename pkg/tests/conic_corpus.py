"""Analytic conic test corpus: programs with closed-form optima or known status.

Each entry is (name, build_fn) where build_fn() returns (program, expected):
expected is a float optimum, or one of the status strings for infeasible /
unbounded instances.
"""

import numpy as np

from iswpc.conic import ConicProgram

INF = "Infeasible"
UNB = "Unbounded"


def _lp_endpoint():
    p = ConicProgram("max")
    x = p.add_vars("x")
    p.add_objective([x], [1.0])
    p.add_nonneg([x], [-1.0], 1.0)
    p.add_nonneg([x], [1.0], 0.0)
    return p, 1.0


def _lp_box():
    rng = np.random.default_rng(3)
    c = rng.normal(size=5)
    p = ConicProgram("min")
    x = p.add_vars("x", (5,))
    p.add_objective(x, c)
    for j in range(5):
        p.add_nonneg([x[j]], [1.0], 0.0)
        p.add_nonneg([x[j]], [-1.0], 1.0)
    return p, float(np.minimum(c, 0.0).sum())


def _lp_eq():
    p = ConicProgram("min")
    x = p.add_vars("x", (2,))
    p.add_objective(x, [1.0, 1.0])
    p.add_zero(x, [1.0, 1.0], -1.0)
    p.add_nonneg_membership(x)
    return p, 1.0


def _lp_transport():
    p = ConicProgram("min")
    x = p.add_vars("x", (2,))
    p.add_objective(x, [2.0, 3.0])
    p.add_nonneg(x, [1.0, 1.0], -4.0)
    p.add_nonneg([x[0]], [-1.0], 3.0)
    p.add_nonneg_membership(x)
    return p, 9.0


def _lp_degenerate():
    p = ConicProgram("max")
    x = p.add_vars("x")
    p.add_objective([x], [1.0])
    p.add_nonneg([x], [-1.0], 1.0)
    p.add_nonneg([x], [-1.0], 1.0)
    p.add_nonneg([x], [1.0], 0.0)
    return p, 1.0


def _lp_badscale():
    p = ConicProgram("max")
    x = p.add_vars("x", (2,))
    p.add_objective(x, [1.0, 1e-4])
    p.add_nonneg([x[0]], [-1e8], 1e8)
    p.add_nonneg([x[1]], [-1e-4], 1e-4)
    p.add_nonneg_membership(x)
    return p, 1.0 + 1e-4


def _lp_free_lower():
    p = ConicProgram("min")
    y = p.add_vars("y")
    p.add_objective([y], [1.0])
    p.add_nonneg([y], [1.0], -3.0)
    return p, 3.0


def _soc_projection():
    p = ConicProgram("min")
    t = p.add_vars("t")
    q = p.add_vars("q", (2,))
    p.add_objective([t], [1.0])
    p.add_soc([([t], [1.0], 0.0), ([q[0]], [1.0], -3.0), ([q[1]], [1.0], -4.0)])
    return p, 0.0


def _soc_ball_lp():
    p = ConicProgram("min")
    x = p.add_vars("x", (2,))
    p.add_objective(x, [1.0, 1.0])
    r = 0.5
    p.add_soc([([], [], r), ([x[0]], [1.0], -1.0), ([x[1]], [1.0], -1.0)])
    return p, 2.0 - r * np.sqrt(2.0)


def _soc_support():
    p = ConicProgram("max")
    q = p.add_vars("q", (2,))
    p.add_objective([q[0]], [1.0])
    p.add_soc([([], [], 1.0), ([q[0]], [1.0], 0.0), ([q[1]], [1.0], 0.0)])
    return p, 1.0


def _soc_nonneg_projection():
    p = ConicProgram("min")
    t = p.add_vars("t")
    x = p.add_vars("x", (2,))
    p.add_objective([t], [1.0])
    p.add_soc([([t], [1.0], 0.0), ([x[0]], [1.0], -1.0), ([x[1]], [1.0], 2.0)])
    p.add_nonneg_membership(x)
    return p, 2.0


def _soc_square():
    # epigraph u >= z^2 via || [2z, u-1] || <= u+1 with z pinned to 3
    p = ConicProgram("min")
    u = p.add_vars("u")
    z = p.add_vars("z")
    p.add_objective([u], [1.0])
    p.add_zero([z], [1.0], -3.0)
    p.add_soc([([u], [1.0], 1.0), ([z], [2.0], 0.0), ([u], [1.0], -1.0)])
    return p, 9.0


def _sdp_corr():
    p = ConicProgram("max")
    X = p.add_psd_var("X", 2)
    idx, val = ConicProgram.trace_terms(X, np.array([[0.0, 1.0], [1.0, 0.0]]))
    p.add_objective(idx, val)
    p.add_zero([X[0]], [1.0], -1.0)
    p.add_zero([X[2]], [1.0], -1.0)
    return p, 2.0


def _rand_sym(seed, n=3):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    return 0.5 * (A + A.T)


def _sdp_lambda_min():
    C = _rand_sym(7)
    p = ConicProgram("min")
    X = p.add_psd_var("X", 3)
    idx, val = ConicProgram.trace_terms(X, C)
    p.add_objective(idx, val)
    ti, tv = ConicProgram.trace_terms(X, np.eye(3))
    p.add_zero(ti, tv, -1.0)
    return p, float(np.linalg.eigvalsh(C)[0])


def _sdp_lambda_max():
    C = _rand_sym(11)
    p = ConicProgram("max")
    X = p.add_psd_var("X", 3)
    idx, val = ConicProgram.trace_terms(X, C)
    p.add_objective(idx, val)
    ti, tv = ConicProgram.trace_terms(X, np.eye(3))
    p.add_zero(ti, tv, -1.0)
    return p, float(np.linalg.eigvalsh(C)[-1])


def _sdp_lambda_max_dual():
    C = _rand_sym(13)
    p = ConicProgram("min")
    t = p.add_vars("t")
    p.add_objective([t], [1.0])
    p.add_psd(3, -C, [(t, np.eye(3))])
    return p, float(np.linalg.eigvalsh(C)[-1])


def _sdp_opnorm():
    rng = np.random.default_rng(17)
    A = rng.normal(size=(2, 3))
    p = ConicProgram("min")
    t = p.add_vars("t")
    p.add_objective([t], [1.0])
    F0 = np.zeros((5, 5))
    F0[:2, 2:] = A
    F0[2:, :2] = A.T
    p.add_psd(5, F0, [(t, np.eye(5))])
    return p, float(np.linalg.svd(A, compute_uv=False)[0])


def _sdp_offdiag_cap():
    p = ConicProgram("max")
    t = p.add_vars("t")
    p.add_objective([t], [1.0])
    F = np.array([[0.0, 1.0], [1.0, 0.0]])
    p.add_psd(2, np.eye(2), [(t, F)])
    return p, 1.0


def _sdp_pin_diag():
    p = ConicProgram("min")
    X = p.add_psd_var("X", 2)
    ti, tv = ConicProgram.trace_terms(X, np.eye(2))
    p.add_objective(ti, tv)
    p.add_zero([X[0]], [1.0], -1.0)
    return p, 1.0


def _sdp_lyapunov():
    # A = -I/2: A'P + PA = -P <= -I means P >= I; min tr P = 2
    p = ConicProgram("min")
    P = p.add_psd_var("P", 2)
    ti, tv = ConicProgram.trace_terms(P, np.eye(2))
    p.add_objective(ti, tv)
    acc_terms = []
    E00 = np.array([[1.0, 0.0], [0.0, 0.0]])
    E11 = np.array([[0.0, 0.0], [0.0, 1.0]])
    E01 = np.array([[0.0, 1.0], [1.0, 0.0]])
    acc_terms.append((int(P[0]), E00))
    acc_terms.append((int(P[2]), E11))
    acc_terms.append((int(P[1]), E01/ np.sqrt(2.0) * 1.0))
    p.add_psd(2, -np.eye(2), acc_terms)
    return p, 2.0


def _mixed_soc_sdp():
    p = ConicProgram("min")
    t = p.add_vars("t")
    x = p.add_vars("x", (2,))
    p.add_objective([t], [1.0])
    p.add_zero([x[0]], [1.0], -1.0)
    p.add_soc([([t], [1.0], 0.0), ([x[0]], [1.0], 0.0), ([x[1]], [1.0], 0.0)])
    F0 = np.eye(2)
    F = np.array([[0.0, 1.0], [1.0, 0.0]])
    p.add_psd(2, F0, [(int(x[0]), F)])
    return p, 1.0


def _sdp_min_eig_cert():
    C = _rand_sym(23, n=4)
    p = ConicProgram("max")
    t = p.add_vars("t")
    p.add_objective([t], [1.0])
    p.add_psd(4, C, [(t, -np.eye(4))])
    return p, float(np.linalg.eigvalsh(C)[0])


def _lp_interval():
    p = ConicProgram("min")
    y = p.add_vars("y")
    p.add_objective([y], [1.0])
    p.add_nonneg([y], [1.0], -3.0)
    p.add_nonneg([y], [1.0], 5.0)
    return p, 3.0


def _infeas_lp():
    p = ConicProgram("max")
    x = p.add_vars("x")
    p.add_objective([x], [1.0])
    p.add_nonneg([x], [1.0], -1.0)   # x >= 1
    p.add_nonneg([x], [-1.0], 0.0)   # x <= 0
    return p, INF


def _infeas_eq():
    p = ConicProgram("min")
    x = p.add_vars("x")
    p.add_objective([x], [1.0])
    p.add_zero([x], [1.0], -1.0)
    p.add_zero([x], [1.0], -2.0)
    p.add_nonneg([x], [1.0], 0.0)
    return p, INF


def _infeas_soc():
    p = ConicProgram("min")
    x = p.add_vars("x")
    p.add_objective([x], [1.0])
    p.add_soc([([], [], -1.0), ([x], [1.0], 0.0)])
    return p, INF


def _infeas_psd():
    p = ConicProgram("min")
    x = p.add_vars("x")
    p.add_objective([x], [1.0])
    F0 = np.array([[-1.0, 0.0], [0.0, 0.0]])
    F = np.array([[0.0, 0.0], [0.0, 1.0]])
    p.add_psd(2, F0, [(x, F)])
    return p, INF


def _infeas_mixed():
    p = ConicProgram("min")
    x = p.add_vars("x")
    p.add_objective([x], [1.0])
    p.add_nonneg([x], [-1.0], -3.0)  # x <= -3
    p.add_nonneg([x], [1.0], 0.0)    # x >= 0
    return p, INF


def _unbounded_max():
    p = ConicProgram("max")
    x = p.add_vars("x")
    p.add_objective([x], [1.0])
    p.add_nonneg([x], [1.0], 0.0)
    return p, UNB


def _unbounded_min():
    p = ConicProgram("min")
    x = p.add_vars("x")
    p.add_objective([x], [1.0])
    p.add_nonneg([x], [-1.0], 5.0)
    return p, UNB


ANALYTIC = [
    ("lp_endpoint", _lp_endpoint),
    ("lp_box", _lp_box),
    ("lp_eq", _lp_eq),
    ("lp_transport", _lp_transport),
    ("lp_degenerate", _lp_degenerate),
    ("lp_badscale", _lp_badscale),
    ("lp_free_lower", _lp_free_lower),
    ("lp_interval", _lp_interval),
    ("soc_projection", _soc_projection),
    ("soc_ball_lp", _soc_ball_lp),
    ("soc_support", _soc_support),
    ("soc_nonneg_projection", _soc_nonneg_projection),
    ("soc_square", _soc_square),
    ("sdp_corr", _sdp_corr),
    ("sdp_lambda_min", _sdp_lambda_min),
    ("sdp_lambda_max", _sdp_lambda_max),
    ("sdp_lambda_max_dual", _sdp_lambda_max_dual),
    ("sdp_opnorm", _sdp_opnorm),
    ("sdp_offdiag_cap", _sdp_offdiag_cap),
    ("sdp_pin_diag", _sdp_pin_diag),
    ("sdp_lyapunov", _sdp_lyapunov),
    ("mixed_soc_sdp", _mixed_soc_sdp),
    ("sdp_min_eig_cert", _sdp_min_eig_cert),
]

PATHOLOGICAL = [
    ("infeas_lp", _infeas_lp),
    ("infeas_eq", _infeas_eq),
    ("infeas_soc", _infeas_soc),
    ("infeas_psd", _infeas_psd),
    ("infeas_mixed", _infeas_mixed),
    ("unbounded_max", _unbounded_max),
    ("unbounded_min", _unbounded_min),
]
