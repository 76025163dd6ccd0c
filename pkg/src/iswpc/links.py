"""Propagation, harvested energy, uplink throughput, and feasibility checks.

Free-space gains with a 1 m reference; robust quantities use the closed-form
disk minimum of the channel gain, i.e. the farthest point of the uncertainty
disk from the UAV's ground projection.
"""

from __future__ import annotations

import numpy as np

from .scenario import ScenarioConfig


def slant_distance(q, r) -> float:
    """Distance from a 3-D UAV position to a ground point."""
    q = np.asarray(q, dtype=float)
    r = np.asarray(r, dtype=float)
    if q[2] <= 0:
        raise ValueError("UAV altitude must be positive")
    return float(np.hypot(np.linalg.norm(q[:2] - r), q[2]))


def channel_gain(d: float, rho0: float) -> float:
    if d <= 0:
        raise ValueError("distance must be positive")
    return rho0 / d**2


def worst_case_sqdist(q, center, radius) -> float:
    """max over the disk of the squared distance: (||q~ - r|| + radius)^2 + z^2."""
    q = np.asarray(q, dtype=float)
    horiz = np.linalg.norm(q[:2] - np.asarray(center, dtype=float))
    return float((horiz + radius) ** 2 + q[2] ** 2)


def worst_case_gain(q, center, radius, rho0: float) -> float:
    q = np.asarray(q, dtype=float)
    if q[2] <= 0:
        raise ValueError("UAV altitude must be positive")
    return rho0 / worst_case_sqdist(q, center, radius)


def harvested_energy(slot: int, k: int, m: int, trajectories: np.ndarray,
                     tau0: float, cfg: ScenarioConfig,
                     worst_case: bool = False) -> float:
    """Energy captured by user (k, m) in one slot from all downlink beams.

    ``trajectories`` has shape (M, N+1, 3); slot n uses the position q[:, n].
    """
    if not (0.0 <= tau0 < 1.0):
        raise ValueError("tau0 must lie in [0, 1)")
    total = 0.0
    center = cfg.user_pos[k, m]
    radius = cfg.user_radius[k, m]
    for i in range(cfg.m_uav):
        q = trajectories[i, slot]
        if worst_case:
            h = worst_case_gain(q, center, radius, cfg.rho0)
        else:
            h = channel_gain(slant_distance(q, center), cfg.rho0)
        total += h * cfg.p_dl[i]
    return tau0 * cfg.slot_len * cfg.harvest_eff[k, m] * total


def throughput(tau: float, p_ul: float, h: float, sigma_c2: float,
               slot_len: float) -> float:
    """Slot throughput tau * dt * log2(1 + p h / sigma^2); zero slot -> 0."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if tau == 0.0:
        return 0.0
    return tau * slot_len * np.log2(1.0 + p_ul * h / sigma_c2)


def user_rate(k: int, m: int, trajectories: np.ndarray, tau: np.ndarray,
              p_ul: np.ndarray, cfg: ScenarioConfig,
              worst_case: bool = True) -> float:
    """Average (over slots) throughput of user (k, m) served by its own UAV.

    With ``worst_case`` the per-slot gain is the disk minimum, matching the
    robust objective; the slot index into trajectories is n = 1..N.
    """
    center = cfg.user_pos[k, m]
    radius = cfg.user_radius[k, m] if worst_case else 0.0
    total = 0.0
    for n in range(1, cfg.n_slots + 1):
        q = trajectories[m, n]
        h = worst_case_gain(q, center, radius, cfg.rho0)
        total += throughput(tau[k, m, n - 1], p_ul[k, m, n - 1], h,
                            cfg.sigma_c2[m], cfg.slot_len)
    return total / cfg.n_slots


def energy_causality_violation(tau: np.ndarray, psi: np.ndarray,
                               trajectories: np.ndarray, tau0: float,
                               cfg: ScenarioConfig,
                               worst_case: bool = True) -> float:
    """Largest cumulative overdraw (J) across users and slot prefixes.

    Spend in slot n is dt * psi[k, m, n]; income is the initial store plus
    harvested energy through slot n (evaluated at worst-case positions when
    asked).  Nonpositive means every prefix is covered.
    """
    worst = 0.0
    for m in range(cfg.m_uav):
        for k in range(cfg.k_users):
            income = cfg.initial_energy[k, m]
            spent = 0.0
            for n in range(1, cfg.n_slots + 1):
                income += harvested_energy(n, k, m, trajectories, tau0, cfg,
                                           worst_case=worst_case)
                spent += cfg.slot_len * psi[k, m, n - 1]
                worst = max(worst, spent - income)
    return worst


def trajectory_violations(trajectories: np.ndarray, cfg: ScenarioConfig) -> dict:
    """Max violation per flight-geometry constraint family, in meters."""
    out = {"speed": 0.0, "alt_box": 0.0, "alt_avg": 0.0, "cluster": 0.0,
           "periodic": 0.0, "nfz": 0.0}
    dt_v = cfg.slot_len * cfg.v_max
    for m in range(cfg.m_uav):
        q = trajectories[m]
        steps = np.linalg.norm(np.diff(q, axis=0), axis=1)
        out["speed"] = max(out["speed"], float(np.max(steps) - dt_v))
        out["alt_box"] = max(out["alt_box"],
                             float(np.max(cfg.z_min - q[:, 2])),
                             float(np.max(q[:, 2] - cfg.z_max)))
        out["alt_avg"] = max(out["alt_avg"],
                             float(cfg.z_tr[m] - np.mean(q[1:, 2])))
        box = cfg.cluster_boxes[m]
        out["cluster"] = max(
            out["cluster"],
            float(np.max(box[0] - q[:, 0])), float(np.max(q[:, 0] - box[1])),
            float(np.max(box[2] - q[:, 1])), float(np.max(q[:, 1] - box[3])))
        out["periodic"] = max(out["periodic"],
                              float(np.linalg.norm(q[-1] - q[0])))
        for c, r in zip(cfg.nfz_centers[m], cfg.nfz_radii[m]):
            d = np.linalg.norm(q[:, :2] - c[None, :], axis=1)
            out["nfz"] = max(out["nfz"], float(np.max(r - d)))
    return out


def schedule_violations(tau: np.ndarray, l_value: int, cfg: ScenarioConfig) -> dict:
    """Uplink time-budget violations for integration length ``l_value``."""
    budget = 1.0 - l_value * cfg.tau0_tilde
    out = {"negative": float(max(0.0, -tau.min())), "budget": 0.0}
    sums = tau.sum(axis=0)  # (M, N)
    out["budget"] = float(max(0.0, sums.max() - budget))
    return out
