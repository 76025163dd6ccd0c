import numpy as np
import pytest

from iswpc.links import (channel_gain, energy_causality_violation,
                         harvested_energy, schedule_violations, slant_distance,
                         throughput, trajectory_violations, user_rate,
                         worst_case_gain, worst_case_sqdist)
from iswpc.scenario import load_scenario, resolve_scenario, sample_uncertainty


@pytest.fixture(scope="module")
def cfg():
    return load_scenario(resolve_scenario("desk_2d"))


def test_slant_distance_values():
    assert slant_distance([0, 0, 100], [0, 0]) == pytest.approx(100.0)
    assert slant_distance([30, 40, 100], [0, 0]) == pytest.approx(np.sqrt(12500))
    with pytest.raises(ValueError):
        slant_distance([30, 40, 0.0], [0, 0])


def test_channel_gain_inverse_square():
    assert channel_gain(100.0, 1e-3) == pytest.approx(1e-7)
    assert channel_gain(1.0, 1e-3) == pytest.approx(1e-3)
    assert channel_gain(2.0, 1e-3) == pytest.approx(channel_gain(1.0, 1e-3) / 4)


def test_worst_case_gain_closed_form_and_sampling():
    q = np.array([0.0, 0.0, 100.0])
    center, radius = np.array([30.0, 40.0]), 6.0
    # closed form: (50 + 6)^2 + 100^2 = 13136
    assert worst_case_sqdist(q, center, radius) == pytest.approx(13136.0)
    g = worst_case_gain(q, center, radius, 1e-3)
    assert g == pytest.approx(1e-3 / 13136.0, rel=1e-12)
    assert g == pytest.approx(7.613e-8, rel=1e-3)
    # sampling oracle: min over 1e5 disk samples never beats the closed form
    from iswpc.scenario import UserSpec
    user = UserSpec(position=center, radius=radius, harvest_eff=0.5,
                    initial_energy=1e-3)
    pts = sample_uncertainty(user, 100_000, seed=3)
    gains = 1e-3 / ((np.linalg.norm(pts - q[None, :2], axis=1)) ** 2 + 100.0**2)
    assert gains.min() >= g - 1e-12
    assert gains.min() <= g * (1 + 1e-3)


def test_worst_case_equals_nominal_when_no_uncertainty():
    q = np.array([10.0, -5.0, 80.0])
    center = np.array([3.0, 4.0])
    assert worst_case_gain(q, center, 0.0, 1e-3) == pytest.approx(
        channel_gain(slant_distance(q, center), 1e-3), rel=1e-14)


def test_harvested_energy_single_overhead(cfg):
    # one UAV directly overhead at 100 m: E = tau0 dt eps p rho0 / 1e4
    traj = np.zeros((2, cfg.n_slots + 1, 3))
    traj[:, :, 2] = 100.0
    traj[0, :, :2] = cfg.user_pos[0, 0]
    traj[1, :, :2] = [1e9, 1e9]  # push the other flight effectively away
    cfg0 = cfg.with_uncertainty(0.0)
    e = harvested_energy(1, 0, 0, traj, tau0=0.3584, cfg=cfg0)
    expect = 0.3584 * 1.0 * 0.5 * cfg.p_dl[0] * 1e-3 / 1e4
    assert e == pytest.approx(expect, rel=1e-6)
    assert expect == pytest.approx(8.98e-8, rel=2e-3)


def test_harvested_energy_zero_subslot(cfg):
    traj = np.zeros((2, cfg.n_slots + 1, 3))
    traj[:, :, 2] = 100.0
    assert harvested_energy(1, 0, 0, traj, 0.0, cfg) == 0.0


def test_harvested_energy_linear_in_fleet(cfg):
    # two co-located flights give exactly twice the single-flight energy
    traj = np.zeros((2, cfg.n_slots + 1, 3))
    traj[:, :, 2] = 100.0
    traj[:, :, :2] = cfg.user_pos[0, 0]
    both = harvested_energy(1, 0, 0, traj, 0.2, cfg, worst_case=True)
    solo = both * 0.5
    expect_solo = 0.2 * cfg.slot_len * 0.5 * cfg.p_dl[0] * worst_case_gain(
        traj[0, 1], cfg.user_pos[0, 0], cfg.user_radius[0, 0], cfg.rho0)
    assert solo == pytest.approx(expect_solo, rel=1e-12)


def test_throughput_values():
    assert throughput(0.0, 5.0, 1e-7, 1e-13, 1.0) == 0.0
    # 0.5 * log2(1 + 1e-3*1e-7/10^(-16.4))
    sigma = 10 ** (-13.4) * 1e-3
    got = throughput(0.5, 1e-3, 1e-7, sigma, 1.0)
    assert got == pytest.approx(0.5 * np.log2(1 + 1e-10 / sigma), rel=1e-12)
    assert got == pytest.approx(10.63, abs=0.05)
    with pytest.raises(ValueError):
        throughput(-0.1, 1.0, 1e-7, 1e-13, 1.0)


def test_throughput_high_snr_doubling_slope():
    sigma = 1e-16
    base = throughput(0.25, 1e-3, 1e-7, sigma, 1.0)
    double = throughput(0.25, 2e-3, 1e-7, sigma, 1.0)
    assert double - base == pytest.approx(0.25, abs=1e-6)


def test_throughput_perspective_concavity():
    """Midpoint test of (tau, psi) -> tau log2(1 + c psi / tau)."""
    rng = np.random.default_rng(9)
    c = 2.5e6

    def f(tau, psi):
        return throughput(tau, psi / tau if tau > 0 else 0.0, c * 1e-13,
                          1e-13, 1.0)

    for _ in range(2000):
        t1, t2 = rng.uniform(1e-3, 1.0, 2)
        p1, p2 = rng.uniform(0.0, 2.0, 2)
        mid = f(0.5 * (t1 + t2), 0.5 * (p1 + p2))
        assert mid >= 0.5 * f(t1, p1) + 0.5 * f(t2, p2) - 1e-10


def test_energy_causality_no_spend(cfg):
    traj = np.tile(cfg.starts[:, None, :], (1, cfg.n_slots + 1, 1))
    psi = np.zeros((cfg.k_users, cfg.m_uav, cfg.n_slots))
    tau = np.zeros_like(psi)
    assert energy_causality_violation(tau, psi, traj, 0.1, cfg) <= 0.0


def test_energy_causality_slack_dominance(cfg):
    import dataclasses
    big = dataclasses.replace(cfg, initial_energy=np.full((2, 2), 1e9))
    traj = np.tile(cfg.starts[:, None, :], (1, cfg.n_slots + 1, 1))
    psi = np.full((2, 2, cfg.n_slots), 1e3)
    tau = np.full_like(psi, 0.1)
    assert energy_causality_violation(tau, psi, traj, 0.1, big) <= 0.0


def test_energy_causality_detects_overdraw(cfg):
    traj = np.tile(cfg.starts[:, None, :], (1, cfg.n_slots + 1, 1))
    psi = np.zeros((2, 2, cfg.n_slots))
    psi[0, 0, 0] = 2.0 * cfg.initial_energy[0, 0] / cfg.slot_len
    tau = np.full_like(psi, 0.1)
    v = energy_causality_violation(tau, psi, traj, 0.0, cfg)
    assert v == pytest.approx(cfg.initial_energy[0, 0], rel=1e-9)


def test_trajectory_violation_report(cfg):
    traj = np.tile(cfg.starts[:, None, :], (1, cfg.n_slots + 1, 1))
    rep = trajectory_violations(traj, cfg)
    assert all(v <= 1e-9 for v in rep.values())
    traj2 = traj.copy()
    traj2[0, 3, 0] += 50.0  # one 50 m hop breaks the speed cap twice
    rep2 = trajectory_violations(traj2, cfg)
    assert rep2["speed"] == pytest.approx(30.0)


def test_schedule_violation_report(cfg):
    tau = np.full((2, 2, cfg.n_slots), 0.2)
    rep = schedule_violations(tau, 32, cfg)
    assert rep["negative"] == 0.0
    # budget 1 - 32*7e-3 = 0.776; sum over k = 0.4 per (m, n)
    assert rep["budget"] == 0.0
    tau[0, 0, 0] = 0.7
    rep2 = schedule_violations(tau, 32, cfg)
    assert rep2["budget"] == pytest.approx(0.9 - 0.776, rel=1e-9)


def test_user_rate_matches_manual_sum(cfg):
    rng = np.random.default_rng(11)
    traj = np.tile(cfg.starts[:, None, :], (1, cfg.n_slots + 1, 1))
    tau = rng.uniform(0.05, 0.3, size=(2, 2, cfg.n_slots))
    p_ul = rng.uniform(1e-4, 1e-2, size=(2, 2, cfg.n_slots))
    got = user_rate(0, 1, traj, tau, p_ul, cfg, worst_case=True)
    acc = 0.0
    for n in range(cfg.n_slots):
        h = worst_case_gain(traj[1, n + 1], cfg.user_pos[0, 1],
                            cfg.user_radius[0, 1], cfg.rho0)
        acc += throughput(tau[0, 1, n], p_ul[0, 1, n], h, cfg.sigma_c2[1],
                          cfg.slot_len)
    assert got == pytest.approx(acc / cfg.n_slots, rel=1e-12)
