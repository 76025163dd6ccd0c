"""Scenario definition: fleet, users, clusters, radar and channel constants.

Scenario files are YAML with nested sections.  Power-like quantities accept
either plain linear values or strings with an explicit unit tag
(``"37 dBm"``, ``"-30 dB"``); everything is stored in linear units after
loading.  Radar noise and clutter levels are specified as ratios against
the target return (SNR, SIR), with |alpha| = 1 by convention, since only
those ratios enter the sensing SINR.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace

import numpy as np
import yaml


class ScenarioError(ValueError):
    pass


class MissingField(ScenarioError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"missing required scenario field: {name}")


class UnitError(ScenarioError):
    pass


class ParseError(ScenarioError):
    pass


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def parse_power(value, field_name: str) -> float:
    """Linear number, or a string tagged dB (ratio) / dBm (power -> watts)."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        parts = value.strip().split()
        if len(parts) != 2:
            raise UnitError(f"{field_name}: expected '<value> dB|dBm', got {value!r}")
        try:
            num = float(parts[0])
        except ValueError as exc:
            raise UnitError(f"{field_name}: bad numeric part in {value!r}") from exc
        unit = parts[1].lower()
        if unit == "db":
            return db_to_linear(num)
        if unit == "dbm":
            return db_to_linear(num) * 1e-3
        raise UnitError(f"{field_name}: unknown unit {parts[1]!r}")
    raise UnitError(f"{field_name}: unsupported value {value!r}")


@dataclass(frozen=True)
class UserSpec:
    """One ground user: estimated position plus an uncertainty disk."""

    position: np.ndarray        # (2,) estimated horizontal position, m
    radius: float               # uncertainty-disk radius, m
    harvest_eff: float
    initial_energy: float       # J


@dataclass(frozen=True)
class UavInit:
    start: np.ndarray           # (3,) initial position; flight must return here


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str


@dataclass(frozen=True)
class ScenarioConfig:
    m_uav: int
    k_users: int
    n_slots: int
    slot_len: float
    code_len: int
    tau0_tilde: float
    lb: int
    ub: int
    p_dl: np.ndarray            # (M,) W
    rho0: float
    sigma_c2: np.ndarray        # (M,) W
    sigma_noise2: np.ndarray    # (M,) per-pulse radar noise, relative power
    sigma_clutter2: np.ndarray  # (M,) clutter power per nonzero lag
    alpha_abs: np.ndarray       # (M,)
    doppler: np.ndarray         # (M,) normalized, rad
    v_max: float
    z_min: float
    z_max: float
    z_tr: np.ndarray            # (M,)
    cluster_boxes: np.ndarray   # (M, 4) xmin, xmax, ymin, ymax
    nfz_centers: tuple          # per cluster: (N_j, 2) arrays
    nfz_radii: tuple            # per cluster: (N_j,) arrays
    user_pos: np.ndarray        # (K, M, 2)
    user_radius: np.ndarray     # (K, M)
    harvest_eff: np.ndarray     # (K, M)
    initial_energy: np.ndarray  # (K, M)
    mu: float
    mu0: float | None
    starts: np.ndarray          # (M, 3)

    @property
    def horizon(self) -> float:
        return self.n_slots * self.slot_len

    @property
    def l_candidates(self) -> np.ndarray:
        return 2 ** np.arange(self.lb, self.ub + 1)

    def user(self, k: int, m: int) -> UserSpec:
        return UserSpec(
            position=self.user_pos[k, m].copy(),
            radius=float(self.user_radius[k, m]),
            harvest_eff=float(self.harvest_eff[k, m]),
            initial_energy=float(self.initial_energy[k, m]),
        )

    def with_uncertainty(self, radius) -> "ScenarioConfig":
        """Copy with every user's disk radius replaced (scalar or (K, M))."""
        r = np.broadcast_to(np.asarray(radius, float),
                            self.user_radius.shape).copy()
        return replace(self, user_radius=r)

    def normalized_uncertainty(self) -> np.ndarray:
        ext = np.minimum(self.cluster_boxes[:, 1] - self.cluster_boxes[:, 0],
                         self.cluster_boxes[:, 3] - self.cluster_boxes[:, 2])
        return self.user_radius / (ext[None, :] / 2.0)


def _get(section: dict, key: str, full: str):
    if key not in section:
        raise MissingField(full)
    return section[key]


def _per_uav(value, m, name):
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(m, float(arr))
    if arr.shape != (m,):
        raise ParseError(f"{name}: expected scalar or {m} entries")
    return arr


def load_scenario(source) -> ScenarioConfig:
    """Load a scenario from a YAML path, YAML text, or a parsed dict."""
    if isinstance(source, dict):
        doc = source
    else:
        path = os.fspath(source)
        if os.path.exists(path):
            text = open(path, "r", encoding="utf-8").read()
        else:
            text = str(source)
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ParseError(f"scenario does not parse: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("scenario root must be a mapping")

    fleet = _get(doc, "fleet", "fleet")
    proto = _get(doc, "protocol", "protocol")
    radar = _get(doc, "radar", "radar")
    chan = _get(doc, "channel", "channel")
    users = _get(doc, "users", "users")
    clusters = _get(doc, "clusters", "clusters")
    objective = doc.get("objective", {})

    m = int(_get(fleet, "m", "fleet.m"))
    k = int(_get(users, "k", "users.k"))
    n = int(_get(proto, "n_slots", "protocol.n_slots"))
    code_len = int(_get(proto, "code_len", "protocol.code_len"))
    if min(m, k, n, code_len) < 1:
        raise ParseError("m, k, n_slots, code_len must all be >= 1")

    p_dl = _per_uav([parse_power(v, "radar.p_dl") for v in
                     (radar["p_dl"] if isinstance(radar.get("p_dl"), list)
                      else [_get(radar, "p_dl", "radar.p_dl")] * m)], m, "radar.p_dl")
    alpha_abs = _per_uav(radar.get("alpha_abs", 1.0), m, "radar.alpha_abs")
    sir = _per_uav([parse_power(v, "radar.sir") for v in
                    (radar["sir"] if isinstance(radar.get("sir"), list)
                     else [_get(radar, "sir", "radar.sir")] * m)], m, "radar.sir")
    snr = _per_uav([parse_power(v, "radar.snr") for v in
                    (radar["snr"] if isinstance(radar.get("snr"), list)
                     else [_get(radar, "snr", "radar.snr")] * m)], m, "radar.snr")
    sigma_clutter2 = alpha_abs**2 / sir
    sigma_noise2 = alpha_abs**2 / snr

    boxes = np.asarray(_get(clusters, "boxes", "clusters.boxes"), dtype=float)
    if boxes.shape != (m, 4):
        raise ParseError(f"clusters.boxes: expected {m} [xmin,xmax,ymin,ymax] rows")

    nfz_raw = clusters.get("nfz", [[] for _ in range(m)])
    if len(nfz_raw) != m:
        raise ParseError("clusters.nfz: one list per cluster required")
    nfz_centers, nfz_radii = [], []
    for entry in nfz_raw:
        cs = np.asarray([it["center"] for it in entry], dtype=float).reshape(-1, 2)
        rs = np.asarray([it["radius"] for it in entry], dtype=float).reshape(-1)
        nfz_centers.append(cs)
        nfz_radii.append(rs)

    pos = np.asarray(_get(users, "positions", "users.positions"), dtype=float)
    if pos.shape != (m, k, 2):
        raise ParseError(f"users.positions: expected shape ({m},{k},2)")
    user_pos = np.transpose(pos, (1, 0, 2)).copy()  # (K, M, 2)

    if "uncertainty_radius" in users:
        user_radius = np.broadcast_to(
            np.asarray(users["uncertainty_radius"], float), (k, m)).copy()
    elif "r_tilde" in users:
        ext = np.minimum(boxes[:, 1] - boxes[:, 0], boxes[:, 3] - boxes[:, 2])
        user_radius = (np.broadcast_to(np.asarray(users["r_tilde"], float), (k, m))
                       * ext[None, :] / 2.0)
    else:
        raise MissingField("users.uncertainty_radius (or users.r_tilde)")

    z_min = float(_get(fleet, "z_min", "fleet.z_min"))
    z_max = float(_get(fleet, "z_max", "fleet.z_max"))
    z_tr = _per_uav(_get(fleet, "z_tr", "fleet.z_tr"), m, "fleet.z_tr")

    starts_raw = fleet.get("start_positions")
    if starts_raw is None:
        centers = user_pos.mean(axis=0)  # (M, 2)
        z0 = np.clip(z_tr, z_min, z_max)
        starts = np.column_stack([centers, z0])
    else:
        starts = np.asarray(starts_raw, dtype=float)
        if starts.shape != (m, 3):
            raise ParseError("fleet.start_positions: expected (m, 3)")

    mu0 = objective.get("mu0")
    cfg = ScenarioConfig(
        m_uav=m, k_users=k, n_slots=n,
        slot_len=float(_get(proto, "slot_len", "protocol.slot_len")),
        code_len=code_len,
        tau0_tilde=float(_get(proto, "tau0_tilde", "protocol.tau0_tilde")),
        lb=int(_get(proto, "lb", "protocol.lb")),
        ub=int(_get(proto, "ub", "protocol.ub")),
        p_dl=p_dl,
        rho0=parse_power(_get(chan, "rho0", "channel.rho0"), "channel.rho0"),
        sigma_c2=_per_uav([parse_power(v, "channel.sigma_c2") for v in
                           (chan["sigma_c2"] if isinstance(chan.get("sigma_c2"), list)
                            else [_get(chan, "sigma_c2", "channel.sigma_c2")] * m)],
                          m, "channel.sigma_c2"),
        sigma_noise2=sigma_noise2,
        sigma_clutter2=sigma_clutter2,
        alpha_abs=alpha_abs,
        doppler=_per_uav(radar.get("doppler", 0.0), m, "radar.doppler"),
        v_max=float(_get(fleet, "v_max", "fleet.v_max")),
        z_min=z_min, z_max=z_max, z_tr=z_tr,
        cluster_boxes=boxes,
        nfz_centers=tuple(nfz_centers),
        nfz_radii=tuple(nfz_radii),
        user_pos=user_pos,
        user_radius=user_radius,
        harvest_eff=np.broadcast_to(
            np.asarray(_get(users, "harvest_eff", "users.harvest_eff"), float),
            (k, m)).copy(),
        initial_energy=np.broadcast_to(
            np.asarray(_get(users, "e0", "users.e0"), float), (k, m)).copy(),
        mu=float(objective.get("mu", 0.5)),
        mu0=None if mu0 is None else float(mu0),
        starts=starts,
    )
    _check_positive(cfg)
    return cfg


def _check_positive(cfg: ScenarioConfig):
    for name in ("p_dl", "sigma_c2", "sigma_noise2", "sigma_clutter2",
                 "harvest_eff", "initial_energy"):
        if np.any(np.asarray(getattr(cfg, name)) <= 0.0):
            raise ParseError(f"{name} must be strictly positive")
    if cfg.slot_len <= 0 or cfg.tau0_tilde <= 0 or cfg.rho0 <= 0:
        raise ParseError("slot_len, tau0_tilde, rho0 must be strictly positive")
    if not (0.0 <= cfg.mu <= 1.0):
        raise ParseError("mu must lie in [0, 1]")
    if cfg.mu0 is not None and not (0.0 < cfg.mu0 <= 1.0):
        raise ParseError("mu0 must lie in (0, 1]")


def scenario_document(cfg: ScenarioConfig) -> dict:
    """Plain-dict round-trippable form, all values linear."""
    return {
        "fleet": {
            "m": cfg.m_uav, "v_max": cfg.v_max,
            "z_min": cfg.z_min, "z_max": cfg.z_max,
            "z_tr": cfg.z_tr.tolist(),
            "start_positions": cfg.starts.tolist(),
        },
        "protocol": {
            "n_slots": cfg.n_slots, "slot_len": cfg.slot_len,
            "code_len": cfg.code_len, "tau0_tilde": cfg.tau0_tilde,
            "lb": cfg.lb, "ub": cfg.ub,
        },
        "radar": {
            "p_dl": cfg.p_dl.tolist(),
            "alpha_abs": cfg.alpha_abs.tolist(),
            "sir": (cfg.alpha_abs**2 / cfg.sigma_clutter2).tolist(),
            "snr": (cfg.alpha_abs**2 / cfg.sigma_noise2).tolist(),
            "doppler": cfg.doppler.tolist(),
        },
        "channel": {"rho0": cfg.rho0, "sigma_c2": cfg.sigma_c2.tolist()},
        "users": {
            "k": cfg.k_users,
            "positions": np.transpose(cfg.user_pos, (1, 0, 2)).tolist(),
            "uncertainty_radius": cfg.user_radius.tolist(),
            "harvest_eff": cfg.harvest_eff.tolist(),
            "e0": cfg.initial_energy.tolist(),
        },
        "clusters": {
            "boxes": cfg.cluster_boxes.tolist(),
            "nfz": [
                [{"center": c.tolist(), "radius": float(r)}
                 for c, r in zip(cs, rs)]
                for cs, rs in zip(cfg.nfz_centers, cfg.nfz_radii)
            ],
        },
        "objective": {"mu": cfg.mu, "mu0": cfg.mu0},
    }


def save_scenario(cfg: ScenarioConfig, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(scenario_document(cfg), fh, sort_keys=False)


def validate_scenario(cfg: ScenarioConfig) -> list[Violation]:
    """Collect every static infeasibility; an empty list means 'solvable'."""
    out = []
    if 2**cfg.ub * cfg.tau0_tilde >= 1.0:
        out.append(Violation(
            "TimeBudget",
            f"2^ub * tau0_tilde = {2**cfg.ub * cfg.tau0_tilde:.4g} >= 1; "
            "no uplink time remains for any L"))
    if cfg.lb > cfg.ub:
        out.append(Violation("CodeRepeatRange", f"lb={cfg.lb} > ub={cfg.ub}"))
    if cfg.z_min > cfg.z_max:
        out.append(Violation("AltitudeOrder", f"z_min {cfg.z_min} > z_max {cfg.z_max}"))
    for mm in range(cfg.m_uav):
        if not (cfg.z_min <= cfg.z_tr[mm] <= cfg.z_max):
            out.append(Violation(
                "AltitudeOrder",
                f"z_tr[{mm}]={cfg.z_tr[mm]} outside [{cfg.z_min}, {cfg.z_max}]"))
        box = cfg.cluster_boxes[mm]
        if box[0] >= box[1] or box[2] >= box[3]:
            out.append(Violation("ClusterBox", f"cluster {mm} box is empty"))
        for j, r in enumerate(cfg.nfz_radii[mm]):
            if r <= 0:
                out.append(Violation("NfzRadius", f"cluster {mm} zone {j}: radius {r}"))
        for kk in range(cfg.k_users):
            x, y = cfg.user_pos[kk, mm]
            if not (box[0] <= x <= box[1] and box[2] <= y <= box[3]):
                out.append(Violation(
                    "UserOutsideCluster",
                    f"user ({kk},{mm}) at ({x:.1f},{y:.1f}) outside cluster box"))
        if np.any(cfg.user_radius < 0):
            out.append(Violation("UncertaintyRadius", "negative disk radius"))
    return out


def sample_uncertainty(user: UserSpec, count: int, seed: int) -> np.ndarray:
    """Uniform samples of possible user positions over the uncertainty disk."""
    rng = np.random.default_rng(seed)
    r = user.radius * np.sqrt(rng.uniform(size=count))
    ang = rng.uniform(0.0, 2.0 * np.pi, size=count)
    return user.position[None, :] + np.column_stack([r * np.cos(ang),
                                                     r * np.sin(ang)])


def builtin_scenarios() -> dict[str, str]:
    """Name -> path of the scenario files shipped with the package."""
    base = os.path.join(os.path.dirname(__file__), "scenarios")
    out = {}
    for fn in sorted(os.listdir(base)):
        if fn.endswith(".yaml"):
            out[fn[:-5]] = os.path.join(base, fn)
    return out


def resolve_scenario(name_or_path: str) -> str:
    """Accept a filesystem path or the bare name of a shipped scenario."""
    if os.path.exists(name_or_path):
        return name_or_path
    builtin = builtin_scenarios()
    if name_or_path in builtin:
        return builtin[name_or_path]
    raise FileNotFoundError(f"no scenario file or builtin named {name_or_path!r}")
