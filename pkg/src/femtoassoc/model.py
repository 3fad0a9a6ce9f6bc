"""Network scenarios and the service-time problem derived from them.

Indexing convention: arrays are 0-based and BS index 0 is the macro base
station (MBS). Serialized records (see ``Assignment.to_records``) use 1-based
ids so that the MBS is id 1.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, fields
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np

MBS = 0
_LN2 = math.log(2.0)


class DegenerateScenarioError(ValueError):
    """Raised when noise plus received power at a user is zero."""


def dbm_to_mw(dbm):
    return np.power(10.0, np.asarray(dbm, dtype=float) / 10.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Declarative description of a two-tier network instance.

    Defaults follow the usual desk-scale setup: 6 BSs (1 macro + 5 femto),
    10 MHz, 43/31.5 dBm, 6 dB shadowing, 1 KByte packets.
    """

    area: tuple[float, float] = (500.0, 500.0)
    num_bs: int = 6
    num_users: int = 30
    access: str = "open"
    whitelist_prob: float = 0.3
    bandwidth_hz: float = 10e6
    mbs_power_dbm: float = 43.0
    fbs_power_dbm: float = 31.5
    mbs_pathloss: tuple[float, float] = (28.0, 35.0)
    fbs_pathloss: tuple[float, float] = (38.5, 20.0)
    shadow_sigma_db: float = 6.0
    packet_bits: int = 8192
    noise_density_dbm_hz: float = -174.0
    noise_figure_db: float = 9.0
    noise_power_dbm: Optional[float] = None
    min_distance_m: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "area", tuple(float(a) for a in self.area))
        object.__setattr__(self, "mbs_pathloss", tuple(float(v) for v in self.mbs_pathloss))
        object.__setattr__(self, "fbs_pathloss", tuple(float(v) for v in self.fbs_pathloss))
        if len(self.area) != 2 or min(self.area) <= 0:
            raise ValueError(f"area must be two positive lengths, got {self.area}")
        if self.num_bs < 1:
            raise ValueError(f"num_bs must be >= 1, got {self.num_bs}")
        if self.num_users < 1:
            raise ValueError(f"num_users must be >= 1, got {self.num_users}")
        if self.bandwidth_hz <= 0:
            raise ValueError(f"bandwidth_hz must be positive, got {self.bandwidth_hz}")
        if self.access not in ("open", "closed"):
            raise ValueError(f"access must be 'open' or 'closed', got {self.access!r}")
        if not 0.0 <= self.whitelist_prob <= 1.0:
            raise ValueError(f"whitelist_prob must lie in [0, 1], got {self.whitelist_prob}")
        if self.packet_bits <= 0:
            raise ValueError("packet_bits must be positive")
        if self.mbs_pathloss[1] <= 0 or self.fbs_pathloss[1] <= 0:
            raise ValueError("path-loss slopes must be positive")
        if not math.isfinite(self.shadow_sigma_db) or self.shadow_sigma_db < 0:
            raise ValueError("shadow_sigma_db must be finite and non-negative")

    @property
    def noise_dbm(self) -> float:
        if self.noise_power_dbm is not None:
            return float(self.noise_power_dbm)
        return self.noise_density_dbm_hz + 10.0 * math.log10(self.bandwidth_hz) + self.noise_figure_db

    def replace(self, **changes) -> "ScenarioConfig":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return ScenarioConfig(**values)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        values = dict(data)
        # YAML 1.1 loads exponent literals such as 10e6 as strings
        for key in ("bandwidth_hz", "whitelist_prob", "mbs_power_dbm", "fbs_power_dbm", "shadow_sigma_db",
                    "noise_density_dbm_hz", "noise_figure_db", "min_distance_m"):
            if key in values:
                values[key] = float(values[key])
        for key in ("num_bs", "num_users", "packet_bits"):
            if key in values and int(values[key]) != float(values[key]):
                raise ValueError(f"{key} must be an integer, got {values[key]!r}")
            if key in values:
                values[key] = int(values[key])
        if values.get("noise_power_dbm") is not None:
            values["noise_power_dbm"] = float(values["noise_power_dbm"])
        return cls(**values)

    def to_mapping(self) -> dict[str, Any]:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out


@dataclass(frozen=True)
class BaseStation:
    id: int
    position: tuple[float, float]
    tx_power_dbm: float
    kind: str
    pathloss: tuple[float, float]
    shadow_sigma_db: float

    def __post_init__(self):
        expected = "macro" if self.id == MBS else "femto"
        if self.kind != expected:
            raise ValueError(f"BS {self.id} must be {expected}, got {self.kind}")
        if not (math.isfinite(self.tx_power_dbm) and math.isfinite(self.shadow_sigma_db)):
            raise ValueError("tx power and shadowing sigma must be finite")
        if self.pathloss[1] <= 0:
            raise ValueError("path-loss slope must be positive")

    def pathloss_db(self, distance_m):
        offset, slope = self.pathloss
        return offset + slope * np.log10(distance_m)


@dataclass(frozen=True)
class User:
    id: int
    position: tuple[float, float]
    allowed_bs: frozenset[int]

    def __post_init__(self):
        if MBS not in self.allowed_bs:
            raise ValueError(f"user {self.id} must be allowed on the MBS")


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Scenario:
    bandwidth_hz: float
    noise_dbm: float
    packet_bits: int
    base_stations: tuple[BaseStation, ...]
    users: tuple[User, ...]
    gains: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self):
        g = _frozen(self.gains)
        object.__setattr__(self, "gains", g)
        object.__setattr__(self, "base_stations", tuple(self.base_stations))
        object.__setattr__(self, "users", tuple(self.users))
        if g.shape != (self.num_bs, self.num_users):
            raise ValueError(f"gains shape {g.shape} != ({self.num_bs}, {self.num_users})")
        if not (np.all(np.isfinite(g)) and np.all(g > 0)):
            raise ValueError("gains must be strictly positive and finite")
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth must be positive")

    @property
    def num_bs(self) -> int:
        return len(self.base_stations)

    @property
    def num_users(self) -> int:
        return len(self.users)

    @property
    def noise_mw(self) -> float:
        return float(dbm_to_mw(self.noise_dbm))

    @property
    def tx_power_mw(self) -> np.ndarray:
        return dbm_to_mw([bs.tx_power_dbm for bs in self.base_stations])

    def received_power(self) -> np.ndarray:
        """Linear received power G[m, n] * P_m in mW, shape (M, N)."""
        return self.gains * self.tx_power_mw[:, None]

    def allowed_mask(self) -> np.ndarray:
        mask = np.zeros((self.num_bs, self.num_users), dtype=bool)
        for n, user in enumerate(self.users):
            mask[sorted(user.allowed_bs), n] = True
        return mask

    def fingerprint(self) -> str:
        """Content hash used to check that paired runs saw the same instance."""
        h = hashlib.sha256()
        h.update(self.gains.tobytes())
        h.update(self.allowed_mask().tobytes())
        h.update(repr((self.bandwidth_hz, self.noise_dbm, self.packet_bits)).encode())
        for u in self.users:
            h.update(np.asarray(u.position).tobytes())
        return h.hexdigest()


def generate_scenario(config: ScenarioConfig, seed: int) -> Scenario:
    """Draw a random network instance.

    The MBS sits at the area centre, FBSs and users are uniform over the area.
    User-side draws come from dedicated streams filled row by row, so the
    instance for N users is a prefix of the instance for N' > N users under
    the same seed (common random numbers across a user-count sweep).
    """
    M, N = config.num_bs, config.num_users
    width, height = config.area
    bs_ss, pos_ss, shadow_ss, wl_ss = np.random.SeedSequence(seed).spawn(4)
    bs_rng = np.random.default_rng(bs_ss)

    bs_xy = np.empty((M, 2))
    bs_xy[0] = (width / 2.0, height / 2.0)
    if M > 1:
        bs_xy[1:] = bs_rng.random((M - 1, 2)) * (width, height)
    user_xy = np.random.default_rng(pos_ss).random((N, 2)) * (width, height)
    shadow = np.random.default_rng(shadow_ss).standard_normal((N, M)).T * config.shadow_sigma_db
    admit = np.random.default_rng(wl_ss).random((N, M - 1)).T < config.whitelist_prob

    stations = []
    for m in range(M):
        macro = m == MBS
        stations.append(
            BaseStation(
                id=m,
                position=(float(bs_xy[m, 0]), float(bs_xy[m, 1])),
                tx_power_dbm=config.mbs_power_dbm if macro else config.fbs_power_dbm,
                kind="macro" if macro else "femto",
                pathloss=config.mbs_pathloss if macro else config.fbs_pathloss,
                shadow_sigma_db=config.shadow_sigma_db,
            )
        )

    dist = np.hypot(bs_xy[:, None, 0] - user_xy[None, :, 0], bs_xy[:, None, 1] - user_xy[None, :, 1])
    dist = np.maximum(dist, config.min_distance_m)
    pl = np.stack([stations[m].pathloss_db(dist[m]) for m in range(M)])
    gains = np.power(10.0, -(pl + shadow) / 10.0)

    users = []
    for n in range(N):
        if config.access == "open":
            allowed = frozenset(range(M))
        else:
            allowed = frozenset([MBS] + [m for m in range(1, M) if admit[m - 1, n]])
        users.append(User(id=n, position=(float(user_xy[n, 0]), float(user_xy[n, 1])), allowed_bs=allowed))

    return Scenario(
        bandwidth_hz=config.bandwidth_hz,
        noise_dbm=config.noise_dbm,
        packet_bits=config.packet_bits,
        base_stations=tuple(stations),
        users=tuple(users),
        gains=gains,
        seed=seed,
    )


def total_received(scenario: Scenario) -> np.ndarray:
    """I_n: total received power from every BS at each user, mW."""
    return scenario.received_power().sum(axis=0)


def interference(scenario: Scenario, m: int, n: int) -> float:
    """Power at user ``n`` from every BS except the serving BS ``m`` (mW)."""
    if not (0 <= m < scenario.num_bs and 0 <= n < scenario.num_users):
        raise IndexError(f"(m, n) = ({m}, {n}) out of range")
    rx = scenario.received_power()[:, n]
    return float(np.delete(rx, m).sum())


def sinr_matrix(scenario: Scenario) -> np.ndarray:
    """eta[m, n] = G P / (noise + I_n); always strictly below 1."""
    rx = scenario.received_power()
    denom = scenario.noise_mw + rx.sum(axis=0)
    if np.any(denom <= 0):
        raise DegenerateScenarioError("noise plus total received power is zero")
    return rx / denom


def capacity_matrix(scenario: Scenario) -> np.ndarray:
    """Link capacity in bit/s, C = B log2(1 / (1 - eta)), shape (M, N)."""
    eta = sinr_matrix(scenario)
    return -scenario.bandwidth_hz * np.log1p(-eta) / _LN2


def capacity(scenario: Scenario, m: int, n: int) -> float:
    rx = scenario.received_power()[:, n]
    denom = scenario.noise_mw + rx.sum()
    if denom <= 0:
        raise DegenerateScenarioError(f"noise plus received power is zero at user {n}")
    eta = rx[m] / denom
    return float(-scenario.bandwidth_hz * math.log1p(-eta) / _LN2)


def shannon_capacity(scenario: Scenario, m: int, n: int) -> float:
    """Capacity in the plain SINR form B log2(1 + S / (noise + interference))."""
    signal = float(scenario.received_power()[m, n])
    sinr = signal / (scenario.noise_mw + interference(scenario, m, n))
    return scenario.bandwidth_hz * math.log1p(sinr) / _LN2


@dataclass(frozen=True)
class ServiceTimeProblem:
    """Service-time matrix t[m, n] (seconds) with +inf on forbidden pairs.

    The candidate sets are derived views of the matrix: m is a candidate for
    n exactly when t[m, n] is finite.
    """

    t: np.ndarray
    candidate_bs: tuple[tuple[int, ...], ...] = field(init=False)
    candidate_users: tuple[tuple[int, ...], ...] = field(init=False)
    t_min: np.ndarray = field(init=False)

    def __post_init__(self):
        t = _frozen(self.t)
        if t.ndim != 2 or t.shape[0] < 1 or t.shape[1] < 1:
            raise ValueError(f"t must be a nonempty M x N matrix, got shape {t.shape}")
        if np.any(np.isnan(t)):
            raise ValueError("t contains NaN")
        finite = np.isfinite(t)
        if np.any(t[finite] <= 0):
            raise ValueError("finite service times must be positive")
        if np.any(t == -np.inf):
            raise ValueError("t contains -inf")
        empty = np.flatnonzero(~finite.any(axis=0))
        if empty.size:
            raise ValueError(f"users with no candidate BS: {empty.tolist()}")
        object.__setattr__(self, "t", t)
        object.__setattr__(
            self, "candidate_bs", tuple(tuple(np.flatnonzero(finite[:, n]).tolist()) for n in range(t.shape[1]))
        )
        object.__setattr__(
            self, "candidate_users", tuple(tuple(np.flatnonzero(finite[m]).tolist()) for m in range(t.shape[0]))
        )
        object.__setattr__(self, "t_min", _frozen(t.min(axis=0)))

    @property
    def num_bs(self) -> int:
        return self.t.shape[0]

    @property
    def num_users(self) -> int:
        return self.t.shape[1]

    @property
    def allowed(self) -> np.ndarray:
        return np.isfinite(self.t)

    def masked(self, keep: np.ndarray) -> "ServiceTimeProblem":
        """Problem with every pair outside ``keep`` made forbidden."""
        return ServiceTimeProblem(np.where(keep, self.t, np.inf))

    @classmethod
    def from_lists(cls, rows: Iterable[Sequence[float]]) -> "ServiceTimeProblem":
        return cls(np.array([[float(v) for v in row] for row in rows]))


def build_problem(scenario: Scenario) -> ServiceTimeProblem:
    """t[m, n] = L / C[m, n] on allowed pairs; propagation delay is ignored."""
    cap = capacity_matrix(scenario)
    mask = scenario.allowed_mask()
    empty = np.flatnonzero(~mask.any(axis=0))
    if empty.size:
        raise ValueError(f"users with empty candidate set: {empty.tolist()}")
    if np.any(cap[mask] <= 0):
        raise DegenerateScenarioError("zero capacity on an allowed link")
    with np.errstate(divide="ignore"):
        t = np.where(mask, scenario.packet_bits / cap, np.inf)
    return ServiceTimeProblem(t)
