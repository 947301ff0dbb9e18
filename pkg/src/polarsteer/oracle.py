"""Synthetic stand-in for the expensive cell-polarization simulation.

Produces Cdc42-like concentration profiles over a 400-cell circular
membrane from 35 normalized input parameters, computes the polarization
factor, and handles the parameter normalization and simulation-ready
export format used by the rest of the workbench.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

N_PARAMS = 35
N_CELLS = 400

#: Angle of each cell center, degrees.
THETA_DEG = 360.0 * np.arange(N_CELLS) / N_CELLS

# Index (0-based) of each named parameter in a ParameterConfig.
NAMED_PARAMS = {
    "k_42a": 0,
    "k_42d": 1,
    "k_RL": 2,
    "k_24cm0": 3,
    "k_24cm1": 4,
    "C42_t": 5,
    "q": 6,
    "h": 7,
    "D_c42a": 8,
    "D_c42": 9,
}

_DEFAULT_RAW_RANGES = {
    "k_42a": (0.0, 2.0),
    "k_42d": (0.0, 2.0),
    "k_RL": (0.0, 0.1),
    "k_24cm0": (0.0, 1.0),
    "k_24cm1": (0.0, 1.0),
    "C42_t": (0.0, 3.0),
    "q": (0.0, 1.0),
    "h": (0.0, 1.0),
    "D_c42a": (0.0, 0.1),
    "D_c42": (0.0, 0.1),
}


@dataclass(frozen=True)
class ParameterSpace:
    """Ordered list of 35 (name, raw_lo, raw_hi) entries."""

    names: tuple
    raw_lo: np.ndarray
    raw_hi: np.ndarray

    def __post_init__(self):
        if len(self.names) != N_PARAMS:
            raise ValueError(f"expected {N_PARAMS} parameters, got {len(self.names)}")
        if len(set(self.names)) != N_PARAMS:
            raise ValueError("parameter names must be unique")
        for required in NAMED_PARAMS:
            if required not in self.names:
                raise ValueError(f"missing required parameter {required!r}")
        lo = np.asarray(self.raw_lo, dtype=float)
        hi = np.asarray(self.raw_hi, dtype=float)
        if lo.shape != (N_PARAMS,) or hi.shape != (N_PARAMS,):
            raise ValueError("raw_lo/raw_hi must have length 35")
        if not np.all(lo < hi):
            bad = self.names[int(np.argmin(hi - lo))]
            raise ValueError(f"raw_lo must be < raw_hi (violated for {bad!r})")
        object.__setattr__(self, "raw_lo", lo)
        object.__setattr__(self, "raw_hi", hi)

    @classmethod
    def default(cls) -> "ParameterSpace":
        names = list(NAMED_PARAMS) + [f"p{i}" for i in range(11, 36)]
        lo = [_DEFAULT_RAW_RANGES[n][0] for n in NAMED_PARAMS] + [0.0] * 25
        hi = [_DEFAULT_RAW_RANGES[n][1] for n in NAMED_PARAMS] + [1.0] * 25
        return cls(tuple(names), np.array(lo), np.array(hi))

    def to_json(self) -> str:
        entries = [
            {"name": n, "lo": float(lo), "hi": float(hi)}
            for n, lo, hi in zip(self.names, self.raw_lo, self.raw_hi)
        ]
        return json.dumps(entries, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ParameterSpace":
        entries = json.loads(text)
        return cls(
            tuple(e["name"] for e in entries),
            np.array([e["lo"] for e in entries], dtype=float),
            np.array([e["hi"] for e in entries], dtype=float),
        )


@dataclass(frozen=True)
class PFParams:
    """Constants of the polarization-factor formula.

    ``a`` is the experiment constant multiplying the maximum concentration;
    ``sa`` is the membrane surface measure (default: unit circumference, so
    the half-mass window size is reported as a fraction of the membrane).
    """

    a: float = 0.01
    sa: float = 1.0

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("a must be > 0")
        if self.sa <= 0:
            raise ValueError("SA must be > 0")


def check_config(config) -> np.ndarray:
    config = np.asarray(config, dtype=float)
    if config.shape != (N_PARAMS,):
        raise ValueError(f"parameter config must have length {N_PARAMS}, got shape {config.shape}")
    if not np.all(np.isfinite(config)):
        raise ValueError("parameter config contains non-finite values")
    return config


def in_steering_range(config) -> bool:
    """True when every value lies in the [-1, 1] steering range."""
    config = np.asarray(config, dtype=float)
    return bool(np.all(np.abs(config) <= 1.0))


def check_profile(profile) -> np.ndarray:
    profile = np.asarray(profile, dtype=float)
    if profile.shape != (N_CELLS,):
        raise ValueError(f"profile must have length {N_CELLS}, got shape {profile.shape}")
    if not np.all(np.isfinite(profile)):
        raise ValueError("profile contains non-finite values")
    return profile


def _simulate_batch(configs: np.ndarray) -> np.ndarray:
    """Vectorized closed-form response for a (n, 35) batch of configs."""
    k_42a = configs[:, 0]
    k_42d = configs[:, 1]
    k_rl = configs[:, 2]
    k_24cm0 = configs[:, 3]
    k_24cm1 = configs[:, 4]
    c42_t = configs[:, 5]
    q = configs[:, 6]
    h = configs[:, 7]
    d_c42a = configs[:, 8]
    d_c42 = configs[:, 9]

    mu = 180.0 + 36.0 * (k_24cm0 - k_24cm1)
    amp = 200.0 * (1.0 + np.tanh(2.0 * (k_42a - k_42d) + 0.5 * c42_t))
    kappa = np.clip(5.0 * np.exp(q * h - 0.3 * (d_c42a + d_c42)), 0.5, 50.0)

    j = np.arange(11, 36)
    base = 20.0 * (1.0 + 0.5 * k_rl) + 2.0 * np.sum(np.sin(j + configs[:, 10:]), axis=1) / 25.0
    base = np.maximum(base, 0.0)

    delta = np.deg2rad(THETA_DEG[None, :] - mu[:, None])
    bump = np.exp(kappa[:, None] * (np.cos(delta) - 1.0))
    return base[:, None] + (amp - base)[:, None] * bump


def simulate(config, noise_seed: int | None = None) -> np.ndarray:
    """Concentration profile for one normalized config.

    Deterministic given (config, noise_seed); optional zero-mean gaussian
    noise (sigma = 2) is added when noise_seed is given, clamped at 0.
    """
    config = check_config(config)
    profile = _simulate_batch(config[None, :])[0]
    if noise_seed is not None:
        rng = np.random.default_rng(noise_seed)
        profile = profile + rng.normal(0.0, 2.0, N_CELLS)
    return np.maximum(profile, 0.0)


def sp_half_mass(profile, pf: PFParams = PFParams()) -> float:
    """Surface measure of the smallest contiguous window around the global
    argmax that holds at least half the total mass.

    Grown greedily from the argmax, adding the larger neighbor each step;
    on ties the next cell in increasing-index (clockwise) direction wins.
    """
    profile = check_profile(profile)
    total = float(profile.sum())
    if total <= 0.0:
        raise ValueError("sp_half_mass undefined for an all-zero profile")
    target = total / 2.0

    start = end = int(np.argmax(profile))
    mass = float(profile[start])
    length = 1
    while mass < target and length < N_CELLS:
        left = profile[(start - 1) % N_CELLS]
        right = profile[(end + 1) % N_CELLS]
        if right >= left:
            end += 1
            mass += float(right)
        else:
            start -= 1
            mass += float(left)
        length += 1
    return pf.sa / N_CELLS * length


def polarization_factor(profile, pf: PFParams = PFParams()) -> float:
    """Polarization factor in [0, 1); 0 for an unpolarized (or all-zero) cell."""
    profile = check_profile(profile)
    if profile.sum() <= 0.0:
        return 0.0
    sp = sp_half_mass(profile, pf)
    x = float(profile.max())
    ax5 = (pf.a * x) ** 5
    value = (1.0 - 2.0 * sp / pf.sa) * ax5 / (1.0 + ax5)
    return max(value, 0.0)


def normalize(raw, space: ParameterSpace) -> np.ndarray:
    """Affine map from raw per-parameter ranges to [-1, 1]."""
    raw = np.asarray(raw, dtype=float)
    if raw.shape[-1] != N_PARAMS:
        raise ValueError("raw values must have length 35")
    mid = (space.raw_lo + space.raw_hi) / 2.0
    half = (space.raw_hi - space.raw_lo) / 2.0
    return (raw - mid) / half


def denormalize(config, space: ParameterSpace) -> np.ndarray:
    config = np.asarray(config, dtype=float)
    if config.shape[-1] != N_PARAMS:
        raise ValueError("config must have length 35")
    mid = (space.raw_lo + space.raw_hi) / 2.0
    half = (space.raw_hi - space.raw_lo) / 2.0
    return mid + half * config


@dataclass
class Dataset:
    """Parallel lists of configs, simulated profiles and their PF values."""

    configs: np.ndarray  # (n, 35)
    profiles: np.ndarray  # (n, 400)
    pf: np.ndarray  # (n,)
    seed: int = 0

    def __post_init__(self):
        if not (len(self.configs) == len(self.profiles) == len(self.pf)):
            raise ValueError("configs/profiles/pf must have equal length")

    def __len__(self):
        return len(self.configs)


def generate_dataset(n: int, seed: int, pf: PFParams = PFParams()) -> Dataset:
    """n configs uniform i.i.d. in [-1, 1]^35, simulated without noise."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    configs = rng.uniform(-1.0, 1.0, (n, N_PARAMS))
    profiles = np.maximum(_simulate_batch(configs), 0.0)
    pfs = np.array([polarization_factor(p, pf) for p in profiles])
    return Dataset(configs, profiles, pfs, seed)


# ---------------------------------------------------------------------------
# Simulation-ready export format: CSV with a header row of the 35 parameter
# names, then one row of denormalized raw values per config, >= 9 significant
# digits, LF line endings.  Dataset persistence adds a row-aligned companion
# profile file (400 comma-separated values per line).
# ---------------------------------------------------------------------------

def format_configs(configs, space: ParameterSpace) -> str:
    configs = np.atleast_2d(np.asarray(configs, dtype=float))
    if len(configs) == 0:
        raise ValueError("cannot export an empty config list")
    lines = [",".join(space.names)]
    for config in configs:
        raw = denormalize(config, space)
        lines.append(",".join(f"{v:.17g}" for v in raw))
    return "\n".join(lines) + "\n"


def export_configs(configs, space: ParameterSpace, destination) -> None:
    text = format_configs(configs, space)
    with open(destination, "w", newline="\n") as fh:
        fh.write(text)


def import_configs(source, space: ParameterSpace) -> np.ndarray:
    """Read an exported file back into normalized configs."""
    with open(source) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"empty export file: {source}")
    names = tuple(lines[0].split(","))
    if names != space.names:
        raise ValueError("export header does not match parameter space names")
    raw = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    if raw.shape[1] != N_PARAMS:
        raise ValueError("export rows must have 35 values")
    return normalize(raw, space)


def save_dataset(dataset: Dataset, space: ParameterSpace, configs_path, profiles_path) -> None:
    export_configs(dataset.configs, space, configs_path)
    with open(profiles_path, "w", newline="\n") as fh:
        for profile in dataset.profiles:
            fh.write(",".join(f"{v:.17g}" for v in profile) + "\n")


def load_dataset(configs_path, profiles_path, space: ParameterSpace,
                 pf: PFParams = PFParams(), seed: int = 0) -> Dataset:
    configs = np.atleast_2d(import_configs(configs_path, space))
    with open(profiles_path) as fh:
        profiles = np.array(
            [[float(v) for v in ln.split(",")] for ln in fh.read().splitlines() if ln.strip()]
        )
    if profiles.shape != (len(configs), N_CELLS):
        raise ValueError(
            f"profile file shape {profiles.shape} does not match {len(configs)} configs"
        )
    pfs = np.array([polarization_factor(p, pf) for p in profiles])
    return Dataset(configs, profiles, pfs, seed)
