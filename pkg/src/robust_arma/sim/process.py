"""ARMA generation and outlier contamination models."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.signal import lfilter

from ..core import ZETA_MARGIN, ArmaParams, roots_within_margin

KINDS = ("AO", "RO", "IO", "none")
TEMPORAL = ("isolated", "independent", "patchy", "equispaced")
DISTS = ("normal", "half_normal", "point_mass", "constant")


@dataclass(frozen=True)
class Contaminant:
    """Outlier distribution; ``scale`` is the standard deviation or amplitude."""

    dist: str = "normal"
    scale: float = 1.0

    def __post_init__(self):
        if self.dist not in DISTS:
            raise ValueError(f"unknown contaminant {self.dist!r}")

    def draw(self, rng: np.random.Generator, k: int) -> np.ndarray:
        if self.dist == "normal":
            return self.scale * rng.standard_normal(k)
        if self.dist == "half_normal":
            return np.abs(self.scale * rng.standard_normal(k))
        if self.dist == "point_mass":
            return self.scale * rng.choice([-1.0, 1.0], size=k)
        return np.full(k, float(self.scale))


@dataclass(frozen=True)
class ContaminationSpec:
    """Outlier model.

    Attributes
    ----------
    kind : {"AO", "RO", "IO", "none"}
        Additive, replacement or innovation outliers.
    epsilon : float
        Contamination fraction.
    temporal : {"isolated", "independent", "patchy", "equispaced"}
        ``isolated`` places ``round(epsilon n)`` non-adjacent outliers,
        ``independent`` draws an iid Bernoulli mask, ``patchy`` places
        non-overlapping runs of ``n_patch`` samples.
    """

    kind: str = "none"
    epsilon: float = 0.0
    temporal: str = "isolated"
    contaminant: Contaminant = Contaminant()
    n_patch: int = 1
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown outlier kind {self.kind!r}")
        if self.temporal not in TEMPORAL:
            raise ValueError(f"unknown temporal structure {self.temporal!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.n_patch < 1:
            raise ValueError("n_patch must be positive")

    @property
    def name(self) -> str:
        return self.label or ("clean" if self.kind == "none" or self.epsilon == 0
                              else f"{self.kind}_{self.epsilon:g}")


CLEAN = ContaminationSpec()


class Contaminated(NamedTuple):
    values: np.ndarray
    mask: np.ndarray


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def default_burn_in(params: ArmaParams) -> int:
    return 50 * (params.p + params.q) + 100


def generate_arma(params: ArmaParams, n: int, innovation_sigma: float = 1.0,
                  seed=None, burn_in: Optional[int] = None,
                  innovation_outliers: Optional[ContaminationSpec] = None) -> np.ndarray:
    """Simulate ``phi(B)(y_t - mu) = theta(B) a_t`` with Gaussian innovations.

    Parameters
    ----------
    params : ArmaParams
        Must lie inside the stationary/invertible set.
    n : int
        Number of returned samples.
    seed : int, SeedSequence or Generator, optional
    burn_in : int, optional
        Discarded warm-up length, ``50 (p + q) + 100`` by default.
    innovation_outliers : ContaminationSpec, optional
        ``IO`` spec whose outliers are added to the innovations.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not roots_within_margin(params, ZETA_MARGIN):
        raise ValueError("parameters outside the stationary/invertible set")
    rng = _rng(seed)
    burn = default_burn_in(params) if burn_in is None else int(burn_in)
    a = innovation_sigma * rng.standard_normal(n + burn)
    if innovation_outliers is not None and innovation_outliers.kind == "IO":
        tail = contaminate(a[burn:], innovation_outliers, rng, _allow_io=True)
        a[burn:] = tail.values
    x = lfilter(np.r_[1.0, -params.theta], np.r_[1.0, -params.phi], a)
    return x[burn:] + params.mu


def _isolated(rng, n, k):
    if k > (n + 1) // 2:
        raise ValueError("too many isolated outliers for the series length")
    g = np.sort(rng.choice(n - k + 1, size=k, replace=False))
    return g + np.arange(k)


def _patches(rng, n, total, length):
    if length > n / 2:
        raise ValueError("patch length must not exceed n / 2")
    count = math.ceil(total / length)
    free = n - count * length - (count - 1)
    if free < 0:
        raise ValueError("patches do not fit into the series")
    g = np.sort(rng.choice(free + count, size=count, replace=False))
    starts = g + np.arange(count) * length
    return (starts[:, None] + np.arange(length)).ravel()


def outlier_positions(spec: ContaminationSpec, n: int, rng) -> np.ndarray:
    """Indices of contaminated samples for a series of length ``n``."""
    rng = _rng(rng)
    if spec.kind == "none" or spec.epsilon == 0.0:
        return np.zeros(0, dtype=int)
    if spec.temporal == "independent":
        return np.flatnonzero(rng.random(n) < spec.epsilon)
    k = int(round(spec.epsilon * n))
    if k == 0:
        return np.zeros(0, dtype=int)
    if spec.temporal == "isolated":
        return _isolated(rng, n, k)
    if spec.temporal == "patchy":
        return _patches(rng, n, k, spec.n_patch)
    return (np.arange(k) * n) // k + (n // k) // 2


def contaminate(x, spec: ContaminationSpec, seed=None, *,
                _allow_io: bool = False) -> Contaminated:
    """Apply an additive or replacement outlier model.

    Returns
    -------
    Contaminated
        ``values`` is the contaminated copy and ``mask`` flags outliers.
    """
    x = np.asarray(x, dtype=float)
    if spec.kind == "IO" and not _allow_io:
        raise ValueError("innovation outliers are applied by generate_arma")
    rng = _rng(seed)
    idx = outlier_positions(spec, x.size, rng)
    y = x.copy()
    mask = np.zeros(x.size, dtype=bool)
    if idx.size:
        w = spec.contaminant.draw(rng, idx.size)
        y[idx] = w if spec.kind == "RO" else x[idx] + w
        mask[idx] = True
    return Contaminated(y, mask)
