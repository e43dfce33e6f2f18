"""Maximum and quantile bias curves of the AR(1) estimate under additive
outliers with a symmetric point-mass contaminant."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..ar import estimate_ar_durbin_levinson
from ..core import C1_EFF, ArmaParams, RhoFamily, make_rho_family
from .montecarlo import parallel_map
from .process import Contaminant, ContaminationSpec, contaminate, generate_arma


@dataclass(frozen=True)
class BiasSurface:
    """Absolute estimation errors ``bias[i_eps, i_cw, run]``."""

    eps_grid: np.ndarray
    cw_grid: np.ndarray
    bias: np.ndarray

    @property
    def max_bias(self) -> np.ndarray:
        """Worst run for every ``(eps, c_w)`` pair."""
        return self.bias.max(axis=2)

    def qbc(self, alpha: float) -> np.ndarray:
        """``sup_cw`` of the ``alpha``-quantile over runs; ``alpha = 1`` is the MBC."""
        if not 0.0 < alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        return np.quantile(self.bias, alpha, axis=2).max(axis=1)

    def mbc(self) -> np.ndarray:
        return self.qbc(1.0)

    def curves_csv(self, alphas: Sequence[float] = (0.5, 0.75, 1.0), path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epsilon"] + [f"QBC{round(100 * a)}" for a in alphas])
        cols = [self.qbc(a) for a in alphas]
        for i, e in enumerate(self.eps_grid):
            w.writerow([repr(float(e))] + [repr(float(c[i])) for c in cols])
        return _emit(buf, path)

    def surface_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epsilon", "c_w", "max_bias", "median_bias"])
        mb = self.max_bias
        med = np.median(self.bias, axis=2)
        for i, e in enumerate(self.eps_grid):
            for j, c in enumerate(self.cw_grid):
                w.writerow([repr(float(e)), repr(float(c)), repr(float(mb[i, j])),
                            repr(float(med[i, j]))])
        return _emit(buf, path)


def _emit(buf, path):
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def _run(task):
    model, eps_grid, cw_grid, n, seed, run, c1, grid_step = task
    family = make_rho_family(c1)
    root = np.random.SeedSequence(seed, spawn_key=(run,))
    x = generate_arma(model, n, seed=np.random.default_rng(root))
    true = model.to_vector()[0]
    out = np.empty((len(eps_grid), len(cw_grid)))
    for i, e in enumerate(eps_grid):
        for j, c in enumerate(cw_grid):
            # same positions and signs for every magnitude
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(run, i + 1)))
            spec = ContaminationSpec("AO", float(e), "independent",
                                     Contaminant("point_mass", float(c)))
            y = contaminate(x, spec, rng).values
            tr = estimate_ar_durbin_levinson(y, 1, family, grid_step, mu=model.mu)
            out[i, j] = abs(tr.phi[0] - true)
    return out


def bias_curves(model: ArmaParams, eps_grid: Sequence[float], cw_grid: Sequence[float],
                n: int, runs: int, seed: int = 0, *,
                family: Optional[RhoFamily] = None, grid_step: float = 0.05,
                threads: Optional[int] = None) -> BiasSurface:
    """Monte Carlo bias surface of the robust AR(1) estimate.

    Outliers are placed independently with probability ``eps`` and take the
    values ``+c_w`` or ``-c_w`` with probability one half each.  Every run
    reuses its clean series across the grid, and the outlier positions and
    signs across ``c_w``.

    Parameters
    ----------
    model : ArmaParams
        AR(1) model; the location is treated as known.
    eps_grid, cw_grid : sequence of float
        Contamination fractions and outlier magnitudes.
    n, runs : int
        Series length and replicates.
    """
    if model.p + model.q != 1 or model.q:
        raise NotImplementedError("bias curves are defined for AR(1) models")
    eps_grid = np.asarray(eps_grid, dtype=float)
    cw_grid = np.asarray(cw_grid, dtype=float)
    if eps_grid.size == 0 or cw_grid.size == 0:
        raise ValueError("grids must be non-empty")
    if runs < 1:
        raise ValueError("runs must be at least 1")
    c1 = family.c1 if family is not None else C1_EFF
    tasks = [(model, eps_grid, cw_grid, n, seed, r, c1, grid_step) for r in range(runs)]
    res = parallel_map(_run, tasks, threads)
    return BiasSurface(eps_grid, cw_grid, np.stack(res, axis=2))
