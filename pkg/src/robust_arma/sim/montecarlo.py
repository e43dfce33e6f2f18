"""Monte Carlo tables of estimator means and standard deviations."""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from ..ar import estimate_ar_forward_backward
from ..arma import EstimationOptions, estimate_bip_tau, robust_starting_point
from ..core import C1_EFF, C1_ROB, ArmaParams, ArmaSpec, make_rho_family
from .baselines import BaselineFailure, classical_fit, three_sigma_clean
from .process import ContaminationSpec, contaminate, generate_arma

METHODS = ("bip_tau", "bip_tau_rob", "bip_tau_fb", "bip_tau_init", "ml", "ml_3sigma")
FAILURE_FLAG = 0.10


def thread_count(threads: Optional[int] = None) -> int:
    """Worker count: explicit value, else ``ROBUST_ARMA_THREADS``, else 1."""
    if threads is None:
        threads = int(os.environ.get("ROBUST_ARMA_THREADS", "1") or 1)
    return max(1, int(threads))


def parallel_map(fn: Callable, items: Sequence, threads: Optional[int] = None) -> list:
    """Order-preserving map over worker processes."""
    k = thread_count(threads)
    if k == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * k))))


@lru_cache(maxsize=None)
def _family(c1: float):
    return make_rho_family(c1)


def run_method(name: str, y: np.ndarray, spec: ArmaSpec,
               options: EstimationOptions) -> ArmaParams:
    """Apply one registered estimator to a series."""
    if name == "bip_tau":
        return estimate_bip_tau(y, spec, _family(C1_EFF), options).beta_star
    if name == "bip_tau_rob":
        return estimate_bip_tau(y, spec, _family(C1_ROB), options).beta_star
    if name == "bip_tau_fb":
        if spec.q:
            raise ValueError("forward-backward fit is defined for AR models only")
        return estimate_ar_forward_backward(y, spec.p, _family(C1_EFF), options.grid_step,
                                            q_long=options.q_long, mu=options.mu,
                                            fit_window=options.fit_window).params
    if name == "bip_tau_init":
        if spec.q == 0:
            return estimate_bip_tau(y, spec, _family(C1_EFF), options).start_point
        return robust_starting_point(y, spec, _family(C1_EFF), options=options)
    if name == "ml":
        return classical_fit(y, spec, options.mu)
    if name == "ml_3sigma":
        return classical_fit(three_sigma_clean(y)[0], spec, options.mu)
    raise ValueError(f"unknown method {name!r}")


def replicate_series(model: ArmaParams, scenario: ContaminationSpec, n: int,
                     seed: int, scenario_index: int, run: int) -> np.ndarray:
    """Series of one replicate; its stream depends only on the indices."""
    ss = np.random.SeedSequence(seed, spawn_key=(scenario_index, run))
    rng = np.random.default_rng(ss)
    if scenario.kind == "IO":
        return generate_arma(model, n, seed=rng, innovation_outliers=scenario)
    x = generate_arma(model, n, seed=rng)
    return contaminate(x, scenario, rng).values


def _vector(params: ArmaParams, with_mu: bool) -> np.ndarray:
    v = params.to_vector()
    return v if with_mu else v[:-1]


def _one_run(task):
    model, scenario, n, seed, si, run, methods, spec, options = task
    y = replicate_series(model, scenario, n, seed, si, run)
    out = {}
    for m in methods:
        try:
            v = _vector(run_method(m, y, spec, options), options.mu is None)
            out[m] = v if np.all(np.isfinite(v)) else None
        except (BaselineFailure, ValueError, ArithmeticError, np.linalg.LinAlgError):
            out[m] = None
    return out


@dataclass
class McReport:
    """Per scenario and method: mean and standard deviation of the estimates.

    Attributes
    ----------
    mean, std : dict
        Keyed by ``(scenario, method)``; arrays over ``param_names``.
    n_ok, n_failed : dict
        Successful and failed run counts per key.
    references : dict
        Optional published ``(mean, std)`` pairs per key.
    """

    scenarios: list
    methods: list
    param_names: list
    truth: np.ndarray
    runs: int
    n: int
    seed: int
    mean: dict = field(default_factory=dict)
    std: dict = field(default_factory=dict)
    n_ok: dict = field(default_factory=dict)
    n_failed: dict = field(default_factory=dict)
    references: dict = field(default_factory=dict)

    def flagged(self, scenario: str, method: str) -> bool:
        """True when more than 10% of the runs failed."""
        return self.n_failed[scenario, method] > FAILURE_FLAG * self.runs

    def within_reference(self, scenario: str, method: str, k: float = 3.0):
        """``|mean - ref_mean| <= k ref_std / sqrt(runs)`` per parameter."""
        ref_m, ref_s = (np.asarray(a, float) for a in self.references[scenario, method])
        tol = k * ref_s / np.sqrt(self.n_ok[scenario, method])
        return np.abs(self.mean[scenario, method] - ref_m) <= tol

    def rows(self) -> list:
        out = []
        for sc in self.scenarios:
            for m in self.methods:
                ref = self.references.get((sc, m))
                for j, name in enumerate(self.param_names):
                    row = {"scenario": sc, "method": m, "parameter": name,
                           "true": float(self.truth[j]),
                           "mean": float(self.mean[sc, m][j]),
                           "std": float(self.std[sc, m][j]),
                           "runs_ok": self.n_ok[sc, m],
                           "runs_failed": self.n_failed[sc, m],
                           "ref_mean": float(ref[0][j]) if ref else float("nan"),
                           "ref_std": float(ref[1][j]) if ref else float("nan")}
                    out.append(row)
        return out

    def to_csv(self, path=None) -> str:
        """One row per scenario, method and parameter; floats in repr form."""
        buf = io.StringIO()
        rows = self.rows()
        fields = ["scenario", "method", "parameter", "true", "mean", "std",
                  "runs_ok", "runs_failed", "ref_mean", "ref_std"]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(fields)
        for r in rows:
            w.writerow([repr(r[k]) if isinstance(r[k], float) else r[k] for k in fields])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def to_json(self, path=None) -> str:
        """Nested ``scenario -> method -> {mean, std, ...}``."""
        doc = {"runs": self.runs, "n": self.n, "seed": self.seed,
               "parameters": self.param_names, "true": self.truth.tolist(),
               "scenarios": {}}
        for sc in self.scenarios:
            d = doc["scenarios"].setdefault(sc, {})
            for m in self.methods:
                ref = self.references.get((sc, m))
                d[m] = {"mean": self.mean[sc, m].tolist(),
                        "std": self.std[sc, m].tolist(),
                        "runs_ok": self.n_ok[sc, m],
                        "runs_failed": self.n_failed[sc, m],
                        "flagged": self.flagged(sc, m)}
                if ref:
                    d[m]["reference"] = {"mean": list(ref[0]), "std": list(ref[1])}
        text = json.dumps(doc, indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def param_names(spec: ArmaSpec, with_mu: bool) -> list:
    names = [f"phi{i}" for i in range(1, spec.p + 1)]
    names += [f"theta{i}" for i in range(1, spec.q + 1)]
    return names + ["mu"] if with_mu else names


def run_monte_carlo(model: ArmaParams, scenarios: Sequence[ContaminationSpec],
                    methods: Sequence[str] = ("bip_tau",), runs: int = 100,
                    n: int = 500, seed: int = 0, *,
                    spec: Optional[ArmaSpec] = None,
                    options: EstimationOptions = EstimationOptions(),
                    references: Optional[dict] = None,
                    threads: Optional[int] = None) -> McReport:
    """Estimate every method on fresh replicates of every scenario.

    Each replicate draws from its own stream derived from ``seed`` and the
    (scenario, run) indices, and all methods see the same series.  Failed
    fits are excluded and counted.

    Parameters
    ----------
    model : ArmaParams
        Data generating model.
    scenarios : sequence of ContaminationSpec
    methods : sequence of str
        Names from ``METHODS``.
    runs, n : int
        Replicates per scenario and series length.
    spec : ArmaSpec, optional
        Fitted orders, those of ``model`` by default.
    references : dict, optional
        Published ``(mean, std)`` per ``(scenario name, method)``.
    threads : int, optional
        Worker processes; ``ROBUST_ARMA_THREADS`` when omitted.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    if not scenarios:
        raise ValueError("at least one scenario is required")
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}")
    spec = spec or model.spec
    with_mu = options.mu is None
    names = [s.name for s in scenarios]
    if len(set(names)) != len(names):
        raise ValueError("scenario names must be unique")
    truth = _vector(model, with_mu) if spec == model.spec else np.full(len(param_names(spec, with_mu)), np.nan)
    report = McReport(names, list(methods), param_names(spec, with_mu), truth,
                      runs, n, seed, references=dict(references or {}))
    tasks = [(model, sc, n, seed, si, r, tuple(methods), spec, options)
             for si, sc in enumerate(scenarios) for r in range(runs)]
    results = parallel_map(_one_run, tasks, threads)
    for si, sc in enumerate(names):
        chunk = results[si * runs:(si + 1) * runs]
        for m in methods:
            vals = [res[m] for res in chunk if res[m] is not None]
            k = len(report.param_names)
            arr = np.array(vals).reshape(len(vals), k)
            report.n_ok[sc, m] = len(vals)
            report.n_failed[sc, m] = runs - len(vals)
            report.mean[sc, m] = arr.mean(axis=0) if vals else np.full(k, np.nan)
            report.std[sc, m] = arr.std(axis=0, ddof=1) if len(vals) > 1 else np.zeros(k)
    return report
