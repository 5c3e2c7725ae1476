"""Randomized replication of the geometric Asian call experiment."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .cone import ConeSpec, default_cone
from .engine import CubatureRequest, integrate
from .integrands import AsianCall, AsianOptionParams, periodize
from .lattice import GeneratingVector

CSV_COLUMNS = ("replication", "d", "sigma", "estimate", "exact", "abs_error", "bound",
               "n", "time", "converged", "success", "error")


@dataclass
class ReplicationRow:
    replication: int
    d: int
    sigma: float
    estimate: float
    exact: float
    abs_error: float
    bound: float
    n: int
    time: float
    converged: bool
    success: bool
    error: str = ""


def _one(args) -> ReplicationRow:
    rep, d, sigma, shift_seed, tol, gv, cone, periodization, option = args
    nan = float("nan")
    exact = nan
    t0 = time.perf_counter()
    try:  # failures are recorded per replication, never fatal
        f = periodize(AsianCall(AsianOptionParams(d=d, sigma=sigma, **option)), periodization)
        exact = f.integral
        res = integrate(CubatureRequest(f, d, tol, gv, cone, seed=shift_seed))
    except Exception as exc:
        return ReplicationRow(rep, d, sigma, nan, exact, nan, nan, 0,
                              time.perf_counter() - t0, False, False, repr(exc))
    err = abs(res.estimate - exact)
    return ReplicationRow(rep, d, sigma, res.estimate, exact, err, res.error_bound,
                          res.n_samples, res.wall_time, res.converged, bool(err <= tol))


def draw_settings(reps: int, dims, sigma_range, seed: int):
    """Per-replication ``(d, sigma, shift_seed)`` from independent child streams."""
    out = []
    for child in np.random.SeedSequence(seed).spawn(reps):
        rng = np.random.default_rng(child)
        d = int(rng.choice(np.asarray(dims)))
        sigma = float(rng.uniform(*sigma_range))
        out.append((d, sigma, int(rng.integers(2**63 - 1))))
    return out


def replicate_asian(gv: GeneratingVector, reps: int = 100, dims=(1, 2, 4, 8, 16),
                    sigma_range=(0.1, 0.7), tolerance: float = 0.02,
                    cone: ConeSpec | None = None, seed: int = 0,
                    periodization: str = "none", workers: int = 1,
                    option: dict | None = None) -> tuple[list[ReplicationRow], dict]:
    if reps < 1:
        raise ValueError("need at least one replication")
    lo, hi = sigma_range
    if not 0 < lo <= hi:
        raise ValueError("sigma range must lie in (0, inf)")
    if max(dims) > gv.dimension:
        raise ValueError(f"dimension {max(dims)} exceeds vector dimension {gv.dimension}")
    cone = cone or default_cone()
    option = dict(option or {"S0": 100.0, "K": 100.0, "T": 1.0, "rate": 0.03})
    jobs = [(i, d, s, sh, tolerance, gv, cone, periodization, option)
            for i, (d, s, sh) in enumerate(draw_settings(reps, dims, sigma_range, seed))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_one, jobs))
    else:
        rows = [_one(j) for j in jobs]

    errs = np.array([r.abs_error for r in rows])
    times = np.array([r.time for r in rows])
    success = sum(r.success for r in rows)
    qs = [0.05, 0.25, 0.5, 0.75, 0.95, 1.0]
    finite = errs[np.isfinite(errs)]
    summary = {
        "replications": reps,
        "success_count": int(success),
        "failure_count": int(reps - success),
        "success_fraction": success / reps,
        "converged_count": int(sum(r.converged for r in rows)),
        "tolerance": tolerance,
        "dims": list(map(int, dims)),
        "sigma_range": [lo, hi],
        "periodization": periodization,
        "seed": seed,
        "option": option,
        "cone": cone.to_dict(),
        "vector_hash": gv.digest(),
        "error_quantiles": dict(zip(map(str, qs), np.quantile(finite, qs).tolist()))
        if finite.size else {},
        "time_quantiles": dict(zip(map(str, qs), np.quantile(times, qs).tolist())),
        "sample_size_distribution": {str(n): int(c) for n, c in
                                     zip(*np.unique([r.n for r in rows], return_counts=True))},
        "exceptions": [asdict(r) for r in rows if r.error],
    }
    return rows, summary
