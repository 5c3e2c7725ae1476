"""
Adaptive shifted-lattice cubature with a data-driven stopping rule.

Starting at ``m = ell_star + r`` the engine samples the integrand on the
level-``m`` node set, reads the block sum ``S~_{m-r,m}`` from the ordered
discrete coefficients, and stops as soon as ``C(m) * S~_{m-r,m} <= tol``.
Otherwise the node set is extended by one level: only the new nodes are
evaluated, the spectrum is extended with one merge stage, and the
coefficient ordering is refined.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .cone import ConeSpec, default_cone
from .kappa import KappaNuMap, extend, initial_map, s_tilde
from .lattice import GeneratingVector, Shift, nodes, shifted_value
from .transform import OpCounter, SampleBuffer, SpectralArray, extend_spectrum, transform

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass
class CubatureRequest:
    """
    One integration problem.

    ``integrand`` is called with an array of shape ``(n, d)`` of points in
    ``[0,1)^d`` and must return ``n`` values.
    """

    integrand: Integrand
    dimension: int
    tolerance: float
    gv: GeneratingVector
    cone: ConeSpec = field(default_factory=default_cone)
    seed: int | None = None
    m_budget: int | None = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not 1 <= self.dimension <= self.gv.dimension:
            raise ValueError(
                f"dimension {self.dimension} not covered by a {self.gv.dimension}-dimensional vector"
            )
        if self.m_budget is None:
            self.m_budget = self.gv.max_level
        if self.m_budget > self.gv.max_level:
            raise ValueError(f"m_budget {self.m_budget} exceeds vector max level {self.gv.max_level}")
        if self.cone.initial_level > self.m_budget:
            raise ValueError(
                f"first check level {self.cone.initial_level} exceeds m_budget {self.m_budget}"
            )


@dataclass
class TraceEntry:
    m: int
    s_tilde: float
    bound: float


@dataclass
class CubatureResult:
    estimate: float | complex
    error_bound: float
    m: int
    n_samples: int
    converged: bool
    seed: int | None
    trace: list[TraceEntry]
    evaluation_count: int
    op_count: int
    wall_time: float

    def to_dict(self) -> dict:
        d = asdict(self)
        est = self.estimate
        if isinstance(est, complex):
            d["estimate"] = est.real if est.imag == 0 else [est.real, est.imag]
        return d


def _evaluate(f: Integrand, pts: np.ndarray) -> np.ndarray:
    y = np.asarray(f(pts))
    if y.shape != (len(pts),):
        raise ValueError(f"integrand returned shape {y.shape}, expected ({len(pts)},)")
    return y


def _run(req: CubatureRequest, snapshots: list | None) -> CubatureResult:
    t0 = time.perf_counter()
    d = req.dimension
    gv = req.gv.project(d)
    base = gv.base
    cone = req.cone
    seed = req.seed
    if seed is None:
        seed = int(np.random.SeedSequence().entropy)
    shift = Shift.draw(d, seed)
    counter = OpCounter()

    m = cone.initial_level
    y = _evaluate(req.integrand, shifted_value(nodes(gv, 0, base**m), shift.delta))
    buf = SampleBuffer(y, base, shift)
    spec: SpectralArray = transform(buf, counter=counter)
    kmap: KappaNuMap = initial_map(spec, counter)

    trace: list[TraceEntry] = []
    while True:
        st = s_tilde(spec, kmap, m - cone.r, counter)
        bound = cone.C(m) * st
        trace.append(TraceEntry(m, st, bound))
        if snapshots is not None:
            snapshots.append(np.abs(spec.coeffs[kmap.perm]))
        if bound <= req.tolerance or m >= req.m_budget:
            break
        new = _evaluate(req.integrand,
                        shifted_value(nodes(gv, base**m, base ** (m + 1)), shift.delta))
        buf.extend(new)
        spec = extend_spectrum(spec, new, counter)
        kmap = extend(kmap, spec, cone.r, counter)
        m += 1

    est = spec.estimate
    estimate = float(est.real) if not np.iscomplexobj(buf.values) else complex(est)
    return CubatureResult(
        estimate=estimate,
        error_bound=float(bound),
        m=m,
        n_samples=base**m,
        converged=bool(bound <= req.tolerance),
        seed=seed,
        trace=trace,
        evaluation_count=buf.evaluation_count,
        op_count=counter.count,
        wall_time=time.perf_counter() - t0,
    )


def integrate(req: CubatureRequest) -> CubatureResult:
    """Run the adaptive rule.

    When the budget ``m_budget`` is reached before the bound meets the
    tolerance, the result carries the last estimate and bound with
    ``converged=False``.
    """
    return _run(req, None)


def integrate_traced(req: CubatureRequest) -> tuple[CubatureResult, list[np.ndarray]]:
    """As :func:`integrate`, also returning ``|Y(perm[kappa])|`` at each level."""
    snaps: list[np.ndarray] = []
    res = _run(req, snaps)
    return res, snaps
