"""
Cone parameters, the data-driven error bound, and the cone-membership audit.

The adaptive rule only needs the inflation factor ``C(m)`` applied to the
observable block sum ``S~_{m-r,m}``.  The decomposed form ``(omega_hat,
omega_ring)`` is only used to audit integrands with known Fourier
coefficients and to compute the level at which stopping is guaranteed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

from .errors import PrematureCheckError
from .kappa import KappaNuMap, s_tilde
from .lattice import GeneratingVector
from .oracles import _residues, box_points, explicit_kappa_map
from .transform import SpectralArray


@dataclass(frozen=True)
class GeometricInflation:
    """``m -> scale * ratio**(-m)``; the default is ``5 * 2**-m``."""

    scale: float = 5.0
    ratio: float = 2.0

    def __call__(self, m: int) -> float:
        return self.scale * self.ratio ** (-m)

    def to_dict(self) -> dict:
        return {"form": "geometric", "scale": self.scale, "ratio": self.ratio}


@dataclass(frozen=True)
class GeometricOmega:
    """``t -> min(cap, scale * rho**t)``."""

    scale: float
    rho: float
    cap: float = float("inf")

    def __call__(self, t: int) -> float:
        return min(self.cap, self.scale * self.rho**t)

    def to_dict(self) -> dict:
        return {"form": "geometric", "scale": self.scale, "rho": self.rho, "cap": self.cap}


@dataclass(frozen=True)
class OmegaInflation:
    """``C(m) = omega_hat(m) omega_ring(r) / (1 - omega_hat(r) omega_ring(r))``."""

    omega_hat: Callable[[int], float]
    omega_ring: Callable[[int], float]
    r: int

    def __call__(self, m: int) -> float:
        prod = self.omega_hat(self.r) * self.omega_ring(self.r)
        return self.omega_hat(m) * self.omega_ring(self.r) / (1.0 - prod)

    def to_dict(self) -> dict:
        d = {"form": "omega", "r": self.r}
        for name in ("omega_hat", "omega_ring"):
            fn = getattr(self, name)
            d[name] = fn.to_dict() if hasattr(fn, "to_dict") else repr(fn)
        return d


@dataclass(frozen=True)
class ConeSpec:
    """
    Parameters of the cone of integrands.

    Parameters
    ----------
    ell_star : int
        Smallest block index trusted to bound the tail.
    r : int
        Lag between the sample level ``m`` and the block ``m - r`` read off.
    inflation : callable, optional
        ``m -> C(m) > 0``.  Derived from the omegas when omitted.
    omega_hat, omega_ring : callable, optional
        Decomposed cone functions; both or neither.
    """

    ell_star: int = 6
    r: int = 4
    inflation: Callable[[int], float] | None = None
    omega_hat: Callable[[int], float] | None = None
    omega_ring: Callable[[int], float] | None = None

    def __post_init__(self):
        if self.ell_star < 1 or self.r < 1:
            raise ValueError("ell_star and r must be >= 1")
        if (self.omega_hat is None) != (self.omega_ring is None):
            raise ValueError("supply both omega_hat and omega_ring, or neither")
        if self.omega_hat is not None:
            prod = self.omega_hat(self.r) * self.omega_ring(self.r)
            if not prod < 1.0:
                raise ValueError(f"omega_hat(r) * omega_ring(r) = {prod} must be < 1")
            derived = OmegaInflation(self.omega_hat, self.omega_ring, self.r)
            if self.inflation is None:
                object.__setattr__(self, "inflation", derived)
            else:
                for m in range(0, 40):
                    if not np.isclose(self.inflation(m), derived(m), rtol=1e-12, atol=0):
                        raise ValueError(f"inflation disagrees with omegas at m={m}")
        elif self.inflation is None:
            object.__setattr__(self, "inflation", GeometricInflation())

    @property
    def initial_level(self) -> int:
        return self.ell_star + self.r

    def C(self, m: int) -> float:
        c = float(self.inflation(m))
        if not c > 0:
            raise ValueError(f"inflation C({m}) = {c} must be positive")
        return c

    def to_dict(self) -> dict:
        infl = self.inflation
        return {
            "ell_star": self.ell_star,
            "r": self.r,
            "inflation": infl.to_dict() if hasattr(infl, "to_dict") else repr(infl),
        }


def default_cone() -> ConeSpec:
    """``ell_star = 6``, ``r = 4``, ``C(m) = 5 * 2**-m`` (base 2)."""
    return ConeSpec(6, 4, GeometricInflation(5.0, 2.0))


def cone_from_omegas(ell_star: int, r: int, omega_hat, omega_ring) -> ConeSpec:
    return ConeSpec(ell_star, r, None, omega_hat, omega_ring)


@dataclass(frozen=True)
class ErrorBoundReport:
    m: int
    ell: int
    s_tilde: float
    bound: float
    tolerance: float
    satisfied: bool


def error_bound(cone: ConeSpec, spec: SpectralArray, kmap: KappaNuMap, m: int | None = None,
                tolerance: float = float("inf"), counter=None) -> ErrorBoundReport:
    m = spec.level if m is None else m
    if m < cone.initial_level:
        raise PrematureCheckError(
            f"level {m} is below the first check level {cone.initial_level}"
        )
    if m != spec.level:
        raise ValueError(f"spectrum is at level {spec.level}, not {m}")
    st = s_tilde(spec, kmap, m - cone.r, counter)
    bound = cone.C(m) * st
    return ErrorBoundReport(m, m - cone.r, st, bound, tolerance, bound <= tolerance)


# --------------------------------------------------------------------------
# audit of integrands with known coefficients


class CoefficientOracle(Protocol):
    dimension: int

    def coefficients(self, k: np.ndarray) -> np.ndarray: ...

    def abs_sum(self) -> float: ...


@dataclass
class AuditReport:
    """Outcome of :func:`cone_membership_audit`.

    ``S``, ``S_check`` and ``S_hat`` hold ``(lo, hi)`` brackets; they coincide
    when every relevant wavenumber lies in the search box.
    """

    status: str
    m_max: int
    ell_star: int
    tail: float
    S: np.ndarray = field(repr=False)
    S_check: np.ndarray = field(repr=False)
    S_hat: np.ndarray = field(repr=False)
    kmap: list = field(repr=False)
    violations: list = field(default_factory=list)
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def kappa_abs_coefficients(oracle: CoefficientOracle, kmap: list) -> np.ndarray:
    """``|f^(k(kappa))|``; NaN where the map entry lies outside the box."""
    out = np.full(len(kmap), np.nan)
    known = [i for i, k in enumerate(kmap) if k is not None]
    if known:
        ks = np.array([kmap[i] for i in known], dtype=np.int64)
        out[known] = np.abs(oracle.coefficients(ks))
    return out


def cone_membership_audit(oracle: CoefficientOracle, gv: GeneratingVector, cone: ConeSpec,
                          m_max: int, radius: int, kmap: list | None = None,
                          tail_budget: float = 1e-10, rtol: float = 1e-12) -> AuditReport:
    """
    Check both cone inequalities for ``l <= m <= m_max``.

    The wavenumber map is the max-norm map of
    :func:`~lattice_cube.oracles.explicit_kappa_map` restricted to the box
    ``[-radius, radius]^d``.  Coefficient mass outside the box
    (``oracle.abs_sum()`` minus the box sum) is carried as an uncertainty
    bracket.  The audit passes only if the inequalities hold for the worst
    case inside each bracket, fails if they are violated even in the best
    case, and is inconclusive otherwise or when the outside mass exceeds
    ``tail_budget``.
    """
    if cone.omega_hat is None:
        raise ValueError("audit needs a cone with omega_hat and omega_ring")
    d = oracle.dimension
    base = gv.base
    gv = gv.project(d)
    if kmap is None:
        kmap = explicit_kappa_map(gv, m_max, radius, d, allow_outside=True)
    n = base**m_max
    if len(kmap) < n:
        raise ValueError("kappa map shorter than b**m_max")
    kmap = list(kmap[:n])

    pts = box_points(radius, d)
    box_abs = np.abs(oracle.coefficients(pts))
    box_sum = float(box_abs.sum())
    tail = max(0.0, float(oracle.abs_sum()) - box_sum)

    a = kappa_abs_coefficients(oracle, kmap)
    unknown = np.isnan(a)
    a0 = np.where(unknown, 0.0, a)
    prefix = np.concatenate([[0.0], np.cumsum(a0)])
    prefix_unknown = np.concatenate([[0], np.cumsum(unknown)])

    def block(ell):
        return (0 if ell == 0 else base ** (ell - 1)), base**ell

    S = np.zeros((m_max + 1, 2))
    for ell in range(m_max + 1):
        lo, hi = block(ell)
        s = prefix[hi] - prefix[lo]
        S[ell] = (s, s + (tail if prefix_unknown[hi] - prefix_unknown[lo] else 0.0))

    S_check = np.zeros((m_max + 1, 2))
    for m in range(m_max + 1):
        rest = box_sum - prefix[base**m]
        S_check[m] = (rest if prefix_unknown[base**m] else rest + tail, rest + tail)

    S_hat = np.zeros((m_max + 1, m_max + 1, 2))
    for m in range(m_max + 1):
        mod = base**m
        res_box = _residues(gv, pts, m) if m else np.zeros(len(pts), dtype=np.int64)
        coset_mass = np.bincount(res_box, weights=box_abs, minlength=mod)
        known = [i for i in range(mod) if kmap[i] is not None]
        contrib = np.zeros(mod)
        if known:
            ks = np.array([kmap[i] for i in known], dtype=np.int64)
            res_k = _residues(gv, ks, m) if m else np.zeros(len(ks), dtype=np.int64)
            contrib[known] = coset_mass[res_k] - a0[known]
        cum = np.concatenate([[0.0], np.cumsum(contrib)])
        for ell in range(m + 1):
            lo, hi = block(ell)
            s = max(0.0, cum[hi] - cum[lo])
            S_hat[ell, m] = (s, s + tail)

    violations, undecided = [], []

    def judge(kind, ell, m, lhs, rhs, factor):
        slack = rtol * max(1.0, abs(rhs[1] * factor))
        if lhs[1] <= factor * rhs[0] + slack:
            return
        if lhs[0] > factor * rhs[1] + slack:
            violations.append((kind, ell, m, lhs[0], factor * rhs[1]))
        else:
            undecided.append((kind, ell, m))

    for m in range(m_max + 1):
        for ell in range(m + 1):
            judge("hat", ell, m, S_hat[ell, m], S_check[m], cone.omega_hat(m - ell))
            if ell >= cone.ell_star:
                judge("ring", ell, m, S_check[m], S[ell], cone.omega_ring(m - ell))

    if violations:
        status, msg = "fail", f"{len(violations)} cone inequalities violated"
    elif tail > tail_budget:
        status, msg = "inconclusive", f"coefficient mass {tail:.3g} outside the box exceeds budget"
    elif undecided:
        status, msg = "inconclusive", f"{len(undecided)} inequalities undecided within the tail bracket"
    else:
        status, msg = "pass", ""
    return AuditReport(status, m_max, cone.ell_star, tail, S, S_check, S_hat, kmap,
                       violations, msg)


def guaranteed_level(report: AuditReport, cone: ConeSpec, tolerance: float) -> int | None:
    """Smallest ``m' >= ell_star + r`` with
    ``C(m') (1 + omega_hat(r) omega_ring(r)) S_{m'-r} <= tolerance``.

    Uses the upper end of the ``S`` bracket; ``None`` if no audited level
    qualifies.
    """
    slack = 1.0 + cone.omega_hat(cone.r) * cone.omega_ring(cone.r)
    for m in range(cone.initial_level, report.m_max + 1):
        if cone.C(m) * slack * report.S[m - cone.r, 1] <= tolerance:
            return m
    return None


def oracle_s_tilde(spec: SpectralArray, gv: GeneratingVector, kmap: Sequence, ell: int) -> float:
    """Block sum of ``|Y(nu_m(k(kappa)))|`` using an explicit wavenumber map."""
    base = spec.base
    lo = 0 if ell == 0 else base ** (ell - 1)
    ks = kmap[lo:base**ell]
    if any(k is None for k in ks):
        raise ValueError(f"block {ell} contains wavenumbers outside the audit box")
    ks = np.array(ks, dtype=np.int64)
    nu = _residues(gv.project(ks.shape[1]), ks, spec.level)
    return float(np.abs(spec.coeffs[nu]).sum())
