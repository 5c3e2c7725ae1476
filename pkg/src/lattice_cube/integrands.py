"""
Test integrands on the unit cube.

Every integrand is a vectorized callable taking points of shape ``(n, d)``.
The synthetic families expose their Fourier coefficients so that tests and
cone audits can compare against exact values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import ndtri
from scipy.stats import norm

_EPS = 2.0**-53


class FourierPolynomial:
    """Finite Fourier series ``sum_k c_k exp(2 pi i <k, x>)``.

    Parameters
    ----------
    wavenumbers : array_like, shape (N, d)
    coeffs : array_like, shape (N,)
    """

    def __init__(self, wavenumbers, coeffs):
        k = np.atleast_2d(np.asarray(wavenumbers, dtype=np.int64))
        c = np.asarray(coeffs, dtype=np.complex128).ravel()
        if len(k) != len(c):
            raise ValueError("need one coefficient per wavenumber")
        table: dict[tuple[int, ...], complex] = {}
        for kk, cc in zip(map(tuple, k.tolist()), c):
            table[kk] = table.get(kk, 0) + cc
        self._table = table
        self.wavenumbers = np.array(list(table), dtype=np.int64).reshape(-1, k.shape[1])
        self.coeffs = np.array(list(table.values()), dtype=np.complex128)
        self.dimension = k.shape[1]
        self.is_real = all(
            np.isclose(table.get(tuple(-v for v in kk), 0), np.conj(cc), atol=1e-15)
            for kk, cc in table.items()
        )

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        phase = (x @ self.wavenumbers.T.astype(float)) % 1.0
        vals = np.exp(2j * np.pi * phase) @ self.coeffs
        return vals.real if self.is_real else vals

    @property
    def integral(self) -> complex:
        return self._table.get((0,) * self.dimension, 0.0)

    @property
    def radius(self) -> int:
        return int(np.abs(self.wavenumbers).max()) if len(self.wavenumbers) else 0

    def coefficients(self, k: np.ndarray) -> np.ndarray:
        k = np.atleast_2d(k)
        return np.array([self._table.get(tuple(row), 0.0) for row in k.tolist()],
                        dtype=np.complex128)

    def abs_sum(self) -> float:
        return float(np.abs(self.coeffs).sum())

    @classmethod
    def random(cls, rng: np.random.Generator, d: int, radius: int, n_terms: int,
               real: bool = True) -> "FourierPolynomial":
        ks = rng.integers(-radius, radius + 1, size=(n_terms, d))
        cs = rng.normal(size=n_terms) + 1j * rng.normal(size=n_terms)
        if real:
            ks = np.concatenate([ks, -ks])
            cs = np.concatenate([cs, np.conj(cs)]) / 2
        return cls(ks, cs)


def constant(c: float = 1.0, d: int = 1) -> FourierPolynomial:
    return FourierPolynomial(np.zeros((1, d), dtype=np.int64), [c])


def product_cosine(d: int, alpha: float) -> FourierPolynomial:
    """``prod_j (1 + alpha cos(2 pi x_j))``, coefficients ``(alpha/2)**nnz(k)``."""
    ks = np.array(np.meshgrid(*([[-1, 0, 1]] * d), indexing="ij")).reshape(d, -1).T
    cs = (alpha / 2.0) ** np.count_nonzero(ks, axis=1)
    return FourierPolynomial(ks, cs)


class PoissonProduct:
    """
    ``prod_j [1 + beta_j (P_rho(x_j) - 1)]`` with the Poisson kernel
    ``P_rho(x) = (1 - rho**2) / (1 - 2 rho cos(2 pi x) + rho**2)``.

    Coefficients are ``prod_j c_j(k_j)`` with ``c_j(0) = 1`` and
    ``c_j(k) = beta_j rho**|k|``; the integral is 1.
    """

    def __init__(self, d: int, rho: float, beta: float | Sequence[float] = 1.0):
        if not 0 <= rho < 1:
            raise ValueError("rho must lie in [0, 1)")
        self.dimension = d
        self.rho = rho
        self.beta = np.broadcast_to(np.asarray(beta, dtype=float), (d,)).copy()
        if np.any(self.beta < 0):
            raise ValueError("beta must be nonnegative")
        self.integral = 1.0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        rho = self.rho
        kern = (1 - rho**2) / (1 - 2 * rho * np.cos(2 * np.pi * x) + rho**2)
        return np.prod(1.0 + self.beta * (kern - 1.0), axis=1)

    def coefficients(self, k: np.ndarray) -> np.ndarray:
        k = np.atleast_2d(k)
        fac = np.where(k == 0, 1.0, self.beta * self.rho ** np.abs(k))
        return np.prod(fac, axis=1).astype(np.complex128)

    def abs_sum(self) -> float:
        return float(np.prod(1.0 + 2.0 * self.beta * self.rho / (1.0 - self.rho)))


# --------------------------------------------------------------------------
# geometric Asian call


@dataclass(frozen=True)
class AsianOptionParams:
    """Geometric-average Asian call on a GBM with ``d`` equally spaced monitoring dates."""

    S0: float = 100.0
    K: float = 100.0
    T: float = 1.0
    rate: float = 0.03
    sigma: float = 0.5
    d: int = 4

    def __post_init__(self):
        if min(self.S0, self.K, self.T) <= 0 or self.sigma < 0 or self.d < 1:
            raise ValueError(f"invalid option parameters {self}")


def asian_geometric_payoff(params: AsianOptionParams, u: np.ndarray) -> np.ndarray:
    """Discounted payoff ``exp(-rT) max(G - K, 0)`` for uniforms ``u`` of shape (n, d).

    Uniforms are clamped ``2**-53`` away from 0 and 1, mapped to standard
    normals, and accumulated into the Brownian path at ``t_j = j T / d``.
    """
    u = np.clip(np.atleast_2d(u), _EPS, 1.0 - _EPS)
    p = params
    dt = p.T / p.d
    z = ndtri(u)
    w = np.cumsum(np.sqrt(dt) * z, axis=1)
    t = dt * np.arange(1, p.d + 1)
    log_s = np.log(p.S0) + (p.rate - 0.5 * p.sigma**2) * t + p.sigma * w
    geo = np.exp(log_s.mean(axis=1))
    return np.exp(-p.rate * p.T) * np.maximum(geo - p.K, 0.0)


def exact_geometric_price(params: AsianOptionParams) -> float:
    """Closed-form price; the geometric mean of the monitored prices is lognormal."""
    p = params
    mu = np.log(p.S0) + (p.rate - 0.5 * p.sigma**2) * p.T * (p.d + 1) / (2 * p.d)
    var = p.sigma**2 * p.T * (p.d + 1) * (2 * p.d + 1) / (6 * p.d**2)
    disc = np.exp(-p.rate * p.T)
    if var == 0:
        return float(disc * max(np.exp(mu) - p.K, 0.0))
    sd = np.sqrt(var)
    d1 = (mu + var - np.log(p.K)) / sd
    d2 = d1 - sd
    return float(disc * (np.exp(mu + var / 2) * norm.cdf(d1) - p.K * norm.cdf(d2)))


class AsianCall:
    """Vectorized integrand wrapper with the exact price attached."""

    def __init__(self, params: AsianOptionParams):
        self.params = params
        self.dimension = params.d
        self.integral = exact_geometric_price(params)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        return asian_geometric_payoff(self.params, u)


# --------------------------------------------------------------------------


def periodize(f: Callable[[np.ndarray], np.ndarray], kind: str = "none"):
    """Wrap ``f`` with a coordinatewise periodizing map.

    ``"tent"`` applies ``x -> 1 - |2x - 1|`` (measure preserving); ``"none"``
    returns ``f`` unchanged.
    """
    if kind == "none":
        return f
    if kind != "tent":
        raise ValueError(f"unknown periodization {kind!r}")

    def tent(x):
        return f(1.0 - np.abs(2.0 * np.asarray(x) - 1.0))

    for attr in ("integral", "dimension", "params"):
        if hasattr(f, attr):
            setattr(tent, attr, getattr(f, attr))
    return tent


def _build_constant(params, d):
    return constant(float(params.get("c", 1.0)), d)


def _build_fourier(params, d):
    terms = params["terms"]
    ks = [t["k"] for t in terms]
    cs = [complex(*t["c"]) if isinstance(t["c"], list) else complex(t["c"]) for t in terms]
    poly = FourierPolynomial(ks, cs)
    if poly.dimension != d:
        raise ValueError(f"wavenumbers have dimension {poly.dimension}, requested d={d}")
    return poly


def _build_product_cosine(params, d):
    return product_cosine(d, float(params.get("alpha", 0.5)))


def _build_poisson(params, d):
    return PoissonProduct(d, float(params.get("rho", 0.5)), params.get("beta", 1.0))


def _build_asian(params, d):
    fields = {k: params[k] for k in ("S0", "K", "T", "rate", "sigma") if k in params}
    return AsianCall(AsianOptionParams(d=d, **fields))


REGISTRY: dict[str, Callable[[dict, int], Callable]] = {
    "constant": _build_constant,
    "fourier-poly": _build_fourier,
    "product-cosine": _build_product_cosine,
    "poisson-product": _build_poisson,
    "asian-geometric": _build_asian,
}


def make_integrand(name: str, params: dict | str | None = None, d: int = 1,
                   periodization: str = "none"):
    """Instantiate a registered integrand from a name and a JSON parameter block."""
    if isinstance(params, str):
        params = json.loads(params) if params.strip() else {}
    params = dict(params or {})
    try:
        builder = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown integrand {name!r}; choose from {sorted(REGISTRY)}") from None
    return periodize(builder(params, d), periodization)
