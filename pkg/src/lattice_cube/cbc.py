"""
Component-by-component construction of generating vectors.

The figure of merit is the squared worst-case error of a rank-1 lattice in
the weighted Korobov space with smoothness 2 and product weights:

    P2(g) = -1 + (1/n) sum_i prod_j [1 + gamma_j * 2 pi**2 * B2({i g_j / n})],

``B2(x) = x**2 - x + 1/6``.  Components are fixed greedily, each one
minimizing the criterion of the prefix built so far.

For ``b = 2`` the candidate scan is done for all odd ``g`` at once: the odd
residues modulo ``2**L`` are ``+-5**a``, and since ``B2`` is symmetric the
scan reduces to one cyclic correlation per power-of-two factor of the node
index, computed with ``numpy.fft``.  The reference scan evaluates the sum
directly and is used for small ``n`` and for all other bases.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CapacityError
from .lattice import GeneratingVector, format_vector, is_prime

DIRECT_MAX_WORK = 2**32
FAST_MIN_N = 2**12


@dataclass(frozen=True)
class WeightSpec:
    gammas: tuple[float, ...]

    def __post_init__(self):
        if any(not g > 0 for g in self.gammas):
            raise ValueError("product weights must be positive")

    @classmethod
    def inverse_square(cls, d: int) -> "WeightSpec":
        """``gamma_j = j**-2``."""
        return cls(tuple(1.0 / j**2 for j in range(1, d + 1)))

    def __len__(self):
        return len(self.gammas)


def bernoulli2(x: np.ndarray) -> np.ndarray:
    return x * x - x + 1.0 / 6.0


def _omega(n: int) -> np.ndarray:
    """``2 pi**2 B2(i / n)`` for ``i = 0..n-1``."""
    return 2.0 * math.pi**2 * bernoulli2(np.arange(n) / n)


def p2_criterion(g, n: int, weights: WeightSpec | tuple | list) -> float:
    gammas = weights.gammas if isinstance(weights, WeightSpec) else tuple(weights)
    g = np.asarray(g, dtype=np.int64).ravel()
    if len(g) > len(gammas):
        raise ValueError("need one weight per component")
    omega = _omega(n)
    i = np.arange(n, dtype=np.int64)
    prod = np.ones(n)
    for gj, gam in zip(g, gammas):
        prod *= 1.0 + gam * omega[(i * int(gj)) % n]
    return float(prod.mean() - 1.0)


def candidates(n: int, base: int) -> np.ndarray:
    c = np.arange(1, n, dtype=np.int64)
    return c[c % base != 0]


def _scan_direct(prod: np.ndarray, gamma: float, omega: np.ndarray,
                 cands: np.ndarray) -> np.ndarray:
    n = len(prod)
    i = np.arange(n, dtype=np.int64)
    out = np.empty(len(cands))
    chunk = max(1, 2**22 // n)
    for lo in range(0, len(cands), chunk):
        cs = cands[lo:lo + chunk]
        idx = (np.outer(cs, i)) % n
        out[lo:lo + chunk] = (prod[None, :] * (1.0 + gamma * omega[idx])).mean(axis=1) - 1.0
    return out


class _Base2Scanner:
    """All odd candidates modulo ``n = 2**M`` via cyclic correlations."""

    def __init__(self, n: int):
        self.n = n
        self.M = n.bit_length() - 1
        self.omega = _omega(n)
        # candidate g = 5**K mod n, K < n/4; the criterion ignores the sign
        self.L = max(1, n // 4)
        self.gen = np.empty(self.L, dtype=np.int64)
        acc = 1
        for K in range(self.L):
            self.gen[K] = acc
            acc = (acc * 5) % n
        self.levels = []
        for t in range(self.M):
            N = n >> t
            if N >= 8:
                Lt = N // 4
                pw = self.gen[:Lt] % N
                pos = (pw << t)
                neg = ((N - pw) % N) << t
                self.levels.append((t, Lt, pos, neg, np.fft.rfft(self.omega[pos])))
            else:
                odd = np.arange(1, N, 2, dtype=np.int64)
                self.levels.append((t, 0, odd << t, None, None))

    def scan(self, prod: np.ndarray, gamma: float) -> np.ndarray:
        """Criterion for ``g = 5**K mod n``, ``K = 0..L-1``."""
        n = self.n
        total = np.full(self.L, prod[0] * self.omega[0])
        for t, Lt, pos, neg, w_hat in self.levels:
            if Lt == 0:
                # odd residues mod 2 or 4: i*g mod n lands on +-2**t for every odd g
                total += prod[pos].sum() * self.omega[1 << t]
                continue
            p = prod[pos] + prod[neg]
            corr = np.fft.irfft(np.conj(np.fft.rfft(p)) * w_hat, n=Lt)
            total += np.tile(corr, self.L // Lt)
        return (prod.sum() + gamma * total) / n - 1.0


def cbc_construct(base: int, m_max: int, d: int, weights: WeightSpec | None = None,
                  method: str = "auto", log: list | None = None,
                  embedded_from: int | None = None) -> GeneratingVector:
    """
    Greedy construction at size ``n = b**m_max``.

    ``g_1 = 1``; each later component minimizes the criterion of the prefix
    over ``{1..n-1}`` coprime to ``b``, ties going to the smallest value.

    With ``embedded_from = m0`` the score of a candidate is instead the
    worst ratio, over the embedded sizes ``b**m0 .. b**m_max``, between its
    criterion and the best criterion attainable at that size.

    If ``log`` is given, one ``{"component", "g", "criterion"}`` record per
    component is appended (criterion at ``n = b**m_max``).
    """
    if not is_prime(base):
        raise ValueError(f"base {base} is not prime")
    weights = weights or WeightSpec.inverse_square(d)
    if len(weights) < d:
        raise ValueError("need one weight per component")
    n = base**m_max
    if method == "auto":
        method = "fast" if base == 2 and n >= FAST_MIN_N else "direct"
    if method not in ("fast", "direct"):
        raise ValueError(f"unknown method {method!r}")
    if method == "fast" and base != 2:
        raise CapacityError("the correlation scan is only available for base 2")
    if method == "direct" and n * n > DIRECT_MAX_WORK and d > 1:
        raise CapacityError(f"direct scan at n={n} needs ~{n * n:.2e} products per component")
    if embedded_from is None:
        levels = [m_max]
    elif 1 <= embedded_from <= m_max:
        levels = list(range(embedded_from, m_max + 1))
    else:
        raise ValueError(f"embedded_from must lie in [1, {m_max}]")

    omegas = {m: _omega(base**m) for m in levels}
    prods = {m: 1.0 + weights.gammas[0] * omegas[m] for m in levels}  # g_1 = 1
    g = [1]
    if log is not None:
        log.append({"component": 1, "g": 1, "criterion": float(prods[m_max].mean() - 1.0)})
    if method == "fast":
        scanners = {m: _Base2Scanner(base**m) for m in levels}
        gen = scanners[m_max].gen
    else:
        cands = candidates(n, base)

    for j in range(1, d):
        gamma = weights.gammas[j]
        score = None
        for m in levels:
            if method == "fast":
                v = scanners[m].scan(prods[m], gamma)
                v = np.tile(v, len(gen) // len(v))
            else:
                v = _scan_direct(prods[m], gamma, omegas[m], cands % base**m)
            if len(levels) > 1:
                v = v / v.min()
                score = v if score is None else np.maximum(score, v)
            else:
                score = v
        best = score.min()
        near = np.nonzero(score <= best + 1e-12 * max(1.0, abs(best)))[0]
        if method == "fast":
            pw = gen[near]
            choice = int(np.minimum(pw, n - pw).min())
        else:
            choice = int(cands[near].min())
        g.append(choice)
        for m in levels:
            nm = base**m
            prods[m] = prods[m] * (1.0 + gamma * omegas[m][(np.arange(nm) * choice) % nm])
        if log is not None:
            log.append({"component": j + 1, "g": choice,
                        "criterion": float(prods[m_max].mean() - 1.0)})
    return GeneratingVector(base, m_max, tuple(g))


def write_construction(gv: GeneratingVector, log: list, vector_path: str | Path,
                       log_path: str | Path | None = None, weights: WeightSpec | None = None,
                       embedded_from: int | None = None) -> None:
    """Write the vector file and its JSON construction log."""
    vector_path = Path(vector_path)
    vector_path.write_text(format_vector(gv))
    if log_path is None:
        log_path = vector_path.with_suffix(".log.json")
    payload = {
        "base": gv.base,
        "max_level": gv.max_level,
        "dimension": gv.dimension,
        "criterion": "P2 (Korobov alpha=2, product weights)",
        "embedded_from": embedded_from,
        "weights": list(weights.gammas) if weights else None,
        "components": log,
    }
    Path(log_path).write_text(json.dumps(payload, indent=1) + "\n")
