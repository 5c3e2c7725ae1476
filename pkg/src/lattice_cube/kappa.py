"""
Data-driven ordering of transform indices.

``perm[kappa]`` is the transform index ``nu`` whose discrete coefficient plays
the role of the ``kappa``-th wavenumber coefficient.  The map is grown one
level at a time: the old map is appended to itself with ``b**(m-1)`` added,
then, from the top level down, whole aliasing classes are swapped so that the
larger of the two compared magnitudes sits at the smaller ``kappa``.  Each
swap exchanges entries that agree modulo ``b**l``, so the residue of
``perm[kappa]`` modulo ``b**l`` only depends on ``kappa mod b**l``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LevelOutOfRangeError, MergeLevelError
from .transform import OpCounter, SpectralArray


@dataclass
class KappaNuMap:
    perm: np.ndarray = field(repr=False)
    level: int
    base: int = 2

    def __post_init__(self):
        self.perm = np.asarray(self.perm, dtype=np.int64)
        if len(self.perm) != self.base**self.level:
            raise ValueError(f"map of length {len(self.perm)} does not match level {self.level}")

    @classmethod
    def identity(cls, level: int, base: int = 2) -> "KappaNuMap":
        return cls(np.arange(base**level, dtype=np.int64), level, base)

    def copy(self) -> "KappaNuMap":
        return KappaNuMap(self.perm.copy(), self.level, self.base)


def _swap_level(perm: np.ndarray, mag: np.ndarray, ell: int, base: int) -> int:
    """One comparison pass at level ``ell``; returns the number of comparisons."""
    n_l = base**ell
    size = len(perm)
    old = mag[perm[1:n_l]]
    new = mag[perm[n_l + 1:2 * n_l]]
    flip = np.nonzero(new > old)[0] + 1
    if flip.size:
        idx = (flip[:, None] + np.arange(0, size, base * n_l)[None, :]).ravel()
        tmp = perm[idx + n_l].copy()
        perm[idx + n_l] = perm[idx]
        perm[idx] = tmp
    return n_l - 1


def extend(kmap: KappaNuMap, spec: SpectralArray, r: int,
           counter: OpCounter | None = None) -> KappaNuMap:
    """Grow ``kmap`` from level ``m-1`` to the level ``m`` of ``spec``.

    Swap passes run for ``l = m-1`` down to ``max(1, m-r)``; ``kappa = 0`` is
    never moved.  Ties keep the incumbent.
    """
    m = spec.level
    base = kmap.base
    if m != kmap.level + 1 or spec.base != base:
        raise MergeLevelError(f"cannot extend level-{kmap.level} map with level-{m} spectrum")
    half = base ** (m - 1)
    perm = np.concatenate([kmap.perm + a * half for a in range(base)])
    mag = np.abs(spec.coeffs)
    ops = len(perm)
    for ell in range(m - 1, max(1, m - r) - 1, -1):
        ops += _swap_level(perm, mag, ell, base)
    if counter is not None:
        counter.add(ops)
    return KappaNuMap(perm, m, base)


def initial_map(spec: SpectralArray, counter: OpCounter | None = None) -> KappaNuMap:
    """Map at the spectrum's level with swap passes at every level ``l >= 1``."""
    m = spec.level
    if m == 0:
        return KappaNuMap.identity(0, spec.base)
    return extend(KappaNuMap.identity(m - 1, spec.base), spec, r=m, counter=counter)


def block_bounds(ell: int, base: int) -> tuple[int, int]:
    """Half-open range of ``kappa`` in block ``ell``: ``[floor(b**(l-1)), b**l)``."""
    lo = 0 if ell == 0 else base ** (ell - 1)
    return lo, base**ell


def s_tilde(spec: SpectralArray, kmap: KappaNuMap, ell: int,
            counter: OpCounter | None = None) -> float:
    """Sum of ``|Y(perm[kappa])|`` over block ``ell``."""
    if kmap.level != spec.level:
        raise MergeLevelError("map and spectrum levels differ")
    if not 0 <= ell <= kmap.level:
        raise LevelOutOfRangeError(f"block {ell} outside [0, {kmap.level}]")
    lo, hi = block_bounds(ell, kmap.base)
    if counter is not None:
        counter.add(hi - lo)
    return float(np.abs(spec.coeffs[kmap.perm[lo:hi]]).sum())


def block_sums(spec: SpectralArray, kmap: KappaNuMap) -> np.ndarray:
    """``s_tilde`` for every block ``0..m``."""
    return np.array([s_tilde(spec, kmap, ell) for ell in range(kmap.level + 1)])
