"""
Slow reference computations for tests and audits.

Nothing here calls into the fast transform, the kappa map, or the cubature
engine.  Every routine sits behind a size guard.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BoxTooSmallError, CapacityError, LevelOutOfRangeError
from .lattice import GeneratingVector

DFT_MAX_POINTS = 2**14
BOX_MAX_POINTS = 10**7


def _digits(x: np.ndarray, base: int, m: int) -> list[np.ndarray]:
    out, rest = [], np.asarray(x, dtype=np.int64).copy()
    for _ in range(m):
        out.append(rest % base)
        rest //= base
    return out


def direct_dft(samples: Sequence[complex], base: int = 2) -> np.ndarray:
    """Evaluate the defining double sum of ``Y_m(nu)`` term by term.

    The phase of sample ``i`` at frequency ``nu`` is
    ``sum_l i_l * (nu mod b**(l+1)) / b**(l+1)``, accumulated exactly as an
    integer multiple of ``b**-m``.
    """
    y = np.asarray(samples, dtype=np.complex128)
    n = len(y)
    if n > DFT_MAX_POINTS:
        raise CapacityError(f"direct_dft limited to {DFT_MAX_POINTS} points, got {n}")
    m = 0
    while base**m < n:
        m += 1
    if base**m != n:
        raise ValueError(f"length {n} is not a power of {base}")
    if m == 0:
        return y.copy()
    i_digits = _digits(np.arange(n), base, m)
    nu = np.arange(n, dtype=np.int64)
    out = np.empty(n, dtype=np.complex128)
    chunk = max(1, 2**22 // n)
    for lo in range(0, n, chunk):
        nus = nu[lo:lo + chunk]
        phase = np.zeros((len(nus), n), dtype=np.int64)
        for ell in range(m):
            nubar = nus % base ** (ell + 1)
            phase += np.outer(nubar * base ** (m - ell - 1), i_digits[ell])
        phase %= n
        out[lo:lo + chunk] = (np.exp(-2j * np.pi * phase / n) * y[None, :]).sum(axis=1) / n
    return out


def direct_nu_tilde(gv: GeneratingVector, k: Sequence[int], m: int) -> int:
    """``b**m * (k . z_{b^(m-1)} mod 1)`` with exact rationals."""
    from fractions import Fraction

    if m == 0:
        return 0
    z = [Fraction(gj, gv.n_max) * gv.base ** (gv.max_level - m) for gj in gv.g[:len(k)]]
    dot = sum(Fraction(int(kj)) * zj for kj, zj in zip(k, z)) % 1
    val = dot * gv.base**m
    assert val.denominator == 1
    return int(val)


def box_points(radius: int, d: int) -> np.ndarray:
    """All integer vectors in ``[-radius, radius]^d``, lexicographic order."""
    size = (2 * radius + 1) ** d
    if size > BOX_MAX_POINTS:
        raise CapacityError(f"box of {size} points exceeds {BOX_MAX_POINTS}")
    axis = np.arange(-radius, radius + 1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _residues(gv: GeneratingVector, k: np.ndarray, m: int) -> np.ndarray:
    # plain object-free integer arithmetic, independent of lattice.nu_tilde
    mod = gv.base**m
    acc = np.zeros(len(k), dtype=np.int64)
    for j in range(k.shape[1]):
        acc = (acc + (k[:, j] % mod) * (gv.g[j] % mod)) % mod
    return acc


@dataclass
class DualBox:
    radius: int
    dimension: int
    level: int
    members: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.members)

    def contains(self, k: Sequence[int]) -> bool:
        return bool(np.any(np.all(self.members == np.asarray(k), axis=1)))


def dual_box_enumeration(gv: GeneratingVector, m: int, radius: int,
                         d: int | None = None) -> DualBox:
    """All ``k`` in ``[-radius, radius]^d`` with ``k . g_m = 0 mod b**m``."""
    d = gv.dimension if d is None else d
    if not 0 <= m <= gv.max_level:
        raise LevelOutOfRangeError(f"level {m} outside [0, {gv.max_level}]")
    pts = box_points(radius, d)
    members = pts if m == 0 else pts[_residues(gv, pts, m) == 0]
    return DualBox(radius, d, m, members)


def count_dual_by_residue(gv: GeneratingVector, m: int, radius: int,
                          d: int | None = None) -> int:
    """Count dual-lattice members in the box by solving for the last coordinate.

    ``g_d`` is a unit modulo ``b**m``, so for each choice of the leading
    coordinates the last one is fixed modulo ``b**m``.
    """
    d = gv.dimension if d is None else d
    mod = gv.base**m
    if m == 0:
        return (2 * radius + 1) ** d
    inv = pow(gv.g[d - 1] % mod, -1, mod)
    count = 0
    for lead in itertools.product(range(-radius, radius + 1), repeat=d - 1):
        partial = sum(kj * gj for kj, gj in zip(lead, gv.g)) % mod
        t = (-partial * inv) % mod
        # integers x in [-radius, radius] with x = t mod `mod`
        first = t - ((t + radius) // mod) * mod
        if first < -radius:
            first += mod
        if first <= radius:
            count += (radius - first) // mod + 1
    return count


def default_order(points: np.ndarray) -> np.ndarray:
    """Indices sorting wavenumbers by max-norm, ties lexicographic."""
    norms = np.abs(points).max(axis=1)
    keys = [points[:, j] for j in range(points.shape[1] - 1, -1, -1)] + [norms]
    return np.lexsort(keys)


def explicit_kappa_map(gv: GeneratingVector, m: int, radius: int = 4,
                       d: int | None = None,
                       order: Callable[[np.ndarray], np.ndarray] = default_order,
                       allow_outside: bool = False,
                       max_radius: int | None = None) -> list[tuple[int, ...] | None]:
    """Build ``k(0), ..., k(b**m - 1)`` following the recursive wavenumber map.

    At every refinement the smallest unassigned wavenumber of the required
    dual coset (in the ordering ``order``) is chosen.  Wavenumbers are
    searched in ``[-radius, radius]^d``.  If a coset has no free member in
    the box, the radius is doubled (up to ``max_radius``) and the map rebuilt.
    With ``allow_outside=True`` such entries are returned as ``None``
    instead; this is exact for the max-norm order because every wavenumber
    outside the box is larger than every wavenumber inside it, so the entry
    and all its descendants lie outside the box.
    """
    d = gv.dimension if d is None else d
    if not 0 <= m <= gv.max_level:
        raise LevelOutOfRangeError(f"level {m} outside [0, {gv.max_level}]")
    limit = max_radius if max_radius is not None else max(radius, 64)
    while True:
        try:
            return _build_kappa_map(gv, m, radius, d, order, allow_outside)
        except BoxTooSmallError:
            if radius >= limit:
                raise
            radius = min(2 * radius, limit)


def _build_kappa_map(gv, m, radius, d, order, allow_outside):
    base = gv.base
    pts = box_points(radius, d)
    pts = pts[order(pts)]
    res = _residues(gv, pts, m) if m > 0 else np.zeros(len(pts), dtype=np.int64)
    assigned = np.zeros(len(pts), dtype=bool)
    zero = int(np.nonzero(np.all(pts == 0, axis=1))[0][0])
    kt = np.full(base**m, -2, dtype=np.int64)  # -1 marks "outside the box"
    kt[0] = zero
    assigned[zero] = True
    for ell in range(m):
        mod_next = base ** (ell + 1)
        cls = res % mod_next
        srt = np.argsort(cls, kind="stable")
        starts = np.searchsorted(cls[srt], np.arange(mod_next + 1))
        cursor = starts[:-1].copy()

        def take(coset):
            c = cursor[coset]
            stop = starts[coset + 1]
            while c < stop and assigned[srt[c]]:
                c += 1
            cursor[coset] = c
            if c == stop:
                return -1
            idx = srt[c]
            assigned[idx] = True
            return idx

        step = base**ell
        for kappa in range(step):
            cur = kt[kappa]
            if cur == -1:
                for ap in range(1, base):
                    kt[kappa + ap * step] = -1
                continue
            j = int(res[cur] % step)
            a = int((res[cur] % mod_next - j) // step)
            for ap in range(1, base):
                digit = 0 if ap == a else ap
                idx = take(j + digit * step)
                if idx == -1 and not allow_outside:
                    raise BoxTooSmallError(
                        f"no free wavenumber in coset {j + digit * step} at level {ell + 1} "
                        f"within radius {radius}"
                    )
                kt[kappa + ap * step] = idx
    return [None if i < 0 else tuple(int(v) for v in pts[i]) for i in kt]


def check_admissible(gv: GeneratingVector, kmap: Sequence[Sequence[int]], m: int) -> None:
    """Raise ``AssertionError`` unless ``kmap[:b**m]`` follows the recursive
    construction rules and maps ``0..b**m-1`` bijectively onto the level-``m``
    dual cosets."""
    base = gv.base
    n = base**m
    ks = [tuple(int(v) for v in k) for k in kmap[:n]]
    assert len(ks) == n, "map too short"
    assert all(v == 0 for v in ks[0]), "k(0) must be the zero wavenumber"
    assert len(set(ks)) == n, "map is not injective"

    def nut(k, lev):
        return direct_nu_tilde(gv, k, lev)

    for ell in range(m):
        step = base**ell
        for kappa in range(step):
            j = nut(ks[kappa], ell)
            a = (nut(ks[kappa], ell + 1) - j) // step
            for ap in range(1, base):
                digit = 0 if ap == a else ap
                got = nut(ks[kappa + ap * step], ell + 1)
                assert got == j + digit * step, (
                    f"k({kappa + ap * step}) = {ks[kappa + ap * step]} lies in coset {got}, "
                    f"expected {j + digit * step}"
                )
    assert sorted(nut(k, m) for k in ks) == list(range(n)), "nu_m o k is not a bijection"
