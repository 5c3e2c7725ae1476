"""
Embedded rank-1 lattice node sets in extensible order.

A generating vector ``g`` with base ``b`` and maximum level ``M`` defines the
level-``M`` lattice ``{j * g / b**M mod 1 : j < b**M}``.  Nodes are produced in
the extensible (radical-inverse) order, so that the first ``b**m`` nodes are
always the full level-``m`` lattice with generator ``g mod b**m``.

All coordinates are kept as integers modulo ``b**M`` and only converted to
floating point when an integrand is evaluated.  This keeps the dual-lattice
map ``nu_tilde`` and the shift algebra exact.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import LatticeExhaustedError, LevelOutOfRangeError, VectorFormatError

# b**max_level must fit so that (digit-reversed index) * g stays inside int64
_MAX_MODULUS = 2**31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class GeneratingVector:
    """
    Integer generating vector of an embedded rank-1 lattice.

    Parameters
    ----------
    base : int
        Prime base ``b``.
    max_level : int
        Maximum level ``M``; the lattice holds at most ``b**M`` nodes.
    g : tuple of int
        Components in ``{0, ..., b**M - 1}``; the finest generator is
        ``g / b**M``.
    """

    base: int
    max_level: int
    g: tuple[int, ...]

    def __post_init__(self):
        g = tuple(int(x) for x in self.g)
        object.__setattr__(self, "g", g)
        if not is_prime(self.base):
            raise VectorFormatError(f"base {self.base} is not prime")
        if self.max_level < 1:
            raise VectorFormatError("max_level must be >= 1")
        if self.base**self.max_level > _MAX_MODULUS:
            raise VectorFormatError(
                f"b**max_level = {self.base}**{self.max_level} exceeds {_MAX_MODULUS}"
            )
        if len(g) < 1:
            raise VectorFormatError("generating vector must have dimension >= 1")
        n = self.n_max
        for j, gj in enumerate(g):
            if not 0 <= gj < n:
                raise VectorFormatError(f"component {j} = {gj} outside [0, {n})")
            # z_1 = (g mod b)/b must have every coordinate in {1/b, ..., (b-1)/b}
            if gj % self.base == 0:
                raise VectorFormatError(
                    f"component {j} = {gj} is divisible by the base {self.base}"
                )

    @property
    def dimension(self) -> int:
        return len(self.g)

    @property
    def n_max(self) -> int:
        return self.base**self.max_level

    def project(self, d: int) -> "GeneratingVector":
        """First ``d`` components (extensible-dimension projection)."""
        if not 1 <= d <= self.dimension:
            raise ValueError(f"cannot project {self.dimension}-dimensional vector to d={d}")
        if d == self.dimension:
            return self
        return GeneratingVector(self.base, self.max_level, self.g[:d])

    def digest(self) -> str:
        return hashlib.sha256(format_vector(self).encode()).hexdigest()[:16]


def _check_level(gv: GeneratingVector, m: int, lo: int = 1) -> None:
    if not lo <= m <= gv.max_level:
        raise LevelOutOfRangeError(f"level {m} outside [{lo}, {gv.max_level}]")


def level_generator(gv: GeneratingVector, m: int) -> np.ndarray:
    """Integer generator ``g_m`` with ``z_{b^(m-1)} = g_m / b**m``.

    Multiplying the finest generator by ``b**(M-m)`` modulo one leaves
    ``g mod b**m`` over ``b**m``.
    """
    _check_level(gv, m)
    return np.array(gv.g, dtype=np.int64) % (gv.base**m)


def radical_inverse_index(i: np.ndarray | int, base: int, ndigits: int) -> np.ndarray:
    """Reverse the lowest ``ndigits`` base-``b`` digits of ``i``."""
    i = np.asarray(i, dtype=np.int64)
    out = np.zeros_like(i)
    rest = i.copy()
    for _ in range(ndigits):
        out = out * base + rest % base
        rest //= base
    return out


def node_integers(gv: GeneratingVector, start: int, stop: int) -> np.ndarray:
    """Nodes ``start..stop-1`` as integers on the ``b**-M`` grid, shape (n, d)."""
    if start < 0 or stop > gv.n_max:
        raise LatticeExhaustedError(
            f"node indices [{start}, {stop}) exceed lattice size {gv.n_max}"
        )
    idx = np.arange(start, stop, dtype=np.int64)
    j = radical_inverse_index(idx, gv.base, gv.max_level)
    g = np.array(gv.g, dtype=np.int64)
    return (j[:, None] * g[None, :]) % gv.n_max


def nodes(gv: GeneratingVector, start: int, stop: int) -> np.ndarray:
    """Nodes ``start..stop-1`` as floats in ``[0,1)^d``."""
    return node_integers(gv, start, stop) / float(gv.n_max)


def node(gv: GeneratingVector, i: int) -> np.ndarray:
    """The single node ``z_i``."""
    if not 0 <= i < gv.n_max:
        raise LatticeExhaustedError(f"index {i} outside lattice of size {gv.n_max}")
    return nodes(gv, i, i + 1)[0]


def node_block(gv: GeneratingVector, m: int) -> np.ndarray:
    """Nodes added when the lattice grows from level ``m-1`` to level ``m``.

    These are ``z_{b^(m-1)}, ..., z_{b^m - 1}``.
    """
    _check_level(gv, m)
    return nodes(gv, gv.base ** (m - 1), gv.base**m)


def shifted_value(x: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """Coordinatewise ``(x + delta) mod 1``."""
    y = np.add(x, delta)
    y -= np.floor(y)
    # (x + delta) can round up to exactly 1.0
    return np.where(y >= 1.0, 0.0, y)


def nu_tilde(gv: GeneratingVector, k: Sequence[int] | np.ndarray, m: int) -> int | np.ndarray:
    """Dual-lattice residue ``b**m <k, z_{b^(m-1)}> = k . g_m mod b**m``.

    ``k`` may be a single wavenumber (length ``d``) or an array of shape
    ``(N, d)``; the latter returns an integer array.  ``d`` may be smaller
    than the vector's dimension, in which case the leading components are used.
    """
    _check_level(gv, m, lo=0)
    k_arr = np.asarray(k)
    if m == 0:
        return 0 if k_arr.ndim == 1 else np.zeros(k_arr.shape[0], dtype=np.int64)
    mod = gv.base**m
    d = k_arr.shape[-1]
    if k_arr.ndim == 1:
        return sum(int(kj) * (gj % mod) for kj, gj in zip(k_arr.tolist(), gv.g[:d])) % mod
    gm = np.array(gv.g[:d], dtype=np.int64) % mod
    # reduce first so the products cannot overflow
    return ((k_arr.astype(np.int64) % mod) * gm).sum(axis=1) % mod


@dataclass(frozen=True)
class Shift:
    """A random shift ``delta`` in ``[0,1)^d`` and the seed used to draw it."""

    delta: np.ndarray = field(repr=False)
    seed: int | None = None

    @classmethod
    def draw(cls, d: int, seed: int | None = None) -> "Shift":
        rng = np.random.default_rng(seed)
        return cls(rng.random(d), seed)

    @classmethod
    def zero(cls, d: int) -> "Shift":
        return cls(np.zeros(d), None)


def format_vector(gv: GeneratingVector) -> str:
    return f"{gv.base} {gv.max_level} {gv.dimension}\n" + " ".join(map(str, gv.g)) + "\n"


def parse_vector(text: str) -> GeneratingVector:
    """Parse the two-line plain-text generating-vector format.

    Line 1 holds ``b m_max d``; line 2 holds the ``d`` integer components.
    """
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) != 2:
        raise VectorFormatError(f"expected 2 non-empty lines, found {len(lines)}")
    try:
        header = [int(t) for t in lines[0].split()]
        comps = [int(t) for t in lines[1].split()]
    except ValueError as exc:
        raise VectorFormatError(f"non-integer token: {exc}") from None
    if len(header) != 3:
        raise VectorFormatError("header must be 'b m_max d'")
    b, m_max, d = header
    if len(comps) != d:
        raise VectorFormatError(f"header declares d={d} but {len(comps)} components given")
    return GeneratingVector(b, m_max, tuple(comps))


def read_vector(path: str | Path) -> GeneratingVector:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise VectorFormatError(f"cannot read {path}: {exc}") from None
    return parse_vector(text)


def write_vector(gv: GeneratingVector, path: str | Path) -> None:
    Path(path).write_text(format_vector(gv))
