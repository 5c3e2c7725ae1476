"""
Fast discrete Fourier data of shifted-lattice samples.

For samples ``y_i = f(z_i + delta)`` stored in node order, the array

    Y_m(nu) = b**-m * sum_i y_i * exp(-2 pi i * sum_l i_l * nubar_{l+1} / b**(l+1))

(``i_l`` the base-``b`` digits of ``i``, ``nubar_l`` the lowest ``l`` digits of
``nu``) is computed by ``m`` in-place digit stages.  Stage ``s`` folds digit
``i_{s-1}`` of the sample index into digit ``nu_{s-1}`` of the frequency,
so after ``m`` stages the array is indexed by ``nu`` in natural order.  The
``1/b`` factor of each stage makes ``Y_m(0)`` the cubature estimate.

Because the last stage only combines the ``b`` sub-blocks that share a top
index digit, a spectrum can be extended from level ``m-1`` to ``m`` by
transforming the new blocks and running one :func:`merge`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedBufferError, MergeLevelError
from .lattice import GeneratingVector, Shift, nu_tilde


class OpCounter:
    """Tally of arithmetic operations performed by the fast paths.

    One unit is a complex multiply-accumulate of one input into one output.
    """

    def __init__(self):
        self.count = 0

    def add(self, n: int) -> None:
        self.count += int(n)

    def __repr__(self):
        return f"OpCounter({self.count})"


def level_of(length: int, base: int) -> int:
    """Return ``m`` with ``b**m == length`` or raise."""
    if length < 1:
        raise MalformedBufferError("empty sample buffer")
    m, n = 0, 1
    while n < length:
        n *= base
        m += 1
    if n != length:
        raise MalformedBufferError(f"length {length} is not a power of {base}")
    return m


@dataclass
class SampleBuffer:
    """Integrand values in node order, grown one level at a time."""

    values: np.ndarray
    base: int = 2
    shift: Shift | None = None
    evaluation_count: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values)
        level_of(len(self.values), self.base)
        if not self.evaluation_count:
            self.evaluation_count = len(self.values)

    @property
    def level(self) -> int:
        return level_of(len(self.values), self.base)

    def extend(self, new_values: np.ndarray) -> None:
        """Append the ``(b-1) * b**m`` values of the next level."""
        new_values = np.asarray(new_values)
        expected = (self.base - 1) * len(self.values)
        if len(new_values) != expected:
            raise MalformedBufferError(
                f"extension needs {expected} values, got {len(new_values)}"
            )
        self.values = np.concatenate([self.values, new_values])
        self.evaluation_count += len(new_values)


@dataclass
class SpectralArray:
    """``Y_m(nu)`` for ``nu`` in ``0..b**m - 1``."""

    coeffs: np.ndarray = field(repr=False)
    level: int
    base: int = 2

    def __post_init__(self):
        if len(self.coeffs) != self.base**self.level:
            raise MalformedBufferError(
                f"{len(self.coeffs)} coefficients do not match level {self.level}"
            )

    @property
    def estimate(self) -> complex:
        """The cubature estimate ``Y_m(0)``."""
        return self.coeffs[0]


_TWIDDLES: dict[tuple[int, int], np.ndarray] = {}


def _stage_twiddles(base: int, s: int) -> np.ndarray:
    """Twiddles of stage ``s``; entry ``[c, a, q]`` is
    ``exp(-2 pi i a (q + c b**(s-1)) / b**s) / b``."""
    key = (base, s)
    tw = _TWIDDLES.get(key)
    if tw is None:
        h = base ** (s - 1)
        q = np.arange(h)
        a = np.arange(base)
        c = np.arange(base)
        num = a[None, :, None] * (q[None, None, :] + c[:, None, None] * h)
        tw = np.exp(-2j * np.pi * (num % (h * base)) / (h * base)) / base
        _TWIDDLES[key] = tw
    return tw


_RADIX2: dict[int, np.ndarray] = {}


def _radix2_twiddles(h: int) -> np.ndarray:
    tw = _RADIX2.get(h)
    if tw is None:
        tw = np.exp(-1j * np.pi * np.arange(h) / h)
        _RADIX2[h] = tw
    return tw


def _run_stages(work: np.ndarray, base: int, first: int, last: int,
                counter: OpCounter | None) -> None:
    """Apply stages ``first..last`` in place to ``work``."""
    n = len(work)
    for s in range(first, last + 1):
        h = base ** (s - 1)
        view = work.reshape(-1, base, h)
        if base == 2:
            w = _radix2_twiddles(h)
            even = view[:, 0, :]
            odd = view[:, 1, :] * w
            view[:, 1, :] = (even - odd) * 0.5
            view[:, 0, :] = (even + odd) * 0.5
        else:
            view[...] = np.einsum("caq,raq->rcq", _stage_twiddles(base, s), view)
        if counter is not None:
            counter.add(n * base)


def transform(samples: SampleBuffer | np.ndarray, base: int = 2,
              counter: OpCounter | None = None) -> SpectralArray:
    """Fast transform of a full buffer, ``O(m b**m)`` operations."""
    if isinstance(samples, SampleBuffer):
        values, base = samples.values, samples.base
    else:
        values = np.asarray(samples)
    m = level_of(len(values), base)
    work = np.array(values, dtype=np.complex128)
    _run_stages(work, base, 1, m, counter)
    return SpectralArray(work, m, base)


def merge(blocks: list[SpectralArray], level: int,
          counter: OpCounter | None = None) -> SpectralArray:
    """Combine the ``b`` level-``(m-1)`` transforms of the sample blocks that
    share top index digit ``a = 0..b-1`` into the level-``m`` transform.
    """
    if not blocks:
        raise MergeLevelError("no blocks to merge")
    base = blocks[0].base
    if len(blocks) != base:
        raise MergeLevelError(f"need {base} blocks, got {len(blocks)}")
    for blk in blocks:
        if blk.base != base or blk.level != level - 1:
            raise MergeLevelError(
                f"block at level {blk.level} (base {blk.base}) cannot merge into level {level}"
            )
    work = np.concatenate([blk.coeffs for blk in blocks]).astype(np.complex128)
    _run_stages(work, base, level, level, counter)
    return SpectralArray(work, level, base)


def extend_spectrum(current: SpectralArray, new_values: np.ndarray,
                    counter: OpCounter | None = None) -> SpectralArray:
    """Next-level spectrum from the current one plus the new level's samples.

    Only the ``b - 1`` new blocks are transformed; the current spectrum
    serves as block ``a = 0``.
    """
    base, m = current.base, current.level
    size = base**m
    new_values = np.asarray(new_values)
    if len(new_values) != (base - 1) * size:
        raise MalformedBufferError(
            f"extension of level {m} needs {(base - 1) * size} values, got {len(new_values)}"
        )
    blocks = [current]
    for a in range(base - 1):
        blocks.append(transform(new_values[a * size:(a + 1) * size], base, counter))
    return merge(blocks, m + 1, counter)


def discrete_coefficient(spec: SpectralArray, gv: GeneratingVector,
                         k, shift: Shift | None = None) -> complex:
    """``exp(-2 pi i <k, delta>) * Y_m(nu_tilde_m(k))``."""
    nu = nu_tilde(gv, k, spec.level)
    value = spec.coeffs[nu]
    if shift is None:
        return complex(value)
    k_arr = np.asarray(k, dtype=float)
    phase = float(np.dot(k_arr, shift.delta[: len(k_arr)])) % 1.0
    return complex(np.exp(-2j * np.pi * phase) * value)
