"""
Emulated IEEE-754 binary formats.

Every value is held in a 64-bit float; a narrower format is imposed by
rounding to the nearest representable value (ties to even, gradual
underflow, overflow to infinity).  A :class:`PrecisionContext` pairs a
storage format, used whenever a value is written to a matrix or vector,
with an accumulation format in which every arithmetic result is rounded.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError

__all__ = [
    "FloatFormat", "PrecisionContext", "BINARY16", "BINARY32", "BINARY64",
    "DOUBLE", "SINGLE", "SIMULATED_HALF", "CONTEXTS", "round_to",
    "round_scalar", "round_matrix", "gamma", "ctx_op", "ctx_store", "dot_step",
]


@dataclass(frozen=True)
class FloatFormat:
    """A binary floating-point format with an implicit leading bit."""

    name: str
    exponent_bits: int
    mantissa_bits: int
    base: int = 2

    @property
    def precision(self):
        """Significand digits ``t``, counting the implicit bit."""
        return self.mantissa_bits + 1

    @property
    def e_max(self):
        return 2 ** (self.exponent_bits - 1) - 1

    @property
    def e_min(self):
        return 1 - self.e_max

    @property
    def unit_roundoff(self):
        return 0.5 * math.ldexp(1.0, 1 - self.precision)

    @property
    def max_finite(self):
        return math.ldexp(2.0 - math.ldexp(1.0, 1 - self.precision), self.e_max)

    @property
    def min_normal(self):
        return math.ldexp(1.0, self.e_min)

    @property
    def min_subnormal(self):
        return math.ldexp(1.0, self.e_min + 1 - self.precision)

    @property
    def dtype(self):
        """The numpy dtype whose arithmetic is exactly this format."""
        return {16: np.float16, 32: np.float32, 64: np.float64}[
            1 + self.exponent_bits + self.mantissa_bits]

    def __repr__(self):
        return f"FloatFormat({self.name})"


BINARY16 = FloatFormat("binary16", 5, 10)
BINARY32 = FloatFormat("binary32", 8, 23)
BINARY64 = FloatFormat("binary64", 11, 52)


def round_to(x, fmt):
    """Round ``x`` (scalar or array) to the nearest value of ``fmt``.

    The result is returned as float64.  Subnormals are kept, magnitudes
    past the largest finite value become infinities and NaN stays NaN.
    """
    x = np.asarray(x, dtype=np.float64)
    if fmt.precision >= 53 and fmt.e_min <= -1022:
        return x.copy()
    _, exp = np.frexp(x)
    # frexp gives |x| = f * 2**exp with f in [0.5, 1); clamp into the
    # subnormal range so the quantum stops shrinking at the smallest subnormal
    quantum_exp = np.maximum(exp - 1, fmt.e_min) - (fmt.precision - 1)
    with np.errstate(invalid="ignore", over="ignore"):
        y = np.ldexp(np.rint(np.ldexp(x, -quantum_exp)), quantum_exp)
        y = np.where(np.abs(y) > fmt.max_finite, np.copysign(np.inf, x), y)
    return y


def round_scalar(x, fmt):
    """Round a number to ``fmt``; see :func:`round_to`.

    Array input is rounded elementwise and returned as a float64 array.
    """
    if np.ndim(x) == 0:
        return float(round_to(float(x), fmt))
    return round_to(np.asarray(x, dtype=np.float64), fmt)


def round_matrix(A, fmt):
    """Round every entry of ``A`` to ``fmt``.

    Raises :class:`OverflowError` if any entry falls outside the finite
    range of ``fmt``.
    """
    A = np.asarray(A, dtype=np.float64)
    out = round_to(A, fmt)
    bad = np.isinf(out) & ~np.isinf(A)
    if bad.any():
        i = tuple(int(v) for v in np.argwhere(bad)[0])
        raise OverflowError(
            f"entry {i} = {A[i]!r} exceeds {fmt.name} max finite {fmt.max_finite!r}")
    return out


def gamma(k, u):
    """Bound ``k*u/(1-u)`` on the relative error accumulated by ``k`` flops."""
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    if k * u >= 1:
        raise DomainError(f"gamma requires k*u < 1, got k*u = {k * u}")
    return k * u / (1 - u)


@dataclass(frozen=True)
class PrecisionContext:
    """Storage and accumulation formats for one arithmetic regime.

    ``compensated`` selects Kahan-compensated sums in the vector kernels;
    every operation is still rounded to the accumulation format.
    """

    name: str
    storage: FloatFormat
    accumulation: FloatFormat
    compensated: bool = True

    def __post_init__(self):
        if self.accumulation.unit_roundoff > self.storage.unit_roundoff:
            raise ValueError("accumulation format must be at least as precise as storage")

    @property
    def is_double(self):
        return self.storage == BINARY64 and self.accumulation == BINARY64

    def store(self, x):
        """Round ``x`` to the storage format, keeping the accumulation dtype."""
        if self.storage == self.accumulation:
            return np.asarray(x, dtype=self.accumulation.dtype)
        return round_to(x, self.storage).astype(self.accumulation.dtype)

    def with_summation(self, compensated):
        return replace(self, compensated=compensated)

    def __repr__(self):
        tag = "" if self.compensated else ", plain sums"
        return f"PrecisionContext({self.name}{tag})"


DOUBLE = PrecisionContext("Double", BINARY64, BINARY64)
SINGLE = PrecisionContext("Single", BINARY32, BINARY32)
SIMULATED_HALF = PrecisionContext("SimulatedHalf", BINARY16, BINARY32)

CONTEXTS = {"double": DOUBLE, "single": SINGLE, "half": SIMULATED_HALF}

_OPS = {
    "add": np.add,
    "sub": np.subtract,
    "mul": np.multiply,
    "div": np.divide,
    "sqrt": lambda x, y: np.sqrt(x),
}


def ctx_op(op, x, y, ctx):
    """Apply ``op`` to ``x`` and ``y`` and round the result to accumulation.

    ``op`` is one of ``add``, ``sub``, ``mul``, ``div`` or ``sqrt`` (``y``
    ignored).  The operation is evaluated in float64 first; for binary32
    operands that intermediate is exact enough that the second rounding
    equals a single correctly rounded result.
    """
    try:
        f = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown op {op!r}") from None
    with np.errstate(all="ignore"):
        r = f(np.float64(x), np.float64(0.0 if y is None else y))
    return round_scalar(r, ctx.accumulation)


def dot_step(s, x, y, ctx):
    """One accumulation step ``s + x*y`` with two separate roundings."""
    return ctx_op("add", s, ctx_op("mul", x, y, ctx), ctx)


def ctx_store(x, ctx):
    """Round a value about to be written back to storage."""
    return round_scalar(x, ctx.storage)
