"""Simulated reduced-precision floating-point arithmetic.

All values live in native IEEE double precision.  Lower precisions are
simulated by rounding values, and the result of every elementary operation,
to the target format under round-to-nearest-even.  Overflow produces +/-inf
(reported through the ``*_checked`` variants rather than global state), and
subnormals are supported by default with an optional flush-to-zero switch.

The ``quadres`` format exists for residual accumulation only: dot products
and matrix-vector products carry a compensated (double-double) accumulator
before the result is stored back in double.  Elementwise ``quadres``
operations are indistinguishable from double because storage is double.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedFormatError

__all__ = [
    "FpFormat",
    "HALF",
    "SINGLE",
    "DOUBLE",
    "QUADRES",
    "FORMATS",
    "PrecisionConfig",
    "parse_format",
    "unit_roundoff",
    "round_to",
    "round_to_checked",
    "round_array",
    "rounded_op",
    "rounded_op_checked",
    "radd",
    "rsub",
    "rmul",
    "rdiv",
    "rsqrt",
    "rsum",
    "rdot",
    "rmatvec",
    "rnorm2",
    "rresidual",
]


@dataclass(frozen=True)
class FpFormat:
    """An IEEE-like binary format: precision t (with implicit bit) and exponent range."""

    name: str
    significand_bits: int
    exponent_min: int
    exponent_max: int

    @property
    def unit_roundoff(self) -> float:
        # 2^(1-t)/2, i.e. half the spacing at 1.0
        return 2.0 ** (1 - self.significand_bits) / 2.0

    @property
    def max_finite(self) -> float:
        return (2.0 - 2.0 ** (1 - self.significand_bits)) * 2.0**self.exponent_max

    @property
    def min_normal(self) -> float:
        return 2.0**self.exponent_min

    def __str__(self) -> str:
        return self.name


HALF = FpFormat("half", 11, -14, 15)
SINGLE = FpFormat("single", 24, -126, 127)
DOUBLE = FpFormat("double", 53, -1022, 1023)
# Nominally binary128; realized as compensated double accumulation, see module docstring.
QUADRES = FpFormat("quadres", 113, -16382, 16383)

FORMATS = {f.name: f for f in (HALF, SINGLE, DOUBLE, QUADRES)}

_ALIASES = {
    "half": HALF,
    "fp16": HALF,
    "binary16": HALF,
    "h": HALF,
    "single": SINGLE,
    "fp32": SINGLE,
    "binary32": SINGLE,
    "s": SINGLE,
    "double": DOUBLE,
    "fp64": DOUBLE,
    "binary64": DOUBLE,
    "d": DOUBLE,
    "quadres": QUADRES,
    "quad-residual": QUADRES,
    "quad": QUADRES,
    "fp128": QUADRES,
    "q": QUADRES,
}


def parse_format(name: str | FpFormat) -> FpFormat:
    """Resolve a precision name (half|single|double|quadres plus aliases)."""
    if isinstance(name, FpFormat):
        return name
    try:
        return _ALIASES[str(name).strip().lower()]
    except KeyError:
        raise UnsupportedFormatError(
            f"unknown precision {name!r}; expected one of {sorted(FORMATS)}"
        ) from None


def unit_roundoff(fmt: str | FpFormat) -> float:
    return parse_format(fmt).unit_roundoff


@dataclass(frozen=True)
class PrecisionConfig:
    """The four precisions of a refinement run.

    u_f: factorization, u: working/storage, u_r: residual, u_s: correction solve.
    Requires unit_roundoff(u_f) >= unit_roundoff(u) >= unit_roundoff(u_r).
    """

    u_f: FpFormat
    u: FpFormat
    u_r: FpFormat
    u_s: FpFormat

    def __post_init__(self):
        uf, u, ur = (parse_format(f) for f in (self.u_f, self.u, self.u_r))
        us = parse_format(self.u_s)
        object.__setattr__(self, "u_f", uf)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "u_r", ur)
        object.__setattr__(self, "u_s", us)
        if not (uf.unit_roundoff >= u.unit_roundoff >= ur.unit_roundoff):
            raise UnsupportedFormatError(
                f"precisions must satisfy u_f >= u >= u_r in roundoff, "
                f"got ({uf.name}, {u.name}, {ur.name})"
            )

    @classmethod
    def from_names(cls, u_f: str, u: str, u_r: str, u_s: str | None = None) -> "PrecisionConfig":
        work = parse_format(u)
        return cls(parse_format(u_f), work, parse_format(u_r),
                   work if u_s is None else parse_format(u_s))


def round_array(a, fmt: FpFormat, flush_subnormals: bool = False) -> np.ndarray:
    """Round every entry of ``a`` to ``fmt`` (round-to-nearest-even).

    Overflow yields +/-inf; use :func:`round_to_checked` when the flag matters.
    """
    a = np.asarray(a, dtype=np.float64)
    if fmt.significand_bits >= 53:
        # double and quadres store values as native doubles
        return a
    with np.errstate(over="ignore", under="ignore"):
        if fmt.significand_bits == 11:
            r = a.astype(np.float16).astype(np.float64)
        elif fmt.significand_bits == 24:
            r = a.astype(np.float32).astype(np.float64)
        else:
            raise UnsupportedFormatError(f"no simulation path for {fmt.name}")
    if flush_subnormals:
        r = np.where(np.abs(r) < fmt.min_normal, 0.0, r)
    return r


def round_to(x: float, fmt: FpFormat, flush_subnormals: bool = False) -> float:
    """Round one scalar to ``fmt``."""
    return float(round_array(np.float64(x), fmt, flush_subnormals))


def round_to_checked(x: float, fmt: FpFormat) -> tuple[float, bool]:
    """Like :func:`round_to`, also reporting whether rounding overflowed to inf."""
    r = round_to(x, fmt)
    return r, math.isinf(r) and math.isfinite(x)


# -- exact double-double building blocks (vectorized) -------------------------

_SPLITTER = 134217729.0  # 2^27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _two_prod(a, b):
    p = a * b
    c = _SPLITTER * a
    ahi = c - (c - a)
    alo = a - ahi
    c = _SPLITTER * b
    bhi = c - (c - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def _dd_add(hi1, lo1, hi2, lo2):
    s, e = _two_sum(hi1, hi2)
    e = e + lo1 + lo2
    hi = s + e
    lo = e - (hi - s)
    return hi, lo


def _dd_pairwise_sum(hi, lo):
    """Reduce paired (hi, lo) arrays along the last axis to a double result."""
    while hi.shape[-1] > 1:
        k = hi.shape[-1] // 2
        h, l = _dd_add(hi[..., :k], lo[..., :k], hi[..., k : 2 * k], lo[..., k : 2 * k])
        if hi.shape[-1] % 2:
            h = np.concatenate([h, hi[..., -1:]], axis=-1)
            l = np.concatenate([l, lo[..., -1:]], axis=-1)
        hi, lo = h, l
    return hi[..., 0] + lo[..., 0]


def _fma_double(a: float, b: float, c: float) -> float:
    """a*b + c with a single rounding, via Dekker product and exact summation."""
    p, e = _two_prod(np.float64(a), np.float64(b))
    return math.fsum((float(p), float(e), float(c)))


def rounded_op(op: str, args, fmt: FpFormat) -> float:
    """One scalar operation computed in double then rounded once to ``fmt``.

    ``op`` is one of add|sub|mul|div|fma.  Inputs are assumed already
    representable in ``fmt`` (round them first).
    """
    a = [float(x) for x in args]
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if op == "add":
            z = a[0] + a[1]
        elif op == "sub":
            z = a[0] - a[1]
        elif op == "mul":
            z = a[0] * a[1]
        elif op == "div":
            z = np.float64(a[0]) / np.float64(a[1])
        elif op == "fma":
            z = _fma_double(a[0], a[1], a[2])
        else:
            raise UnsupportedFormatError(f"unknown operation {op!r}")
    return round_to(float(z), fmt)


def rounded_op_checked(op: str, args, fmt: FpFormat) -> tuple[float, bool]:
    r = rounded_op(op, args, fmt)
    return r, math.isinf(r)


# -- vectorized rounded kernels ------------------------------------------------
#
# Elementwise ops do one double-precision operation per entry followed by one
# rounding, which is exactly the scalar simulation contract.  Reductions use a
# pairwise order with a rounding after every partial sum.


def _binop(x, y, fmt, ufunc):
    if fmt.significand_bits >= 53:
        return ufunc(np.asarray(x, np.float64), np.asarray(y, np.float64))
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        return round_array(ufunc(np.asarray(x, np.float64), np.asarray(y, np.float64)), fmt)


def radd(x, y, fmt: FpFormat):
    return _binop(x, y, fmt, np.add)


def rsub(x, y, fmt: FpFormat):
    return _binop(x, y, fmt, np.subtract)


def rmul(x, y, fmt: FpFormat):
    return _binop(x, y, fmt, np.multiply)


def rdiv(x, y, fmt: FpFormat):
    return _binop(x, y, fmt, np.divide)


def rsqrt(x, fmt: FpFormat):
    if fmt.significand_bits >= 53:
        return np.sqrt(np.asarray(x, np.float64))
    return round_array(np.sqrt(np.asarray(x, np.float64)), fmt)


def rsum(a, fmt: FpFormat, axis: int = -1):
    """Pairwise summation along ``axis`` with per-add rounding."""
    a = np.asarray(a, dtype=np.float64)
    if a.shape == ():
        return a
    a = np.moveaxis(a, axis, -1)
    if a.shape[-1] == 0:
        return np.zeros(a.shape[:-1])
    if fmt is QUADRES or fmt.significand_bits > 53:
        return _dd_pairwise_sum(a.copy(), np.zeros_like(a))
    if fmt.significand_bits >= 53:
        while a.shape[-1] > 1:
            k = a.shape[-1] // 2
            s = a[..., :k] + a[..., k : 2 * k]
            if a.shape[-1] % 2:
                s = np.concatenate([s, a[..., -1:]], axis=-1)
            a = s
        return a[..., 0]
    while a.shape[-1] > 1:
        k = a.shape[-1] // 2
        s = radd(a[..., :k], a[..., k : 2 * k], fmt)
        if a.shape[-1] % 2:
            s = np.concatenate([s, a[..., -1:]], axis=-1)
        a = s
    return a[..., 0]


def rdot(x, y, fmt: FpFormat) -> float:
    x = np.asarray(x, np.float64)
    y = np.asarray(y, np.float64)
    if fmt is QUADRES or fmt.significand_bits > 53:
        p, e = _two_prod(x, y)
        return float(_dd_pairwise_sum(p, e))
    return float(rsum(rmul(x, y, fmt), fmt))


def rmatvec(m, v, fmt: FpFormat) -> np.ndarray:
    """m @ v with one rounding per multiply and per partial add."""
    m = np.asarray(m, np.float64)
    v = np.asarray(v, np.float64)
    if fmt is QUADRES or fmt.significand_bits > 53:
        p, e = _two_prod(m, v[None, :])
        return _dd_pairwise_sum(p, e)
    return rsum(rmul(m, v[None, :], fmt), fmt, axis=-1)


def rnorm2(x, fmt: FpFormat) -> float:
    return float(rsqrt(np.float64(rdot(x, x, fmt)), fmt))


def rresidual(b, m, x, fmt: FpFormat) -> np.ndarray:
    """b - m @ x evaluated at ``fmt``; quadres carries the compensated tail."""
    b = np.asarray(b, np.float64)
    if fmt is QUADRES or fmt.significand_bits > 53:
        mm = np.asarray(m, np.float64)
        xx = np.asarray(x, np.float64)
        p, e = _two_prod(mm, -xx[None, :])
        hi = np.concatenate([b[:, None], p], axis=1)
        lo = np.concatenate([np.zeros_like(b)[:, None], e], axis=1)
        return _dd_pairwise_sum(hi, lo)
    return rsub(b, rmatvec(m, x, fmt), fmt)
