"""Accurate reduction of ``n * x`` modulo 2*pi for large integers n.

A naive ``np.mod(n * x, 2 * np.pi)`` loses about log10(n) digits: the
product is rounded and 2*pi itself is only a 53-bit approximation. Here the
product is formed exactly as a double-double (Dekker's two-product) and 2*pi
is subtracted in four 26-bit pieces (Cody-Waite), so every ``k * piece`` is
exact for multiples ``k < 2**27``.
"""
import math
from fractions import Fraction

import numpy as np

_TWO_PI_EXACT = Fraction(
    "6.283185307179586476925286766559005768394338798750211641949889184615632812572417997256")


def _split_constant(value, pieces=4, bits=26):
    out = []
    rest = value
    for _ in range(pieces):
        # leading `bits` significant bits of the remainder, as an exact double
        exp = math.frexp(float(rest))[1]
        quantum = Fraction(2) ** (exp - bits)
        part = math.floor(rest / quantum) * quantum
        out.append(float(part))
        rest -= part
    return tuple(out)


_C = _split_constant(_TWO_PI_EXACT)
TWO_PI = 2.0 * np.pi
MAX_MULTIPLE = 2**27
_SPLITTER = 134217729.0  # 2**27 + 1


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_product(a, b):
    """Return ``(p, e)`` with ``p + e == a * b`` exactly."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = a * b
    a_hi, a_lo = _split(a)
    b_hi, b_lo = _split(b)
    e = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, e


def reduce_multiple(n, x):
    """``n * x`` reduced to roughly [-pi, pi], accurate to a few ulp of pi.

    ``n`` is an integer (or integer array), ``x`` a float array.
    """
    p, e = two_product(n, x)
    k = np.rint(p / TWO_PI)
    if np.any(np.abs(k) >= MAX_MULTIPLE):
        raise ValueError("multiple too large for exact reduction (|n x| / 2pi >= 2**27)")
    r = p - k * _C[0]
    r = r - k * _C[1]
    r = r - k * _C[2]
    r = r - k * _C[3]
    r = r + e
    if np.ndim(r) == 0:
        return float(r)
    return r
