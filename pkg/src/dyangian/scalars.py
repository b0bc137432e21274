"""Exact scalars: rationals and truncated Laurent series in hbar.

Every coefficient in the package is an HSeries: a Laurent polynomial in hbar
with Fraction coefficients, known exactly up to (and including) hbar^trunc.
Negative valuations exist only transiently, for the 1/hbar in the e-f
relation before cancellation; `assert_regular` enforces that they cancel.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

__all__ = ["HSeries", "NonInvertibleScalar", "HbarPoleError", "Fraction"]


class NonInvertibleScalar(ValueError):
    """Raised when inverting a series that is zero to its known order."""


class HbarPoleError(ArithmeticError):
    """Raised when a negative hbar power survives a supposed cancellation."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class HSeries:
    """Truncated Laurent series in hbar over exact rationals.

    coeffs[i] is the coefficient of hbar^(val+i); coefficients of powers
    above `trunc` are unknown.  Zero is canonical: coeffs == (), val == 0.
    """

    __slots__ = ("val", "coeffs", "trunc")

    def __init__(self, val: int, coeffs: Iterable, trunc: int):
        cs = [_frac(c) for c in coeffs]
        # strip leading zeros (raising the valuation) and trailing beyond trunc
        while cs and cs[0] == 0:
            cs.pop(0)
            val += 1
        if len(cs) > trunc - val + 1:
            cs = cs[: trunc - val + 1]
        while cs and cs[-1] == 0:
            cs.pop()
        if not cs:
            val = 0
        self.val = val
        self.coeffs = tuple(cs)
        self.trunc = trunc

    # -- constructors -------------------------------------------------
    @staticmethod
    def zero(trunc: int) -> "HSeries":
        return HSeries(0, (), trunc)

    @staticmethod
    def one(trunc: int) -> "HSeries":
        return HSeries(0, (Fraction(1),), trunc)

    @staticmethod
    def const(q, trunc: int) -> "HSeries":
        return HSeries(0, (_frac(q),), trunc)

    @staticmethod
    def hbar(power: int, trunc: int, coeff=1) -> "HSeries":
        return HSeries(power, (_frac(coeff),), trunc)

    # -- basic queries -------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Fraction:
        """Coefficient of hbar^k; k must not exceed the truncation order."""
        if k > self.trunc:
            raise ValueError(f"coefficient of hbar^{k} beyond truncation order {self.trunc}")
        i = k - self.val
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    @property
    def effective_val(self) -> int:
        # for zero, the first power at which a nonzero coefficient could hide
        return self.val if self.coeffs else self.trunc + 1

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other: "HSeries") -> "HSeries":
        t = min(self.trunc, other.trunc)
        if self.is_zero():
            return other.truncate(t)
        if other.is_zero():
            return self.truncate(t)
        lo = min(self.val, other.val)
        hi = min(t, max(self.val + len(self.coeffs), other.val + len(other.coeffs)) - 1)
        cs = []
        for k in range(lo, hi + 1):
            a = self.coeffs[k - self.val] if 0 <= k - self.val < len(self.coeffs) else 0
            b = other.coeffs[k - other.val] if 0 <= k - other.val < len(other.coeffs) else 0
            cs.append(_frac(a) + _frac(b))
        return HSeries(lo, cs, t)

    def __sub__(self, other: "HSeries") -> "HSeries":
        return self + (-other)

    def __neg__(self) -> "HSeries":
        return HSeries(self.val, tuple(-c for c in self.coeffs), self.trunc)

    def __mul__(self, other) -> "HSeries":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return HSeries.zero(self.trunc)
            return HSeries(self.val, tuple(c * other for c in self.coeffs), self.trunc)
        t = min(self.trunc + other.effective_val, other.trunc + self.effective_val)
        if self.is_zero() or other.is_zero():
            return HSeries.zero(t)
        lo = self.val + other.val
        out = [Fraction(0)] * (t - lo + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                k = lo + i + j
                if k > t:
                    break
                out[k - lo] += a * b
        return HSeries(lo, out, t)

    __rmul__ = __mul__

    def inv(self) -> "HSeries":
        if self.is_zero():
            raise NonInvertibleScalar("non-invertible scalar")
        n_rel = self.trunc - self.val     # relative order the inverse is good to
        t = self.trunc - 2 * self.val
        a0 = self.coeffs[0]
        inv0 = 1 / a0
        out = [Fraction(0)] * (n_rel + 1)
        out[0] = inv0
        for k in range(1, n_rel + 1):
            s = Fraction(0)
            for j in range(1, k + 1):
                aj = self.coeffs[j] if j < len(self.coeffs) else Fraction(0)
                if aj:
                    s += aj * out[k - j]
            out[k] = -inv0 * s
        return HSeries(-self.val, out, t)

    def truncate(self, order: int) -> "HSeries":
        return HSeries(self.val, self.coeffs, min(self.trunc, order))

    def assert_regular(self) -> "HSeries":
        if self.coeffs and self.val < 0:
            raise HbarPoleError(f"hbar-pole survived cancellation: valuation {self.val}")
        return self

    def __pow__(self, n: int) -> "HSeries":
        out = HSeries.one(self.trunc)
        for _ in range(n):
            out = out * self
        return out

    # -- comparison / hashing -------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, HSeries):
            return NotImplemented
        return (self.val, self.coeffs, self.trunc) == (other.val, other.coeffs, other.trunc)

    def eq_values(self, other: "HSeries") -> bool:
        """Equality of known coefficients up to the common truncation order."""
        t = min(self.trunc, other.trunc)
        lo = min(self.effective_val, other.effective_val)
        return all(self.coeff(k) == other.coeff(k) for k in range(lo, t + 1)) if lo <= t else True

    def __hash__(self):
        return hash((self.val, self.coeffs, self.trunc))

    # -- display / serialization ----------------------------------------
    def __repr__(self) -> str:
        if self.is_zero():
            return f"O(h^{self.trunc + 1})"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            k = self.val + i
            if k == 0:
                parts.append(f"{c}")
            elif k == 1:
                parts.append(f"{c}*h")
            else:
                parts.append(f"{c}*h^{k}")
        return " + ".join(parts) + f" + O(h^{self.trunc + 1})"

    def to_record(self) -> tuple:
        return (self.val, self.trunc, ["%d/%d" % (c.numerator, c.denominator) for c in self.coeffs])

    @staticmethod
    def from_record(rec) -> "HSeries":
        val, trunc, items = rec
        return HSeries(val, [Fraction(s) for s in items], trunc)
