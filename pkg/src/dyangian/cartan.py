"""Mode expansions of the Cartan generating functions.

k+(z) = exp(h_0 log((z+h)/z) + sum_{n>0} h_n (z^-n - (z+h)^-n)/n)
K-(z) = exp(h * sum_{n<0} h_n z^(-n-1))
K+(z) = k+(z) k+(z-h),   k-(z) k-(z-h) = K-(z)

All Cartan modes commute at level zero, so products here are free
commutative h-polynomials; results are Elements in h-generators.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict

from dyangian.algebra import EMPTY_MON, Element, Monomial
from dyangian.scalars import HSeries
from dyangian.spectral import DiffOpSeries, binom, op_one_plus_qdinv_inv

__all__ = [
    "kplus_small_mode",
    "kplus_big_mode",
    "kminus_mode",
    "kminus_inv_mode",
    "kminus_small_mode",
    "kplus_small_inv_mode",
    "kplus_small_shift_mode",
    "kminus_small_inv_mode",
    "kminus_small_shift_mode",
]

_cache: Dict = {}


def _h_elem(mode: int, coeff: HSeries, trunc: int) -> Element:
    mon: Monomial = (0, (mode,), (), (), (), (), 0)
    return Element({mon: coeff}, trunc)


def _hmul(a: Element, b: Element, trunc: int) -> Element:
    """Product of pure-Cartan elements (all h modes commute at level zero)."""
    out: Dict[Monomial, HSeries] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            c = ca * cb
            if c.is_zero():
                continue
            mon = (0, tuple(sorted(ma[1] + mb[1], reverse=True)), (), (), (), (), 0)
            out[mon] = out.get(mon, HSeries.zero(trunc)) + c
    return Element(out, trunc)


def _exp_zseries(S: Dict[int, Element], trunc: int, zwin) -> Dict[int, Element]:
    """exp of a z-indexed series of commuting h-elements, every coefficient
    of which carries at least one power of hbar; windowed in z-powers."""
    lo, hi = zwin
    out: Dict[int, Element] = {0: Element.one(trunc)}
    term: Dict[int, Element] = {0: Element.one(trunc)}
    for j in range(1, trunc + 1):
        nxt: Dict[int, Element] = {}
        for p1, e1 in term.items():
            for p2, e2 in S.items():
                p = p1 + p2
                if not (lo <= p <= hi):
                    continue
                prod = _hmul(e1, e2, trunc).scale(Fraction(1, j))
                if prod.is_zero():
                    continue
                nxt[p] = nxt.get(p, Element.zero(trunc)) + prod
        term = nxt
        if not term:
            break
        for p, e in term.items():
            out[p] = out.get(p, Element.zero(trunc)) + e
    return out


def _kplus_log(trunc: int, pmax: int, doubled: bool) -> Dict[int, Element]:
    """z-series of log k+(z) (or log K+(z) when doubled: only odd-k terms, x2)."""
    S: Dict[int, Element] = {}
    for a in range(0, pmax + 1):
        for k in range(1, trunc + 1):
            if a + k > pmax:
                break
            if doubled:
                if k % 2 == 0:
                    continue
                coef = Fraction(2, k) if a == 0 else Fraction(2) * binom(a + k - 1, k) / a
            else:
                if a == 0:
                    coef = Fraction((-1) ** (k + 1), k)
                else:
                    coef = Fraction((-1) ** (k + 1)) * binom(a + k - 1, k) / a
            if coef == 0:
                continue
            c = HSeries.hbar(k, trunc, coef)
            p = -(a + k)
            cur = S.get(p, Element.zero(trunc))
            S[p] = cur + _h_elem(a, c, trunc)
    return S


def kplus_small_mode(p: int, trunc: int) -> Element:
    """Coefficient of z^-p in k+(z), as an h-polynomial Element (p >= 0)."""
    key = ("k+", p, trunc)
    if key not in _cache:
        if p < 0:
            raise ValueError("k+ has only nonnegative mode indices")
        S = _kplus_log(trunc, p, doubled=False)
        exp = _exp_zseries(S, trunc, (-p, 0))
        _cache[key] = exp.get(-p, Element.zero(trunc))
    return _cache[key]


def kplus_big_mode(p: int, trunc: int) -> Element:
    """Coefficient of z^-p in K+(z) = k+(z)k+(z-h) (p >= 0)."""
    key = ("K+", p, trunc)
    if key not in _cache:
        if p < 0:
            raise ValueError("K+ has only nonnegative mode indices")
        S = _kplus_log(trunc, p, doubled=True)
        exp = _exp_zseries(S, trunc, (-p, 0))
        _cache[key] = exp.get(-p, Element.zero(trunc))
    return _cache[key]


def _kminus_log(trunc: int, mmax: int, sign: int) -> Dict[int, Element]:
    S: Dict[int, Element] = {}
    for j in range(0, mmax + 1):
        S[j] = _h_elem(-j - 1, HSeries.hbar(1, trunc, sign), trunc)
    return S


def kminus_mode(p: int, trunc: int) -> Element:
    """Coefficient of z^-p in K-(z) (p <= 0; K- is polynomial in z)."""
    key = ("K-", p, trunc)
    if key not in _cache:
        if p > 0:
            raise ValueError("K- has only nonpositive mode indices")
        exp = _exp_zseries(_kminus_log(trunc, -p, +1), trunc, (0, -p))
        _cache[key] = exp.get(-p, Element.zero(trunc))
    return _cache[key]


def kminus_inv_mode(p: int, trunc: int) -> Element:
    """Coefficient of z^-p in K-(z)^(-1) (p <= 0)."""
    key = ("K-inv", p, trunc)
    if key not in _cache:
        if p > 0:
            raise ValueError("K-^(-1) has only nonpositive mode indices")
        exp = _exp_zseries(_kminus_log(trunc, -p, -1), trunc, (0, -p))
        _cache[key] = exp.get(-p, Element.zero(trunc))
    return _cache[key]


def _kminus_small_log(trunc: int, zmax: int, sign: int) -> Dict[int, Element]:
    op = op_one_plus_qdinv_inv(trunc)
    S: Dict[int, Element] = {}
    for j in range(0, zmax + 1):  # h_{-j-1} enters via z^j and lower powers
        for zp, c in op.apply(j).items():
            if not (0 <= zp <= zmax):
                continue
            ch = c * HSeries.hbar(1, trunc, sign)
            cur = S.get(zp, Element.zero(trunc))
            S[zp] = cur + _h_elem(-j - 1, ch, trunc)
    return S


def kminus_small_mode(p: int, trunc: int) -> Element:
    """Coefficient of z^-p in k-(z), the square root of K- under the shifted
    product: log k-(z) = h * (1+q^(-d))^(-1) applied to each z^(-n-1), n<0."""
    key = ("k-", p, trunc)
    if key not in _cache:
        if p > 0:
            raise ValueError("k- has only nonpositive mode indices")
        exp = _exp_zseries(_kminus_small_log(trunc, -p, +1), trunc, (0, -p))
        _cache[key] = exp.get(-p, Element.zero(trunc))
    return _cache[key]


def kminus_small_inv_mode(p: int, trunc: int) -> Element:
    """Coefficient of z^-p in k-(z)^(-1)."""
    key = ("k-inv", p, trunc)
    if key not in _cache:
        if p > 0:
            raise ValueError("k-^(-1) has only nonpositive mode indices")
        exp = _exp_zseries(_kminus_small_log(trunc, -p, -1), trunc, (0, -p))
        _cache[key] = exp.get(-p, Element.zero(trunc))
    return _cache[key]


def _shift_zseries(S: Dict[int, Element], shift: int, trunc: int, zwin) -> Dict[int, Element]:
    """Substitute z -> z + shift*hbar in a z-indexed series of Elements."""
    lo, hi = zwin
    out: Dict[int, Element] = {}
    for n, e in S.items():
        for t in range(0, trunc + 1):
            coef = binom(n, t) * Fraction(shift) ** t
            if coef == 0:
                break
            k = n - t
            if not (lo <= k <= hi):
                continue
            term = e.scale(HSeries.hbar(t, trunc, coef))
            if term.is_zero():
                continue
            out[k] = out.get(k, Element.zero(trunc)) + term
    return out


def kplus_small_inv_mode(p: int, trunc: int) -> Element:
    """Coefficient of z^-p in k+(z)^(-1)."""
    key = ("k+inv", p, trunc)
    if key not in _cache:
        if p < 0:
            raise ValueError("k+^(-1) has only nonnegative mode indices")
        S = _kplus_log(trunc, p, doubled=False)
        S = {k: -e for k, e in S.items()}
        exp = _exp_zseries(S, trunc, (-p, 0))
        _cache[key] = exp.get(-p, Element.zero(trunc))
    return _cache[key]


def kplus_small_shift_mode(p: int, trunc: int, shift: int = -1) -> Element:
    """Coefficient of z^-p in k+(z + shift*hbar)."""
    key = ("k+shift", shift, p, trunc)
    if key not in _cache:
        if p < 0:
            raise ValueError("k+ has only nonnegative mode indices")
        S = _kplus_log(trunc, p + trunc, doubled=False)
        S = _shift_zseries(S, shift, trunc, (-p, 0))
        exp = _exp_zseries(S, trunc, (-p, 0))
        _cache[key] = exp.get(-p, Element.zero(trunc))
    return _cache[key]


def kminus_small_shift_mode(p: int, trunc: int, shift: int = -1) -> Element:
    """Coefficient of z^-p in k-(z + shift*hbar)."""
    key = ("k-shift", shift, p, trunc)
    if key not in _cache:
        if p > 0:
            raise ValueError("k- has only nonpositive mode indices")
        S = _kminus_small_log(trunc, -p + trunc, +1)
        S = _shift_zseries(S, shift, trunc, (0, -p))
        exp = _exp_zseries(S, trunc, (0, -p))
        _cache[key] = exp.get(-p, Element.zero(trunc))
    return _cache[key]
