"""Generating-function calculus: chart expansions, the formal delta, shifts,
and operator series in hbar*d/dz.

A Chart declares which spectral variable dominates (|z| > |w| etc.); every
rational prefactor of the defining relations is expanded in exactly one
chart, and series from different charts never mix silently.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Tuple

from dyangian.scalars import HSeries

__all__ = [
    "Chart",
    "ChartError",
    "WindowError",
    "Poly",
    "BiSeries",
    "DiffOpSeries",
    "expand_rational",
    "delta_coeff",
    "apply_shift",
    "apply_cartan_op",
    "binom",
    "falling",
]


class ChartError(ValueError):
    """Raised on expansion requests incompatible with the declared chart."""


class WindowError(LookupError):
    """Raised on coefficient queries outside the computed window."""


def binom(a: int, k: int) -> Fraction:
    """Generalized binomial C(a, k) for integer a (possibly negative), k >= 0."""
    out = Fraction(1)
    for i in range(k):
        out *= Fraction(a - i, i + 1)
    return out


def falling(n: int, k: int) -> int:
    """Falling factorial n(n-1)...(n-k+1)."""
    out = 1
    for i in range(k):
        out *= n - i
    return out


def _fact(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


class Chart:
    """Ordering of spectral variables, strongest first: Chart('z','w') is |z|>|w|."""

    __slots__ = ("vars",)

    def __init__(self, *vars: str):
        self.vars = tuple(vars)

    def dominant(self) -> str:
        return self.vars[0]

    def __eq__(self, other):
        return isinstance(other, Chart) and self.vars == other.vars

    def __hash__(self):
        return hash(self.vars)

    def __repr__(self):
        return "|" + "| > |".join(self.vars) + "|"


class Poly:
    """Multivariate Laurent polynomial over Fraction ('h' is reserved for hbar).

    Only used to feed expand_rational with prefactors like z - w + h.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Tuple[Tuple[str, int], ...], Fraction] | None = None):
        self.terms = dict(terms or {})

    @staticmethod
    def var(name: str, power: int = 1, coeff=1) -> "Poly":
        return Poly({((name, power),): Fraction(coeff)})

    @staticmethod
    def const(c) -> "Poly":
        return Poly({(): Fraction(c)}) if c else Poly()

    @staticmethod
    def _norm_key(key):
        d: Dict[str, int] = {}
        for v, p in key:
            d[v] = d.get(v, 0) + p
        return tuple(sorted((v, p) for v, p in d.items() if p))

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
            if out[k] == 0:
                del out[k]
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        out: Dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = self._norm_key(k1 + k2)
                out[k] = out.get(k, Fraction(0)) + c1 * c2
                if out[k] == 0:
                    del out[k]
        return Poly(out)

    def degree_in(self, var: str) -> int:
        degs = [dict(k).get(var, 0) for k in self.terms] or [0]
        return max(degs)

    def __repr__(self):
        return " + ".join(f"{c}*{dict(k)}" for k, c in sorted(self.terms.items())) or "0"


class BiSeries:
    """Window of exact coefficients of a two-variable formal series.

    data maps (a, b) -> HSeries, the coefficient of v1^a v2^b.  Queries
    outside the window raise, never silently return 0.
    """

    __slots__ = ("vars", "chart", "data", "window", "trunc")

    def __init__(self, vars: Tuple[str, str], chart: Chart, data, window, trunc: int):
        self.vars = vars
        self.chart = chart
        self.data = {k: v for k, v in data.items() if not v.is_zero()}
        self.window = window  # ((a_min, a_max), (b_min, b_max))
        self.trunc = trunc

    def in_window(self, a: int, b: int) -> bool:
        (a0, a1), (b0, b1) = self.window
        return a0 <= a <= a1 and b0 <= b <= b1

    def coeff(self, a: int, b: int) -> HSeries:
        if not self.in_window(a, b):
            raise WindowError(f"coefficient ({a},{b}) outside computed window {self.window}")
        return self.data.get((a, b), HSeries.zero(self.trunc))

    def _check_compat(self, other: "BiSeries"):
        if self.chart != other.chart:
            raise ChartError(f"chart mismatch: {self.chart} vs {other.chart}")
        if self.vars != other.vars:
            raise ChartError(f"variable mismatch: {self.vars} vs {other.vars}")

    def __add__(self, other: "BiSeries") -> "BiSeries":
        self._check_compat(other)
        (a0, a1), (b0, b1) = self.window
        (c0, c1), (d0, d1) = other.window
        win = ((max(a0, c0), min(a1, c1)), (max(b0, d0), min(b1, d1)))
        t = min(self.trunc, other.trunc)
        out = {}
        for a in range(win[0][0], win[0][1] + 1):
            for b in range(win[1][0], win[1][1] + 1):
                s = self.data.get((a, b), HSeries.zero(t)) + other.data.get((a, b), HSeries.zero(t))
                if not s.is_zero():
                    out[(a, b)] = s
        return BiSeries(self.vars, self.chart, out, win, t)

    def __neg__(self) -> "BiSeries":
        return BiSeries(self.vars, self.chart,
                        {k: -v for k, v in self.data.items()}, self.window, self.trunc)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s: HSeries) -> "BiSeries":
        out = {k: v * s for k, v in self.data.items()}
        return BiSeries(self.vars, self.chart, out, self.window, min(v.trunc for v in out.values()) if out else self.trunc)

    def mul(self, other: "BiSeries", window=None) -> "BiSeries":
        """Product, exact on the requested window provided factor windows cover
        every contributing split (window-stability checks guard the choice)."""
        self._check_compat(other)
        win = window or self.window
        t = min(self.trunc, other.trunc)
        out = {}
        for (a1, b1), c1 in self.data.items():
            for (a2, b2), c2 in other.data.items():
                a, b = a1 + a2, b1 + b2
                if not (win[0][0] <= a <= win[0][1] and win[1][0] <= b <= win[1][1]):
                    continue
                p = c1 * c2
                if p.is_zero():
                    continue
                key = (a, b)
                out[key] = out.get(key, HSeries.zero(t)) + p
        return BiSeries(self.vars, self.chart, out, win, t)

    def eq_on_common_window(self, other: "BiSeries") -> bool:
        self._check_compat(other)
        (a0, a1), (b0, b1) = self.window
        (c0, c1), (d0, d1) = other.window
        for a in range(max(a0, c0), min(a1, c1) + 1):
            for b in range(max(b0, d0), min(b1, d1) + 1):
                if not self.coeff(a, b).eq_values(other.coeff(a, b)):
                    return False
        return True


def expand_rational(num: Poly, den: Poly, chart: Chart, window, trunc: int,
                    vars: Tuple[str, str] | None = None) -> BiSeries:
    """Expand num/den as a bivariate series in the chart, exact on the window.

    The denominator must have a single monomial of top degree in the chart's
    dominant variable; the expansion is the geometric series in rest/leading.
    """
    vs = vars or tuple(chart.vars)[:2]
    v1 = chart.dominant()

    def to_triple(poly: Poly):
        out = {}
        for k, c in poly.terms.items():
            dd = dict(k)
            a = dd.pop(vs[0], 0)
            b = dd.pop(vs[1], 0)
            h = dd.pop("h", 0)
            if dd:
                raise ChartError(f"unexpected variables {list(dd)} in expansion")
            out[(a, b, h)] = out.get((a, b, h), Fraction(0)) + c
        return out

    d = den.degree_in(v1)
    lead_terms = {k: c for k, c in den.terms.items() if dict(k).get(v1, 0) == d}
    if len(lead_terms) != 1:
        raise ChartError(f"denominator not expandable in chart {chart}: leading {v1}-part not a monomial")
    (lk, lc), = lead_terms.items()
    la = dict(lk).get(vs[0], 0)
    lb = dict(lk).get(vs[1], 0)
    lh = dict(lk).get("h", 0)

    numt = to_triple(num)
    restt = to_triple(Poly({k: c for k, c in den.terms.items() if k != lk}))
    pos = vs.index(v1)  # which triple component the dominant variable is
    lead_dom = (la, lb)[pos]
    R = {}
    for (a, b, h), c in restt.items():
        if (a, b)[pos] - lead_dom >= 0:
            raise ChartError("denominator leading term does not dominate in chart")
        R[(a - la, b - lb, h - lh)] = c / lc

    (w_a, w_b) = window
    dom_win = (w_a, w_b)[pos]
    num_max_dom = max(((a, b)[pos] for (a, b, _) in numt), default=0)
    depth = max(0, num_max_dom - lead_dom - dom_win[0]) + trunc + 2

    def series_mul(s1, s2):
        out = {}
        for (a1, b1, h1), c1 in s1.items():
            for (a2, b2, h2), c2 in s2.items():
                h = h1 + h2
                if h - lh > trunc + abs(lh):
                    continue
                k = (a1 + a2, b1 + b2, h)
                out[k] = out.get(k, Fraction(0)) + c1 * c2
                if out[k] == 0:
                    del out[k]
        return out

    geom = {(0, 0, 0): Fraction(1)}
    acc = {(0, 0, 0): Fraction(1)}
    negR = {k: -c for k, c in R.items()}
    reach = num_max_dom - lead_dom  # how far num can push the dominant exponent up
    for _ in range(depth):
        acc = series_mul(acc, negR)
        acc = {k: c for k, c in acc.items()
               if (k[0], k[1])[pos] + reach >= dom_win[0] and k[2] <= trunc + abs(lh)}
        if not acc:
            break
        for k, c in acc.items():
            geom[k] = geom.get(k, Fraction(0)) + c
            if geom[k] == 0:
                del geom[k]

    total = series_mul(numt, geom)
    out_data: Dict[Tuple[int, int], HSeries] = {}
    for (a, b, h), c in total.items():
        a2, b2, h2 = a - la, b - lb, h - lh
        if c == 0 or h2 > trunc:
            continue
        if not (w_a[0] <= a2 <= w_a[1] and w_b[0] <= b2 <= w_b[1]):
            continue
        key = (a2, b2)
        hs = HSeries(h2, [c / lc], trunc)
        out_data[key] = hs if key not in out_data else out_data[key] + hs
    return BiSeries(vs, chart, out_data, (w_a, w_b), trunc)


def delta_coeff(a: int, b: int) -> Fraction:
    """Coefficient of z^a w^b in the formal delta sum_n z^n w^(-n-1)."""
    return Fraction(1) if a + b == -1 else Fraction(0)


def apply_shift(series: Dict[int, HSeries], k: int, trunc: int) -> Dict[int, HSeries]:
    """Substitute z -> z + k*hbar in a one-variable Laurent series, Taylor-expanded.

    series maps z-power -> HSeries coefficient; k is an integer.
    """
    if k == 0:
        return dict(series)
    out: Dict[int, HSeries] = {}
    for n, c in series.items():
        if c.is_zero():
            continue
        for t in range(0, trunc - c.effective_val + 1):
            coef = binom(n, t) * Fraction(k) ** t
            if coef == 0:
                break
            term = c * HSeries.hbar(t, trunc, coef)
            if term.is_zero():
                continue
            key = n - t
            out[key] = out.get(key, HSeries.zero(trunc)) + term
    return {k2: v for k2, v in out.items() if not v.is_zero()}


class DiffOpSeries:
    """Operator series sum_k c_k(hbar) d^k acting on powers of one variable.

    Built by exact series algebra on power series in x = hbar*d; dividing by
    d is legal only when the series has no d^0 term (else it has a d-pole).
    """

    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs: Dict[int, HSeries], trunc: int):
        self.coeffs = {k: c for k, c in coeffs.items() if not c.is_zero()}
        self.trunc = trunc

    @staticmethod
    def identity(trunc: int) -> "DiffOpSeries":
        return DiffOpSeries({0: HSeries.one(trunc)}, trunc)

    @staticmethod
    def from_x_series(xs: list, trunc: int) -> "DiffOpSeries":
        """xs[k] is the Fraction coefficient of (hbar*d)^k."""
        return DiffOpSeries(
            {k: HSeries.hbar(k, trunc, c) for k, c in enumerate(xs) if c != 0}, trunc)

    @staticmethod
    def q_shift(sign: int, trunc: int) -> "DiffOpSeries":
        """q^(sign*d) = exp(sign*hbar*d), the shift z -> z + sign*hbar."""
        xs = [Fraction(sign ** k, _fact(k)) for k in range(trunc + 1)]
        return DiffOpSeries.from_x_series(xs, trunc)

    def __add__(self, other: "DiffOpSeries") -> "DiffOpSeries":
        t = min(self.trunc, other.trunc)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, HSeries.zero(t)) + c
        return DiffOpSeries(out, t)

    def __neg__(self):
        return DiffOpSeries({k: -c for k, c in self.coeffs.items()}, self.trunc)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "DiffOpSeries") -> "DiffOpSeries":
        # constant-coefficient operators in d commute; composition is the
        # coefficientwise convolution
        t = min(self.trunc, other.trunc)
        out: Dict[int, HSeries] = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                p = c1 * c2
                if p.is_zero():
                    continue
                k = k1 + k2
                out[k] = out.get(k, HSeries.zero(t)) + p
        return DiffOpSeries(out, t)

    def scale(self, s) -> "DiffOpSeries":
        return DiffOpSeries({k: c * s for k, c in self.coeffs.items()}, self.trunc)

    def inv(self) -> "DiffOpSeries":
        """Inverse; requires an hbar-unit d^0 coefficient, and every other
        term must carry a positive hbar power (true for all shift-built ops)."""
        c0 = self.coeffs.get(0)
        if c0 is None or c0.is_zero() or c0.effective_val != 0:
            raise ValueError("operator not invertible as a power series")
        c0i = c0.inv()
        rest = DiffOpSeries({k: c for k, c in self.coeffs.items() if k != 0}, self.trunc)
        rest = rest + DiffOpSeries({0: self.coeffs[0] + (-c0)}, self.trunc)
        B = rest.scale(c0i)
        if any(c.effective_val < 1 for c in B.coeffs.values()):
            raise ValueError("operator tail not hbar-nilpotent; cannot invert")
        out = DiffOpSeries.identity(self.trunc)
        acc = DiffOpSeries.identity(self.trunc)
        sign = 1
        for _ in range(self.trunc + 1):
            acc = acc * B
            if not acc.coeffs:
                break
            sign = -sign
            out = out + (acc.scale(HSeries.const(sign, self.trunc)))
        return out.scale(c0i)

    def divide_by_d(self) -> "DiffOpSeries":
        """Compose with 1/d; requires no d^0 term (else 'operator has d-pole')."""
        if 0 in self.coeffs and not self.coeffs[0].is_zero():
            raise ValueError("operator has d-pole")
        return DiffOpSeries({k - 1: c for k, c in self.coeffs.items()}, self.trunc)

    def divide_by_hbar(self) -> "DiffOpSeries":
        return DiffOpSeries({k: HSeries(c.val - 1, c.coeffs, c.trunc - 1)
                             for k, c in self.coeffs.items()}, self.trunc - 1)

    def apply(self, n: int) -> Dict[int, HSeries]:
        """Apply to z^n exactly: d acts as n * z^(n-1).  Returns power -> HSeries."""
        if any(k < 0 for k in self.coeffs):
            raise ValueError("operator has d-pole")
        out: Dict[int, HSeries] = {}
        for k, c in self.coeffs.items():
            f = falling(n, k)
            if f == 0:
                continue
            term = c * Fraction(f)
            if term.is_zero():
                continue
            key = n - k
            out[key] = out.get(key, HSeries.zero(self.trunc)) + term
        return {k: v for k, v in out.items() if not v.is_zero()}


# -- named operators from the representation formulas -------------------

def op_one_plus_qd_inv(trunc: int) -> DiffOpSeries:
    """(1 + q^d)^(-1)."""
    return (DiffOpSeries.identity(trunc) + DiffOpSeries.q_shift(+1, trunc)).inv()


def op_one_plus_qdinv_inv(trunc: int) -> DiffOpSeries:
    """(1 + q^(-d))^(-1)."""
    return (DiffOpSeries.identity(trunc) + DiffOpSeries.q_shift(-1, trunc)).inv()


def op_one_minus_qdinv_over_hd(trunc: int) -> DiffOpSeries:
    """(1 - q^(-d)) / (hbar d)."""
    num = DiffOpSeries.identity(trunc + 1) - DiffOpSeries.q_shift(-1, trunc + 1)
    return num.divide_by_d().divide_by_hbar()


def op_qd_minus_one_over_hd(trunc: int) -> DiffOpSeries:
    """(q^d - 1) / (hbar d)."""
    num = DiffOpSeries.q_shift(+1, trunc + 1) - DiffOpSeries.identity(trunc + 1)
    return num.divide_by_d().divide_by_hbar()


def op_tanh_half_over_d(trunc: int) -> DiffOpSeries:
    """(1/d)(q^d - 1)/(q^d + 1), the log-A building block."""
    num = DiffOpSeries.q_shift(+1, trunc) - DiffOpSeries.identity(trunc)
    den = DiffOpSeries.q_shift(+1, trunc) + DiffOpSeries.identity(trunc)
    return (num * den.inv()).divide_by_d()


def apply_cartan_op(op: DiffOpSeries, n: int) -> Dict[int, HSeries]:
    """Apply a (regular) operator series to z^n; raises on d-poles."""
    return op.apply(n)
