"""The 2-dimensional evaluation representation pi_zeta and images of currents,
F1, and R1 under it.

Matrix entries are Laurent polynomials in zeta with HSeries coefficients
(ZSeries); tensor images are 4x4 over two spectral variables with a declared
chart.  pi_zeta(K) = 0 and pi_zeta(D) = d/dzeta; D enters only to first order.

Normalization note: pi(h_n) for n >= 0 uses 1/(1+q^d) (half the printed 2/...)
— the unique normalization under which pi respects the defining relation
block; see the relation-table derivation and its tests.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Tuple

from dyangian import cartan
from dyangian.algebra import (
    Element,
    Generator,
    Monomial,
    NONNEG_LEFT,
    RelationTable,
    word_of_monomial,
)
from dyangian.scalars import HSeries
from dyangian.spectral import (
    Chart,
    DiffOpSeries,
    op_one_minus_qdinv_over_hd,
    op_one_plus_qd_inv,
    op_one_plus_qdinv_inv,
    op_qd_minus_one_over_hd,
)

__all__ = [
    "ZSeries",
    "RepElement",
    "TensorRep",
    "rep_gen",
    "rep_element",
    "verify_rep_relations",
    "rep_current",
    "rep_cartan_current",
    "rep_F1",
    "rep_R1",
]

ZSeries = Dict[int, HSeries]  # zeta-power -> coefficient


def _zs_add(a: ZSeries, b: ZSeries, trunc: int) -> ZSeries:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, HSeries.zero(trunc)) + v
    return {k: v for k, v in out.items() if not v.is_zero()}


def _zs_mul(a: ZSeries, b: ZSeries, trunc: int) -> ZSeries:
    out: ZSeries = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            p = va * vb
            if p.is_zero():
                continue
            k = ka + kb
            out[k] = out.get(k, HSeries.zero(trunc)) + p
    return {k: v for k, v in out.items() if not v.is_zero()}


def _zs_scale(a: ZSeries, s: HSeries) -> ZSeries:
    out = {k: v * s for k, v in a.items()}
    return {k: v for k, v in out.items() if not v.is_zero()}


class RepElement:
    """2x2 matrix over ZSeries plus a first-order d/dzeta part.

    Value = mat + dmat * d/dzeta; products beyond first order in the
    derivation raise (the representation never needs them).
    """

    __slots__ = ("mat", "dmat", "trunc")

    def __init__(self, mat, dmat=None, trunc: int = 0):
        self.mat = mat
        self.dmat = dmat
        self.trunc = trunc

    @staticmethod
    def zero(trunc: int) -> "RepElement":
        z = {}
        return RepElement([[dict(), dict()], [dict(), dict()]], None, trunc)

    @staticmethod
    def one(trunc: int) -> "RepElement":
        return RepElement([[{0: HSeries.one(trunc)}, {}], [{}, {0: HSeries.one(trunc)}]],
                          None, trunc)

    def __add__(self, other: "RepElement") -> "RepElement":
        t = min(self.trunc, other.trunc)
        mat = [[_zs_add(self.mat[i][j], other.mat[i][j], t) for j in (0, 1)] for i in (0, 1)]
        if self.dmat is None and other.dmat is None:
            dmat = None
        else:
            a = self.dmat or [[{}, {}], [{}, {}]]
            b = other.dmat or [[{}, {}], [{}, {}]]
            dmat = [[_zs_add(a[i][j], b[i][j], t) for j in (0, 1)] for i in (0, 1)]
        return RepElement(mat, dmat, t)

    def __neg__(self):
        neg = lambda m: [[{k: -v for k, v in m[i][j].items()} for j in (0, 1)] for i in (0, 1)]
        return RepElement(neg(self.mat), neg(self.dmat) if self.dmat else None, self.trunc)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s: HSeries) -> "RepElement":
        mat = [[_zs_scale(self.mat[i][j], s) for j in (0, 1)] for i in (0, 1)]
        dmat = [[_zs_scale(self.dmat[i][j], s) for j in (0, 1)] for i in (0, 1)] if self.dmat else None
        return RepElement(mat, dmat, self.trunc)

    def mul(self, other: "RepElement") -> "RepElement":
        t = min(self.trunc, other.trunc)
        mat = [[{}, {}], [{}, {}]]
        for i in (0, 1):
            for j in (0, 1):
                acc: ZSeries = {}
                for l in (0, 1):
                    acc = _zs_add(acc, _zs_mul(self.mat[i][l], other.mat[l][j], t), t)
                mat[i][j] = acc
        dmat = None
        if self.dmat is not None or other.dmat is not None:
            if self.dmat is not None and other.dmat is not None:
                raise ValueError("d/dzeta beyond first order unsupported")
            dmat = [[{}, {}], [{}, {}]]
            if other.dmat is not None:  # A * (B0 + B1 d) -> A B1 d
                for i in (0, 1):
                    for j in (0, 1):
                        acc: ZSeries = {}
                        for l in (0, 1):
                            acc = _zs_add(acc, _zs_mul(self.mat[i][l], other.dmat[l][j], t), t)
                        dmat[i][j] = acc
            else:  # (A0 + A1 d) * B -> A0 B + A1 B' + A1 B d
                for i in (0, 1):
                    for j in (0, 1):
                        accd: ZSeries = {}
                        accp: ZSeries = {}
                        for l in (0, 1):
                            accd = _zs_add(accd, _zs_mul(self.dmat[i][l], other.mat[l][j], t), t)
                            dB = {k - 1: v * Fraction(k) for k, v in other.mat[l][j].items() if k != 0}
                            accp = _zs_add(accp, _zs_mul(self.dmat[i][l], dB, t), t)
                        dmat[i][j] = accd
                        mat[i][j] = _zs_add(mat[i][j], accp, t)
        return RepElement(mat, dmat, t)

    def is_zero(self) -> bool:
        for i in (0, 1):
            for j in (0, 1):
                if self.mat[i][j]:
                    return False
                if self.dmat and self.dmat[i][j]:
                    return False
        return True

    def eq_values(self, other: "RepElement") -> bool:
        return (self - other).is_zero()

    def entry(self, i: int, j: int) -> ZSeries:
        return self.mat[i][j]

    def __repr__(self):
        def zs(d):
            if not d:
                return "0"
            return " + ".join(f"({v})*z^{k}" for k, v in sorted(d.items()))
        rows = [f"[{zs(self.mat[i][0])}, {zs(self.mat[i][1])}]" for i in (0, 1)]
        s = "; ".join(rows)
        if self.dmat:
            rows_d = [f"[{zs(self.dmat[i][0])}, {zs(self.dmat[i][1])}]" for i in (0, 1)]
            s += " + d*(" + "; ".join(rows_d) + ")"
        return s


def _h_ops(trunc: int):
    return {
        "plus_up": op_one_plus_qd_inv(trunc),      # (1+q^d)^(-1), n >= 0
        "plus_dn": op_one_plus_qdinv_inv(trunc),   # (1+q^(-d))^(-1)
        "minus_up": op_one_minus_qdinv_over_hd(trunc + 1),  # (1-q^(-d))/(hd), n < 0
        "minus_dn": op_qd_minus_one_over_hd(trunc + 1),     # (q^d-1)/(hd)
    }


def rep_gen(g: Generator, trunc: int) -> RepElement:
    """Image of a generator under pi_zeta."""
    letter, n = g
    E = RepElement.zero(trunc)
    if letter == "K":
        return E
    if letter == "D":
        # -d/dzeta: the sign is fixed by [D, x(z)] = dx/dz under the mode
        # pairing (d_zeta delta(z,zeta) = -d_z delta(z,zeta))
        mone = {0: HSeries.const(-1, trunc)}
        return RepElement([[{}, {}], [{}, {}]], [[mone, {}], [{}, dict(mone)]], trunc)
    if letter == "E":
        return RepElement([[{}, {n: HSeries.one(trunc)}], [{}, {}]], None, trunc)
    if letter == "F":
        return RepElement([[{}, {}], [{n: HSeries.one(trunc)}, {}]], None, trunc)
    ops = _h_ops(trunc)
    if n >= 0:
        up = ops["plus_up"].apply(n)
        dn = ops["plus_dn"].apply(n)
    else:
        up = ops["minus_up"].apply(n)
        dn = ops["minus_dn"].apply(n)
    up = {k: v.truncate(trunc) for k, v in up.items()}
    dn = {k: -v.truncate(trunc) for k, v in dn.items()}
    return RepElement([[up, {}], [{}, dn]], None, trunc)


def rep_element(a: Element, trunc: int | None = None) -> RepElement:
    """Multiplicative extension of rep_gen to Elements."""
    t = a.trunc if trunc is None else trunc
    out = RepElement.zero(t)
    for mon, c in a.terms.items():
        m = RepElement.one(t)
        for g in word_of_monomial(mon, a.policy):
            m = m.mul(rep_gen(g, t))
        out = out + m.scale(c)
    return out


def verify_rep_relations(table: RelationTable, window: int, trunc: int):
    """pi respects every derived commutator: pi(x)pi(y) - pi(y)pi(x) = pi([x,y])."""
    from dyangian.algebra import gen

    gens = [gen(l, m) for l in ("H", "E", "F") for m in range(-window, window + 1)]
    gens += [gen("D"), gen("K")]
    bad = []
    checked = 0
    for x in gens:
        for y in gens:
            if x[0] == "D" and y[0] == "D":
                continue  # pi(D)^2 needs second-order d/dzeta; [D,D] = 0 anyway
            comm = table.commutator(x, y)
            lhs = rep_gen(x, trunc).mul(rep_gen(y, trunc)) - rep_gen(y, trunc).mul(rep_gen(x, trunc))
            rhs = rep_element(comm, trunc)
            checked += 1
            if not lhs.eq_values(rhs):
                bad.append((x, y))
    # kernel property: length-2 pure monomials die
    for l in ("E", "F"):
        for m1 in range(-window, window + 1):
            for m2 in range(-window, window + 1):
                a = rep_gen(gen(l, m1), trunc).mul(rep_gen(gen(l, m2), trunc))
                checked += 1
                if not a.is_zero():
                    bad.append(("kernel", l, m1, m2))
    return checked, bad


# -- currents under pi: bivariate matrices ------------------------------

BiZ = Dict[Tuple[int, int], HSeries]  # (z-power, zeta-power) -> coefficient


def _geom(sign_chart: str, window: int, trunc: int) -> BiZ:
    """Expansion of sum over the half mode range of zeta^n z^(-n-1).

    '>=0' gives sum_{n>=0} zeta^n z^(-n-1) (chart |z|>|zeta|);
    '<0'  gives sum_{n<0}  zeta^n z^(-n-1) (chart |zeta|>|z|).
    """
    out: BiZ = {}
    if sign_chart == ">=0":
        for n in range(0, window + 1):
            out[(-n - 1, n)] = HSeries.one(trunc)
    else:
        for n in range(-1, -window - 2, -1):
            out[(-n - 1, n)] = HSeries.one(trunc)
    return out


def rep_current(letter: str, half: str, window: int, trunc: int):
    """pi of a nilpotent half-current as a bivariate matrix entry.

    Returns the scalar BiZ series s with pi(x^half(z)) = s * E_12 (or E_21).
    """
    return _geom(half, window, trunc)


def rep_cartan_current(which: str, window: int, trunc: int, table_window: int = None):
    """Diagonal entries of pi(k+/K+/k-/K-/K-inv) as BiZ pairs (up, down).

    Computed from the cartan mode expansions composed with rep_gen — the
    truncated mode sum route; closed rational forms are cross-checked in
    tests."""
    modes = {
        "k+": cartan.kplus_small_mode,
        "K+": cartan.kplus_big_mode,
    }
    up: BiZ = {}
    dn: BiZ = {}
    rng = range(0, window + 1) if which in ("k+", "K+") else range(0, -(window + 1), -1)
    for p in rng:
        if which in ("k+", "K+"):
            elem = modes[which](p, trunc)
        elif which == "K-":
            elem = cartan.kminus_mode(p, trunc)
        elif which == "K-inv":
            elem = cartan.kminus_inv_mode(p, trunc)
        elif which == "k-":
            elem = cartan.kminus_small_mode(p, trunc)
        else:
            raise ValueError(which)
        r = rep_element(elem, trunc)
        for zp, c in r.mat[0][0].items():
            key = (-p, zp)
            up[key] = up.get(key, HSeries.zero(trunc)) + c
        for zp, c in r.mat[1][1].items():
            key = (-p, zp)
            dn[key] = dn.get(key, HSeries.zero(trunc)) + c
    return up, dn


# -- tensor images -------------------------------------------------------

class TensorRep:
    """4x4 matrix over bivariate series in (zeta, zeta'), with a chart tag."""

    __slots__ = ("m", "chart", "trunc")

    def __init__(self, m, chart: Chart, trunc: int):
        self.m = m
        self.chart = chart
        self.trunc = trunc

    @staticmethod
    def zero(chart, trunc):
        return TensorRep([[dict() for _ in range(4)] for _ in range(4)], chart, trunc)

    @staticmethod
    def identity(chart, trunc):
        t = TensorRep.zero(chart, trunc)
        for i in range(4):
            t.m[i][i] = {(0, 0): HSeries.one(trunc)}
        return t

    def add(self, other):
        out = TensorRep.zero(self.chart, min(self.trunc, other.trunc))
        for i in range(4):
            for j in range(4):
                d = dict(self.m[i][j])
                for k, v in other.m[i][j].items():
                    d[k] = d.get(k, HSeries.zero(out.trunc)) + v
                out.m[i][j] = {k: v for k, v in d.items() if not v.is_zero()}
        return out

    def sub(self, other):
        return self.add(other.scale(HSeries.const(-1, other.trunc)))

    def scale(self, s: HSeries):
        out = TensorRep.zero(self.chart, self.trunc)
        for i in range(4):
            for j in range(4):
                out.m[i][j] = {k: v * s for k, v in self.m[i][j].items() if not (v * s).is_zero()}
        return out

    def mul(self, other, window=None):
        assert self.chart == other.chart
        t = min(self.trunc, other.trunc)
        out = TensorRep.zero(self.chart, t)
        for i in range(4):
            for j in range(4):
                acc: Dict[Tuple[int, int], HSeries] = {}
                for l in range(4):
                    for (a1, b1), c1 in self.m[i][l].items():
                        for (a2, b2), c2 in other.m[l][j].items():
                            key = (a1 + a2, b1 + b2)
                            if window is not None:
                                (alo, ahi), (blo, bhi) = window
                                if not (alo <= key[0] <= ahi and blo <= key[1] <= bhi):
                                    continue
                            p = c1 * c2
                            if p.is_zero():
                                continue
                            acc[key] = acc.get(key, HSeries.zero(t)) + p
                out.m[i][j] = {k: v for k, v in acc.items() if not v.is_zero()}
        return out

    def mul_scalar_series(self, s: Dict[Tuple[int, int], HSeries], window=None):
        t = self.trunc
        out = TensorRep.zero(self.chart, t)
        for i in range(4):
            for j in range(4):
                acc: Dict[Tuple[int, int], HSeries] = {}
                for (a1, b1), c1 in self.m[i][j].items():
                    for (a2, b2), c2 in s.items():
                        key = (a1 + a2, b1 + b2)
                        if window is not None:
                            (alo, ahi), (blo, bhi) = window
                            if not (alo <= key[0] <= ahi and blo <= key[1] <= bhi):
                                continue
                        p = c1 * c2
                        if p.is_zero():
                            continue
                        acc[key] = acc.get(key, HSeries.zero(t)) + p
                out.m[i][j] = {k: v for k, v in acc.items() if not v.is_zero()}
        return out

    def is_zero_on(self, window) -> bool:
        (alo, ahi), (blo, bhi) = window
        for i in range(4):
            for j in range(4):
                for (a, b), v in self.m[i][j].items():
                    if alo <= a <= ahi and blo <= b <= bhi and not v.is_zero():
                        return False
        return True


def rep_F1(window: int, trunc: int, f1_tensor=None, table: RelationTable | None = None,
           box=None) -> TensorRep:
    """(pi_zeta (x) pi_zeta')(F1) in the chart |zeta| > |zeta'|.

    Built from compute_F1 coefficients (geometric sum over the window), not
    hardcoded: only length-1 pairs survive pi (x) pi, and their coefficients
    are read off the computed tensor.
    """
    from dyangian.hopf import compute_F1
    from dyangian.algebra import monomial_of_sorted_word, gen

    chart = Chart("zeta", "zeta'")
    out = TensorRep.identity(chart, trunc)
    if f1_tensor is None:
        f1_tensor, _ = compute_F1(table, box, check_agreement=False, k_max=1)
    # E12 (x) E21 block: rows/cols in the basis v1v1, v1v2, v2v1, v2v2:
    # (E12 (x) E21) maps v2 (x) v1 -> v1 (x) v2: entry (1, 2)
    for i in range(0, window + 1):
        key = (monomial_of_sorted_word([gen("E", -i - 1)]),
               monomial_of_sorted_word([gen("F", i)]))
        c = f1_tensor.coeff(key)
        if c.is_zero():
            continue
        cell = out.m[1][2]
        k = (-i - 1, i)
        cell[k] = cell.get(k, HSeries.zero(trunc)) + c
    return out


def rep_R1(window: int, trunc: int, table: RelationTable, box) -> TensorRep:
    """(pi_zeta (x) pi_zeta')(R1) assembled from R1 = F1^(21) q^(D(x)K) C F2.

    The q^(D (x) K) image is 1 (K maps to 0); the Cartan factor is
    exp(hbar sum_i h_i (x) h_(-i-1)) imaged slotwise; F1^(21) and F2 images
    are geometric sums of the computed coefficients.  All series live in the
    quadrant with zeta-powers >= 0 and zeta'-powers <= 0 (prefactors expanded
    with |zeta'| > |zeta|).
    """
    from dyangian.hopf import compute_F1, compute_F2
    from dyangian.algebra import monomial_of_sorted_word, gen

    chart = Chart("zeta'", "zeta")
    f1, _ = compute_F1(table, box, check_agreement=False, k_max=1)
    f2, _ = compute_F2(table, box, check_agreement=False, k_max=1)
    # F1^(21) image: 1 + sum_i F1[e_{-i-1}, f_i] * zeta^i zeta'^(-i-1) E21 (x) E12
    A = TensorRep.identity(chart, trunc)
    for i in range(0, window + 1):
        key = (monomial_of_sorted_word([gen("E", -i - 1)]),
               monomial_of_sorted_word([gen("F", i)]))
        c = f1.coeff(key)
        if c.is_zero():
            continue
        # E21 (x) E12 maps v1 (x) v2 -> v2 (x) v1: entry (2, 1)
        A.m[2][1][(i, -i - 1)] = c
    # F2 image: 1 + sum_n F2[e_n, f_{-n-1}] zeta^n zeta'^(-n-1) E12 (x) E21
    Bm = TensorRep.identity(chart, trunc)
    for n in range(0, window + 1):
        key = (monomial_of_sorted_word([gen("E", n)]),
               monomial_of_sorted_word([gen("F", -n - 1)]))
        c = f2.coeff(key)
        if c.is_zero():
            continue
        Bm.m[1][2][(n, -n - 1)] = c
    # Cartan middle factor: diagonal exp(hbar sum_i pi(h_i)(zeta) pi(h_{-i-1})(zeta'))
    ops = _h_ops(trunc)
    diag_vals = []
    for s1, s2 in ((0, 0), (0, 1), (1, 0), (1, 1)):
        # s = 0: upper entry, s = 1: lower entry (with its minus sign)
        expo: Dict[Tuple[int, int], HSeries] = {}
        for i in range(0, window + 1):
            a = ops["plus_up"].apply(i) if s1 == 0 else ops["plus_dn"].apply(i)
            b = ops["minus_up"].apply(-i - 1) if s2 == 0 else ops["minus_dn"].apply(-i - 1)
            sgn = (1 if s1 == 0 else -1) * (1 if s2 == 0 else -1)
            for za, ca in a.items():
                for zb, cb in b.items():
                    p = ca * cb * HSeries.hbar(1, trunc, sgn)
                    if p.is_zero():
                        continue
                    key = (za, zb)
                    expo[key] = expo.get(key, HSeries.zero(trunc)) + p
        # exponentiate the scalar bivariate series (all terms carry hbar)
        val: Dict[Tuple[int, int], HSeries] = {(0, 0): HSeries.one(trunc)}
        term: Dict[Tuple[int, int], HSeries] = {(0, 0): HSeries.one(trunc)}
        for j in range(1, trunc + 1):
            nxt: Dict[Tuple[int, int], HSeries] = {}
            for (a1, b1), c1 in term.items():
                for (a2, b2), c2 in expo.items():
                    p = c1 * c2 * Fraction(1, j)
                    if p.is_zero():
                        continue
                    key = (a1 + a2, b1 + b2)
                    nxt[key] = nxt.get(key, HSeries.zero(trunc)) + p
            term = nxt
            if not term:
                break
            for k, v in term.items():
                val[k] = val.get(k, HSeries.zero(trunc)) + v
        diag_vals.append({k: v for k, v in val.items() if not v.is_zero()})
    C = TensorRep.zero(chart, trunc)
    for idx in range(4):
        C.m[idx][idx] = diag_vals[idx]
    win = ((0, window), (-window - 1, 0))
    return A.mul(C, window=win).mul(Bm, window=win)
