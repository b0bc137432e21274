"""Hopf layer: the two Drinfeld coproducts, the twist F = exp(h sum e_n (x) f_(-n-1)),
its factorization F = F2 F1 through the block projections, the Hopf pairing,
and the identity checkers built on them.

Infinite-support objects (coproduct images, F, F1, F2) are handled through
windowed tensor expansions: a mode box and hbar order bound the enumeration,
and window-stability re-runs certify that the box was large enough.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Tuple

from dyangian import cartan
from dyangian.algebra import (
    EMPTY_MON,
    Element,
    Generator,
    Monomial,
    NONNEG_LEFT,
    Policy,
    RelationTable,
    gen,
    monomial_of_sorted_word,
    monomial_weight,
    mul,
    normalize,
    project,
    word_of_monomial,
)
from dyangian.scalars import HSeries
from dyangian.spectral import binom

__all__ = [
    "TensorElement",
    "cartan_mode_table",
    "delta_gen",
    "coproduct_word",
    "coproduct_element",
    "twist_tensor",
    "compute_F1",
    "compute_F2",
    "f1_inverse",
    "tensor_mul",
    "PairingEngine",
    "pair_generator_value",
    "twisted_coproduct",
]


class TensorElement:
    """Finite window of an element of A^(x)arity: monomial tuples -> HSeries."""

    __slots__ = ("terms", "arity", "trunc", "policy")

    def __init__(self, terms: Dict[Tuple[Monomial, ...], HSeries], arity: int,
                 trunc: int, policy: Policy = NONNEG_LEFT):
        self.terms = {k: v for k, v in terms.items() if not v.is_zero()}
        self.arity = arity
        self.trunc = trunc
        self.policy = policy

    @staticmethod
    def unit(arity: int, trunc: int, policy: Policy = NONNEG_LEFT) -> "TensorElement":
        return TensorElement({(EMPTY_MON,) * arity: HSeries.one(trunc)}, arity, trunc, policy)

    @staticmethod
    def zero(arity: int, trunc: int, policy: Policy = NONNEG_LEFT) -> "TensorElement":
        return TensorElement({}, arity, trunc, policy)

    def is_zero(self):
        return not self.terms

    def __add__(self, other: "TensorElement") -> "TensorElement":
        assert self.arity == other.arity
        t = min(self.trunc, other.trunc)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, HSeries.zero(t)) + v
        return TensorElement(out, self.arity, t, self.policy)

    def __neg__(self):
        return TensorElement({k: -v for k, v in self.terms.items()}, self.arity,
                             self.trunc, self.policy)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "TensorElement":
        out = {k: v * s for k, v in self.terms.items()}
        out = {k: v for k, v in out.items() if not v.is_zero()}
        t = min((v.trunc for v in out.values()), default=self.trunc)
        return TensorElement(out, self.arity, t, self.policy)

    def truncate(self, order: int) -> "TensorElement":
        return TensorElement({k: v.truncate(order) for k, v in self.terms.items()},
                             self.arity, min(self.trunc, order), self.policy)

    def coeff(self, key: Tuple[Monomial, ...]) -> HSeries:
        return self.terms.get(key, HSeries.zero(self.trunc))

    def eq_values(self, other: "TensorElement") -> bool:
        assert self.arity == other.arity
        for k in set(self.terms) | set(other.terms):
            if not self.coeff(k).eq_values(other.coeff(k)):
                return False
        return True

    def embed(self, arity: int, slots: Tuple[int, ...]) -> "TensorElement":
        """Place this tensor's slots at positions `slots` of a wider unit tensor."""
        out = {}
        for key, c in self.terms.items():
            full = [EMPTY_MON] * arity
            for pos, m in zip(slots, key):
                full[pos] = m
            out[tuple(full)] = c
        return TensorElement(out, arity, self.trunc, self.policy)


def _mode_ok(mon: Monomial, box) -> bool:
    lo, hi = box
    k, h, enn, eng, fnn, fng, d = mon
    for ms in (h, enn, eng, fnn, fng):
        for m in ms:
            if not (lo <= m <= hi):
                return False
    return True


def tensor_mul(a: TensorElement, b: TensorElement, table: RelationTable,
               box=None) -> TensorElement:
    """Slotwise product; output terms with any slot mode outside `box` are
    dropped (callers size the box so dropped terms cannot reach the probes)."""
    assert a.arity == b.arity
    t = min(a.trunc, b.trunc)
    out: Dict[Tuple[Monomial, ...], HSeries] = {}
    for ka, ca in a.terms.items():
        va = ca.effective_val
        for kb, cb in b.terms.items():
            if va + cb.effective_val > t:
                continue
            c = ca * cb
            if c.is_zero():
                continue
            slot_elems: List[Element] = []
            dead = False
            for ma, mb in zip(ka, kb):
                wa = word_of_monomial(ma, a.policy)
                wb = word_of_monomial(mb, b.policy)
                e = normalize(wa + wb, a.policy, table)
                if e.is_zero():
                    dead = True
                    break
                slot_elems.append(e)
            if dead:
                continue
            # distribute the slotwise normal forms
            keys = [((), HSeries.one(t))]
            for e in slot_elems:
                nxt = []
                for kpref, cpref in keys:
                    for m, cm in e.terms.items():
                        if box is not None and not _mode_ok(m, box):
                            continue
                        cc = cpref * cm
                        if cc.is_zero():
                            continue
                        nxt.append((kpref + (m,), cc))
                keys = nxt
                if not keys:
                    break
            for kfull, cfull in keys:
                p = cfull * c
                if p.is_zero():
                    continue
                out[kfull] = out.get(kfull, HSeries.zero(t)) + p
    return TensorElement(out, a.arity, t, a.policy)


def cartan_mode_table(N: int, window: int) -> Dict[str, Dict[int, Element]]:
    """Mode expansions of K+, k+, K-, (K-)^(-1), k- as h-polynomial Elements."""
    out: Dict[str, Dict[int, Element]] = {"K+": {}, "k+": {}, "K-": {}, "K-inv": {}, "k-": {}}
    for p in range(0, window + 1):
        out["K+"][p] = cartan.kplus_big_mode(p, N)
        out["k+"][p] = cartan.kplus_small_mode(p, N)
    for p in range(0, -(window + 1), -1):
        out["K-"][p] = cartan.kminus_mode(p, N)
        out["K-inv"][p] = cartan.kminus_inv_mode(p, N)
        out["k-"][p] = cartan.kminus_small_mode(p, N)
    return out


# -- coproducts -----------------------------------------------------------

def _with_k_power(mon: Monomial, t: int) -> Monomial:
    k, h, enn, eng, fnn, fng, d = mon
    return (k + t, h, enn, eng, fnn, fng, d)


def delta_gen(kind: str, g: Generator, N: int, box, k_symbolic: bool = False,
              trunc: int | None = None) -> TensorElement:
    """Windowed coproduct of a generator; kind is 'delta' or 'bar'.

    With k_symbolic the central charge enters Delta(f_n) and Delta(h_b)
    through K-power monomials exactly where the hbar K shift appears.
    """
    t = N if trunc is None else trunc
    lo, hi = box
    letter, n = g
    terms: Dict[Tuple[Monomial, Monomial], HSeries] = {}

    def put(m1: Monomial, m2: Monomial, c: HSeries):
        if _mode_ok(m1, box) and _mode_ok(m2, box) and not c.is_zero():
            key = (m1, m2)
            terms[key] = terms.get(key, HSeries.zero(t)) + c

    one = HSeries.one(t)
    if letter in ("K", "D") or letter == "H" and (n >= 0 or not k_symbolic):
        m = monomial_of_sorted_word([g])
        put(m, EMPTY_MON, one)
        put(EMPTY_MON, m, one)
        return TensorElement(terms, 2, t)
    if letter == "H":  # n < 0, symbolic K: slot-2 argument shifted by hK_1
        m = monomial_of_sorted_word([g])
        put(m, EMPTY_MON, one)
        for s in range(0, t + 1):
            c = HSeries.hbar(s, t, binom(-(n - s) - 1, s))
            put(_with_k_power(EMPTY_MON, s), monomial_of_sorted_word([gen("H", n - s)]), c)
        return TensorElement(terms, 2, t)
    if letter == "E" and kind == "delta":
        # Delta(e_n) = 1 (x) e_n + sum_p e_{n-p} (x) K+_p
        put(EMPTY_MON, monomial_of_sorted_word([g]), one)
        for p in range(0, n - lo + 1):
            m1 = monomial_of_sorted_word([gen("E", n - p)])
            for mon, c in cartan.kplus_big_mode(p, t).terms.items():
                put(m1, mon, c)
        return TensorElement(terms, 2, t)
    if letter == "E" and kind == "bar":
        # bar-Delta(e_n) = 1 (x) e_n + sum_j e_{n+j} (x) (K-^(-1))_{-j}   (K = 0)
        put(EMPTY_MON, monomial_of_sorted_word([g]), one)
        for j in range(0, hi - n + 1):
            m1 = monomial_of_sorted_word([gen("E", n + j)])
            for mon, c in cartan.kminus_inv_mode(-j, t).terms.items():
                put(m1, mon, c)
        return TensorElement(terms, 2, t)
    if letter == "F" and kind == "delta":
        # Delta(f_n) = f_n (x) 1 + sum_j (K-inv)_{-j} K1^s (x) f_{n+j-s} shifts
        put(monomial_of_sorted_word([g]), EMPTY_MON, one)
        smax = t if k_symbolic else 0
        for j in range(0, hi - n + 1 + smax):
            kinv = cartan.kminus_inv_mode(-j, t)
            for s in range(0, smax + 1):
                r = n + j - s
                if not (lo <= r <= hi):
                    continue
                shift_c = HSeries.hbar(s, t, binom(-r - 1, s))
                if shift_c.is_zero():
                    continue
                m2 = monomial_of_sorted_word([gen("F", r)])
                for mon, c in kinv.terms.items():
                    put(_with_k_power(mon, s), m2, c * shift_c)
        return TensorElement(terms, 2, t)
    if letter == "F" and kind == "bar":
        # bar-Delta(f_n) = f_n (x) 1 + sum_p K+_p (x) f_{n-p}
        put(monomial_of_sorted_word([g]), EMPTY_MON, one)
        for p in range(0, n - lo + 1):
            m2 = monomial_of_sorted_word([gen("F", n - p)])
            for mon, c in cartan.kplus_big_mode(p, t).terms.items():
                put(mon, m2, c)
        return TensorElement(terms, 2, t)
    raise ValueError(f"no coproduct for {g}")


def coproduct_word(kind: str, word: Iterable[Generator], table: RelationTable,
                   box, k_symbolic: bool = False) -> TensorElement:
    """Coproduct of a product of generators (multiplicativity), windowed."""
    out = TensorElement.unit(2, table.N)
    for g in word:
        out = tensor_mul(out, delta_gen(kind, g, table.N, box, k_symbolic), table, box=box)
    return out


def coproduct_element(kind: str, a: Element, table: RelationTable, box,
                      k_symbolic: bool = False) -> TensorElement:
    out = TensorElement.zero(2, a.trunc)
    for mon, c in a.terms.items():
        w = word_of_monomial(mon, a.policy)
        out = out + coproduct_word(kind, w, table, box, k_symbolic).scale(c)
    return out


# -- the twist ------------------------------------------------------------

def twist_tensor(table: RelationTable, box, k_max: int | None = None,
                 sign: int = 1, weight_band: int | None = None) -> TensorElement:
    """Windowed expansion of F = exp(sign * h * sum_n e_n (x) f_(-n-1)).

    Sound for probes whose slot modes stay inside `box` shrunk by the hbar
    order (hull bound on normal-ordering excursions); certified empirically
    by the window-stability re-runs.  weight_band, when given, drops terms
    whose slot weights exceed it in absolute value (callers use it when only
    a weight-bounded probe family is relevant).
    """
    N = table.N
    kmax = min(N, k_max) if k_max is not None else N
    lo, hi = box
    out = TensorElement.unit(2, N)
    # ordered tuples n_vec with every slot mode inside the box; slot-2 modes
    # are -n-1, so n must also satisfy -hi-1 <= n... both constraints:
    nmodes = [n for n in range(lo, hi + 1) if lo <= -n - 1 <= hi]
    fact = 1
    level = [()]
    for k in range(1, kmax + 1):
        fact *= k
        level = [tup + (n,) for tup in level for n in nmodes]
        coeff = HSeries.hbar(k, N, Fraction(sign ** k, fact))
        if coeff.is_zero():
            break
        acc: Dict[Tuple[Monomial, Monomial], HSeries] = {}
        for tup in level:
            if weight_band is not None and abs(sum(tup)) > weight_band + N:
                continue
            ew = tuple(gen("E", n) for n in tup)
            fw = tuple(gen("F", -n - 1) for n in tup)
            e1 = normalize(ew, NONNEG_LEFT, table, budget=N - k)
            if e1.is_zero():
                continue
            e2 = normalize(fw, NONNEG_LEFT, table, budget=N - k)
            for m1, c1 in e1.terms.items():
                if not _mode_ok(m1, box):
                    continue
                if weight_band is not None and abs(monomial_weight(m1)) > weight_band:
                    continue
                for m2, c2 in e2.terms.items():
                    if not _mode_ok(m2, box):
                        continue
                    if weight_band is not None and abs(monomial_weight(m2)) > weight_band:
                        continue
                    c = c1 * c2
                    if c.is_zero():
                        continue
                    key = (m1, m2)
                    acc[key] = acc.get(key, HSeries.zero(N)) + c
        for key, c in acc.items():
            p = c * coeff
            if p.is_zero():
                continue
            out.terms[key] = out.terms.get(key, HSeries.zero(N)) + p
    return TensorElement({k: v for k, v in out.terms.items() if not v.is_zero()}, 2, N)


def _project_tensor_slot(t: TensorElement, slot: int, kind: str,
                         table: RelationTable) -> TensorElement:
    out: Dict[Tuple[Monomial, ...], HSeries] = {}
    for key, c in t.terms.items():
        mon = key[slot]
        proj = project(Element({mon: HSeries.one(t.trunc)}, t.trunc, t.policy), kind, table)
        for m2, c2 in proj.terms.items():
            nk = key[:slot] + (m2,) + key[slot + 1:]
            p = c * c2
            if p.is_zero():
                continue
            out[nk] = out.get(nk, HSeries.zero(t.trunc)) + p
    return TensorElement(out, t.arity, t.trunc, t.policy)


def compute_F1(table: RelationTable, box, check_agreement: bool = True,
               k_max: int | None = None):
    """F1 = (Pi_{<0,r} (x) 1)(F) = (1 (x) Pi_{>=0,r})(F); returns the tensor
    and the list of disagreement probes between the defining expressions."""
    F = twist_tensor(table, box, k_max=k_max)
    a = _project_tensor_slot(F, 0, "lt0_r", table)
    b = _project_tensor_slot(F, 1, "ge0_r", table)
    bad = []
    if check_agreement:
        for key in set(a.terms) | set(b.terms):
            if not a.coeff(key).eq_values(b.coeff(key)):
                bad.append(key)
    return a, bad


def compute_F2(table: RelationTable, box, check_agreement: bool = True,
               k_max: int | None = None):
    """F2 = (Pi_{>=0,l} (x) 1)(F) = (1 (x) Pi_{<0,l})(F)."""
    F = twist_tensor(table, box, k_max=k_max)
    a = _project_tensor_slot(F, 0, "ge0_l", table)
    b = _project_tensor_slot(F, 1, "lt0_l", table)
    bad = []
    if check_agreement:
        for key in set(a.terms) | set(b.terms):
            if not a.coeff(key).eq_values(b.coeff(key)):
                bad.append(key)
    return a, bad


def f1_inverse(f1: TensorElement, table: RelationTable, box) -> TensorElement:
    """Inverse of F1 = 1 + phi with phi = O(hbar), as the geometric series."""
    N = f1.trunc
    one = TensorElement.unit(2, N)
    phi = f1 - one
    out = one
    acc = one
    for _ in range(N):
        acc = tensor_mul(acc, phi, table, box=box)
        if acc.is_zero():
            break
        acc = -acc
        out = out + acc
    return out


def twisted_coproduct(a: Element, f1: TensorElement, f1inv: TensorElement,
                      table: RelationTable, box, kind: str = "delta") -> TensorElement:
    """Delta_1(a) = F1 Delta(a) F1^(-1), windowed."""
    d = coproduct_element(kind, a, table, box)
    return tensor_mul(tensor_mul(f1, d, table, box=box), f1inv, table, box=box)


# -- Hopf pairing ---------------------------------------------------------

def pair_generator_value(x: Generator, y: Generator, trunc: int,
                         hh_value: Fraction = Fraction(2)) -> HSeries:
    """Generator pairing rules; x from the (+)-side, y from the (-)-side."""
    (lx, mx), (ly, my) = x, y
    if lx == "E" and ly == "F" and mx + my + 1 == 0:
        return HSeries.hbar(-1, trunc)
    if lx == "H" and ly == "H" and mx >= 0 > my and mx + my + 1 == 0:
        return HSeries.hbar(-1, trunc, hh_value)
    if lx == "D" and ly == "K":
        return HSeries.hbar(-1, trunc)
    return HSeries.zero(trunc)


def _is_pure(mon: Monomial, letter: str) -> bool:
    k, h, enn, eng, fnn, fng, d = mon
    if k or h or d:
        return False
    if letter == "E":
        return not (fnn or fng)
    return not (enn or eng)


def _mon_len(mon: Monomial) -> int:
    k, h, enn, eng, fnn, fng, d = mon
    return k + len(h) + len(enn) + len(eng) + len(fnn) + len(fng) + d


class PairingEngine:
    """The Hopf pairing restricted to U_h N_+ x U_h N_-.

    The pairing is realized through its defining property: F is its canonical
    element (Lemma F-pair).  Because F = F2 F1 with class-pure factors, the
    Gram matrix factorizes triangularly over the block decompositions
    N_+ = N_+^{>=0} N_+^{<0} and N_- = N_-^{<0} N_-^{>=0}:

        <x_+ x_-, y_- y_+> = <x_+, y_->_2 <x_-, y_+>_1,

    where the block Grams are the exact inverses of the windowed F2 and F1
    coefficient matrices (each block is hbar^k (diagonal + O(hbar))).  The
    generator values <e_n, f_m> = delta_{n+m+1,0}/hbar come out of the
    inversion; they are reproduced, not imposed.
    """

    def __init__(self, table: RelationTable, box, max_len: int = 2,
                 hh_value: Fraction = Fraction(2)):
        self.table = table
        self.box = box
        self.max_len = max_len
        self.hh_value = hh_value
        self.N = table.N
        self._F = twist_tensor(table, box, k_max=max_len)
        f1, _ = compute_F1(table, box, check_agreement=False, k_max=max_len)
        f2, _ = compute_F2(table, box, check_agreement=False, k_max=max_len)
        self._F1, self._F2 = f1, f2
        self._G1: Dict[int, Dict] = {}
        self._G2: Dict[int, Dict] = {}
        for k in range(1, max_len + 1):
            self._G1[k] = self._invert_block(f1, k)
            self._G2[k] = self._invert_block(f2, k)

    # -- block inversion -------------------------------------------------
    def _invert_block(self, F: TensorElement, k: int) -> Dict:
        """Invert a class-pure length-k block.

        With M[mu, nu] the block coefficients, the pairing solves
        sum_nu M[mu, nu] <x, nu> = delta_{mu,x}.  Relabeling columns by the
        mode-dual map nu = dual(u) gives M~ = hbar^k D (I + B) with D diagonal
        and B of positive hbar valuation, so
        <x, dual(u)> = hbar^(-k) (I+B)^(-1)[u, x] D[x]^(-1).
        """
        t = self.N - k
        rows = sorted({m1 for (m1, m2) in F.terms if _mon_len(m1) == k})
        A = {key: HSeries(c.val - k, c.coeffs, c.trunc - k)
             for key, c in F.terms.items() if _mon_len(key[0]) == k}
        diag: Dict[Monomial, HSeries] = {}
        dual: Dict[Monomial, Monomial] = {}
        for m1 in rows:
            modes = m1[2] + m1[3]
            dmodes = tuple(sorted((-m - 1 for m in modes), reverse=True))
            m2 = (0, (), (), (), tuple(m for m in dmodes if m >= 0),
                  tuple(m for m in dmodes if m < 0), 0)
            dual[m1] = m2
            d = A.get((m1, m2))
            if d is None or d.is_zero() or d.coeff(0) == 0:
                raise AssertionError(f"F block not invertible at {m1} (window too small)")
            diag[m1] = d
        inv_dual = {v: u for u, v in dual.items()}
        B: Dict[Tuple[Monomial, Monomial], HSeries] = {}
        for (m1, m2), c in A.items():
            u = inv_dual.get(m2)
            if u is None:
                continue  # column outside the dual image of the window
            v = diag[m1].inv() * c
            if u == m1:
                v = v + HSeries.const(-1, v.trunc)
            if not v.is_zero():
                if v.effective_val < 1:
                    raise AssertionError("F block tail not hbar-positive")
                B[(m1, u)] = v
        inv: Dict[Tuple[Monomial, Monomial], HSeries] = {
            (m, m): HSeries.one(t) for m in rows}
        power = dict(inv)
        by_row: Dict[Monomial, list] = {}
        for (a, b), c in B.items():
            by_row.setdefault(a, []).append((b, c))
        for _ in range(t):
            nxt: Dict[Tuple[Monomial, Monomial], HSeries] = {}
            for (a, b), c1 in power.items():
                for (b2, c2) in by_row.get(b, ()):
                    p = c1 * c2
                    if p.is_zero():
                        continue
                    key = (a, b2)
                    nxt[key] = nxt.get(key, HSeries.zero(t)) + p
            if not nxt:
                break
            power = {key: -v for key, v in nxt.items()}
            for key, v in power.items():
                inv[key] = inv.get(key, HSeries.zero(t)) + v
        G: Dict[Tuple[Monomial, Monomial], HSeries] = {}
        for (u, x), c in inv.items():
            val = c * diag[x].inv()
            if val.is_zero():
                continue
            G[(x, dual[u])] = HSeries(val.val - k, val.coeffs, val.trunc - k)
        return {"rows": rows, "dual": dual, "G": G}

    # -- public pairing ---------------------------------------------------
    def _block_value(self, blocks: Dict[int, Dict], mx: Monomial, my: Monomial) -> HSeries:
        k = _mon_len(mx)
        if k != _mon_len(my):
            return HSeries.zero(self.N)
        if k == 0:
            return HSeries.one(self.N)
        if k > self.max_len:
            raise ValueError(f"pairing block for length {k} not built")
        return blocks[k]["G"].get((mx, my), HSeries.zero(self.N))

    def pair_split_monomials(self, mx: Monomial, my: Monomial) -> HSeries:
        """mx a pure-e NF monomial, my a pure-f NegLeft-NF monomial."""
        kx, hx, enn, eng, fnnx, fngx, dx = mx
        ky, hy, enny, engy, fnn, fng, dy = my
        x_plus = (0, (), enn, (), (), (), 0)
        x_minus = (0, (), (), eng, (), (), 0)
        y_minus = (0, (), (), (), (), fng, 0)
        y_plus = (0, (), (), (), fnn, (), 0)
        a = self._block_value(self._G2, x_plus, y_minus)
        if a.is_zero():
            return HSeries.zero(self.N)
        b = self._block_value(self._G1, x_minus, y_plus)
        return a * b

    def pair_nf_monomials(self, mx: Monomial, my: Monomial) -> HSeries:
        """mx a NONNEG_LEFT pure-e NF monomial, my a pure-f monomial in the
        NONNEG_LEFT basis; memoized."""
        key = (mx, my)
        hit = getattr(self, "_pm_memo", None)
        if hit is None:
            self._pm_memo = hit = {}
        v = hit.get(key)
        if v is not None:
            return v
        if _mon_len(mx) != _mon_len(my):
            out = HSeries.zero(self.N)
        else:
            neg_left = Policy(NONNEG_LEFT.e_order, "neg_left")
            ynf = normalize(word_of_monomial(my, NONNEG_LEFT), neg_left, self.table)
            out = HSeries.zero(self.N)
            for my2, cy in ynf.terms.items():
                p = self.pair_split_monomials(mx, my2)
                if not p.is_zero():
                    out = out + cy * p
        hit[key] = out
        return out

    def pair_elements(self, a: Element, b: Element) -> HSeries:
        """a in U_h N_+ (any policy), b in U_h N_-; exact Hopf pairing value."""
        out = HSeries.zero(min(a.trunc, b.trunc))
        for ma, ca in a.terms.items():
            if not _is_pure(ma, "E"):
                raise ValueError("left pairing argument must be a pure e-element")
            xnf = normalize(word_of_monomial(ma, a.policy), NONNEG_LEFT, self.table) \
                if a.policy != NONNEG_LEFT else Element({ma: HSeries.one(a.trunc)}, a.trunc)
            for mb, cb in b.terms.items():
                if not _is_pure(mb, "F"):
                    raise ValueError("right pairing argument must be a pure f-element")
                for mx, cx in xnf.terms.items():
                    p = self.pair_nf_monomials(mx, mb)
                    if p.is_zero():
                        continue
                    out = out + ca * cb * cx * p
        return out

    def pair_words(self, xw, yw) -> HSeries:
        if len(xw) == 1 and len(yw) == 1:
            return pair_generator_value(xw[0], yw[0], self.N, self.hh_value)
        a = normalize(tuple(xw), NONNEG_LEFT, self.table)
        b = normalize(tuple(yw), NONNEG_LEFT, self.table)
        return self.pair_elements(a, b)

    # -- F against the pairing -----------------------------------------
    def _f_slotpair(self, x: Element, slot: int) -> Element:
        N = self.N
        acc: Dict[Monomial, HSeries] = {}
        for (m1, m2), c in self._F.terms.items():
            keep, partner = (m1, m2) if slot == 1 else (m2, m1)
            for mon, cx in x.terms.items():
                if slot == 1:
                    p = self.pair_nf_monomials(mon, partner)
                else:
                    p = self.pair_nf_monomials(partner, mon)
                if p.is_zero():
                    continue
                v = c * p * cx
                if v.is_zero():
                    continue
                acc[keep] = acc.get(keep, HSeries.zero(N)) + v
        return Element(acc, N)

    def f_pair_right(self, x: Element) -> Element:
        """<F, id (x) x> for x in the (+) nilpotent side."""
        return self._f_slotpair(x, 1)

    def f_pair_left(self, y: Element) -> Element:
        """<F, y (x) id> for y in the (-) nilpotent side."""
        return self._f_slotpair(y, 2)


# ----------------------------------------------------------------------
# suite-level verifiers
# ----------------------------------------------------------------------

def _interior_mode_ok(mon: Monomial, bound: int) -> bool:
    k, h, enn, eng, fnn, fng, d = mon
    return all(abs(m) <= bound for ms in (h, enn, eng, fnn, fng) for m in ms)


def verify_factorization(table: RelationTable, box, interior: int, k_max: int | None = None):
    """Prop. aryeh package: F = F2 F1 on interior probes; both defining
    expressions of F1 and of F2 agree; structural memberships; the order-h
    part of F1 is h * sum e_{-i-1} (x) f_i."""
    N = table.N
    bad = []
    checked = 0
    F = twist_tensor(table, box, k_max=k_max)
    f1, bad1 = compute_F1(table, box, k_max=k_max)
    f2, bad2 = compute_F2(table, box, k_max=k_max)
    for key in bad1:
        if all(_interior_mode_ok(m, interior) for m in key):
            bad.append(("voron-agreement", key))
    for key in bad2:
        if all(_interior_mode_ok(m, interior) for m in key):
            bad.append(("nesher-agreement", key))
    # memberships: F1 slot 1 pure negative e, slot 2 pure nonnegative f
    for (m1, m2), c in f1.terms.items():
        if m1[2] or m2[5]:
            bad.append(("F1-membership", m1, m2))
    for (m1, m2), c in f2.terms.items():
        if m1[3] or m2[4]:
            bad.append(("F2-membership", m1, m2))
    # order-h part of F1
    from dyangian.algebra import monomial_of_sorted_word as msw
    for i in range(0, interior):
        c = f1.coeff((msw([gen("E", -i - 1)]), msw([gen("F", i)])))
        if not c.coeff(1) == 1:
            bad.append(("F1-order-h", i, str(c)))
        checked += 1
    prod = tensor_mul(f2, f1, table, box=box)
    for key in set(F.terms) | set(prod.terms):
        if not all(_interior_mode_ok(m, interior) for m in key):
            continue
        a, b = F.coeff(key), prod.coeff(key)
        if not a.is_zero() or not b.is_zero():
            checked += 1
        if not a.eq_values(b):
            bad.append(("F=F2F1", key, str(a), str(b)))
    return bad, checked


def verify_membership_props(table: RelationTable, box, interior: int):
    """(propr1): (1 (x) Pi_{>=0,r})(F) F^(-1) has only nonneg e-modes in slot 1;
    (propl): F^(-1) (Pi_{>=0,l} (x) 1)(F) lies in N_+^{<0} (x) N_-^{>=0}."""
    bad = []
    checked = 0
    F = twist_tensor(table, box)
    Finv = twist_tensor(table, box, sign=-1)
    p1 = _project_tensor_slot(F, 1, "ge0_r", table)
    lhs = tensor_mul(p1, Finv, table, box=box)
    for (m1, m2), c in lhs.terms.items():
        if not all(_interior_mode_ok(m, interior) for m in (m1, m2)):
            continue
        checked += 1
        if m1[3]:  # negative e-block must be empty
            bad.append(("propr1", m1, m2, str(c)))
    p2 = _project_tensor_slot(F, 0, "ge0_l", table)
    rhs = tensor_mul(Finv, p2, table, box=box)
    for (m1, m2), c in rhs.terms.items():
        if not all(_interior_mode_ok(m, interior) for m in (m1, m2)):
            continue
        checked += 1
        if m1[2] or m2[5]:  # slot 1 pure negative e, slot 2 pure nonneg f
            bad.append(("propl", m1, m2, str(c)))
    return bad, checked


def verify_conjugation(table: RelationTable, box, gens, interior: int,
                       weight_band: int | None = None):
    """Eq. (debdou): F Delta(g) = bar-Delta(g) F on interior probes."""
    N = table.N
    F = twist_tensor(table, box, weight_band=weight_band)
    bad = []
    checked = 0
    for g in gens:
        d = delta_gen("delta", g, N, box)
        db = delta_gen("bar", g, N, box)
        lhs = tensor_mul(F, d, table, box=box)
        rhs = tensor_mul(db, F, table, box=box)
        diff = lhs - rhs
        for key, v in lhs.terms.items():
            if all(_interior_mode_ok(m, interior) for m in key) and not v.is_zero():
                checked += 1
        for key, v in diff.terms.items():
            if v.is_zero():
                continue
            if all(_interior_mode_ok(m, interior) for m in key):
                bad.append((g, key, str(v)))
    return bad, checked


def verify_coassociativity(table: RelationTable, box, gens, interior: int,
                           kind: str = "delta", k_symbolic: bool = False):
    """(Delta (x) 1) Delta(g) = (1 (x) Delta) Delta(g) on interior arity-3 probes."""
    N = table.N
    bad = []
    checked = 0
    for g in gens:
        d = delta_gen(kind, g, N, box, k_symbolic)
        lhs: Dict[Tuple[Monomial, Monomial, Monomial], HSeries] = {}
        rhs: Dict[Tuple[Monomial, Monomial, Monomial], HSeries] = {}
        for (m1, m2), c in d.terms.items():
            t1 = coproduct_word(kind, word_of_monomial(m1, NONNEG_LEFT), table, box, k_symbolic)
            for (a, b), c2 in t1.terms.items():
                key = (a, b, m2)
                v = c * c2
                if v.is_zero():
                    continue
                lhs[key] = lhs.get(key, HSeries.zero(N)) + v
            t2 = coproduct_word(kind, word_of_monomial(m2, NONNEG_LEFT), table, box, k_symbolic)
            for (a, b), c2 in t2.terms.items():
                key = (m1, a, b)
                v = c * c2
                if v.is_zero():
                    continue
                rhs[key] = rhs.get(key, HSeries.zero(N)) + v
        for key in set(lhs) | set(rhs):
            if not all(_interior_mode_ok(m, interior) for m in key):
                continue
            a = lhs.get(key, HSeries.zero(N))
            b = rhs.get(key, HSeries.zero(N))
            if not a.is_zero() or not b.is_zero():
                checked += 1
            if not a.eq_values(b):
                bad.append((g, key, str(a), str(b)))
    return bad, checked


def verify_delta_homomorphism(table: RelationTable, box, window: int, interior: int):
    """Delta applied to every relation-table identity vanishes:
    [Delta(x), Delta(y)] = Delta([x, y]) on interior probes."""
    N = table.N
    bad = []
    checked = 0
    gens = [gen(l, m) for l in ("H", "E", "F") for m in range(-window, window + 1)]
    gens += [gen("D"), gen("K")]
    for x in gens:
        dx = delta_gen("delta", x, N, box)
        for y in gens:
            dy = delta_gen("delta", y, N, box)
            lhs = tensor_mul(dx, dy, table, box=box) - tensor_mul(dy, dx, table, box=box)
            comm = table.commutator(x, y)
            rhs = coproduct_element("delta", comm, table, box)
            diff = lhs - rhs
            for key, v in lhs.terms.items():
                if all(_interior_mode_ok(m, interior) for m in key) and not v.is_zero():
                    checked += 1
            for key, v in diff.terms.items():
                if v.is_zero():
                    continue
                if all(_interior_mode_ok(m, interior) for m in key):
                    bad.append((x, y, key, str(v)))
    return bad, checked


def verify_cocycle_abstract(table: RelationTable, box, interior: int,
                            k_max: int | None = None):
    """(F1 (x) 1)(Delta (x) 1)(F1) = (1 (x) F1)(1 (x) Delta)(F1) on interior
    arity-3 probes."""
    N = table.N
    f1, _ = compute_F1(table, box, check_agreement=False, k_max=k_max)
    bad = []
    checked = 0

    def arity3(te: TensorElement, slots) -> TensorElement:
        return te.embed(3, slots)

    F12 = arity3(f1, (0, 1))
    F23 = arity3(f1, (1, 2))
    d1: Dict[Tuple[Monomial, Monomial, Monomial], HSeries] = {}
    d2: Dict[Tuple[Monomial, Monomial, Monomial], HSeries] = {}
    for (m1, m2), c in f1.terms.items():
        t1 = coproduct_word("delta", word_of_monomial(m1, NONNEG_LEFT), table, box)
        for (a, b), c2 in t1.terms.items():
            key = (a, b, m2)
            v = c * c2
            if not v.is_zero():
                d1[key] = d1.get(key, HSeries.zero(N)) + v
        t2 = coproduct_word("delta", word_of_monomial(m2, NONNEG_LEFT), table, box)
        for (a, b), c2 in t2.terms.items():
            key = (m1, a, b)
            v = c * c2
            if not v.is_zero():
                d2[key] = d2.get(key, HSeries.zero(N)) + v
    D1 = TensorElement(d1, 3, N)
    D2 = TensorElement(d2, 3, N)
    box3 = box
    lhs = tensor_mul(F12, D1, table, box=box3)
    rhs = tensor_mul(F23, D2, table, box=box3)
    diff = lhs - rhs
    for key, v in lhs.terms.items():
        if all(_interior_mode_ok(m, interior) for m in key) and not v.is_zero():
            checked += 1
    for key, v in diff.terms.items():
        if v.is_zero():
            continue
        if all(_interior_mode_ok(m, interior) for m in key):
            bad.append((key, str(v)))
    return bad, checked


def verify_fpair_orthog(engine: PairingEngine, mode_bound: int, f_order: int | None = None):
    """Criterion-4 package: generator values, Lemma F-pair both ways on
    length <= 2 monomials, and the four orthogonality families."""
    table = engine.table
    N = engine.N
    bad = []
    checked = 0
    # generator values
    for n in range(-mode_bound, mode_bound + 1):
        for m in range(-mode_bound, mode_bound + 1):
            v = engine.pair_words((gen("E", n),), (gen("F", m),))
            want = HSeries.hbar(-1, N) if n + m + 1 == 0 else HSeries.zero(N)
            checked += 1
            if not v.eq_values(want):
                bad.append(("gen-ef", n, m, str(v)))
    assert pair_generator_value(gen("H", 1), gen("H", -2), N, engine.hh_value) \
        .eq_values(HSeries.hbar(-1, N, engine.hh_value))
    assert pair_generator_value(gen("D"), gen("K"), N).eq_values(HSeries.hbar(-1, N))
    # F-pair on length <= 2 monomials (defects reported at the provable order)
    F_full = engine._F
    if f_order is not None:
        engine._F = F_full.truncate(f_order)
    try:
        samples_x = [normalize((gen("E", a),), NONNEG_LEFT, table)
                     for a in range(-mode_bound, mode_bound + 1)]
        samples_x += [normalize((gen("E", a), gen("E", b)), NONNEG_LEFT, table)
                      for a in range(-2, 3) for b in range(-2, 3)]
        for x in samples_x:
            d = engine.f_pair_right(x) - x
            checked += 1
            if not d.is_zero():
                bad.append(("F-pair-right", x.sort_key(), str(d)[:120]))
        samples_y = [normalize((gen("F", a),), NONNEG_LEFT, table)
                     for a in range(-mode_bound, mode_bound + 1)]
        samples_y += [normalize((gen("F", a), gen("F", b)), NONNEG_LEFT, table)
                      for a in range(-2, 3) for b in range(-2, 3)]
        for y in samples_y:
            d = engine.f_pair_left(y) - y
            checked += 1
            if not d.is_zero():
                bad.append(("F-pair-left", y.sort_key(), str(d)[:120]))
    finally:
        engine._F = F_full
    # orthogonality families
    def elem(*gs):
        return normalize(tuple(gs), NONNEG_LEFT, table)

    nonneg_f = [elem(gen("F", 0), gen("F", 1)), elem(gen("F", 2), gen("F", 0)), elem(gen("F", 3))]
    neg_f = [elem(gen("F", -1), gen("F", -2)), elem(gen("F", -3), gen("F", -1)), elem(gen("F", -2))]
    nonneg_e = [elem(gen("E", 0), gen("E", 1)), elem(gen("E", 2))]
    neg_e = [elem(gen("E", -1), gen("E", -2)), elem(gen("E", -2))]
    for n in (0, 1):
        for a in (gen("E", -1), gen("E", 2), gen("E", -3)):
            x = normalize((gen("E", n), a), NONNEG_LEFT, table)
            for u in nonneg_f:
                checked += 1
                if not engine.pair_elements(x, u).is_zero():
                    bad.append(("orthog-1", n, a))
    for n in (-1, -2):
        for b in (gen("F", 0), gen("F", 1)):
            y = normalize((gen("F", n), b), NONNEG_LEFT, table)
            for x in neg_e:
                checked += 1
                if not engine.pair_elements(x, y).is_zero():
                    bad.append(("orthog-2", n, b))
    for n in (0, 2):
        for b in (gen("F", -1), gen("F", -3)):
            y = normalize((b, gen("F", n)), NONNEG_LEFT, table)
            for x in nonneg_e:
                checked += 1
                if not engine.pair_elements(x, y).is_zero():
                    bad.append(("orthog-3", n, b))
    for n in (-1, -2):
        for a in (gen("E", 1), gen("E", 0)):
            x = normalize((a, gen("E", n)), NONNEG_LEFT, table)
            for u in neg_f:
                checked += 1
                if not engine.pair_elements(x, u).is_zero():
                    bad.append(("orthog-4", n, a))
    return bad, checked
