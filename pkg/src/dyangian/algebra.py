"""The double Yangian core at level zero: generators, normal ordering into a
PBW-style basis, the derived mode-form relation table, multiplication, the
counit, weight grading, and the four block projections.

Monomials are stored in the canonical block order K, H, E, F, D with each
letter class internally sorted weakly decreasing; the e- and f-blocks are
split by mode sign, and a NormalFormPolicy says which sign class sits left.
"""

from __future__ import annotations

import sys
from fractions import Fraction
from typing import Dict, Iterable, NamedTuple, Tuple

from dyangian.scalars import HSeries
from dyangian.spectral import falling

sys.setrecursionlimit(100000)

__all__ = [
    "Generator",
    "Policy",
    "NONNEG_LEFT",
    "NEG_LEFT",
    "Element",
    "RelationTable",
    "WindowExceededError",
    "EMPTY_MON",
    "gen",
    "word_of_monomial",
    "monomial_weight",
    "derive_relation_table",
    "normalize",
    "mul",
    "counit",
    "project",
    "grade_check",
]

Generator = Tuple[str, int]  # ('E', 3), ('H', -1), ('K', 0), ('D', 0)

_RANK = {"K": 0, "H": 1, "E": 2, "F": 3, "D": 4}


def gen(letter: str, mode: int = 0) -> Generator:
    if letter not in _RANK:
        raise ValueError(f"unknown generator letter {letter!r}")
    if letter in ("K", "D"):
        mode = 0
    return (letter, mode)


class Policy(NamedTuple):
    """Which sign class of e- and f-modes sits on the left in normal form."""

    e_order: str  # 'nonneg_left' | 'neg_left'
    f_order: str


NONNEG_LEFT = Policy("nonneg_left", "nonneg_left")
NEG_LEFT = Policy("neg_left", "neg_left")


class WindowExceededError(RuntimeError):
    """A rewrite needed a relation outside the derived mode window."""


# Monomial: (k_power, h_modes, e_nonneg, e_neg, f_nonneg, f_neg, d_power),
# every mode tuple sorted weakly decreasing.
Monomial = Tuple[int, Tuple[int, ...], Tuple[int, ...], Tuple[int, ...],
                 Tuple[int, ...], Tuple[int, ...], int]

EMPTY_MON: Monomial = (0, (), (), (), (), (), 0)


def monomial_weight(mon: Monomial) -> int:
    k, h, enn, eng, fnn, fng, d = mon
    return sum(h) + sum(enn) + sum(eng) + sum(fnn) + sum(fng) - d


def monomial_letters(mon: Monomial) -> int:
    k, h, enn, eng, fnn, fng, d = mon
    return k + len(h) + len(enn) + len(eng) + len(fnn) + len(fng) + d


def word_of_monomial(mon: Monomial, policy: Policy) -> Tuple[Generator, ...]:
    k, h, enn, eng, fnn, fng, d = mon
    word = [("K", 0)] * k
    word += [("H", m) for m in h]
    eblk = (enn, eng) if policy.e_order == "nonneg_left" else (eng, enn)
    word += [("E", m) for blk in eblk for m in blk]
    fblk = (fnn, fng) if policy.f_order == "nonneg_left" else (fng, fnn)
    word += [("F", m) for blk in fblk for m in blk]
    word += [("D", 0)] * d
    return tuple(word)


def monomial_of_sorted_word(word: Iterable[Generator]) -> Monomial:
    k = d = 0
    h, enn, eng, fnn, fng = [], [], [], [], []
    for letter, m in word:
        if letter == "K":
            k += 1
        elif letter == "D":
            d += 1
        elif letter == "H":
            h.append(m)
        elif letter == "E":
            (enn if m >= 0 else eng).append(m)
        else:
            (fnn if m >= 0 else fng).append(m)
    key = lambda xs: tuple(sorted(xs, reverse=True))
    return (k, key(h), key(enn), key(eng), key(fnn), key(fng), d)


def _in_order(x: Generator, y: Generator, policy: Policy) -> bool:
    """True if the adjacent pair x·y is already in canonical order."""
    (lx, mx), (ly, my) = x, y
    rx, ry = _RANK[lx], _RANK[ly]
    if rx != ry:
        return rx < ry
    if lx in ("K", "D"):
        return True
    if lx == "H":
        return mx >= my
    order = policy.e_order if lx == "E" else policy.f_order
    first_nonneg = order == "nonneg_left"
    cx = 0 if (mx >= 0) == first_nonneg else 1
    cy = 0 if (my >= 0) == first_nonneg else 1
    if cx != cy:
        return cx < cy
    return mx >= my


class Element:
    """Finite linear combination of normal-ordered monomials over HSeries."""

    __slots__ = ("terms", "trunc", "policy")

    def __init__(self, terms: Dict[Monomial, HSeries], trunc: int, policy: Policy = NONNEG_LEFT):
        self.terms = {m: c for m, c in terms.items() if not c.is_zero()}
        self.trunc = trunc
        self.policy = policy

    @staticmethod
    def zero(trunc: int, policy: Policy = NONNEG_LEFT) -> "Element":
        return Element({}, trunc, policy)

    @staticmethod
    def one(trunc: int, policy: Policy = NONNEG_LEFT) -> "Element":
        return Element({EMPTY_MON: HSeries.one(trunc)}, trunc, policy)

    @staticmethod
    def generator(g: Generator, trunc: int, policy: Policy = NONNEG_LEFT) -> "Element":
        return Element({monomial_of_sorted_word([g]): HSeries.one(trunc)}, trunc, policy)

    def is_zero(self) -> bool:
        return not self.terms

    def _compat(self, other: "Element"):
        if self.policy != other.policy:
            raise ValueError("cannot combine elements normalized under different policies")

    def __add__(self, other: "Element") -> "Element":
        self._compat(other)
        t = min(self.trunc, other.trunc)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, HSeries.zero(t)) + c
        return Element(out, t, self.policy)

    def __neg__(self) -> "Element":
        return Element({m: -c for m, c in self.terms.items()}, self.trunc, self.policy)

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, s) -> "Element":
        if isinstance(s, (int, Fraction)):
            return Element({m: c * s for m, c in self.terms.items()}, self.trunc, self.policy)
        out = {m: c * s for m, c in self.terms.items()}
        out = {m: c for m, c in out.items() if not c.is_zero()}
        t = min((c.trunc for c in out.values()),
                default=min(self.trunc + s.effective_val, self.trunc + s.trunc + 1))
        return Element(out, t, self.policy)

    def truncate(self, order: int) -> "Element":
        return Element({m: c.truncate(order) for m, c in self.terms.items()},
                       min(self.trunc, order), self.policy)

    def coeff(self, mon: Monomial) -> HSeries:
        return self.terms.get(mon, HSeries.zero(self.trunc))

    def eq_values(self, other: "Element") -> bool:
        self._compat(other)
        for m in set(self.terms) | set(other.terms):
            if not self.coeff(m).eq_values(other.coeff(m)):
                return False
        return True

    def map_coeffs(self, f) -> "Element":
        out = {m: f(c) for m, c in self.terms.items()}
        t = min((c.trunc for c in out.values()), default=self.trunc)
        return Element(out, t, self.policy)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for m in sorted(self.terms):
            bits.append(f"({self.terms[m]})*{monomial_str(m)}")
        return " + ".join(bits)

    def sort_key(self):
        return tuple(sorted(self.terms))


def monomial_str(mon: Monomial) -> str:
    k, h, enn, eng, fnn, fng, d = mon
    parts = []
    parts += ["K"] * k
    parts += [f"h_{m}" for m in h]
    parts += [f"e_{m}" for m in enn + eng]
    parts += [f"f_{m}" for m in fnn + fng]
    parts += ["D"] * d
    return "*".join(parts) if parts else "1"


class RelationTable:
    """Derived mode-form commutators, plus the normal-form memo built on them.

    Entries are exact Elements at hbar-order N; generator modes beyond the
    derived window raise WindowExceededError instead of silently truncating.
    """

    def __init__(self, N: int, window: int):
        if N < 1 or window < 1:
            raise ValueError("need hbar order >= 1 and window >= 1")
        self.N = N
        self.window = window
        self._comm: Dict[Tuple[Generator, Generator, Policy], Element] = {}
        self._nf: Dict[Tuple[Tuple[Generator, ...], Policy], Element] = {}
        self._ef_by_sum: Dict[Tuple[int, Policy], Element] = {}
        self.max_mode_seen = 0

    # -- window bookkeeping -------------------------------------------
    def _check_mode(self, g: Generator):
        letter, m = g
        if letter in ("K", "D"):
            return
        self.max_mode_seen = max(self.max_mode_seen, abs(m))
        if abs(m) > self.window:
            raise WindowExceededError(
                f"mode {m} of {letter} exceeds derived window {self.window}; "
                f"re-derive with window >= {abs(m)}")

    # -- commutators -----------------------------------------------------
    def commutator(self, x: Generator, y: Generator, policy: Policy = NONNEG_LEFT) -> Element:
        key = (x, y, policy)
        hit = self._comm.get(key)
        if hit is not None:
            return hit
        self._check_mode(x)
        self._check_mode(y)
        out = self._derive(x, y, policy)
        self._comm[key] = out
        self._comm[(y, x, policy)] = -out
        return out

    def _derive(self, x: Generator, y: Generator, policy: Policy) -> Element:
        (lx, mx), (ly, my) = x, y
        N = self.N
        zero = Element.zero(N, policy)
        if lx == "K" or ly == "K":
            return zero
        if lx == "D" and ly == "D":
            return zero
        if lx == "D":  # [D, x_n] = -n x_(n-1)
            if my == 0:
                return zero
            g = gen(ly, my - 1)
            return Element({monomial_of_sorted_word([g]): HSeries.const(-my, N)}, N, policy)
        if ly == "D":
            return -self._derive(y, x, policy)
        if lx == "H" and ly == "H":
            return zero  # level zero: all Cartan modes commute
        if lx == "H" and ly in ("E", "F"):
            return self._h_nilp(mx, ly, my, policy)
        if ly == "H":
            return -self._h_nilp(my, lx, mx, policy)
        if lx == ly:  # E,E or F,F
            return self._same_nilp(lx, mx, my, policy)
        # E,F or F,E
        if lx == "E":
            return self._ef(mx + my, policy)
        return -self._ef(mx + my, policy)

    def _h_nilp(self, a: int, letter: str, m: int, policy: Policy) -> Element:
        """[h_a, e_m] / [h_a, f_m]; sign flips for f."""
        sgn = 1 if letter == "E" else -1
        N = self.N
        terms: Dict[Monomial, HSeries] = {}
        if a >= 0:
            # exact: sum_a c+_a(z) w^a = log((z-w+h)/(z-w)), no hbar tail
            mon = monomial_of_sorted_word([gen(letter, a + m)])
            terms[mon] = HSeries.const(sgn, N)
        else:
            # [h_b, x_m] = +/- (2 sinh(h d)/(h d) w^b) x(w):
            # even-hbar tail with falling-factorial coefficients
            fact = 1
            for j in range(0, N // 2 + 1):
                if j:
                    fact *= (2 * j) * (2 * j + 1)
                coef = Fraction(2 * falling(a, 2 * j) * sgn, fact)
                if coef == 0:
                    continue
                mon = monomial_of_sorted_word([gen(letter, a + m - 2 * j)])
                c = HSeries.hbar(2 * j, N, coef)
                terms[mon] = terms.get(mon, HSeries.zero(N)) + c
        return Element(terms, N, policy)

    def _same_nilp(self, letter: str, v: int, u: int, policy: Policy) -> Element:
        """[x_v, x_u] for x in {e, f}: the telescoped quadratic corrections."""
        if v == u:
            return Element.zero(self.N, policy)
        if v < u:
            return -self._same_nilp(letter, u, v, policy)
        sgn = 1 if letter == "E" else -1
        N = self.N
        out = Element.zero(N, policy)
        gap = v - u
        h1 = HSeries.hbar(1, N, sgn)
        for i in range(gap // 2):
            w1 = (gen(letter, v - 1 - i), gen(letter, u + i))
            w2 = (gen(letter, u + i), gen(letter, v - 1 - i))
            out = out + normalize(w1, policy, self, budget=N - 1).scale(h1) \
                      + normalize(w2, policy, self, budget=N - 1).scale(h1)
        if gap % 2 == 1:
            s = (u + v - 1) // 2
            w = (gen(letter, s), gen(letter, s))
            out = out + normalize(w, policy, self, budget=N - 1).scale(h1)
        return out.truncate(N)

    def _ef(self, s: int, policy: Policy) -> Element:
        """[e_m, f_n] depends on m+n only: Cartan modes of K+ / (K-)^(-1)."""
        key = (s, policy)
        hit = self._ef_by_sum.get(key)
        if hit is not None:
            return hit
        from dyangian import cartan

        N, p = self.N, s + 1
        if p >= 1:
            elem = cartan.kplus_big_mode(p, N + 1)
        elif p == 0:
            elem = Element.one(N + 1) - cartan.kminus_inv_mode(0, N + 1)
        else:
            elem = -cartan.kminus_inv_mode(p, N + 1)
        # divide by hbar and demand regularity (the 1/h of the e-f relation
        # must cancel); a failure here is a derivation bug
        out = Element(
            {m: HSeries(c.val - 1, c.coeffs, c.trunc - 1).assert_regular()
             for m, c in elem.terms.items()},
            N, policy)
        self._ef_by_sum[key] = out
        return out


def normalize(word: Tuple[Generator, ...], policy: Policy, table: RelationTable,
              strategy: str = "leftmost", budget: int | None = None) -> Element:
    """Canonical normal form of a generator word, exact to hbar order `budget`
    (the table's order by default).

    Correction terms whose coefficients carry hbar^v are normalized at budget
    reduced by v; the truncation contracts of HSeries make the composite exact
    at the requested order, and the pruning keeps rewriting chains that only
    matter beyond the truncation from being explored.  `strategy` picks which
    redex to contract first; confluence of the derived rules means the result
    must not depend on it (a verified property).
    """
    word = tuple(word)
    if budget is None:
        budget = table.N
    if budget < 0:
        return Element.zero(0, policy)
    key = (word, policy, strategy, budget)
    hit = table._nf.get(key)
    if hit is not None:
        return hit
    positions = range(len(word) - 1)
    if strategy == "rightmost":
        positions = reversed(positions)
    for i in positions:
        x, y = word[i], word[i + 1]
        if _in_order(x, y, policy):
            continue
        left, right = word[:i], word[i + 2:]
        out = normalize(left + (y, x) + right, policy, table, strategy, budget)
        comm = table.commutator(x, y, policy)
        for mon, c in comm.terms.items():
            v = c.effective_val
            if v > budget:
                continue
            mid = word_of_monomial(mon, policy)
            sub = normalize(left + mid + right, policy, table, strategy, budget - v)
            out = out + sub.scale(c)
        out = out.truncate(budget)
        table._nf[key] = out
        return out
    out = Element({monomial_of_sorted_word(word): HSeries.one(budget)}, budget, policy)
    table._nf[key] = out
    return out


def mul(a: Element, b: Element, table: RelationTable) -> Element:
    a._compat(b)
    t = min(a.trunc, b.trunc)
    out = Element.zero(t, a.policy)
    for ma, ca in a.terms.items():
        wa = word_of_monomial(ma, a.policy)
        for mb, cb in b.terms.items():
            c = ca * cb
            if c.is_zero():
                continue
            wb = word_of_monomial(mb, b.policy)
            out = out + normalize(wa + wb, a.policy, table).scale(c)
    return out


def counit(a: Element) -> HSeries:
    return a.terms.get(EMPTY_MON, HSeries.zero(a.trunc))


_PROJ_SPEC = {
    # kind: (normalization class order, block that must be empty)
    "lt0_r": ("nonneg_left", "nonneg"),
    "ge0_l": ("nonneg_left", "neg"),
    "ge0_r": ("neg_left", "neg"),
    "lt0_l": ("neg_left", "nonneg"),
}


def project(a: Element, kind: str, table: RelationTable) -> Element:
    """Block projections Pi_{eta,l/r} on pure-e or pure-f elements."""
    if kind not in _PROJ_SPEC:
        raise ValueError(f"unknown projection {kind!r}")
    letters = set()
    for m in a.terms:
        k, h, enn, eng, fnn, fng, d = m
        if k or h or d:
            raise ValueError("projection requires a pure nilpotent element")
        if enn or eng:
            letters.add("E")
        if fnn or fng:
            letters.add("F")
    if len(letters) > 1:
        raise ValueError("projection requires a single-letter element")
    letter = letters.pop() if letters else "E"
    order, kill = _PROJ_SPEC[kind]
    policy = Policy(order, a.policy.f_order) if letter == "E" else Policy(a.policy.e_order, order)
    renorm = Element.zero(a.trunc, policy)
    for m, c in a.terms.items():
        renorm = renorm + normalize(word_of_monomial(m, a.policy), policy, table).scale(c)
    out: Dict[Monomial, HSeries] = {}
    for m, c in renorm.terms.items():
        k, h, enn, eng, fnn, fng, d = m
        nn, ng = (enn, eng) if letter == "E" else (fnn, fng)
        dead = nn if kill == "nonneg" else ng
        if dead:
            continue  # counit kills a nonempty generator block
        out[m] = c
    # surviving monomials live in a single sign class: policy-neutral
    return Element(out, renorm.trunc, a.policy)


def grade_check(table: RelationTable) -> list:
    """Weight + hbar-degree homogeneity of every derived entry; returns violations."""
    bad = []
    for (x, y, policy), elem in list(table._comm.items()):
        want = _gen_weight(x) + _gen_weight(y)
        for mon, c in elem.terms.items():
            w = monomial_weight(mon)
            for k in range(c.val, c.trunc + 1):
                if c.coeff(k) != 0 and w + k != want:
                    bad.append((x, y, mon, k))
    return bad


def _gen_weight(g: Generator) -> int:
    letter, m = g
    if letter == "K":
        return 0
    if letter == "D":
        return -1
    return m


def derive_relation_table(N: int, window: int) -> RelationTable:
    """Materialize all commutators for modes in [-window, window] and check
    regularity (no surviving hbar pole) plus weight homogeneity."""
    table = RelationTable(N, window)
    letters = ["H", "E", "F"]
    gens = [gen(l, m) for l in letters for m in range(-window, window + 1)]
    gens += [gen("D"), gen("K")]
    for x in gens:
        for y in gens:
            table.commutator(x, y)
    bad = grade_check(table)
    if bad:
        raise AssertionError(f"relation table is not weight-homogeneous: {bad[:3]}")
    return table


# -- serialization for golden-file regression ---------------------------

def element_record(e: Element) -> str:
    bits = []
    for m in sorted(e.terms):
        v, t, cs = e.terms[m].to_record()
        bits.append(f"{monomial_str(m)}:{v}:{t}:{','.join(cs)}")
    return " ; ".join(bits) if bits else "0"


def export_table(table: RelationTable) -> str:
    lines = [f"# relation table N={table.N} window={table.window}"]
    for (x, y, policy) in sorted(table._comm):
        if policy != NONNEG_LEFT:
            continue
        e = table._comm[(x, y, policy)]
        lines.append(f"({x[0]},{x[1]})x({y[0]},{y[1]})\t{element_record(e)}")
    return "\n".join(lines) + "\n"
