"""Root data for the orthosymplectic families b/c/d_{m|n}.

Everything static lives here: the index set and parities, the bilinear form,
simple roots, the reduced radical roots Phi+(u) in pair encoding together
with their good Lyndon words, the induced linear order, and the Levi roots
needed when straightening inside the full negative half.

Weights are plain integer tuples of length m+n in the delta basis.  A root
is stored with its delta-vector (so b-type (1,1) is -delta_1, Levi (i,j) is
delta_i - delta_j); the weight of the corresponding root vector is the
negative of that.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Tuple

from .qscalar import Scalar

Weight = Tuple[int, ...]
Word = Tuple[int, ...]

FAMILIES = ("b", "c", "d")


@dataclass(frozen=True)
class AlgebraType:
    family: str
    m: int
    n: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError("family must be one of %s" % (FAMILIES,))
        if self.m < 2:
            raise ValueError("m >= 2 is required")
        if self.n < 1:
            raise ValueError("n >= 1 is required")

    @property
    def rank(self) -> int:
        return self.m + self.n

    @property
    def r_g(self) -> int:
        return 2 if self.family == "b" else 1

    def __str__(self):
        return "%s(%d|%d)" % (self.family, self.m, self.n)


def wt_zero(g: AlgebraType) -> Weight:
    return (0,) * g.rank


def wt_add(a: Weight, b: Weight) -> Weight:
    return tuple(x + y for x, y in zip(a, b))


def wt_sub(a: Weight, b: Weight) -> Weight:
    return tuple(x - y for x, y in zip(a, b))


def wt_neg(a: Weight) -> Weight:
    return tuple(-x for x in a)


def delta(g: AlgebraType, a: int) -> Weight:
    """delta_a for 1 <= a <= m+n."""
    return tuple(1 if k == a - 1 else 0 for k in range(g.rank))


def simple_roots(g: AlgebraType) -> List[Weight]:
    """alpha_0, ..., alpha_{m+n-1}."""
    out = []
    if g.family == "b":
        out.append(wt_neg(delta(g, 1)))
    elif g.family == "c":
        out.append(tuple(-2 if k == 0 else 0 for k in range(g.rank)))
    else:
        out.append(wt_neg(wt_add(delta(g, 1), delta(g, 2))))
    for i in range(1, g.rank):
        out.append(wt_sub(delta(g, i), delta(g, i + 1)))
    return out


def bilinear(g: AlgebraType, mu: Weight, nu: Weight) -> int:
    """(mu|nu) with (delta_a|delta_b) = (-1)^{eps_a} r_g delta_ab."""
    r = g.r_g
    s = 0
    for a in range(g.rank):
        t = mu[a] * nu[a]
        s += t if a < g.m else -t
    return r * s


def q_factor_parts(g: AlgebraType, mu: Weight, nu: Weight) -> Tuple[int, int]:
    """q(mu, nu) as (sign, exponent) with value sign * q^exponent."""
    r = g.r_g
    even = odd = 0
    for a in range(g.rank):
        t = mu[a] * nu[a]
        if a < g.m:
            even += t
        else:
            odd += t
    return (-1 if odd % 2 else 1), r * (even - odd)


def q_factor(g: AlgebraType, mu: Weight, nu: Weight) -> Scalar:
    sign, k = q_factor_parts(g, mu, nu)
    return Scalar.monomial(sign, k)


def qi_exponent(g: AlgebraType, i: int) -> int:
    """d_i with q_i = q^{d_i}; the isotropic direction uses q_m = q^{r_g}."""
    if i == g.m:
        return g.r_g
    a = simple_roots(g)[i]
    return abs(bilinear(g, a, a)) // 2


# -- words ------------------------------------------------------------------

def is_lyndon(word: Word) -> bool:
    """True when the word is strictly smaller than each of its proper suffixes."""
    if not word:
        return False
    return all(word < word[s:] for s in range(1, len(word)))


def weight_of_word(g: AlgebraType, word: Word) -> Weight:
    alphas = simple_roots(g)
    w = wt_zero(g)
    for let in word:
        w = wt_add(w, alphas[let])
    return w


class Root:
    """A reduced positive root: radical kind 'u' in pair encoding (i <= j),
    or Levi kind 'l' meaning delta_i - delta_j (i < j)."""

    __slots__ = ("kind", "i", "j")

    def __init__(self, kind: str, i: int, j: int):
        self.kind, self.i, self.j = kind, i, j

    def __eq__(self, other):
        return (isinstance(other, Root) and self.kind == other.kind
                and self.i == other.i and self.j == other.j)

    def __hash__(self):
        return hash((self.kind, self.i, self.j))

    def __repr__(self):
        if self.kind == "u":
            return "(%d,%d)" % (self.i, self.j)
        return "[d%d-d%d]" % (self.i, self.j)


def _rng(a: int, b: int) -> Word:
    return tuple(range(a, b + 1))


def _lyndon_u(g: AlgebraType, i: int, j: int) -> Word:
    """Good Lyndon word of the radical root (i, j)."""
    f = g.family
    if f == "b":
        if i == j:
            return _rng(0, i - 1)
        return _rng(0, i - 1) + _rng(0, j - 1)
    if f == "c":
        if i == 1 and j == 1:
            return (0,)
        if i == 1:
            return _rng(0, j - 1)
        return _rng(0, j - 1) + _rng(1, i - 1)
    # d
    if (i, j) == (1, 2):
        return (0,)
    if i == 1:
        return (0,) + _rng(2, j - 1)
    return (0,) + _rng(2, j - 1) + _rng(1, i - 1)


class RootSystem:
    """All per-algebra root tables, built once and cached."""

    def __init__(self, g: AlgebraType):
        self.g = g
        m, n, rank = g.m, g.n, g.rank

        pairs = []
        if g.family == "b":
            pairs += [(i, i) for i in range(1, rank + 1)]
        elif g.family == "c":
            pairs += [(i, i) for i in range(1, m + 1)]
        else:
            pairs += [(i, i) for i in range(m + 1, rank + 1)]
        pairs += [(i, j) for i in range(1, rank + 1) for j in range(i + 1, rank + 1)]

        u = sorted((Root("u", i, j) for (i, j) in pairs),
                   key=lambda r: _lyndon_u(g, r.i, r.j))
        levi = sorted((Root("l", i, j)
                       for i in range(1, rank + 1) for j in range(i + 1, rank + 1)),
                      key=lambda r: _rng(r.i, r.j - 1))
        self.u_roots: List[Root] = u
        self.l_roots: List[Root] = levi
        self.roots: List[Root] = u + levi
        self.n_u = len(u)
        self.pos: Dict[Root, int] = {r: p for p, r in enumerate(self.roots)}

        self.word: List[Word] = []
        self.beta: List[Weight] = []     # the root as a delta-vector
        self.fweight: List[Weight] = []  # weight of the root vector = -beta
        self.ht: List[int] = []
        self.norm: List[int] = []
        self.parity: List[str] = []      # 'even' | 'iso' | 'odd'
        for r in self.roots:
            if r.kind == "u":
                w = _lyndon_u(g, r.i, r.j)
            else:
                w = _rng(r.i, r.j - 1)
            beta = weight_of_word(g, w)
            self.word.append(w)
            self.beta.append(beta)
            self.fweight.append(wt_neg(beta))
            self.ht.append(len(w))
            nrm = bilinear(g, beta, beta)
            self.norm.append(nrm)
            if nrm == 0:
                self.parity.append("iso")
            elif r.kind == "u" and g.family == "b" and r.i == r.j and r.i > m:
                self.parity.append("odd")
            else:
                self.parity.append("even")

        self.word_to_pos = {w: p for p, w in enumerate(self.word)}
        self.alphas = simple_roots(g)
        # position of each simple root vector f_i inside the root list
        self.simple_pos: List[int] = []
        for i in range(rank):
            tgt = self.alphas[i]
            self.simple_pos.append(next(p for p in range(len(self.roots))
                                        if self.beta[p] == tgt))

    # -- lookups ------------------------------------------------------------

    def upos(self, i: int, j: int) -> int:
        return self.pos[Root("u", i, j)]

    def root_of_weight(self, beta: Weight):
        for p, b in enumerate(self.beta):
            if b == beta:
                return p
        return None

    def is_phi_weight(self, w: Weight) -> bool:
        """Membership of w in the full (unreduced) root system Phi."""
        g = self.g
        nz = [(a, x) for a, x in enumerate(w) if x]
        if len(nz) == 2:
            return abs(nz[0][1]) == 1 and abs(nz[1][1]) == 1
        if len(nz) != 1:
            return False
        a, x = nz[0]
        a += 1
        if abs(x) == 1:
            return g.family == "b"
        if abs(x) == 2:
            if g.family == "b":
                return a > g.m
            if g.family == "c":
                return a <= g.m
            return a > g.m
        return False

    def ht_of_weight(self, beta: Weight) -> int:
        """The height functional, normalized so every simple root has height 1."""
        g = self.g
        if g.family == "b":
            s = -sum((a + 1) * x for a, x in enumerate(beta))
        elif g.family == "c":
            s2 = -sum((2 * a + 1) * x for a, x in enumerate(beta))
            if s2 % 2:
                raise ValueError("weight not in the root lattice")
            s = s2 // 2
        else:
            s = -sum(a * x for a, x in enumerate(beta))
        return s


def costandard_factorization(rs: RootSystem, p: int) -> Tuple[int, int, int]:
    """Split a non-simple root into (p1, p2, r) with l(beta) = l(beta1) l(beta2).

    Among all splittings beta = gamma1 + gamma2 into positive roots with
    l(gamma1) < l(gamma2), the concatenation l(gamma1) l(gamma2) is maximized
    and ties are broken by taking l(beta1) maximal.  r is the largest integer
    with beta1 - r*beta2 still a root.  The exceptional d-type definition of
    f_{-2 delta_{u+1}} is applied by the caller.
    """
    beta = rs.beta[p]
    best = None
    for p1 in range(len(rs.roots)):
        b2 = wt_sub(beta, rs.beta[p1])
        p2 = rs.root_of_weight(b2)
        if p2 is None:
            continue
        w1, w2 = rs.word[p1], rs.word[p2]
        if not w1 < w2:
            continue
        key = (w1 + w2, w1)
        if best is None or key > best[0]:
            best = (key, p1, p2)
    if best is None:
        raise ValueError("no costandard factorization for %r" % (rs.roots[p],))
    (concat, _), p1, p2 = best
    if concat != rs.word[p]:
        raise AssertionError("factorization does not recover the Lyndon word")
    b1, b2 = rs.beta[p1], rs.beta[p2]
    r = 0
    while rs.is_phi_weight(wt_sub(b1, tuple((r + 1) * x for x in b2))):
        r += 1
    return p1, p2, r


def bracket_divisor(rs: RootSystem, p1: int, p2: int, r: int,
                    odd_braces: bool = False) -> Scalar:
    """[r+1] in the flavor of the smaller-norm factor (1 when r = 0)."""
    from .qscalar import ONE, q_int, q_odd_int
    if r == 0:
        return ONE
    if rs.norm[p1] <= rs.norm[p2]:
        ps = p1
    else:
        ps = p2
    nrm = rs.norm[ps]
    if nrm == 0:
        raise ValueError("isotropic minimal factor with r > 0")
    d = abs(nrm) // 2
    if odd_braces and rs.parity[ps] == "odd":
        return q_odd_int(r + 1, d)
    return q_int(r + 1, d)


@lru_cache(maxsize=None)
def _root_system(family: str, m: int, n: int) -> RootSystem:
    return RootSystem(AlgebraType(family, m, n))


def root_system(g: AlgebraType) -> RootSystem:
    return _root_system(g.family, g.m, g.n)


def lyndon_word(g: AlgebraType, root: Root) -> Word:
    rs = root_system(g)
    if root not in rs.pos:
        raise ValueError("%r is not a reduced positive root of %s" % (root, g))
    return rs.word[rs.pos[root]]


def radical_roots(g: AlgebraType) -> List[Root]:
    """Phi+(u) in increasing Lyndon order."""
    return list(root_system(g).u_roots)


def roots_report(g: AlgebraType) -> List[dict]:
    rs = root_system(g)
    out = []
    for p, r in enumerate(rs.u_roots):
        out.append({
            "pos": p + 1,
            "i": r.i,
            "j": r.j,
            "class": {"even": "even", "iso": "isotropic",
                      "odd": "nonisotropic_odd"}[rs.parity[p]],
            "weight": list(rs.beta[p]),
        })
    return out
